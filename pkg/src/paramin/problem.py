"""Problem model: a parametric minimization instance and its file loader.

A problem bundles the parameter domain, decision domain, cost expression
u(x, y), and feasible-mapping expression Phi(x), together with bounded
analysis windows used by samplers when a domain is unbounded.  Problem
files are TOML documents; the exact expression grammar is published in
docs/grammar.txt and is a compatibility surface.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from . import expr as ex
from . import setexpr as sx
from .affine import PWA, NonAffineError, reduce_affine
from .scalars import ExtendedReal, TaggedPoint, parse_point
from .sets import IntervalSet, intersect, union_sets


class ProblemFormatError(ValueError):
    """Problem document violates the schema or its declared invariants."""


@dataclass
class Problem:
    """Immutable-by-convention description of inf over Phi(x) of u(x, .)."""

    name: str
    x_domain: IntervalSet
    y_domain: IntervalSet
    u: ex.Expr
    phi: sx.SetExpr
    x_window: IntervalSet
    y_window: IntervalSet
    nonempty_required: bool = True
    float_is_irrational: bool = False
    notes: str = ""
    _phi_cache: dict = field(default_factory=dict, repr=False)
    _reduce_cache: dict = field(default_factory=dict, repr=False)
    _value_cache: dict = field(default_factory=dict, repr=False)
    _level_cache: dict = field(default_factory=dict, repr=False)
    _breakpoints: Optional[tuple] = field(default=None, repr=False)

    # -- evaluation ----------------------------------------------------------

    def eval_u(self, x: TaggedPoint, y) -> ExtendedReal:
        return ex.eval_expr(self.u, x, y, float_is_irrational=self.float_is_irrational)

    def eval_phi(self, x: TaggedPoint) -> IntervalSet:
        hit = self._phi_cache.get(x)
        if hit is None:
            hit = sx.eval_set(self.phi, x, float_is_irrational=self.float_is_irrational)
            if len(self._phi_cache) < 20000:
                self._phi_cache[x] = hit
        return hit

    def reduce_u_at(self, x: TaggedPoint) -> PWA:
        """Piecewise-affine reduction of u(x, .) in y; raises NonAffineError."""
        hit = self._reduce_cache.get(x)
        if hit is None:
            env = {"x": x, "__float_is_irrational__": self.float_is_irrational}
            hit = reduce_affine(self.u, "y", env)
            if len(self._reduce_cache) < 20000:
                self._reduce_cache[x] = hit
        return hit

    @property
    def value_cache(self) -> dict:
        return self._value_cache

    @property
    def mentions_rationality(self) -> bool:
        return ex.mentions_is_rational(self.u) or self._phi_mentions_rationality()

    def _phi_mentions_rationality(self) -> bool:
        def walk(s) -> bool:
            if isinstance(s, sx.SetInterval):
                return any(e is not None and ex.mentions_is_rational(e) for e in (s.lo, s.hi))
            if isinstance(s, sx.SetUnion):
                return any(walk(i) for i in s.items)
            if isinstance(s, sx.SetIf):
                return (
                    ex.mentions_is_rational(s.pred)
                    or walk(s.if_true)
                    or walk(s.if_false)
                )
            return False

        return walk(self.phi)

    # -- structure -----------------------------------------------------------

    def x_breakpoints(self) -> tuple[TaggedPoint, ...]:
        """Parameter values where u or Phi changes shape, within the window."""
        if self._breakpoints is not None:
            return self._breakpoints
        pts: set[TaggedPoint] = set()
        for e in sx.set_breakpoints_in_x(self.phi):
            pts.update(_x_roots(e))
        pts.update(_x_kinks_of_cost(self.u))
        for e in _phi_endpoint_exprs(self.phi):
            pts.update(_x_singularities(e))
        window = self.x_window
        out = tuple(sorted(p for p in pts if intersect(window, self.x_domain).member(p)))
        self._breakpoints = out
        return out


def _phi_endpoint_exprs(s: sx.SetExpr) -> list[ex.Expr]:
    if isinstance(s, sx.SetInterval):
        return [e for e in (s.lo, s.hi) if e is not None]
    if isinstance(s, sx.SetUnion):
        out = []
        for i in s.items:
            out.extend(_phi_endpoint_exprs(i))
        return out
    if isinstance(s, sx.SetIf):
        return _phi_endpoint_exprs(s.if_true) + _phi_endpoint_exprs(s.if_false)
    return []


def _x_roots(e: ex.Expr) -> list[TaggedPoint]:
    """Roots (and kink points) of an x-only expression, exactly."""
    if "y" in ex.free_vars(e):
        return []
    try:
        pwa = reduce_affine(e, "x", {})
    except (NonAffineError, ex.EvalError):
        return []
    out: list[TaggedPoint] = []
    for ap in pwa:
        if ap.seg.lo.is_finite:
            out.append(ap.seg.lo.as_tagged())
        if ap.seg.hi.is_finite:
            out.append(ap.seg.hi.as_tagged())
        if ap.error:
            continue
        if ap.b != TaggedPoint.of(0):
            root = -ap.a / ap.b
            if ap.seg.member(ExtendedReal.of(root)):
                out.append(root)
    return out


def _x_singularities(e: ex.Expr) -> list[TaggedPoint]:
    """Boundary points of error regions (e.g. 1/x at 0) of an x-only expression."""
    if "y" in ex.free_vars(e):
        return []
    try:
        pwa = reduce_affine(e, "x", {})
    except (NonAffineError, ex.EvalError):
        return []
    out = []
    for ap in pwa:
        if ap.error:
            if ap.seg.lo.is_finite:
                out.append(ap.seg.lo.as_tagged())
            if ap.seg.hi.is_finite:
                out.append(ap.seg.hi.as_tagged())
    return out


def _x_kinks_of_cost(u: ex.Expr) -> list[TaggedPoint]:
    """x-only kink loci of the cost: predicate boundaries and abs/min/max args."""
    out: list[TaggedPoint] = []

    def visit(node):
        if isinstance(node, (ex.Const, ex.Var)):
            return
        if isinstance(node, ex.Neg) or isinstance(node, ex.Abs):
            if isinstance(node, ex.Abs):
                out.extend(_x_roots(node.arg))
            visit(node.arg)
            return
        if isinstance(node, ex.Bin):
            visit(node.lhs)
            visit(node.rhs)
            return
        if isinstance(node, ex.MinMax):
            out.extend(_x_roots(ex.Bin("-", node.lhs, node.rhs)))
            visit(node.lhs)
            visit(node.rhs)
            return
        if isinstance(node, ex.Indicator):
            visit_pred(node.pred)
            return
        if isinstance(node, ex.Piecewise):
            visit_pred(node.pred)
            visit(node.if_true)
            visit(node.if_false)
            return

    def visit_pred(p):
        if isinstance(p, ex.Cmp):
            out.extend(_x_roots(ex.Bin("-", p.lhs, p.rhs)))
            visit(p.lhs)
            visit(p.rhs)

    visit(u)
    return out


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProblemDocument:
    """A parsed problem file: the problem plus corpus metadata."""

    problem: Optional[Problem]
    focus_x: Optional[TaggedPoint]
    lam: Optional[Fraction]
    expected: dict[str, str]
    anchor: str
    skip: bool
    example: str
    variant: str
    name: str


def _parse_constant_set(text: str, what: str) -> IntervalSet:
    try:
        node = sx.parse_set_expr(text)
    except ex.ParseError as exc:
        raise ProblemFormatError(f"{what}: {exc}") from None
    if sx.set_free_vars(node):
        raise ProblemFormatError(f"{what} must be a constant set, got {text!r}")
    try:
        return sx.eval_set(node, TaggedPoint.of(0))
    except sx.SetEvalError as exc:
        raise ProblemFormatError(f"{what}: {exc}") from None


def _default_window(domain: IntervalSet, fallback_halfwidth: int = 2) -> IntervalSet:
    if domain.is_empty:
        raise ProblemFormatError("domain is empty")
    if domain.is_bounded:
        return IntervalSet.closed(domain.inf_value(), domain.sup_value())
    lo = domain.inf_value()
    hi = domain.sup_value()
    w_lo = lo if lo.is_finite else ExtendedReal.of(-fallback_halfwidth)
    w_hi = hi if hi.is_finite else ExtendedReal.of(fallback_halfwidth)
    return IntervalSet.closed(w_lo, w_hi)


def problem_from_dict(doc: dict[str, Any], name_hint: str = "") -> ProblemDocument:
    if not isinstance(doc, dict):
        raise ProblemFormatError("problem document must be a table")
    name = str(doc.get("name", name_hint or "unnamed"))
    skip = bool(doc.get("skip", False))
    anchor = str(doc.get("anchor", ""))
    example = str(doc.get("example", ""))
    variant = str(doc.get("variant", ""))
    focus = doc.get("focus", {})
    focus_x = None
    lam = None
    if isinstance(focus, dict):
        if "x" in focus:
            focus_x = parse_point(str(focus["x"]))
        if "lambda" in focus:
            lam = Fraction(str(focus["lambda"]))
    expected = {str(k): str(v) for k, v in doc.get("expected", {}).items()}
    for key, val in expected.items():
        if val not in ("HOLDS", "FAILS"):
            raise ProblemFormatError(f"expected[{key!r}] must be HOLDS or FAILS, got {val!r}")

    if skip:
        return ProblemDocument(None, focus_x, lam, expected, anchor, True, example, variant, name)

    for req in ("x_domain", "y_domain", "u", "phi"):
        if req not in doc:
            raise ProblemFormatError(f"missing required field {req!r}")

    x_domain = _parse_constant_set(str(doc["x_domain"]), "x_domain")
    y_domain = _parse_constant_set(str(doc["y_domain"]), "y_domain")
    try:
        u = ex.parse_expr(str(doc["u"]))
    except ex.ParseError as exc:
        raise ProblemFormatError(f"u: {exc}") from None
    bad = ex.free_vars(u) - {"x", "y"}
    if bad:
        raise ProblemFormatError(f"u mentions unknown variables {sorted(bad)}")
    try:
        phi = sx.parse_set_expr(str(doc["phi"]))
    except ex.ParseError as exc:
        raise ProblemFormatError(f"phi: {exc}") from None
    bad = sx.set_free_vars(phi) - {"x"}
    if bad:
        raise ProblemFormatError(f"phi may only mention x, found {sorted(bad)}")

    x_window = (
        _parse_constant_set(str(doc["x_window"]), "x_window")
        if "x_window" in doc
        else _default_window(x_domain)
    )
    y_window = (
        _parse_constant_set(str(doc["y_window"]), "y_window")
        if "y_window" in doc
        else _default_window(y_domain, fallback_halfwidth=4)
    )
    for wname, w in (("x_window", x_window), ("y_window", y_window)):
        if not w.is_bounded or w.is_empty:
            raise ProblemFormatError(f"{wname} must be a nonempty bounded set")

    p = Problem(
        name=name,
        x_domain=x_domain,
        y_domain=y_domain,
        u=u,
        phi=phi,
        x_window=x_window,
        y_window=y_window,
        nonempty_required=bool(doc.get("nonempty_required", True)),
        float_is_irrational=bool(doc.get("float_is_irrational", False)),
        notes=str(doc.get("notes", "")),
    )
    _validate_problem(p, focus_x)
    return ProblemDocument(p, focus_x, lam, expected, anchor, False, example, variant, name)


def _sample_grid(p: Problem, focus_x: Optional[TaggedPoint], n: int = 9) -> list[TaggedPoint]:
    region = intersect(p.x_window, p.x_domain)
    if region.is_empty:
        raise ProblemFormatError("x_window does not meet x_domain")
    lo, hi = region.inf_value(), region.sup_value()
    pts: list[TaggedPoint] = []
    if focus_x is not None and region.member(focus_x):
        pts.append(focus_x)
    for k in range(n + 1):
        cand = (lo + (hi - lo) * ExtendedReal.of(Fraction(k, n))).as_tagged()
        if region.member(cand):
            pts.append(cand)
    pts.extend(b for b in p.x_breakpoints() if region.member(b))
    seen = []
    for q in sorted(set(pts)):
        seen.append(q)
    return seen


def _validate_problem(p: Problem, focus_x: Optional[TaggedPoint]) -> None:
    if focus_x is not None and not p.x_domain.member(focus_x):
        raise ProblemFormatError(f"focus x={focus_x.text()} is outside x_domain")
    for q in _sample_grid(p, focus_x):
        try:
            img = p.eval_phi(q)
        except sx.SetEvalError as exc:
            raise ProblemFormatError(str(exc)) from None
        if p.nonempty_required and img.is_empty:
            raise ProblemFormatError(f"phi({q.text()}) is empty but nonempty_required = true")
        if not img.subset_of(p.y_domain):
            raise ProblemFormatError(
                f"phi({q.text()}) = {img.text()} is not contained in y_domain {p.y_domain.text()}"
            )


def load_document(path) -> ProblemDocument:
    try:
        with open(path, "rb") as fh:
            doc = _toml.load(fh)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ProblemFormatError(f"cannot parse {path}: {exc}") from None
    import os

    hint = os.path.splitext(os.path.basename(str(path)))[0]
    return problem_from_dict(doc, name_hint=hint)


def load_problem(path) -> Problem:
    """Load and validate a problem file; corpus metadata is ignored."""
    doc = load_document(path)
    if doc.problem is None:
        raise ProblemFormatError(f"{doc.name} is a skip stub with no executable problem")
    return doc.problem
