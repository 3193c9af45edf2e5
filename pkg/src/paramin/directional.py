"""Exact directional limits of the cost on the product space.

For costs in the expression DSL, discontinuities sit on affine loci
(predicate boundaries and kink lines).  The one-sided limit of the cost
along a line through a point is computed exactly with first-order jet
arithmetic: values carry an exact pair (a, b) standing for a + b*eps with
eps an infinitesimal, ordered lexicographically, so indicator branches
and kinks resolve exactly as they would for small positive parameters.
Probing the line directions of every affine subexpression, their
mediants, and the axes enters every wedge of the local arrangement and
decides product-space semicontinuity at a point without sampling.

Rationality-gated costs split into the rational and irrational branches
(every rationality test replaced by a constant); both branch limits count
wherever the parameter can tilt off the anchor, since both branches are
dense.

Used as a fast path: a point that passes here is semicontinuous on the
whole product space, hence also along the graph.  Points that fail (or
costs outside the tractable class) fall back to the sequence checkers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import expr as ex
from .scalars import ExtendedReal, TaggedPoint

Direction = tuple[Fraction, Fraction]

_TP_ZERO = TaggedPoint.of(0)


class _JetPole(ArithmeticError):
    """Division blew up along the probe; the limit is not first-order."""


# ---------------------------------------------------------------------------
# Probe directions
# ---------------------------------------------------------------------------


def affine_coeffs(e) -> Optional[tuple[Fraction, Fraction, Fraction]]:
    """(a, b, c) with e == a*x + b*y + c when e is globally affine, else None."""
    if isinstance(e, ex.Const):
        return (Fraction(0), Fraction(0), e.value)
    if isinstance(e, ex.Var):
        if e.name == "x":
            return (Fraction(1), Fraction(0), Fraction(0))
        if e.name == "y":
            return (Fraction(0), Fraction(1), Fraction(0))
        return None
    if isinstance(e, ex.Neg):
        t = affine_coeffs(e.arg)
        return None if t is None else (-t[0], -t[1], -t[2])
    if isinstance(e, ex.Bin):
        lt, rt = affine_coeffs(e.lhs), affine_coeffs(e.rhs)
        if lt is None or rt is None:
            return None
        if e.op == "+":
            return (lt[0] + rt[0], lt[1] + rt[1], lt[2] + rt[2])
        if e.op == "-":
            return (lt[0] - rt[0], lt[1] - rt[1], lt[2] - rt[2])
        if e.op == "*":
            if lt[0] == lt[1] == 0:
                return (lt[2] * rt[0], lt[2] * rt[1], lt[2] * rt[2])
            if rt[0] == rt[1] == 0:
                return (rt[2] * lt[0], rt[2] * lt[1], rt[2] * lt[2])
            return None
        if rt[0] == rt[1] == 0 and rt[2] != 0:
            return (lt[0] / rt[2], lt[1] / rt[2], lt[2] / rt[2])
        return None
    return None


def _norm_dir(dx: Fraction, dy: Fraction) -> Direction:
    if dx == 0 and dy == 0:
        return (Fraction(1), Fraction(0))
    if dx < 0 or (dx == 0 and dy < 0):
        dx, dy = -dx, -dy
    scale = max(abs(dx), abs(dy))
    return (dx / scale, dy / scale)


def _collect_locus_directions(e, out: set[Direction]):
    def note(arg):
        t = affine_coeffs(arg)
        if t is not None and (t[0] != 0 or t[1] != 0):
            out.add(_norm_dir(t[1], -t[0]))  # along the locus a x + b y + c = 0

    if isinstance(e, (ex.Const, ex.Var)):
        return
    if isinstance(e, ex.Neg):
        _collect_locus_directions(e.arg, out)
    elif isinstance(e, ex.Abs):
        note(e.arg)
        _collect_locus_directions(e.arg, out)
    elif isinstance(e, ex.Bin):
        _collect_locus_directions(e.lhs, out)
        _collect_locus_directions(e.rhs, out)
        if e.op == "/":
            note(e.rhs)
    elif isinstance(e, ex.MinMax):
        note(ex.Bin("-", e.lhs, e.rhs))
        _collect_locus_directions(e.lhs, out)
        _collect_locus_directions(e.rhs, out)
    elif isinstance(e, ex.Indicator):
        _collect_pred(e.pred, out)
    elif isinstance(e, ex.Piecewise):
        _collect_pred(e.pred, out)
        _collect_locus_directions(e.if_true, out)
        _collect_locus_directions(e.if_false, out)


def _collect_pred(p, out):
    if isinstance(p, ex.Cmp):
        t = affine_coeffs(ex.Bin("-", p.lhs, p.rhs))
        if t is not None and (t[0] != 0 or t[1] != 0):
            out.add(_norm_dir(t[1], -t[0]))
        _collect_locus_directions(p.lhs, out)
        _collect_locus_directions(p.rhs, out)


def probe_directions(u) -> list[Direction]:
    """Locus directions, axes, a diagonal reserve, and angular mediants."""
    import math

    dirs: set[Direction] = set()
    _collect_locus_directions(u, dirs)
    dirs.add((Fraction(1), Fraction(0)))
    dirs.add((Fraction(0), Fraction(1)))
    for m in (1, -1, 2, -2):
        dirs.add(_norm_dir(Fraction(1), Fraction(m)))
    ordered = sorted(dirs, key=lambda d: math.atan2(float(d[1]), float(d[0])))
    mediants = [_norm_dir(a[0] + b[0], a[1] + b[1]) for a, b in zip(ordered, ordered[1:])]
    return sorted(set(ordered) | set(mediants))


# ---------------------------------------------------------------------------
# Rationality branches
# ---------------------------------------------------------------------------


def split_rationality(u) -> list[tuple[object, str]]:
    """Branches with every rationality test fixed: [(ast, tag)], tag in
    {'any'} or {'rational', 'irrational'}."""
    if not ex.mentions_is_rational(u):
        return [(u, "any")]
    return [(_fix_rationality(u, True), "rational"), (_fix_rationality(u, False), "irrational")]


def _fix_rationality(e, flag: bool):
    zero = ex.Const(Fraction(0))
    fixed = ex.Cmp("==", zero, zero) if flag else ex.Cmp("!=", zero, zero)

    def build(node):
        if isinstance(node, (ex.Const, ex.Var)):
            return node
        if isinstance(node, ex.Neg):
            return ex.Neg(build(node.arg))
        if isinstance(node, ex.Abs):
            return ex.Abs(build(node.arg))
        if isinstance(node, ex.Bin):
            return ex.Bin(node.op, build(node.lhs), build(node.rhs))
        if isinstance(node, ex.MinMax):
            return ex.MinMax(node.op, build(node.lhs), build(node.rhs))
        if isinstance(node, ex.Indicator):
            return ex.Indicator(build_pred(node.pred))
        if isinstance(node, ex.Piecewise):
            return ex.Piecewise(build_pred(node.pred), build(node.if_true), build(node.if_false))
        raise TypeError(f"not an expression node: {node!r}")

    def build_pred(p):
        if isinstance(p, ex.IsRational):
            return fixed
        return ex.Cmp(p.op, build(p.lhs), build(p.rhs))

    return build(e)


# ---------------------------------------------------------------------------
# First-order jets
# ---------------------------------------------------------------------------


class Jet:
    """a + b*eps with exact components and lexicographic sign."""

    __slots__ = ("a", "b")

    def __init__(self, a: TaggedPoint, b: TaggedPoint):
        self.a = a
        self.b = b

    def sign(self) -> int:
        s = self.a.sign()
        if s != 0:
            return s
        return self.b.sign()

    def __add__(self, o: "Jet") -> "Jet":
        return Jet(self.a + o.a, self.b + o.b)

    def __sub__(self, o: "Jet") -> "Jet":
        return Jet(self.a - o.a, self.b - o.b)

    def __neg__(self) -> "Jet":
        return Jet(-self.a, -self.b)

    def __mul__(self, o: "Jet") -> "Jet":
        # second-order term dropped; ties at both orders resolve to zero
        return Jet(self.a * o.a, self.a * o.b + self.b * o.a)

    def __truediv__(self, o: "Jet") -> "Jet":
        if o.a.sign() != 0:
            inv_a = TaggedPoint.of(1) / o.a
            # 1/(a + b eps) = 1/a - (b/a^2) eps + O(eps^2)
            inv = Jet(inv_a, -(o.b * inv_a * inv_a))
            return self * inv
        if o.b.sign() == 0:
            raise ZeroDivisionError("division by an identically zero jet")
        if self.a.sign() == 0:
            # (b1 eps) / (b2 eps) -> b1/b2 at first order
            return Jet(self.b / o.b, _TP_ZERO)
        raise _JetPole("finite over vanishing divisor")

    def abs(self) -> "Jet":
        return -self if self.sign() < 0 else self


def _jet_eval(e, jx: Jet, jy: Jet) -> Jet:
    if isinstance(e, ex.Const):
        return Jet(TaggedPoint.of(e.value), _TP_ZERO)
    if isinstance(e, ex.Var):
        return jx if e.name == "x" else jy
    if isinstance(e, ex.Neg):
        return -_jet_eval(e.arg, jx, jy)
    if isinstance(e, ex.Abs):
        return _jet_eval(e.arg, jx, jy).abs()
    if isinstance(e, ex.Bin):
        lhs = _jet_eval(e.lhs, jx, jy)
        rhs = _jet_eval(e.rhs, jx, jy)
        if e.op == "+":
            return lhs + rhs
        if e.op == "-":
            return lhs - rhs
        if e.op == "*":
            return lhs * rhs
        return lhs / rhs
    if isinstance(e, ex.MinMax):
        lhs = _jet_eval(e.lhs, jx, jy)
        rhs = _jet_eval(e.rhs, jx, jy)
        keep_lhs = (lhs - rhs).sign() <= 0
        if e.op == "max":
            keep_lhs = not keep_lhs
        return lhs if keep_lhs else rhs
    if isinstance(e, ex.Indicator):
        return Jet(TaggedPoint.of(1 if _jet_pred(e.pred, jx, jy) else 0), _TP_ZERO)
    if isinstance(e, ex.Piecewise):
        branch = e.if_true if _jet_pred(e.pred, jx, jy) else e.if_false
        return _jet_eval(branch, jx, jy)
    raise TypeError(f"not an expression node: {e!r}")


def _jet_pred(p, jx: Jet, jy: Jet) -> bool:
    if isinstance(p, ex.IsRational):
        raise _JetPole("rationality tests must be split before a jet probe")
    d = _jet_eval(p.lhs, jx, jy) - _jet_eval(p.rhs, jx, jy)
    s = d.sign()
    if p.op == "<":
        return s < 0
    if p.op == "<=":
        return s <= 0
    if p.op == ">":
        return s > 0
    if p.op == ">=":
        return s >= 0
    if p.op == "==":
        return s == 0
    return s != 0


# ---------------------------------------------------------------------------
# Limit envelope
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DirectionalLimits:
    value: ExtendedReal
    lim_min: ExtendedReal
    lim_max: ExtendedReal
    worst_min: tuple[Direction, int, str]  # (direction, side, branch tag)
    worst_max: tuple[Direction, int, str]

    def lsc_margin(self) -> float:
        return self.value.numeric() - self.lim_min.numeric()

    def usc_margin(self) -> float:
        return self.lim_max.numeric() - self.value.numeric()


def _branch_directions(p, branch_ast) -> list[Direction]:
    cache = getattr(p, "_dir_cache", None)
    if cache is None:
        cache = {}
        try:
            object.__setattr__(p, "_dir_cache", cache)
        except Exception:
            setattr(p, "_dir_cache", cache)
    key = id(branch_ast)
    hit = cache.get(key)
    if hit is None:
        hit = probe_directions(branch_ast)
        cache[(key)] = hit
        cache[("ast", key)] = branch_ast  # keep the ast alive for the id key
    return hit


def _branches(p) -> Optional[list[tuple[object, str]]]:
    u = getattr(p, "u", None)
    if u is None:
        return None
    cache = getattr(p, "_branch_cache", None)
    if cache is None:
        cache = split_rationality(u)
        try:
            object.__setattr__(p, "_branch_cache", cache)
        except Exception:
            setattr(p, "_branch_cache", cache)
    return cache


def directional_limits(p, x0: TaggedPoint, y0) -> Optional[DirectionalLimits]:
    """Exact envelope of one-sided limits at (x0, y0), or None if unavailable."""
    if not isinstance(y0, TaggedPoint):
        return None
    branches = _branches(p)
    if branches is None:
        return None
    try:
        value = p.eval_u(x0, y0)
    except ex.EvalError:
        return None
    anchor_tag = "rational" if x0.is_rational else "irrational"
    lim_lo = lim_hi = None
    worst_lo = worst_hi = None
    for branch_ast, tag in branches:
        for d in _branch_directions(p, branch_ast):
            if d[0] == 0 and tag not in ("any", anchor_tag):
                # a pure-decision direction cannot tilt the parameter off
                # the anchor's rationality class
                continue
            for side in (1, -1):
                jx = Jet(x0, TaggedPoint.of(side * d[0]))
                jy = Jet(y0, TaggedPoint.of(side * d[1]))
                try:
                    lim = ExtendedReal.of(_jet_eval(branch_ast, jx, jy).a)
                except (_JetPole, ZeroDivisionError):
                    return None
                if lim_lo is None or lim < lim_lo:
                    lim_lo, worst_lo = lim, (d, side, tag)
                if lim_hi is None or lim > lim_hi:
                    lim_hi, worst_hi = lim, (d, side, tag)
    if lim_lo is None:
        return None
    return DirectionalLimits(ExtendedReal.of(value), lim_lo, lim_hi, worst_lo, worst_hi)
