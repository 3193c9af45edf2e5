"""Value function, solution sets, level sets, and the truncated problem.

The primary path reduces u(x, .) to an exact piecewise-affine function of
y (see :mod:`paramin.affine`) and reads infima, attainment, argmin sets,
and sublevel sets directly off the pieces, endpoint flags included.  Costs
that are not piecewise affine in y fall back to a Chebyshev grid with
golden-section refinement; the fallback reports float endpoints and uses
an epsilon band for attainment decisions.

The truncation construction patches the feasible mapping to the lambda
sublevel set anchored at a parameter point and patches the cost to its
anchored version wherever the sublevel set is empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from . import expr as ex
from .affine import AffinePiece, NonAffineError, restrict
from .scalars import NEG_INF, POS_INF, ExtendedReal, TaggedPoint
from .sets import Interval, IntervalSet, intersect, normalize, piece, union_sets

LambdaLike = Union[int, float, Fraction, TaggedPoint, ExtendedReal]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class AnchorEmptyError(ValueError):
    """The truncated mapping is empty at its anchor; the construction is undefined."""


@dataclass(frozen=True)
class MinResult:
    value: ExtendedReal
    attained: bool
    argmin: IntervalSet
    evaluations: int

    @property
    def feasible(self) -> bool:
        return self.value < POS_INF or self.attained


@dataclass(frozen=True)
class BudgetPlan:
    grid_points: int = 257
    golden_tol: float = 1e-10
    endpoint_eps: float = 1e-9
    tol_argmin: float = 1e-9
    ray_probe_depth: int = 40


DEFAULT_BUDGET = BudgetPlan()


def value(p, x: TaggedPoint, plan: Optional[BudgetPlan] = None) -> MinResult:
    """v(x) = inf over Phi(x) of u(x, .), with attainment and argmin."""
    plan = plan or DEFAULT_BUDGET
    cache = p.value_cache
    hit = cache.get(x)
    if hit is not None:
        return hit
    feasible = p.eval_phi(x)
    if feasible.is_empty:
        res = MinResult(POS_INF, False, IntervalSet.empty(), 0)
        cache[x] = res
        return res
    try:
        pwa = p.reduce_u_at(x)
    except NonAffineError:
        res = _numeric_value(p, x, feasible, plan)
        cache[x] = res
        return res
    try:
        overlaps = restrict(pwa, feasible)
    except ex.EvalError as exc:
        raise ex.EvalError(str(exc), x=x) from None
    res = _exact_value(overlaps)
    cache[x] = res
    return res


def _exact_value(overlaps: list[tuple[Interval, AffinePiece]]) -> MinResult:
    best = POS_INF
    contributions: list[tuple[ExtendedReal, bool, Optional[Interval]]] = []
    for seg, ap in overlaps:
        if ap.b == TaggedPoint.of(0):
            v = ExtendedReal.of(ap.a)
            contributions.append((v, True, seg))
        elif ap.b.sign() > 0:
            if not seg.lo.is_finite:
                contributions.append((NEG_INF, False, None))
            else:
                v = ExtendedReal.of(ap.a) + ExtendedReal.of(ap.b) * seg.lo
                pt = piece(seg.lo, seg.lo) if seg.lo_closed else None
                contributions.append((v, seg.lo_closed, pt))
        else:
            if not seg.hi.is_finite:
                contributions.append((NEG_INF, False, None))
            else:
                v = ExtendedReal.of(ap.a) + ExtendedReal.of(ap.b) * seg.hi
                pt = piece(seg.hi, seg.hi) if seg.hi_closed else None
                contributions.append((v, seg.hi_closed, pt))
        if contributions[-1][0] < best:
            best = contributions[-1][0]
    attained = any(att and v == best for v, att, _ in contributions)
    pieces = [pt for v, att, pt in contributions if att and v == best and pt is not None]
    argmin = normalize(pieces) if (attained and best.is_finite) else IntervalSet.empty()
    return MinResult(best, attained and best.is_finite, argmin, len(overlaps))


def solution_set(p, x: TaggedPoint, tol: Optional[float] = None) -> IntervalSet:
    """Minimizer set at x: exact equality set, or a sublevel band when tol is given."""
    res = value(p, x)
    if not res.value.is_finite:
        return IntervalSet.empty() if res.value == NEG_INF or res.argmin.is_empty else res.argmin
    if tol is None:
        return res.argmin
    return level_set(p, x, res.value + ExtendedReal.of(tol))


def level_set(p, x: TaggedPoint, lam: LambdaLike, plan: Optional[BudgetPlan] = None) -> IntervalSet:
    """{y in Phi(x) : u(x, y) <= lam} as a canonical interval set."""
    lam_x = _as_level(lam)
    cache = getattr(p, "_level_cache", None)
    key = (x, lam_x) if cache is not None else None
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    feasible = p.eval_phi(x)
    if feasible.is_empty:
        return IntervalSet.empty()
    try:
        pwa = p.reduce_u_at(x)
    except NonAffineError:
        return _numeric_level_set(p, x, feasible, lam_x, plan or DEFAULT_BUDGET)
    try:
        overlaps = restrict(pwa, feasible)
    except ex.EvalError as exc:
        raise ex.EvalError(str(exc), x=x) from None
    out = []
    for seg, ap in overlaps:
        if ap.b == TaggedPoint.of(0):
            if ExtendedReal.of(ap.a) <= lam_x:
                out.append(seg)
            continue
        if not lam_x.is_finite:
            if lam_x.is_pos_inf:
                out.append(seg)
            continue
        bound = (lam_x - ExtendedReal.of(ap.a)) / ExtendedReal.of(ap.b)
        if ap.b.sign() > 0:
            cut = _clip_piece(seg, NEG_INF, bound, False, True)
        else:
            cut = _clip_piece(seg, bound, POS_INF, True, False)
        if cut is not None:
            out.append(cut)
    result = normalize(out)
    if cache is not None and len(cache) < 200000:
        cache[key] = result
    return result


def _as_level(lam: LambdaLike) -> ExtendedReal:
    if isinstance(lam, ExtendedReal):
        return lam
    if isinstance(lam, (int, Fraction)):
        return ExtendedReal.of(TaggedPoint.of(lam))
    if isinstance(lam, TaggedPoint):
        return ExtendedReal.of(lam)
    return ExtendedReal.of(lam)


def _clip_piece(seg: Interval, lo, hi, lo_closed: bool, hi_closed: bool) -> Optional[Interval]:
    new_lo, new_lo_closed = seg.lo, seg.lo_closed
    new_hi, new_hi_closed = seg.hi, seg.hi_closed
    if lo > new_lo:
        new_lo, new_lo_closed = lo, lo_closed
    elif lo == new_lo:
        new_lo_closed = new_lo_closed and lo_closed if lo.is_finite else new_lo_closed
    if hi < new_hi:
        new_hi, new_hi_closed = hi, hi_closed
    elif hi == new_hi:
        new_hi_closed = new_hi_closed and hi_closed if hi.is_finite else new_hi_closed
    if new_lo > new_hi:
        return None
    if new_lo == new_hi and not (new_lo_closed and new_hi_closed):
        return None
    return piece(new_lo, new_hi, new_lo_closed, new_hi_closed)


# ---------------------------------------------------------------------------
# Numeric fallback (non-affine costs)
# ---------------------------------------------------------------------------


def _clip_ray(seg: Interval, p, plan: BudgetPlan) -> tuple[float, float]:
    w_lo = p.y_window.inf_value().numeric()
    w_hi = p.y_window.sup_value().numeric()
    pad = 4.0 * max(abs(w_lo), abs(w_hi), 1.0)
    lo = seg.lo.numeric() if seg.lo.is_finite else -pad
    hi = seg.hi.numeric() if seg.hi.is_finite else pad
    return lo, hi


def _sample_points(seg: Interval, p, plan: BudgetPlan) -> list[float]:
    lo, hi = _clip_ray(seg, p, plan)
    if hi - lo <= 0:
        return [lo]
    n = plan.grid_points
    # Chebyshev nodes cluster near endpoints, where kinks and flags live
    pts = [0.5 * (lo + hi) + 0.5 * (hi - lo) * math.cos(math.pi * k / (n - 1)) for k in range(n)]
    if seg.lo.is_finite:
        pts.append(seg.lo.numeric() + (0 if seg.lo_closed else plan.endpoint_eps))
    if seg.hi.is_finite:
        pts.append(seg.hi.numeric() - (0 if seg.hi_closed else plan.endpoint_eps))
    return sorted(set(pts))


def _feval(p, x: TaggedPoint, y: float) -> float:
    try:
        return p.eval_u(x, y).numeric()
    except ex.EvalError:
        return math.inf


def _numeric_value(p, x: TaggedPoint, feasible: IntervalSet, plan: BudgetPlan) -> MinResult:
    evals = 0
    best_v = math.inf
    best_y = None
    for seg in feasible.pieces:
        pts = _sample_points(seg, p, plan)
        vals = []
        for yv in pts:
            vals.append(_feval(p, x, yv))
            evals += 1
        for i, v in enumerate(vals):
            if v < best_v:
                best_v, best_y = v, pts[i]
        # golden refinement around the best three local brackets
        order = sorted(range(len(vals)), key=lambda i: vals[i])[:3]
        for i in order:
            a = pts[max(0, i - 1)]
            b = pts[min(len(pts) - 1, i + 1)]
            yv, v = _golden(lambda t: _feval(p, x, t), a, b, plan.golden_tol)
            evals += 64
            if v < best_v:
                best_v, best_y = v, yv
        if not seg.lo.is_finite or not seg.hi.is_finite:
            tail_v, diverges = _ray_trend(p, x, seg, plan)
            evals += 2 * plan.ray_probe_depth
            if diverges:
                return MinResult(NEG_INF, False, IntervalSet.empty(), evals)
            if tail_v < best_v:
                best_v, best_y = tail_v, None
    if best_y is None and not math.isfinite(best_v):
        return MinResult(POS_INF, False, IntervalSet.empty(), evals)
    val = ExtendedReal.of(best_v)
    attained = True
    if best_y is not None:
        for seg in feasible.pieces:
            for endpoint, closed in ((seg.lo, seg.lo_closed), (seg.hi, seg.hi_closed)):
                if endpoint.is_finite and not closed and abs(endpoint.numeric() - best_y) <= plan.endpoint_eps:
                    attained = False
    argmin = (
        intersect(_numeric_level_set(p, x, feasible, val + ExtendedReal.of(plan.tol_argmin), plan), feasible)
        if attained
        else IntervalSet.empty()
    )
    return MinResult(val, attained, argmin, evals)


def _ray_trend(p, x: TaggedPoint, seg: Interval, plan: BudgetPlan) -> tuple[float, bool]:
    best = math.inf
    diverging = False
    for sign, infinite in ((1.0, not seg.hi.is_finite), (-1.0, not seg.lo.is_finite)):
        if not infinite:
            continue
        base = 0.0
        if sign > 0 and seg.lo.is_finite:
            base = seg.lo.numeric()
        if sign < 0 and seg.hi.is_finite:
            base = seg.hi.numeric()
        vals = []
        for k in range(plan.ray_probe_depth):
            yv = base + sign * (2.0 ** k)
            vals.append(_feval(p, x, yv))
        finite = [v for v in vals if math.isfinite(v)]
        if finite:
            best = min(best, min(finite))
        tail = vals[-6:]
        if all(b < a - 1e-9 for a, b in zip(tail, tail[1:])):
            diverging = True
    return best, diverging


def _golden(f, a: float, b: float, tol: float) -> tuple[float, float]:
    if b - a <= tol:
        m = 0.5 * (a + b)
        return m, f(m)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    best = min((f1, x1), (f2, x2))
    return best[1], best[0]


def _numeric_level_set(p, x: TaggedPoint, feasible: IntervalSet, lam: ExtendedReal, plan: BudgetPlan) -> IntervalSet:
    lam_f = lam.numeric()
    out = []
    for seg in feasible.pieces:
        pts = _sample_points(seg, p, plan)
        if len(pts) == 1:
            if _feval(p, x, pts[0]) <= lam_f:
                out.append(piece(pts[0], pts[0]))
            continue
        vals = [_feval(p, x, yv) for yv in pts]
        below = [v <= lam_f for v in vals]
        i = 0
        while i < len(pts):
            if not below[i]:
                i += 1
                continue
            j = i
            while j + 1 < len(pts) and below[j + 1]:
                j += 1
            lo = pts[i] if i == 0 else _bisect_boundary(p, x, lam_f, pts[i - 1], pts[i])
            hi = pts[j] if j == len(pts) - 1 else _bisect_boundary(p, x, lam_f, pts[j + 1], pts[j])
            lo_v, hi_v = min(lo, hi), max(lo, hi)
            first, last = (i == 0), (j == len(pts) - 1)
            pc = piece(
                seg.lo if (first and not seg.lo.is_finite) else lo_v,
                seg.hi if (last and not seg.hi.is_finite) else hi_v,
                seg.lo_closed if first else True,
                seg.hi_closed if last else True,
            )
            if pc is not None:
                out.append(pc)
            i = j + 1
    return normalize(out)


def _bisect_boundary(p, x: TaggedPoint, lam_f: float, outside: float, inside: float) -> float:
    for _ in range(60):
        mid = 0.5 * (outside + inside)
        if mid == outside or mid == inside:
            break
        if _feval(p, x, mid) <= lam_f:
            inside = mid
        else:
            outside = mid
    return inside


# ---------------------------------------------------------------------------
# Truncation
# ---------------------------------------------------------------------------


@dataclass
class TruncatedProblem:
    """Feasible mapping clipped to the lambda sublevel set, anchored at a point."""

    base: object
    lam: ExtendedReal
    x_anchor: TaggedPoint
    anchor_set: IntervalSet
    anchor_empty: bool
    _value_cache: dict = field(default_factory=dict, repr=False)
    _phi_cache: dict = field(default_factory=dict, repr=False)
    _level_cache: dict = field(default_factory=dict, repr=False)

    @property
    def name(self) -> str:
        return f"{self.base.name}|trunc"

    @property
    def x_domain(self) -> IntervalSet:
        return self.base.x_domain

    @property
    def y_domain(self) -> IntervalSet:
        return self.base.y_domain

    @property
    def x_window(self) -> IntervalSet:
        return self.base.x_window

    @property
    def y_window(self) -> IntervalSet:
        return self.base.y_window

    @property
    def float_is_irrational(self) -> bool:
        return self.base.float_is_irrational

    @property
    def mentions_rationality(self) -> bool:
        return self.base.mentions_rationality

    @property
    def value_cache(self) -> dict:
        return self._value_cache

    def x_breakpoints(self):
        return self.base.x_breakpoints()

    def _level(self, z: TaggedPoint) -> IntervalSet:
        hit = self._phi_cache.get(z)
        if hit is None:
            hit = level_set(self.base, z, self.lam)
            if len(self._phi_cache) < 20000:
                self._phi_cache[z] = hit
        return hit

    def eval_phi(self, z: TaggedPoint) -> IntervalSet:
        ls = self._level(z)
        return ls if ls.is_nonempty else self.anchor_set

    def eval_u(self, z: TaggedPoint, y) -> ExtendedReal:
        if self._level(z).is_nonempty:
            return self.base.eval_u(z, y)
        return self.base.eval_u(self.x_anchor, y)

    def reduce_u_at(self, z: TaggedPoint):
        if self._level(z).is_nonempty:
            return self.base.reduce_u_at(z)
        return self.base.reduce_u_at(self.x_anchor)


def truncate(p, lam: LambdaLike, x: TaggedPoint) -> TruncatedProblem:
    """Build the anchored sublevel truncation of p at level lam around x."""
    lam_x = _as_level(lam)
    anchor = level_set(p, x, lam_x)
    return TruncatedProblem(p, lam_x, x, anchor, anchor.is_empty)


def truncated_value(tp: TruncatedProblem, z: TaggedPoint, plan: Optional[BudgetPlan] = None) -> MinResult:
    """Value of the truncated problem at z; undefined when the anchor is empty."""
    if tp.anchor_empty:
        raise AnchorEmptyError(
            f"truncated mapping is empty at its anchor x={tp.x_anchor.text()}"
        )
    return value(tp, z, plan)


def truncated_solution_set(tp: TruncatedProblem, z: TaggedPoint, tol: Optional[float] = None) -> IntervalSet:
    if tp.anchor_empty:
        raise AnchorEmptyError(
            f"truncated mapping is empty at its anchor x={tp.x_anchor.text()}"
        )
    return solution_set(tp, z, tol)
