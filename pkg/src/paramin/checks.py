"""Certified-witness checkers for semicontinuity and compactness properties.

Every checker is three-valued.  HOLDS means no violation was found at the
given budget (never a proof); FAILS carries a witness that replays
independently of the search; UNKNOWN reports an unsettled trend or a
surrogate that is not faithful for the instance at hand.

Function and graph checks estimate liminf/limsup along geometric
parameter schemes.  Graph checks pick adversarial decision points by
exact minimization of the cost plus a distance penalty that tightens as
the parameter step shrinks: dips traveling toward the focus stay visible
while fixed-distance dips are penalized away.

Set-valued checks classify distance and excess trends along the same
schemes.  Graph-compactness checks build per-scale families of sublevel
sets over shrinking parameter balls.  Points escaping to infinity with
bounded cost certify a compactness failure.  Stray-accumulation
candidates are generated at one ladder depth and certified on a twice
deeper ladder: genuine accumulation points keep being approached at
every scale, while artifacts born at the resolution floor stall at their
own birth scale and are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import minimize as mz
from .affine import NonAffineError, restrict
from .directional import directional_limits
from .expr import EvalError
from .scalars import sqrt2_convergent
from .plans import (
    DIVERGE,
    STALL,
    TOL_GEOM,
    UNSETTLED,
    ZERO,
    Scheme,
    SequencePlan,
    adversarial_offsets,
    classify_trend,
    default_plan,
    tail_max,
    tail_min,
)
from .scalars import ExtendedReal, TaggedPoint
from .sets import (
    IntervalSet,
    accumulation_set,
    closure,
    dist,
    excess,
    gap,
    intersect,
    nearest_point,
    union_sets,
    piece,
)
from .verdicts import (
    ESCAPING_SEQUENCE,
    HOLDS,
    NEIGHBORHOOD_GAP,
    STRAY_ACCUMULATION,
    UNKNOWN,
    VIOLATING_SEQUENCE,
    Verdict,
    Witness,
    fails,
    finalize_witness,
    holds,
    unknown,
)

_TINY = Fraction(1, 1 << 12)


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


def _region(p) -> IntervalSet:
    return intersect(p.x_window, p.x_domain)


def _base_problem(p):
    return p.base if isinstance(p, mz.TruncatedProblem) else p


def _trunc_aux(p) -> dict:
    if isinstance(p, mz.TruncatedProblem):
        return {"trunc_lambda": p.lam.text(), "trunc_anchor": p.x_anchor.text()}
    return {}


def _scheme_sequences(plan: SequencePlan, x: TaggedPoint, domain: IntervalSet, min_len: int = 8):
    out = []
    for scheme in plan.schemes:
        pts = scheme.points(x, domain)
        if len(pts) >= min_len:
            out.append((scheme, pts))
    return out


def _grid_points(p, plan: SequencePlan, focus: Optional[TaggedPoint] = None, twins: bool = True) -> list[TaggedPoint]:
    """Window grid plus breakpoints (plus tagged twins for rationality costs).

    ``twins`` adds tiny offsets beside each breakpoint; checks that probe
    both sides of every grid point through their own ladders can skip them.
    """
    region = _region(p)
    lo, hi = region.inf_value(), region.sup_value()
    pts: set[TaggedPoint] = set()
    if focus is not None and region.member(focus):
        pts.add(focus)
    n = max(2, plan.grid_points)
    for k in range(n + 1):
        cand = (lo + (hi - lo) * ExtendedReal.of(Fraction(k, n))).as_tagged()
        if region.member(cand):
            pts.add(cand)
    for b in p.x_breakpoints():
        if region.member(b):
            pts.add(b)
            if twins:
                for off in (_TINY, -_TINY):
                    nb = TaggedPoint(b.value + off, b.sqrt2_coef)
                    if region.member(nb):
                        pts.add(nb)
    if p.mentions_rationality:
        for g in list(pts):
            twin = TaggedPoint(g.value, g.sqrt2_coef + Fraction(1, 1 << 20))
            if region.member(twin):
                pts.add(twin)
    return sorted(pts)


def _padded_y_window(p) -> IntervalSet:
    w_lo, w_hi = p.y_window.inf_value(), p.y_window.sup_value()
    pad = (w_hi - w_lo) + ExtendedReal.of(2)
    return IntervalSet.closed(w_lo - pad, w_hi + pad)


def sample_y_points(p, x0: TaggedPoint, target: IntervalSet, plan: SequencePlan) -> list[TaggedPoint]:
    """Decision samples inside a set: endpoints, interior grid, cost kinks."""
    if target.is_empty:
        return []
    window = _padded_y_window(p)
    pts: set[TaggedPoint] = set()

    def try_add(v: ExtendedReal):
        if v.is_finite and v.is_exact and target.member(v):
            pts.add(v.as_tagged())

    two = ExtendedReal.of(2)
    for pc in target.pieces:
        lo = pc.lo if pc.lo.is_finite else window.inf_value()
        hi = pc.hi if pc.hi.is_finite else window.sup_value()
        if lo > hi:
            continue
        width = hi - lo
        nudge = ExtendedReal.of(_TINY) if width > ExtendedReal.of(_TINY) * two * two else width / ExtendedReal.of(8)
        try_add(lo)
        try_add(hi)
        try_add(lo + nudge)
        try_add(hi - nudge)
        n = max(2, plan.y_samples)
        for k in range(1, n):
            try_add(lo + width * ExtendedReal.of(Fraction(k, n)))
    try:
        pwa = p.reduce_u_at(x0)
        for ap in pwa:
            for endpoint in (ap.seg.lo, ap.seg.hi):
                try_add(endpoint)
                if endpoint.is_finite:
                    try_add(endpoint + ExtendedReal.of(_TINY))
                    try_add(endpoint - ExtendedReal.of(_TINY))
    except (NonAffineError, EvalError):
        pass
    return sorted(pts)[: 4 * max(8, plan.y_samples)]


# ---------------------------------------------------------------------------
# Scalar function semicontinuity
# ---------------------------------------------------------------------------


def check_lsc_at(
    f: Callable[[TaggedPoint], ExtendedReal],
    a: TaggedPoint,
    plan: SequencePlan,
    domain: Optional[IntervalSet] = None,
    fn_id: str = "custom",
    problem=None,
    sense: str = "lsc",
) -> Verdict:
    """liminf of f along every scheme must reach at least f(a) (minus tol)."""
    sign = -1.0 if sense == "usc" else 1.0
    dom = domain if domain is not None else IntervalSet.whole_line()
    ref = ExtendedReal.of(f(a))
    sref = sign * ref.numeric()
    budget = {"f_evals": 1}
    sequences = _scheme_sequences(plan, a, dom)

    def fval(z: TaggedPoint) -> float:
        budget["f_evals"] += 1
        return ExtendedReal.of(f(z)).numeric()

    # coarse scan for the worst offset before committing sequences
    width = max((s.delta0 for s in plan.schemes), default=Fraction(1, 10))
    worst, worst_val = None, math.inf
    for off in adversarial_offsets(plan, width):
        cand = TaggedPoint(a.value + off, a.sqrt2_coef)
        if not dom.member(cand) or cand == a:
            continue
        v = sign * fval(cand)
        if v < worst_val:
            worst, worst_val = off, v
    if worst is not None and worst_val < sref - plan.tol_check:
        direction = 1 if worst > 0 else -1
        adv = Scheme(f"adv:{worst}", direction, abs(worst) * 2, Fraction(1, 2), max(12, plan.ladder_depth), "none")
        pts = adv.points(a, dom)
        if len(pts) >= 8:
            sequences = sequences + [(adv, pts)]

    any_unknown = False
    for scheme, pts in sequences:
        vals = [sign * fval(xn) for xn in pts]
        kind, _level = classify_trend(_deficits(sref, vals), plan.tol_check)
        if kind in (STALL, DIVERGE):
            w = Witness(
                kind=VIOLATING_SEQUENCE,
                check_id=f"fn_semicontinuity#{fn_id}_{sense}",
                scheme_id=scheme.scheme_id,
                x_seq=tuple(pts),
                limit_claim=f"{sense} fails: the tail stays below the reference value",
                aux={"fn_id": fn_id, "ref_value": ref, "sense": sense, **(_trunc_aux(problem) if problem is not None else {})},
            )
            fw = finalize_witness(
                _base_problem(problem) if problem is not None else None,
                w,
                fn=lambda z: ExtendedReal.of(f(z)).numeric(),
            )
            if fw is not None and fw.violation_margin > plan.tol_check:
                return fails(fw, budget)
            any_unknown = True
        elif kind == UNSETTLED:
            any_unknown = True
    if any_unknown:
        return unknown("values dip below the reference without settling", budget)
    return holds(budget=budget)


def check_usc_at(
    f: Callable[[TaggedPoint], ExtendedReal],
    a: TaggedPoint,
    plan: SequencePlan,
    domain: Optional[IntervalSet] = None,
    fn_id: str = "custom",
    problem=None,
) -> Verdict:
    """Mirror of check_lsc_at through negation."""
    return check_lsc_at(f, a, plan, domain, fn_id=fn_id, problem=problem, sense="usc")


# ---------------------------------------------------------------------------
# Graph-restricted semicontinuity of the cost
# ---------------------------------------------------------------------------


def _penalized_extreme(p, xn, y0, weight: Fraction, radius: Fraction, sign: int, feasible: IntervalSet):
    """Exact argext of sign*u(xn,.) + weight*|y - y0| near y0 over feasible.

    Returns (sign * raw_cost_at_point, point) for the penalized minimizer,
    or None when the window around y0 misses the feasible set.  Reported
    cost is raw (penalty-free); the penalty only steers the search.
    """
    y0x = ExtendedReal.of(y0)
    rad = ExtendedReal.of(TaggedPoint.of(radius))
    window = IntervalSet.closed(y0x - rad, y0x + rad)
    clipped = intersect(feasible, window)
    if clipped.is_empty:
        return None
    overlaps = restrict(p.reduce_u_at(xn), clipped)
    w = TaggedPoint.of(weight)
    s = TaggedPoint.of(sign)
    best = None  # (penalized, point, raw)
    for seg, ap in overlaps:
        if seg.lo < y0x < seg.hi:
            halves = [piece(seg.lo, y0x, seg.lo_closed, True), piece(y0x, seg.hi, True, seg.hi_closed)]
        else:
            halves = [seg]
        for part in halves:
            if part is None:
                continue
            width = part.hi - part.lo
            step = ExtendedReal.of(_TINY)
            if width < step * ExtendedReal.of(8):
                step = width / ExtendedReal.of(8)
            for endpoint, closed in ((part.lo, part.lo_closed), (part.hi, part.hi_closed)):
                ye = endpoint
                if not closed:
                    ye = endpoint + step if endpoint == part.lo else endpoint - step
                if not ye.is_exact:
                    continue
                yt = ye.as_tagged()
                if not clipped.member(yt):
                    continue
                raw = ap.value_at(yt)
                pen = s * raw + w * abs(yt - y0)
                if best is None or pen < best[0]:
                    best = (pen, yt, raw)
    if best is None:
        return None
    _, y_at, raw = best
    return float(sign) * float(raw), y_at


def check_graph_semicontinuity_at(
    p,
    x0: TaggedPoint,
    y0: TaggedPoint,
    plan: SequencePlan,
    sense: str = "lsc",
    product_space: bool = False,
    check_label: str = "u",
) -> Verdict:
    """Semicontinuity of u at (x0, y0) along the graph (or the product space)."""
    sign = -1 if sense == "usc" else 1
    try:
        ref = p.eval_u(x0, y0)
    except EvalError as exc:
        return unknown(f"cost evaluation failed at the focus: {exc}")
    sref = float(sign) * ref.numeric()
    budget = {"window_extrema": 0}
    dom = _region(p)
    depth = plan.schemes[0].depth if plan.schemes else 24
    const_scheme = Scheme("const", 1, Fraction(1, 10), Fraction(1, 2), depth, "none")
    seq_list = [(const_scheme, [x0] * depth)] + _scheme_sequences(plan, x0, dom, min_len=4)
    any_unknown = False
    for scheme, pts in seq_list:
        vals: list[float] = []
        pairs: list[tuple[TaggedPoint, TaggedPoint]] = []
        for n, xn in enumerate(pts, start=1):
            radius = scheme.delta0 * (scheme.ratio ** n) * 4
            weight = Fraction(2 ** ((n + 1) // 2), 1) / max(scheme.delta0, Fraction(1, 1024))
            try:
                feasible = p.y_domain if product_space else p.eval_phi(xn)
                if product_space:
                    feasible = intersect(feasible, _padded_y_window(p))
                got = _penalized_extreme(p, xn, y0, weight, radius, sign, feasible)
            except NonAffineError:
                return unknown("cost is not piecewise affine in y; the graph check needs the exact path")
            except EvalError:
                continue
            budget["window_extrema"] += 1
            if got is None:
                continue
            vals.append(got[0])
            pairs.append((xn, got[1]))
        if len(vals) < 6:
            continue
        kind, _level = classify_trend(_deficits(sref, vals), plan.tol_check)
        if kind in (STALL, DIVERGE):
            w = Witness(
                kind=VIOLATING_SEQUENCE,
                check_id=f"graph_semicontinuity#{check_label}_{sense}",
                scheme_id=scheme.scheme_id,
                x_seq=tuple(t[0] for t in pairs),
                y_seq=tuple(t[1] for t in pairs),
                limit_claim=f"{sense} of the cost fails along the graph near the focus pair",
                aux={
                    "x0": x0.text(),
                    "y0": y0.text(),
                    "ref_value": ref,
                    "sense": sense,
                    "product_space": product_space,
                    **_trunc_aux(p),
                },
            )
            fw = finalize_witness(_base_problem(p), w)
            if fw is not None and fw.violation_margin > plan.tol_check:
                return fails(fw, budget)
            any_unknown = True
        elif kind == UNSETTLED:
            any_unknown = True
    if any_unknown:
        return unknown("cost dips past the reference without settling", budget)
    return holds(budget=budget)


def _deficits(sref: float, vals: list[float]) -> list[float]:
    out = []
    for v in vals:
        d = sref - v
        if math.isnan(d):
            d = 0.0
        out.append(max(0.0, d))
    return out


def check_product_semicontinuity_at(
    p, x0: TaggedPoint, y0: TaggedPoint, plan: SequencePlan, sense: str, check_label: str = "u_xy"
):
    """Exact directional product-space check; None when the fast path cannot run.

    A holds answer here is sound for graph-restricted checks too, since the
    graph is a subset of the product space.
    """
    lim = directional_limits(p, x0, y0)
    if lim is None:
        return None
    margin = lim.lsc_margin() if sense == "lsc" else lim.usc_margin()
    if margin <= plan.tol_check:
        return holds(note="exact directional limits")
    worst = lim.worst_min if sense == "lsc" else lim.worst_max
    w = _directional_witness(p, x0, y0, sense, worst, check_label, lim.value)
    if w is not None and w.violation_margin > plan.tol_check:
        return fails(w)
    return None


def _directional_witness(p, x0, y0, sense, worst, check_label, ref):
    (dx, dy), side, tag = worst
    pairs = []
    for n in range(1, 19):
        t = Fraction(side, 2 ** n) / 4
        if tag == "rational" and not x0.is_rational:
            xn = TaggedPoint(x0.value + x0.sqrt2_coef * sqrt2_convergent(min(2 * n + 2, 60)) + dx * t)
        elif tag == "irrational":
            bump = t * t if x0.sqrt2_coef + t * t != 0 else t * t * 2
            xn = TaggedPoint(x0.value + dx * t, x0.sqrt2_coef + bump)
        else:
            xn = TaggedPoint(x0.value + dx * t, x0.sqrt2_coef)
        yn = TaggedPoint(y0.value + dy * t, y0.sqrt2_coef)
        if p.x_domain.member(xn) and p.y_domain.member(yn):
            pairs.append((xn, yn))
    if len(pairs) < 8:
        return None
    w = Witness(
        kind=VIOLATING_SEQUENCE,
        check_id=f"graph_semicontinuity#{check_label}_{sense}",
        scheme_id=f"dir:{dx},{dy}:side={side}:tag={tag}",
        x_seq=tuple(t[0] for t in pairs),
        y_seq=tuple(t[1] for t in pairs),
        limit_claim=f"{sense} of the cost fails along an exact discontinuity direction",
        aux={
            "x0": x0.text(),
            "y0": y0.text(),
            "ref_value": ref,
            "sense": sense,
            "product_space": True,
            **_trunc_aux(p),
        },
    )
    return finalize_witness(_base_problem(p), w)


def check_graph_semicontinuity_on_set(
    p,
    x0: TaggedPoint,
    ys: IntervalSet,
    plan: SequencePlan,
    sense: str = "lsc",
    product_space: bool = False,
    check_label: str = "u",
) -> Verdict:
    """Conjunction of graph semicontinuity over sampled decision points.

    Each point first tries the exact directional product check: passing it
    settles the point (for graph checks too, by restriction).  Product
    failures are final for product-space checks; for graph checks the
    sequence machinery re-examines the point under the feasibility
    restriction.
    """
    samples = sample_y_points(p, x0, ys, plan)
    if not samples:
        return unknown("no decision samples: the target set is empty")
    worst_unknown = None
    for y0 in samples:
        fast = check_product_semicontinuity_at(p, x0, y0, plan, sense, check_label)
        if fast is not None and fast.holds:
            continue
        if fast is not None and fast.fails and product_space:
            return fast
        v = check_graph_semicontinuity_at(p, x0, y0, plan, sense, product_space, check_label)
        if v.fails:
            return v
        if v.status == UNKNOWN and worst_unknown is None:
            worst_unknown = v
    if worst_unknown is not None:
        return worst_unknown
    return holds(note=f"{len(samples)} decision samples")


# ---------------------------------------------------------------------------
# Set-valued map semicontinuity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SetMap:
    map_id: str
    fn: Callable[[TaggedPoint], IntervalSet]

    def __call__(self, z: TaggedPoint) -> IntervalSet:
        return self.fn(z)


def phi_map(p) -> SetMap:
    return SetMap("phi", p.eval_phi)


def solution_map(p) -> SetMap:
    return SetMap("solution", lambda z: mz.solution_set(p, z))


def level_map(p, lam) -> SetMap:
    lam_t = lam if isinstance(lam, TaggedPoint) else TaggedPoint.of(lam)
    return SetMap(f"level:{lam_t.text()}", lambda z: mz.level_set(p, z, lam_t))


def check_map_lsc_at(p, probe: SetMap, x0: TaggedPoint, plan: SequencePlan) -> Verdict:
    """Every point of the image at x0 must be approached by nearby images."""
    target = probe(x0)
    if target.is_empty:
        raise ValueError("map lower semicontinuity needs a nonempty image at the focus")
    ys = sample_y_points(p, x0, target, plan)
    budget = {"image_evals": 0}
    dom = _region(p)
    any_unknown = False
    for scheme, pts in _scheme_sequences(plan, x0, dom):
        images = []
        kept_x = []
        for xn in pts:
            img = probe(xn)
            budget["image_evals"] += 1
            if img.is_empty:
                continue  # domain-relative: parameters with empty image are skipped
            images.append(img)
            kept_x.append(xn)
        if len(images) < 8:
            continue
        for y in ys:
            dvals = [dist(y, img).numeric() for img in images]
            kind, _level = classify_trend(dvals, plan.tol_check)
            if kind in (STALL, DIVERGE):
                w = Witness(
                    kind=VIOLATING_SEQUENCE,
                    check_id="map_lsc#image",
                    scheme_id=scheme.scheme_id,
                    x_seq=tuple(kept_x),
                    limit_claim="a focus image point stays far from all nearby images",
                    aux={"y_target": y.text(), "map_id": probe.map_id, "x0": x0.text(), **_trunc_aux(p)},
                )
                fw = finalize_witness(_base_problem(p), w)
                if fw is not None:
                    return fails(fw, budget)
                any_unknown = True
            elif kind == UNSETTLED:
                any_unknown = True
    if any_unknown:
        return unknown("image distances did not settle", budget)
    return holds(budget=budget)


def check_map_usc_at(p, probe: SetMap, x0: TaggedPoint, plan: SequencePlan) -> Verdict:
    """Nearby images must not overhang the focus image (excess trend to zero)."""
    target = probe(x0)
    if target.is_empty:
        raise ValueError("map upper semicontinuity needs a nonempty image at the focus")
    budget = {"image_evals": 0}
    dom = _region(p)
    any_unknown = False
    for scheme, pts in _scheme_sequences(plan, x0, dom):
        evals = []
        kept = []
        for xn in pts:
            img = probe(xn)
            budget["image_evals"] += 1
            if img.is_empty:
                continue
            evals.append(excess(img, target).numeric())
            kept.append((xn, img))
        if len(evals) < 8:
            continue
        kind, _level = classify_trend(evals, plan.tol_check)
        if kind in (STALL, DIVERGE):
            xs, ys = [], []
            for xn, img in kept:
                far = _farthest_point(img, target)
                if far is not None:
                    xs.append(xn)
                    ys.append(far)
            if len(xs) >= 8:
                w = Witness(
                    kind=ESCAPING_SEQUENCE if kind == DIVERGE else VIOLATING_SEQUENCE,
                    check_id="map_usc#excess",
                    scheme_id=scheme.scheme_id,
                    x_seq=tuple(xs),
                    y_seq=tuple(ys),
                    limit_claim="nearby image points keep their distance from the focus image",
                    aux={"x0": x0.text(), "map_id": probe.map_id, **_trunc_aux(p)},
                )
                fw = finalize_witness(_base_problem(p), w)
                if fw is not None:
                    return fails(fw, budget)
            any_unknown = True
        elif kind == UNSETTLED:
            any_unknown = True
    if any_unknown:
        return unknown("excess trend did not settle", budget)
    if not target.is_compact:
        return unknown(
            "no violation found, but the excess surrogate is not faithful for a noncompact focus image",
            budget,
        )
    return holds(budget=budget)


def _farthest_point(img: IntervalSet, target: IntervalSet) -> Optional[TaggedPoint]:
    best, best_d = None, None
    for pc in img.pieces:
        for endpoint in (pc.lo, pc.hi):
            if not endpoint.is_finite or not endpoint.is_exact:
                continue
            cand = endpoint.as_tagged()
            if not img.member(cand):
                nudged = _inward_nudge(img, cand, _TINY)
                if nudged is None:
                    continue
                cand = nudged
            d = dist(cand, target)
            if best_d is None or d > best_d:
                best, best_d = cand, d
    return best


def _inward_nudge(img: IntervalSet, y: TaggedPoint, scale: Fraction) -> Optional[TaggedPoint]:
    if img.member(y):
        return y
    for pc in img.pieces:
        width = pc.hi - pc.lo
        step = ExtendedReal.of(TaggedPoint.of(scale))
        if width < step * ExtendedReal.of(8):
            step = width / ExtendedReal.of(8)
        if pc.lo == y and not pc.lo_closed:
            cand = (pc.lo + step).as_tagged()
            if img.member(cand):
                return cand
        if pc.hi == y and not pc.hi_closed:
            cand = (pc.hi - step).as_tagged()
            if img.member(cand):
                return cand
    return None


# ---------------------------------------------------------------------------
# Families over shrinking balls: escapes and stray accumulation points
# ---------------------------------------------------------------------------


def _family_providers(p, x0: TaggedPoint, plan: SequencePlan, depth: int) -> list[tuple[Fraction, list[TaggedPoint]]]:
    """Per-scale provider points x0 +- 2^-k with tagged and seeded variants."""
    dom = p.x_domain
    offsets = adversarial_offsets(plan, Fraction(1, 4), count=6)
    rungs = []
    for k in range(1, depth + 1):
        delta = Fraction(1, 2 ** k)
        rung = []
        for direction in (1, -1):
            cand = TaggedPoint(x0.value + direction * delta, x0.sqrt2_coef)
            if dom.member(cand):
                rung.append(cand)
            if p.mentions_rationality:
                irr = TaggedPoint(x0.value + direction * delta, x0.sqrt2_coef + delta / 2)
                if dom.member(irr):
                    rung.append(irr)
        nxt = Fraction(1, 2 ** (k + 1))
        for off in offsets:
            scaled = off * delta * 2
            if nxt < abs(scaled) <= delta:
                cand = TaggedPoint(x0.value + scaled, x0.sqrt2_coef)
                if dom.member(cand):
                    rung.append(cand)
        rungs.append((delta, rung))
    return rungs


@dataclass
class _FamilyScan:
    escape: Optional[Witness]
    stray: Optional[Witness]
    unknown_flag: bool
    budget: dict


def _scan_family(
    p,
    probe: SetMap,
    x0: TaggedPoint,
    target: IntervalSet,
    plan: SequencePlan,
    lam: Optional[TaggedPoint],
    check_escape: bool = True,
    target_id: str = "phi",
) -> _FamilyScan:
    """Escape/stray scan of the family {probe(x') : |x' - x0| <= 2^-k}."""
    budget = {"image_evals": 0}
    depth = 2 * plan.ladder_depth
    rungs = _family_providers(p, x0, plan, depth)
    base_img = probe(x0)
    window = _padded_y_window(p)
    w_mag = window.magnitude().numeric()
    families: list[IntervalSet] = []
    providers: list[list[tuple[TaggedPoint, IntervalSet]]] = []
    for _delta, rung in rungs:
        fam = base_img
        prov = [(x0, base_img)]
        for xp in rung:
            img = probe(xp)
            budget["image_evals"] += 1
            fam = union_sets(fam, img)
            prov.append((xp, img))
        families.append(fam)
        providers.append(prov)

    unknown_flag = False
    escape_w = None
    if check_escape:
        escape_w, esc_unknown = _escape_witness(p, families, providers, lam, w_mag, x0)
        unknown_flag = unknown_flag or esc_unknown
        if escape_w is not None:
            return _FamilyScan(escape_w, None, unknown_flag, budget)

    clipped = [intersect(f, window) for f in families]
    coarse = clipped[: plan.ladder_depth]
    deltas = [d for d, _ in rungs]
    acc = accumulation_set(list(zip(deltas[: plan.ladder_depth], coarse)), window)
    candidates: set[TaggedPoint] = set()
    for v in acc.points.finite_endpoints():
        if v.is_exact:
            candidates.add(v.as_tagged())
    for v in target.excluded_boundary_points():
        if v.is_exact:
            candidates.add(v.as_tagged())
    stray_w = None
    for s in sorted(candidates):
        if target.member(s):
            continue
        trend = [dist(s, f).numeric() for f in clipped]
        kind, _level = classify_trend(trend, TOL_GEOM)
        if kind == ZERO:
            stray_w = _stray_witness(p, probe, providers, s, lam, x0, target_id)
            if stray_w is not None:
                break
            unknown_flag = True
        elif kind == UNSETTLED and min(trend[-3:]) < plan.tol_check:
            unknown_flag = True
    return _FamilyScan(None, stray_w, unknown_flag, budget)


def _escape_witness(p, families, providers, lam, w_mag, x0) -> tuple[Optional[Witness], bool]:
    mags = [f.magnitude().numeric() if f.is_nonempty else 0.0 for f in families]
    unbounded_rung = next((i for i, f in enumerate(families) if not f.is_bounded), None)
    growing = False
    finite = [m for m in mags if m > 0]
    if len(finite) >= 7 and all(math.isfinite(m) for m in finite):
        growing = finite[-1] > max(4.0 * finite[max(0, len(finite) - 7)], w_mag)
    if unbounded_rung is None and not growing:
        return None, False
    if unbounded_rung is not None:
        for xp, img in providers[unbounded_rung]:
            if not img.is_bounded:
                pairs = _ray_probe_points(xp, img)
                if len(pairs) >= 8:
                    w = _finalize_escape(p, pairs, lam, w_mag, x0)
                    return (w, w is None)
        return None, True
    xs_ys: list[tuple[TaggedPoint, TaggedPoint]] = []
    seen = -math.inf
    for prov in providers:
        best = None
        for xp, img in prov:
            if img.is_empty or not img.is_bounded:
                continue
            m = img.magnitude().numeric()
            top = img.sup_value() if abs(img.sup_value()) >= abs(img.inf_value()) else img.inf_value()
            if not top.is_exact:
                continue
            if best is None or m > best[0]:
                best = (m, xp, top.as_tagged())
        if best is not None and best[0] > seen:
            seen = best[0]
            xs_ys.append((best[1], best[2]))
    if len(xs_ys) < 8:
        return None, True
    w = _finalize_escape(p, xs_ys, lam, w_mag, x0)
    return (w, w is None)


def _ray_probe_points(xp: TaggedPoint, img: IntervalSet) -> list[tuple[TaggedPoint, TaggedPoint]]:
    """Feasible points marching into an unbounded piece of one image."""
    out: list[tuple[TaggedPoint, TaggedPoint]] = []
    for pc in img.pieces:
        if pc.is_bounded:
            continue
        sign = 1 if not pc.hi.is_finite else -1
        anchor = pc.lo if sign > 0 else pc.hi
        base = anchor.as_tagged() if (anchor.is_finite and anchor.is_exact) else TaggedPoint.of(0)
        for j in range(1, 13):
            y = base + TaggedPoint.of(sign * 2 ** j)
            if img.member(y):
                out.append((xp, y))
        if out:
            break
    return out


def _finalize_escape(p, pairs, lam, w_mag, x0) -> Optional[Witness]:
    if len(pairs) < 8:
        return None
    aux = {"threshold": float(w_mag), "x0": x0.text(), **_trunc_aux(p)}
    if lam is not None:
        aux["lambda"] = lam.text()
    w = Witness(
        kind=ESCAPING_SEQUENCE,
        check_id="escape#family",
        scheme_id="ladder:2^-k",
        x_seq=tuple(t[0] for t in pairs),
        y_seq=tuple(t[1] for t in pairs),
        limit_claim="feasible points with bounded cost run off to infinity",
        aux=aux,
    )
    return finalize_witness(_base_problem(p), w)


def _stray_witness(p, probe, providers, s: TaggedPoint, lam, x0, target_id: str = "phi") -> Optional[Witness]:
    xs, ys = [], []
    for rung_idx, prov in enumerate(providers):
        best = None
        for xp, img in prov:
            if img.is_empty:
                continue
            d = dist(s, img)
            if best is None or d < best[0]:
                cand = nearest_point(s, img)
                if not cand.is_exact:
                    continue
                scale = Fraction(1, 2 ** min(rung_idx + 10, 40))
                y = _inward_nudge(img, cand.as_tagged(), scale)
                if y is None:
                    continue
                best = (d, xp, y)
        if best is not None:
            xs.append(best[1])
            ys.append(best[2])
    if len(xs) < 8:
        return None
    tail_gap = abs(ys[-1] - s).numeric() * 4.0 + 1e-9
    aux = {
        "x0": x0.text(),
        "stray_point": s.text(),
        "map_id": probe.map_id,
        "target_id": target_id,
        "tail_gap": float(tail_gap),
        **_trunc_aux(p),
    }
    if lam is not None:
        aux["lambda"] = lam.text()
    w = Witness(
        kind=STRAY_ACCUMULATION,
        check_id="stray#family",
        scheme_id="ladder:2^-k",
        x_seq=tuple(xs),
        y_seq=tuple(ys),
        limit_claim="feasible points accumulate at a point outside the focus image",
        aux=aux,
    )
    return finalize_witness(_base_problem(p), w)


# ---------------------------------------------------------------------------
# Closed graph
# ---------------------------------------------------------------------------


def check_closed_graph(p, probe: SetMap, plan: SequencePlan, focus: Optional[TaggedPoint] = None) -> Verdict:
    """Graph limits must stay in the graph, sampled at grid and breakpoints."""
    budget = {"anchor_points": 0, "image_evals": 0}
    any_unknown = False
    for xa in _grid_points(p, plan, focus, twins=False):
        target = probe(xa)
        if target.is_empty:
            continue
        budget["anchor_points"] += 1
        scan = _scan_family(p, probe, xa, target, plan, lam=None, check_escape=False, target_id=probe.map_id)
        budget["image_evals"] += scan.budget.get("image_evals", 0)
        if scan.stray is not None:
            return fails(scan.stray, budget)
        any_unknown = any_unknown or scan.unknown_flag
    if any_unknown:
        return unknown("graph limit trends did not settle", budget)
    return holds(budget=budget)


# ---------------------------------------------------------------------------
# Compactness checks
# ---------------------------------------------------------------------------


def check_inf_compact(
    p, x0: TaggedPoint, lambdas: Optional[Sequence] = None, plan: Optional[SequencePlan] = None
) -> Verdict:
    """Sublevel sets of u(x0, .) on Phi(x0) compact or empty, over a level grid."""
    plan = plan or default_plan(p)
    res = mz.value(p, x0)
    lams = _level_grid(res.value, lambdas)
    budget = {"level_sets": 0}
    for lam in lams:
        ls = mz.level_set(p, x0, lam)
        budget["level_sets"] += 1
        if ls.is_empty or ls.is_compact:
            continue
        w = _noncompact_witness(p, x0, lam, ls, map_id=f"level:{lam.text()}")
        if w is not None:
            return fails(w, budget)
        return unknown(f"a sublevel set is noncompact but no clean witness formed", budget)
    return holds(note=f"{len(lams)} levels checked", budget=budget)


def _level_grid(v: ExtendedReal, lambdas: Optional[Sequence]) -> list[TaggedPoint]:
    if lambdas is not None:
        return [lam if isinstance(lam, TaggedPoint) else TaggedPoint.of(lam) for lam in lambdas]
    if v.is_finite and v.is_exact:
        base = v.as_tagged()
        offs = (Fraction(-1), Fraction(-1, 2), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4))
        return [base + TaggedPoint.of(o) for o in offs]
    return [TaggedPoint.of(c) for c in (-4, -1, 0, 1, 4)]


def _noncompact_witness(p, x0: TaggedPoint, lam: TaggedPoint, ls: IntervalSet, map_id: str) -> Optional[Witness]:
    if not ls.is_bounded:
        pairs = _ray_probe_points(x0, ls)
        if len(pairs) >= 8:
            w = Witness(
                kind=ESCAPING_SEQUENCE,
                check_id="noncompact#unbounded",
                scheme_id="ray-probe",
                x_seq=tuple(t[0] for t in pairs),
                y_seq=tuple(t[1] for t in pairs),
                limit_claim="the sublevel set contains points of arbitrarily large magnitude",
                aux={
                    "x0": x0.text(),
                    "lambda": lam.text(),
                    "map_id": map_id,
                    "claim": "unbounded",
                    "threshold": 0.0,
                    **_trunc_aux(p),
                },
            )
            return finalize_witness(_base_problem(p), w)
        return None
    for e in ls.excluded_boundary_points():
        if not e.is_exact:
            continue
        t = e.as_tagged()
        ys = []
        for j in range(2, 16):
            cand = _nudge_toward(ls, t, Fraction(1, 2 ** j))
            if cand is not None:
                ys.append(cand)
        if len(ys) >= 8:
            w = Witness(
                kind=VIOLATING_SEQUENCE,
                check_id="noncompact#not_closed",
                scheme_id="endpoint-approach",
                x_seq=tuple([x0] * len(ys)),
                y_seq=tuple(ys),
                limit_claim="the sublevel set approaches a boundary point it excludes",
                aux={
                    "x0": x0.text(),
                    "lambda": lam.text(),
                    "map_id": map_id,
                    "claim": "not_closed",
                    "stray_point": t.text(),
                    **_trunc_aux(p),
                },
            )
            return finalize_witness(_base_problem(p), w)
    return None


def _nudge_toward(s: IntervalSet, e: TaggedPoint, step: Fraction) -> Optional[TaggedPoint]:
    for cand in (e + TaggedPoint.of(step), e - TaggedPoint.of(step)):
        if s.member(cand):
            return cand
    return None


def check_kn_inf_compact_at(
    p,
    x0: TaggedPoint,
    plan: SequencePlan,
    lambdas: Optional[Sequence] = None,
) -> Verdict:
    """Graph lower semicontinuity at x0 plus the bounded-cost accumulation property."""
    feas = p.eval_phi(x0)
    if feas.is_empty:
        return unknown("the feasible set is empty at the focus")
    lsc_part = check_graph_semicontinuity_on_set(p, x0, feas, plan, sense="lsc", check_label="kn_i")
    if lsc_part.fails:
        return lsc_part
    res = mz.value(p, x0)
    lams = _kn_levels(res, lambdas, light=plan.light)
    budget = {"levels": len(lams), "image_evals": 0}
    any_unknown = lsc_part.status == UNKNOWN
    for lam in lams:
        scan = _scan_family(p, level_map(p, lam), x0, feas, plan, lam=lam, check_escape=True)
        budget["image_evals"] += scan.budget.get("image_evals", 0)
        if scan.escape is not None:
            return fails(scan.escape, budget)
        if scan.stray is not None:
            return fails(scan.stray, budget)
        any_unknown = any_unknown or scan.unknown_flag
    if any_unknown:
        return unknown("accumulation trends did not settle", budget)
    return holds(budget=budget)


def _kn_levels(res: mz.MinResult, lambdas: Optional[Sequence], light: bool = False) -> list[TaggedPoint]:
    if lambdas is not None:
        return [lam if isinstance(lam, TaggedPoint) else TaggedPoint.of(lam) for lam in lambdas]
    if res.value.is_finite and res.value.is_exact:
        base = res.value.as_tagged()
        offs = (Fraction(1, 4), Fraction(2)) if light else (Fraction(1, 4), Fraction(1), Fraction(4))
        return [base + TaggedPoint.of(o) for o in offs]
    return [TaggedPoint.of(-1), TaggedPoint.of(1)]


def check_k_inf_compact(
    p,
    k_set: IntervalSet,
    plan: SequencePlan,
    lambdas: Optional[Sequence] = None,
) -> Verdict:
    """Compactness of cost sublevel sets on the graph over a compact parameter set."""
    if not k_set.is_compact or k_set.is_empty:
        raise ValueError("the parameter set must be nonempty and compact")
    if not k_set.subset_of(p.x_domain):
        raise ValueError("the parameter set must lie inside the parameter domain")
    grid = [q for q in _grid_points(p, plan) if k_set.member(q)]
    lo, hi = k_set.inf_value().as_tagged(), k_set.sup_value().as_tagged()
    for q in (lo, hi):
        if q not in grid:
            grid.append(q)
    grid.sort()
    lams = _k_levels(p, grid, lambdas)
    budget = {"grid": len(grid), "levels": len(lams), "image_evals": 0}
    w_mag = _padded_y_window(p).magnitude().numeric()
    any_unknown = False
    anchors = sorted(set(list(p.x_breakpoints()) + [lo, hi]))
    for lam in lams:
        for q in grid:
            ls = mz.level_set(p, q, lam)
            if ls.is_empty or ls.is_compact:
                continue
            w = _noncompact_witness(p, q, lam, ls, map_id=f"level:{lam.text()}")
            if w is not None:
                return fails(w, budget)
            any_unknown = True
        for xa in anchors:
            if not k_set.member(xa):
                continue
            # magnitude divergence approaching the anchor means the graph
            # portion over K is unbounded even with bounded slices
            seq = []
            pts = []
            for j in range(1, 2 * plan.ladder_depth + 1):
                for direction in (1, -1):
                    q = TaggedPoint(xa.value + direction * Fraction(1, 2 ** j), xa.sqrt2_coef)
                    if k_set.member(q):
                        ls = mz.level_set(p, q, lam)
                        budget["image_evals"] += 1
                        if ls.is_nonempty:
                            seq.append(ls.magnitude().numeric())
                            pts.append((q, ls))
            if len(seq) >= 8 and seq[-1] > max(4.0 * max(seq[0], 1.0), w_mag):
                pairs = []
                for q, ls in pts:
                    top = ls.sup_value() if abs(ls.sup_value()) >= abs(ls.inf_value()) else ls.inf_value()
                    if top.is_finite and top.is_exact:
                        pairs.append((q, top.as_tagged()))
                w = _finalize_escape(p, pairs, lam, w_mag, xa)
                if w is not None:
                    return fails(w, budget)
                any_unknown = True
            target_ls = mz.level_set(p, xa, lam)
            scan = _scan_family(
                p, level_map(p, lam), xa, target_ls, plan, lam=lam,
                check_escape=True, target_id=f"level:{lam.text()}",
            )
            budget["image_evals"] += scan.budget.get("image_evals", 0)
            if scan.escape is not None:
                return fails(scan.escape, budget)
            if scan.stray is not None:
                return fails(scan.stray, budget)
            any_unknown = any_unknown or scan.unknown_flag
    if any_unknown:
        return unknown("graph compactness trends did not settle", budget)
    return holds(budget=budget)


def _k_levels(p, grid, lambdas) -> list[TaggedPoint]:
    if lambdas is not None:
        return [lam if isinstance(lam, TaggedPoint) else TaggedPoint.of(lam) for lam in lambdas]
    vals = []
    for q in grid:
        v = mz.value(p, q).value
        if v.is_finite and v.is_exact:
            vals.append(v.as_tagged())
    if not vals:
        return [TaggedPoint.of(-1), TaggedPoint.of(1)]
    v_lo, v_hi = min(vals), max(vals)
    out = [v_lo + TaggedPoint.of(Fraction(1, 4)), v_hi + TaggedPoint.of(1), v_hi + TaggedPoint.of(4)]
    dedup: list[TaggedPoint] = []
    for lam in out:
        if all(lam != q for q in dedup):
            dedup.append(lam)
    return dedup


# ---------------------------------------------------------------------------
# Neighborhood conditions
# ---------------------------------------------------------------------------


def check_condition_iv(p, x0: TaggedPoint, plan: SequencePlan) -> Verdict:
    """Feasible sets near x0 must meet every neighborhood of the minimizer set."""
    target = mz.solution_set(p, x0)
    if target.is_empty:
        return unknown("the minimizer set at the focus is empty; the condition is undefined")
    budget = {"gap_evals": 0}
    dom = _region(p)
    any_unknown = False
    for scheme, pts in _scheme_sequences(plan, x0, dom):
        gaps = []
        kept = []
        for xn in pts:
            img = p.eval_phi(xn)
            budget["gap_evals"] += 1
            if img.is_empty:
                continue
            gaps.append(gap(img, target).numeric())
            kept.append(xn)
        if len(gaps) < 8:
            continue
        kind, _level = classify_trend(gaps, plan.tol_check)
        if kind in (STALL, DIVERGE):
            w = Witness(
                kind=NEIGHBORHOOD_GAP,
                check_id="cond_iv_gap#solution",
                scheme_id=scheme.scheme_id,
                x_seq=tuple(kept),
                limit_claim="nearby feasible sets keep a positive gap to the minimizer set",
                aux={"x0": x0.text(), "target_id": "solution", **_trunc_aux(p)},
            )
            fw = finalize_witness(_base_problem(p), w)
            if fw is not None:
                return fails(fw, budget)
            any_unknown = True
        elif kind == UNSETTLED:
            any_unknown = True
    if any_unknown:
        return unknown("gap trend did not settle", budget)
    return holds(budget=budget)


def check_condition_iii(p, x0: TaggedPoint, lam, plan: SequencePlan) -> Verdict:
    """Nonempty sublevel sets near x0, jointly inside one compact container.

    Scans the ladder from the widest ball down and certifies at the first
    radius where every sampled sublevel set is nonempty and their union
    admits a compact closure; the radius and container are reported in the
    verdict payload.
    """
    lam_t = lam if isinstance(lam, TaggedPoint) else TaggedPoint.of(lam)
    budget = {"level_sets": 1}
    base = mz.level_set(p, x0, lam_t)
    if base.is_empty:
        w = _empty_level_witness(p, x0, lam_t, [x0] * 12)
        if w is not None:
            return fails(w, budget)
        return unknown("the sublevel set at the focus is empty but no witness formed", budget)

    rungs = _family_providers(p, x0, plan, plan.ladder_depth)
    per_rung: list[tuple[Fraction, list[tuple[TaggedPoint, IntervalSet]]]] = []
    for delta, rung in rungs:
        entries = []
        for xp in rung:
            ls = mz.level_set(p, xp, lam_t)
            budget["level_sets"] += 1
            entries.append((xp, ls))
        per_rung.append((delta, entries))

    n = len(per_rung)
    suffix_ok = [True] * (n + 1)
    suffix_union: list[IntervalSet] = [base] * (n + 1)
    union_roll = base
    for k in range(n - 1, -1, -1):
        _delta, entries = per_rung[k]
        rung_ok = all(ls.is_nonempty for _, ls in entries)
        suffix_ok[k] = suffix_ok[k + 1] and rung_ok
        for _, ls in entries:
            union_roll = union_sets(union_roll, ls)
        suffix_union[k] = union_roll

    mags = []
    for _delta, entries in per_rung:
        vals = [ls.magnitude().numeric() for _, ls in entries if ls.is_nonempty]
        if vals:
            mags.append(max(vals))
    growth = len(mags) >= 7 and mags[-1] > max(4.0 * mags[0], _padded_y_window(p).magnitude().numeric())

    for k in range(n):
        if not suffix_ok[k]:
            continue
        u = suffix_union[k]
        if growth or not u.is_bounded:
            continue
        c_set = closure(u)
        delta = per_rung[k][0]
        return Verdict(
            HOLDS,
            0.0,
            None,
            f"certified at radius {delta} with container {c_set.text()} at level {lam_t.text()}",
            {**budget, "radius": str(delta), "container": c_set.text(), "lambda": lam_t.text()},
        )

    empty_pts = [xp for _d, entries in per_rung for xp, ls in entries if ls.is_empty]
    if len(empty_pts) >= 8:
        w = _empty_level_witness(p, x0, lam_t, empty_pts)
        if w is not None:
            return fails(w, budget)
    pairs = []
    for _d, entries in per_rung:
        best = None
        for xp, ls in entries:
            if ls.is_empty:
                continue
            if not ls.is_bounded:
                pairs.extend(_ray_probe_points(xp, ls))
                continue
            top = ls.sup_value() if abs(ls.sup_value()) >= abs(ls.inf_value()) else ls.inf_value()
            if top.is_exact:
                m = ls.magnitude()
                if best is None or m > best[0]:
                    best = (m, xp, top.as_tagged())
        if best is not None:
            pairs.append((best[1], best[2]))
    if len(pairs) >= 8:
        w = _finalize_escape(p, pairs[-16:], lam_t, _padded_y_window(p).magnitude().numeric(), x0)
        if w is not None:
            return fails(w, budget)
    return unknown("no compact container certified and no clean witness formed", budget)


def _empty_level_witness(p, x0: TaggedPoint, lam_t: TaggedPoint, pts: list[TaggedPoint]) -> Optional[Witness]:
    if len(pts) < 8:
        return None
    w = Witness(
        kind=VIOLATING_SEQUENCE,
        check_id="level_empty#cond_iii",
        scheme_id="ladder:2^-k",
        x_seq=tuple(pts[:16]),
        limit_claim="sublevel sets are empty at parameters arbitrarily close to the focus",
        aux={"x0": x0.text(), "lambda": lam_t.text(), **_trunc_aux(p)},
    )
    return finalize_witness(_base_problem(p), w)


def check_kn_global(p, plan: SequencePlan, lambdas: Optional[Sequence] = None) -> Verdict:
    """Window-global graph-compactness in the sublevel-closedness form.

    Checks closedness of the cost sublevel sets on the graph over the
    analysis window (plus escape detection), the form the pointwise
    property is equivalent to when the whole window is in scope.
    """
    grid = _grid_points(p, plan)
    vals = []
    for q in grid:
        v = mz.value(p, q).value
        if v.is_finite and v.is_exact:
            vals.append(v.as_tagged())
    if lambdas is not None:
        lams = [lam if isinstance(lam, TaggedPoint) else TaggedPoint.of(lam) for lam in lambdas]
    elif vals:
        lams = [max(vals) + TaggedPoint.of(Fraction(1, 4)), max(vals) + TaggedPoint.of(1)]
    else:
        lams = [TaggedPoint.of(1)]
    budget = {"anchors": len(grid), "levels": len(lams)}
    any_unknown = False
    for lam in lams:
        for xa in grid:
            target = mz.level_set(p, xa, lam)
            if not target.is_closed:
                w = _noncompact_witness(p, xa, lam, target, map_id=f"level:{lam.text()}")
                if w is not None:
                    return fails(w, budget)
                any_unknown = True
                continue
            scan = _scan_family(
                p, level_map(p, lam), xa, target, plan, lam=lam,
                check_escape=True, target_id=f"level:{lam.text()}",
            )
            if scan.escape is not None:
                return fails(scan.escape, budget)
            if scan.stray is not None:
                return fails(scan.stray, budget)
            any_unknown = any_unknown or scan.unknown_flag
    if any_unknown:
        return unknown("global sublevel-closedness trends did not settle", budget)
    return holds(budget=budget)
