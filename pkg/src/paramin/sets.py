"""Canonical finite unions of one-dimensional intervals.

An :class:`IntervalSet` is an ordered tuple of pairwise disjoint,
non-adjacent :class:`Interval` pieces.  Endpoints are extended reals
(exact tagged points or inexact floats); endpoint flags make membership,
closure, distances, and the one-sided Hausdorff excess decidable.

Conventions:
  * ``dist(p, S) = +inf`` and ``inf over S = +inf`` when ``S`` is empty;
  * an endpoint at +-inf is always open;
  * a degenerate half-open interval (``lo == hi`` with an open flag)
    normalizes away to the empty set;
  * ``is_compact(S) == is_closed(S) and is_bounded(S)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .scalars import NEG_INF, POS_INF, ExtendedReal, TaggedPoint, xr_max, xr_min

PointLike = Union[TaggedPoint, int, float, "ExtendedReal"]


class MalformedIntervalError(ValueError):
    """An interval with lo > hi was supplied where a set piece was expected."""


def _as_endpoint(v) -> ExtendedReal:
    return ExtendedReal.of(v)


@dataclass(frozen=True)
class Interval:
    """A single interval piece with open/closed endpoint flags."""

    lo: ExtendedReal
    hi: ExtendedReal
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lo", _as_endpoint(self.lo))
        object.__setattr__(self, "hi", _as_endpoint(self.hi))
        if self.lo.is_pos_inf or self.hi.is_neg_inf:
            raise MalformedIntervalError("interval endpoints out of order")
        if self.lo > self.hi:
            raise MalformedIntervalError(f"interval has lo > hi: {self}")
        # Infinite endpoints are always open.
        if not self.lo.is_finite:
            object.__setattr__(self, "lo_closed", False)
        if not self.hi.is_finite:
            object.__setattr__(self, "hi_closed", False)
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise MalformedIntervalError(
                "degenerate half-open interval; use piece() to normalize it away"
            )

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi

    @property
    def is_bounded(self) -> bool:
        return self.lo.is_finite and self.hi.is_finite

    def member(self, p: ExtendedReal) -> bool:
        if p < self.lo or p > self.hi:
            return False
        if p == self.lo and not self.lo_closed:
            return False
        if p == self.hi and not self.hi_closed:
            return False
        return True

    def closure_member(self, p: ExtendedReal) -> bool:
        return self.lo <= p <= self.hi

    def text(self) -> str:
        lb = "[" if self.lo_closed else "("
        rb = "]" if self.hi_closed else ")"
        if self.is_singleton:
            return "{%s}" % self.lo.text()
        return f"{lb}{self.lo.text()}, {self.hi.text()}{rb}"

    def __repr__(self) -> str:
        return f"Interval({self.text()})"


def _iv(lo: ExtendedReal, hi: ExtendedReal, lo_closed: bool, hi_closed: bool) -> Interval:
    """Trusted fast interval constructor (endpoints already validated)."""
    out = object.__new__(Interval)
    object.__setattr__(out, "lo", lo)
    object.__setattr__(out, "hi", hi)
    object.__setattr__(out, "lo_closed", lo_closed and lo.is_finite)
    object.__setattr__(out, "hi_closed", hi_closed and hi.is_finite)
    return out


def piece(lo, hi, lo_closed: bool = True, hi_closed: bool = True) -> Optional[Interval]:
    """Build an interval piece, normalizing degenerate half-open ones to None."""
    lo_x, hi_x = _as_endpoint(lo), _as_endpoint(hi)
    if lo_x > hi_x:
        raise MalformedIntervalError(f"interval has lo > hi: ({lo_x.text()}, {hi_x.text()})")
    if lo_x == hi_x:
        if not lo_x.is_finite:
            return None
        if not (lo_closed and hi_closed):
            return None
        return Interval(lo_x, hi_x, True, True)
    return Interval(lo_x, hi_x, lo_closed, hi_closed)


@dataclass(frozen=True)
class IntervalSet:
    """Canonical finite union of interval pieces."""

    pieces: tuple[Interval, ...] = ()

    # -- constructors ------------------------------------------------------

    @staticmethod
    def empty() -> "IntervalSet":
        return _EMPTY

    @staticmethod
    def whole_line() -> "IntervalSet":
        return IntervalSet((Interval(NEG_INF, POS_INF, False, False),))

    @staticmethod
    def point(v) -> "IntervalSet":
        return IntervalSet((Interval(_as_endpoint(v), _as_endpoint(v)),))

    @staticmethod
    def closed(lo, hi) -> "IntervalSet":
        return normalize([Interval(_as_endpoint(lo), _as_endpoint(hi))])

    @staticmethod
    def of(*pieces_: Optional[Interval]) -> "IntervalSet":
        return normalize([p for p in pieces_ if p is not None])

    # -- basic predicates ----------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def is_nonempty(self) -> bool:
        return bool(self.pieces)

    @property
    def is_bounded(self) -> bool:
        return all(p.is_bounded for p in self.pieces)

    @property
    def is_closed(self) -> bool:
        return all(
            (not p.lo.is_finite or p.lo_closed) and (not p.hi.is_finite or p.hi_closed)
            for p in self.pieces
        )

    @property
    def is_compact(self) -> bool:
        return self.is_closed and self.is_bounded

    def inf_value(self) -> ExtendedReal:
        """Infimum of the set; +inf for the empty set."""
        return POS_INF if self.is_empty else self.pieces[0].lo

    def sup_value(self) -> ExtendedReal:
        return NEG_INF if self.is_empty else self.pieces[-1].hi

    def magnitude(self) -> ExtendedReal:
        """sup of |y| over the set; -inf convention never arises (empty -> 0)."""
        if self.is_empty:
            return ExtendedReal.of(0)
        return xr_max(abs(self.inf_value()), abs(self.sup_value()))

    def member(self, p: PointLike) -> bool:
        q = _as_endpoint(p)
        return any(pc.member(q) for pc in self.pieces)

    def excluded_boundary_points(self) -> list[ExtendedReal]:
        """Finite points in closure(S) but not in S (the open endpoints)."""
        out = []
        for pc in self.pieces:
            if pc.lo.is_finite and not pc.lo_closed:
                out.append(pc.lo)
            if pc.hi.is_finite and not pc.hi_closed:
                out.append(pc.hi)
        return out

    def finite_endpoints(self) -> list[ExtendedReal]:
        out = []
        for pc in self.pieces:
            if pc.lo.is_finite:
                out.append(pc.lo)
            if pc.hi.is_finite and pc.hi != pc.lo:
                out.append(pc.hi)
        return out

    def text(self) -> str:
        if self.is_empty:
            return "{}"
        return " U ".join(p.text() for p in self.pieces)

    def __repr__(self) -> str:
        return f"IntervalSet({self.text()})"

    # -- algebra (delegates to module functions) -----------------------------

    def closure(self) -> "IntervalSet":
        return closure(self)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        return intersect(self, other)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return union_sets(self, other)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return difference(self, other)

    def complement(self) -> "IntervalSet":
        return complement(self)

    def subset_of(self, other: "IntervalSet") -> bool:
        return difference(self, other).is_empty


_EMPTY = IntervalSet(())


# ---------------------------------------------------------------------------
# Canonicalization and set algebra
# ---------------------------------------------------------------------------


def normalize(pieces: Iterable[Interval]) -> IntervalSet:
    """Canonical form: sorted, disjoint, non-adjacent pieces.

    Overlapping pieces merge; touching pieces merge when at least one of the
    meeting endpoints is closed ([0,1] u [1,2] -> [0,2], but [0,1) u (1,2]
    stays two pieces).  Raises :class:`MalformedIntervalError` for lo > hi.
    """
    items = [p for p in pieces if p is not None]
    if not items:
        return _EMPTY
    items.sort(key=lambda p: (p.lo.numeric(), not p.lo_closed))
    # numeric() sort can misorder exact ties at float resolution; insertion-fix
    # with exact comparisons keeps the order exact.
    for i in range(1, len(items)):
        j = i
        while j > 0 and _lo_key_gt(items[j - 1], items[j]):
            items[j - 1], items[j] = items[j], items[j - 1]
            j -= 1
    out: list[Interval] = []
    for p in items:
        if not out:
            out.append(p)
            continue
        cur = out[-1]
        touches = p.lo < cur.hi or (p.lo == cur.hi and (cur.hi_closed or p.lo_closed))
        if not touches:
            out.append(p)
            continue
        # merge p into cur
        if p.hi > cur.hi:
            hi, hi_closed = p.hi, p.hi_closed
        elif p.hi < cur.hi:
            hi, hi_closed = cur.hi, cur.hi_closed
        else:
            hi, hi_closed = cur.hi, cur.hi_closed or p.hi_closed
        out[-1] = Interval(cur.lo, hi, cur.lo_closed, hi_closed)
    return IntervalSet(tuple(out))


def _lo_key_gt(a: Interval, b: Interval) -> bool:
    if a.lo > b.lo:
        return True
    if a.lo == b.lo and (not a.lo_closed) and b.lo_closed:
        return True
    return False


def member(s: IntervalSet, p: PointLike) -> bool:
    return s.member(p)


def closure(s: IntervalSet) -> IntervalSet:
    return normalize(
        Interval(p.lo, p.hi, p.lo.is_finite or p.lo_closed, p.hi.is_finite or p.hi_closed)
        if (not p.lo_closed or not p.hi_closed)
        else p
        for p in s.pieces
    )


def is_closed(s: IntervalSet) -> bool:
    return s.is_closed


def is_bounded(s: IntervalSet) -> bool:
    return s.is_bounded


def is_compact(s: IntervalSet) -> bool:
    return s.is_compact


def complement(s: IntervalSet) -> IntervalSet:
    out: list[Optional[Interval]] = []
    cursor: ExtendedReal = NEG_INF
    cursor_closed = False  # complement piece starts open at -inf
    for p in s.pieces:
        out.append(piece(cursor, p.lo, cursor_closed, not p.lo_closed))
        cursor = p.hi
        cursor_closed = not p.hi_closed
    out.append(piece(cursor, POS_INF, cursor_closed, False))
    return IntervalSet.of(*out)


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    out: list[Optional[Interval]] = []
    for p in a.pieces:
        for q in b.pieces:
            if q.lo > p.hi or p.lo > q.hi:
                continue
            if p.lo > q.lo:
                lo, lo_closed = p.lo, p.lo_closed
            elif p.lo < q.lo:
                lo, lo_closed = q.lo, q.lo_closed
            else:
                lo, lo_closed = p.lo, p.lo_closed and q.lo_closed
            if p.hi < q.hi:
                hi, hi_closed = p.hi, p.hi_closed
            elif p.hi > q.hi:
                hi, hi_closed = q.hi, q.hi_closed
            else:
                hi, hi_closed = p.hi, p.hi_closed and q.hi_closed
            if lo > hi:
                continue
            if lo == hi and not (lo_closed and hi_closed):
                continue
            out.append(piece(lo, hi, lo_closed, hi_closed))
    return IntervalSet.of(*out)


def union_sets(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return normalize(list(a.pieces) + list(b.pieces))


def difference(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return intersect(a, complement(b))


# ---------------------------------------------------------------------------
# Metric operations
# ---------------------------------------------------------------------------


def dist(p: PointLike, s: IntervalSet) -> ExtendedReal:
    """inf over y in s of |p - y|; +inf for the empty set.

    dist(p, s) == 0 iff p lies in the closure of s.
    """
    if s.is_empty:
        return POS_INF
    q = _as_endpoint(p)
    if not q.is_finite:
        # distance from an infinite "point": 0 if s is unbounded that way
        if q.is_pos_inf:
            return ExtendedReal.of(0) if not s.pieces[-1].hi.is_finite else POS_INF
        return ExtendedReal.of(0) if not s.pieces[0].lo.is_finite else POS_INF
    best: Optional[ExtendedReal] = None
    for pc in s.pieces:
        if pc.closure_member(q):
            return ExtendedReal.of(0)
        if q < pc.lo:
            d = pc.lo - q
        else:
            d = q - pc.hi
        if best is None or d < best:
            best = d
    return best if best is not None else POS_INF


def nearest_point(p: PointLike, s: IntervalSet) -> ExtendedReal:
    """A point of closure(s) at distance dist(p, s) from p (s nonempty, p finite)."""
    if s.is_empty:
        raise ValueError("nearest_point of an empty set")
    q = _as_endpoint(p)
    best = None
    best_d = None
    for pc in s.pieces:
        if pc.closure_member(q):
            return q
        cand = pc.lo if q < pc.lo else pc.hi
        if not cand.is_finite:
            continue
        d = abs(cand - q)
        if best_d is None or d < best_d:
            best, best_d = cand, d
    if best is None:
        raise ValueError("set has no finite endpoint near p")
    return best


def gap(a: IntervalSet, b: IntervalSet) -> ExtendedReal:
    """inf over pairs (x in a, y in b) of |x - y|; +inf if either is empty."""
    if a.is_empty or b.is_empty:
        return POS_INF
    best = POS_INF
    for p in a.pieces:
        for q in b.pieces:
            if not (q.lo > p.hi or p.lo > q.hi):
                return ExtendedReal.of(0)
            d = q.lo - p.hi if q.lo > p.hi else p.lo - q.hi
            if d < best:
                best = d
    return best


def excess(a: IntervalSet, b: IntervalSet) -> ExtendedReal:
    """One-sided Hausdorff semi-distance sup over x in a of dist(x, b).

    Requires a nonempty; returns +inf when a overhangs b unboundedly.
    excess(a, b) == 0 iff a is contained in closure(b).
    """
    if a.is_empty:
        raise ValueError("excess undefined for empty first argument")
    if b.is_empty:
        return POS_INF
    b_lo, b_hi = b.pieces[0].lo, b.pieces[-1].hi
    candidates: list[ExtendedReal] = []
    for p in a.pieces:
        if not p.lo.is_finite and b_lo.is_finite:
            return POS_INF
        if not p.hi.is_finite and b_hi.is_finite:
            return POS_INF
        if p.lo.is_finite:
            candidates.append(p.lo)
        if p.hi.is_finite:
            candidates.append(p.hi)
    # local maxima of dist(., b) inside a: midpoints of b's internal gaps
    for i in range(len(b.pieces) - 1):
        g_lo = b.pieces[i].hi
        g_hi = b.pieces[i + 1].lo
        mid = (g_lo + g_hi) / ExtendedReal.of(2)
        for p in a.pieces:
            if p.closure_member(mid):
                candidates.append(mid)
                break
    best = ExtendedReal.of(0)
    for c in candidates:
        d = dist(c, b)
        if d > best:
            best = d
    return best


def hausdorff(a: IntervalSet, b: IntervalSet) -> ExtendedReal:
    return xr_max(excess(a, b), excess(b, a))


# ---------------------------------------------------------------------------
# Accumulation sets over shrinking-parameter families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AccumulationResult:
    """Finite-ladder estimate of the accumulation set of a shrinking family."""

    points: IntervalSet
    escaped: bool


def accumulation_set(
    family: Sequence[tuple[object, IntervalSet]],
    window: Optional[IntervalSet] = None,
) -> AccumulationResult:
    """Intersection over k of closure(union over j >= k of family[j]).

    ``family`` lists (delta_k, set_k) with strictly decreasing positive
    delta_k.  The result is a superset of the true accumulation set
    restricted to ``window``; geometric endpoint trends are tightened by
    exact Aitken extrapolation so that, e.g., the family [-d_k, d_k]
    collapses to {0}.  ``escaped`` reports that the deepest tail still pokes
    outside the window (points run away rather than accumulate).
    """
    fam = list(family)
    if not fam:
        raise ValueError("accumulation_set of an empty family")
    deltas = [ExtendedReal.of(d) if not isinstance(d, ExtendedReal) else d for d, _ in fam]
    for d in deltas:
        if not d > 0:
            raise ValueError("family deltas must be positive")
    for a, b in zip(deltas, deltas[1:]):
        if not b < a:
            raise ValueError("family deltas must be strictly decreasing")

    sets = [s for _, s in fam]
    tails: list[IntervalSet] = [IntervalSet.empty()] * len(sets)
    acc_tail = IntervalSet.empty()
    for k in range(len(sets) - 1, -1, -1):
        acc_tail = union_sets(acc_tail, sets[k])
        tails[k] = closure(acc_tail)
    acc = tails[0]
    for t in tails[1:]:
        acc = intersect(acc, t)

    acc = _sharpen(acc, tails)

    deepest = tails[-1]
    if window is not None:
        escaped = not deepest.subset_of(window)
        acc = intersect(acc, window)
    else:
        escaped = not deepest.is_bounded
    return AccumulationResult(acc, escaped)


def _sharpen(acc: IntervalSet, tails: list[IntervalSet]) -> IntervalSet:
    """Tighten acc pieces by extrapolating geometric endpoint trends."""
    if acc.is_empty or len(tails) < 3:
        return acc
    out: list[Optional[Interval]] = []
    for p in acc.pieces:
        lo_seq, hi_seq = [], []
        ok = True
        for t in tails:
            host = _host_piece(t, p)
            if host is None:
                ok = False
                break
            lo_seq.append(host.lo)
            hi_seq.append(host.hi)
        if not ok:
            out.append(p)
            continue
        lo_lim = _endpoint_limit(lo_seq, increasing=True)
        hi_lim = _endpoint_limit(hi_seq, increasing=False)
        if lo_lim > hi_lim:
            continue  # width extrapolates through zero: vanishing piece
        out.append(piece(lo_lim, hi_lim, True, True))
    return IntervalSet.of(*out)


def _host_piece(t: IntervalSet, p: Interval) -> Optional[Interval]:
    for q in t.pieces:
        if q.closure_member(p.lo) and q.closure_member(p.hi):
            return q
    return None


def _endpoint_limit(seq: list[ExtendedReal], increasing: bool) -> ExtendedReal:
    last = seq[-1]
    if len(seq) < 3 or not last.is_finite:
        return last
    x0, x1, x2 = seq[-3], seq[-2], seq[-1]
    if not (x0.is_finite and x1.is_finite):
        return last
    d1, d2 = x1 - x0, x2 - x1
    if d2 == 0:
        return last
    if abs(d2) > abs(d1):
        return last  # not contracting
    denom = d2 - d1
    if denom == 0:
        return last
    cand = x2 - (d2 * d2) / denom
    # accept only a conservative geometric overshoot
    if abs(cand - x2) > abs(d2) * ExtendedReal.of(2):
        return last
    if increasing and cand < x2:
        return last
    if (not increasing) and cand > x2:
        return last
    return cand
