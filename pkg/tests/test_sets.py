"""Set-calculus unit tests and randomized property checks."""

import random
from fractions import Fraction

import pytest

from paramin.scalars import NEG_INF, POS_INF, ExtendedReal, TaggedPoint
from paramin.sets import (
    IntervalSet,
    Interval,
    MalformedIntervalError,
    accumulation_set,
    closure,
    complement,
    difference,
    dist,
    excess,
    gap,
    intersect,
    normalize,
    piece,
    union_sets,
)


def xr(v):
    return ExtendedReal.of(v)


def iv(lo, hi, lc=True, hc=True):
    return piece(TaggedPoint.of(Fraction(lo)) if not isinstance(lo, float) else lo,
                 TaggedPoint.of(Fraction(hi)) if not isinstance(hi, float) else hi,
                 lc, hc)


class TestNormalize:
    def test_adjacent_closed_intervals_merge(self):
        s = normalize([iv(0, 1), iv(1, 2)])
        assert s.text() == "[0, 2]"

    def test_half_open_already_canonical(self):
        s = normalize([iv(-1, 0, True, False)])
        assert s.text() == "[-1, 0)"

    def test_empty(self):
        assert normalize([]).is_empty

    def test_open_touching_does_not_merge(self):
        s = normalize([iv(0, 1, True, False), iv(1, 2, False, True)])
        assert len(s.pieces) == 2

    def test_open_plus_singleton_merges(self):
        s = normalize([iv(0, 1, True, False), iv(1, 1)])
        assert s.text() == "[0, 1]"

    def test_malformed_rejected(self):
        with pytest.raises(MalformedIntervalError):
            piece(1, 0)

    def test_degenerate_half_open_normalizes_away(self):
        assert piece(1, 1, True, False) is None

    def test_idempotent(self):
        rng = random.Random(7)
        for _ in range(300):
            pcs = []
            for _ in range(rng.randint(0, 5)):
                a = Fraction(rng.randint(-8, 8), rng.randint(1, 4))
                b = a + Fraction(rng.randint(0, 8), rng.randint(1, 4))
                p = piece(TaggedPoint.of(a), TaggedPoint.of(b), rng.random() < 0.5, rng.random() < 0.5)
                if p is not None:
                    pcs.append(p)
            s1 = normalize(pcs)
            s2 = normalize(s1.pieces)
            assert s1 == s2


class TestMembership:
    def test_open_endpoint_excluded(self):
        s = IntervalSet.of(iv(-1, 0, True, False))
        assert not s.member(0)
        assert s.member(-1)
        assert not IntervalSet.empty().member(0)

    def test_exact_vs_float_agree(self):
        s = IntervalSet.of(iv(0, 1, False, True))
        assert not s.member(0.0)
        assert s.member(0.5)
        assert s.member(TaggedPoint.of(Fraction(1, 2)))


class TestDist:
    def test_limit_point_of_half_open(self):
        assert dist(0, IntervalSet.of(iv(-1, 0, True, False))) == 0

    def test_outside(self):
        assert dist(3, IntervalSet.of(iv(0, 1))) == 2

    def test_empty_convention(self):
        assert dist(0, IntervalSet.empty()) == POS_INF

    def test_dist_zero_iff_in_closure(self):
        rng = random.Random(11)
        for _ in range(300):
            pcs = []
            for _ in range(rng.randint(1, 4)):
                a = Fraction(rng.randint(-6, 6), 2)
                b = a + Fraction(rng.randint(0, 6), 2)
                p = piece(TaggedPoint.of(a), TaggedPoint.of(b), rng.random() < 0.5, rng.random() < 0.5)
                if p is not None:
                    pcs.append(p)
            s = normalize(pcs)
            if s.is_empty:
                continue
            q = TaggedPoint.of(Fraction(rng.randint(-14, 14), 2))
            assert (dist(q, s) == 0) == closure(s).member(q)


class TestExcess:
    def test_single_point(self):
        assert excess(IntervalSet.point(2), IntervalSet.point(0)) == 2

    def test_subset_gives_zero(self):
        assert excess(IntervalSet.of(iv(0, 1)), IntervalSet.of(iv(0, 2))) == 0

    def test_unbounded_overhang(self):
        assert excess(IntervalSet.whole_line(), IntervalSet.of(iv(0, 1))) == POS_INF

    def test_gap_midpoint_detected(self):
        a = IntervalSet.of(iv(0, 10))
        b = union_sets(IntervalSet.point(0), IntervalSet.point(10))
        assert excess(a, b) == 5

    def test_empty_first_argument_rejected(self):
        with pytest.raises(ValueError):
            excess(IntervalSet.empty(), IntervalSet.point(0))

    def test_zero_iff_contained_in_closure(self):
        rng = random.Random(13)
        for _ in range(300):
            def rand_set():
                pcs = []
                for _ in range(rng.randint(1, 3)):
                    a = Fraction(rng.randint(-6, 6), 2)
                    b = a + Fraction(rng.randint(0, 4), 2)
                    p = piece(TaggedPoint.of(a), TaggedPoint.of(b), rng.random() < 0.5, rng.random() < 0.5)
                    if p is not None:
                        pcs.append(p)
                return normalize(pcs)
            a, b = rand_set(), rand_set()
            if a.is_empty:
                continue
            assert (excess(a, b) == 0) == a.subset_of(closure(b))

    def test_triangle_inequality_closed_sets(self):
        rng = random.Random(17)
        for _ in range(200):
            def rand_closed():
                pcs = []
                for _ in range(rng.randint(1, 3)):
                    a = Fraction(rng.randint(-8, 8), 2)
                    b = a + Fraction(rng.randint(0, 6), 2)
                    pcs.append(piece(TaggedPoint.of(a), TaggedPoint.of(b)))
                return normalize(pcs)
            a, b, c = rand_closed(), rand_closed(), rand_closed()
            eab, eac, ecb = excess(a, b), excess(a, c), excess(c, b)
            if eac.is_finite and ecb.is_finite:
                assert eab <= eac + ecb


class TestPredicates:
    def test_whole_line_not_compact(self):
        assert not IntervalSet.whole_line().is_compact
        assert IntervalSet.whole_line().is_closed

    def test_closed_bounded_is_compact(self):
        assert IntervalSet.of(iv(Fraction(-1, 2), Fraction(1, 2))).is_compact

    def test_compact_equals_closed_and_bounded_randomized(self):
        rng = random.Random(23)
        for _ in range(300):
            pcs = []
            for _ in range(rng.randint(0, 4)):
                if rng.random() < 0.15:
                    pcs.append(Interval(ExtendedReal.of(Fraction(rng.randint(-4, 4))), POS_INF, rng.random() < 0.5, False))
                else:
                    a = Fraction(rng.randint(-8, 8), 2)
                    b = a + Fraction(rng.randint(0, 6), 2)
                    p = piece(TaggedPoint.of(a), TaggedPoint.of(b), rng.random() < 0.5, rng.random() < 0.5)
                    if p is not None:
                        pcs.append(p)
            s = normalize(pcs)
            assert s.is_compact == (s.is_closed and s.is_bounded)

    def test_closure_flips_open_endpoints(self):
        s = IntervalSet.of(iv(-1, 0, True, False))
        assert closure(s).text() == "[-1, 0]"


class TestAlgebra:
    def test_complement_roundtrip(self):
        rng = random.Random(29)
        for _ in range(200):
            pcs = []
            for _ in range(rng.randint(0, 3)):
                a = Fraction(rng.randint(-6, 6), 2)
                b = a + Fraction(rng.randint(0, 5), 2)
                p = piece(TaggedPoint.of(a), TaggedPoint.of(b), rng.random() < 0.5, rng.random() < 0.5)
                if p is not None:
                    pcs.append(p)
            s = normalize(pcs)
            assert complement(complement(s)) == s

    def test_difference_and_intersect(self):
        a = IntervalSet.of(iv(0, 2))
        b = IntervalSet.of(iv(1, 3, True, False))
        assert intersect(a, b).text() == "[1, 2]"
        assert difference(a, b).text() == "[0, 1)"
        assert gap(IntervalSet.point(0), IntervalSet.of(iv(1, 2))) == 1


class TestAccumulation:
    def ladder(self, k):
        return Fraction(1, 2 ** k)

    def test_escaping_family(self):
        fam = [(self.ladder(k), IntervalSet.point(Fraction(2 ** k))) for k in range(1, 13)]
        window = IntervalSet.of(iv(-10, 10))
        res = accumulation_set(fam, window)
        assert res.points.is_empty
        assert res.escaped

    def test_nested_shrinking_intervals(self):
        fam = [(self.ladder(k), IntervalSet.of(iv(-self.ladder(k), self.ladder(k)))) for k in range(1, 13)]
        res = accumulation_set(fam, IntervalSet.of(iv(-10, 10)))
        assert res.points == IntervalSet.point(0)
        assert not res.escaped

    def test_constant_family(self):
        base = IntervalSet.of(iv(Fraction(-1, 2), Fraction(1, 2)))
        fam = [(self.ladder(k), base) for k in range(1, 13)]
        res = accumulation_set(fam, IntervalSet.of(iv(-10, 10)))
        assert res.points == base
        assert not res.escaped

    def test_half_open_family_accumulates_boundary(self):
        base = IntervalSet.of(iv(-1, 0, True, False))
        fam = [(self.ladder(k), base) for k in range(1, 13)]
        res = accumulation_set(fam, IntervalSet.of(iv(-10, 10)))
        assert res.points == IntervalSet.of(iv(-1, 0))

    def test_empty_family_rejected(self):
        with pytest.raises(ValueError):
            accumulation_set([])
