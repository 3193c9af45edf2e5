"""Minimizer behavior on the corpus problems plus oracle spot checks."""

import random
from fractions import Fraction

import pytest

from paramin import corpus
from paramin.minimize import (
    AnchorEmptyError,
    level_set,
    solution_set,
    truncate,
    truncated_solution_set,
    truncated_value,
    value,
)
from paramin.oracle import brute_force_value
from paramin.scalars import POS_INF, ExtendedReal, TaggedPoint
from paramin.sets import IntervalSet


def tp(v):
    return TaggedPoint.of(Fraction(v))


def load(case_id):
    return corpus.load_case(case_id).problem


class TestValue:
    def test_full_line_distance_cost(self):
        p = load("ex4_1")
        res = value(p, tp(0))
        assert res.value == 0
        assert res.attained
        assert res.argmin == IntervalSet.point(0)

    def test_reciprocal_value_curve(self):
        p = load("ex4_7")
        res = value(p, TaggedPoint.of(Fraction(1, 2)))
        assert res.value == 2
        assert res.attained
        res0 = value(p, tp(0))
        assert res0.value == 0

    def test_unattained_infimum_on_half_open(self):
        p = load("ex4_3a")
        res = value(p, TaggedPoint.of(Fraction(1, 2)))
        assert res.value == Fraction(1, 2)
        assert not res.attained
        assert res.argmin.is_empty
        assert solution_set(p, TaggedPoint.of(Fraction(1, 2))).is_empty

    def test_empty_feasible_set_convention(self):
        tr = truncate(load("ex4_9"), Fraction(-1), tp(0))
        assert tr.anchor_empty
        assert tr.eval_phi(TaggedPoint.of(Fraction(1, 2))).is_empty
        res = value(tr, TaggedPoint.of(Fraction(1, 2)))
        assert res.value == POS_INF
        assert res.argmin.is_empty

    def test_constant_cost_argmin_is_whole_set(self):
        p = load("ex4_6")
        res = value(p, TaggedPoint.of(Fraction(1, 4)))
        assert res.value == 0
        assert res.argmin == IntervalSet.point(4)
        assert solution_set(p, TaggedPoint.of(Fraction(1, 4))) == p.eval_phi(TaggedPoint.of(Fraction(1, 4)))


class TestLevelSets:
    def test_cap_level_whole_line(self):
        p = load("ex4_1")
        assert level_set(p, tp(0), 1) == IntervalSet.whole_line()

    def test_half_cap_level(self):
        p = load("ex4_1")
        got = level_set(p, tp(0), Fraction(1, 2))
        assert got == IntervalSet.closed(Fraction(-1, 2), Fraction(1, 2))

    def test_below_value_empty(self):
        p = load("ex4_1")
        assert level_set(p, tp(0), Fraction(-1)).is_empty

    def test_monotone_in_lambda(self):
        p = load("ex4_5")
        rng = random.Random(3)
        for _ in range(40):
            x = TaggedPoint.of(Fraction(rng.randint(0, 4), 4))
            l1 = Fraction(rng.randint(-4, 8), 4)
            l2 = l1 + Fraction(rng.randint(0, 8), 4)
            assert level_set(p, x, l1).subset_of(level_set(p, x, l2))

    def test_feasibility_consistency(self):
        p = load("ex4_7")
        for num in range(1, 5):
            x = TaggedPoint.of(Fraction(num, 5))
            res = value(p, x)
            lam = Fraction(num, 5) + 3
            ls = level_set(p, x, lam)
            if ls.is_nonempty:
                assert res.value <= ExtendedReal.of(TaggedPoint.of(lam))


class TestTruncation:
    def test_step_cost_truncates_to_anchor(self):
        p = load("ex4_9")
        tr = truncate(p, Fraction(1, 2), tp(0))
        assert not tr.anchor_empty
        assert tr.anchor_set == IntervalSet.point(0)
        z = TaggedPoint.of(Fraction(7, 10))
        assert tr.eval_phi(z) == IntervalSet.point(0)
        res = truncated_value(tr, z)
        assert res.value == 0
        assert value(p, z).value == 1

    def test_window_truncation_matches_sublevel(self):
        p = load("ex4_1")
        tr = truncate(p, Fraction(1, 2), tp(0))
        z = TaggedPoint.of(Fraction(1, 5))
        assert tr.eval_phi(z) == IntervalSet.closed(Fraction(-3, 10), Fraction(7, 10))

    def test_identity_above_value(self):
        for cid in ("ex4_1", "ex4_3b", "ex4_5", "ex4_6", "ex4_7", "ex4_8", "ex4_9"):
            p = load(cid)
            x = corpus.load_case(cid).focus_x
            base = value(p, x)
            if not base.value.is_finite:
                continue
            lam = base.value + ExtendedReal.of(1)
            tr = truncate(p, lam, x)
            assert not tr.anchor_empty
            tv = truncated_value(tr, x)
            assert tv.value == base.value
            assert truncated_solution_set(tr, x) == solution_set(p, x)

    def test_anchor_empty_below_value(self):
        p = load("ex4_5")
        x = TaggedPoint.of(Fraction(1, 2))
        tr = truncate(p, value(p, x).value - ExtendedReal.of(1), x)
        assert tr.anchor_empty
        with pytest.raises(AnchorEmptyError):
            truncated_value(tr, x)


class TestOracleSpot:
    @pytest.mark.parametrize("cid", ["ex4_1", "ex4_3a", "ex4_5", "ex4_6", "ex4_7", "ex4_9"])
    def test_value_matches_brute_force(self, cid):
        case = corpus.load_case(cid)
        p = case.problem
        region = p.x_domain.intersect(p.x_window)
        lo, hi = region.inf_value(), region.sup_value()
        for k in range(5):
            x = (lo + (hi - lo) * ExtendedReal.of(Fraction(k, 4))).as_tagged()
            if not region.member(x):
                continue
            exact = value(p, x).value
            brute = brute_force_value(p, x, samples_per_piece=40_000)
            assert abs(exact.numeric() - brute) <= 1e-6
