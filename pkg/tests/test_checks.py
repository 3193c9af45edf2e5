"""Checker verdicts on the corpus geometry, with witness replay for every FAILS."""

import math
from fractions import Fraction

import pytest

from paramin import checks as ck
from paramin import corpus
from paramin import minimize as mz
from paramin.plans import default_plan
from paramin.scalars import ExtendedReal, TaggedPoint
from paramin.sets import IntervalSet
from paramin.verdicts import FAILS, HOLDS, UNKNOWN, replay_witness


def tp(v):
    return TaggedPoint.of(Fraction(v))


def half(num, den):
    return TaggedPoint.of(Fraction(num, den))


def load(cid):
    return corpus.load_case(cid).problem


def assert_replays(problem, verdict, fn=None):
    assert verdict.status == FAILS
    rr = replay_witness(problem, verdict.witness, fn=fn)
    assert rr.ok, rr.detail
    stored = verdict.witness.violation_margin
    if math.isinf(stored):
        assert math.isinf(rr.margin)
    else:
        assert abs(rr.margin - stored) <= 1e-12


class TestFunctionChecks:
    def test_indicator_lsc_at_zero_holds(self):
        p = load("ex4_9")
        plan = default_plan(p, tp(0))
        f = lambda z: p.eval_u(z, z)
        v = ck.check_lsc_at(f, tp(0), plan, domain=p.x_domain, fn_id="v")
        assert v.status == HOLDS

    def test_rationality_gated_cost_fails_lsc_at_irrational(self):
        p = load("ex4_8")
        plan = default_plan(p, tp(0))
        a = TaggedPoint(Fraction(0), Fraction(1, 2))  # sqrt2/2
        f = lambda z: p.eval_u(z, z)
        v = ck.check_lsc_at(f, a, plan, domain=p.x_domain, fn_id="v", problem=p)
        assert v.status == FAILS
        assert abs(v.witness.violation_margin - math.sqrt(2) / 2) < 1e-6
        assert_replays(p, v, fn=lambda z: ExtendedReal.of(f(z)).numeric())

    def test_constant_holds(self):
        p = load("ex4_6")
        plan = default_plan(p, tp(0))
        v = ck.check_lsc_at(lambda z: ExtendedReal.of(0), half(1, 2), plan, domain=p.x_domain)
        assert v.status == HOLDS

    def test_value_function_usc_fails_for_blowup(self):
        p = load("ex4_7")
        plan = default_plan(p, tp(0))
        f = lambda z: mz.value(p, z).value
        v = ck.check_usc_at(f, tp(0), plan, domain=p.x_domain, fn_id="v", problem=p)
        assert v.status == FAILS
        assert_replays(p, v, fn=lambda z: ExtendedReal.of(f(z)).numeric())

    def test_value_function_usc_fails_for_step(self):
        p = load("ex4_9")
        plan = default_plan(p, tp(0))
        f = lambda z: mz.value(p, z).value
        v = ck.check_usc_at(f, tp(0), plan, domain=p.x_domain, fn_id="v", problem=p)
        assert v.status == FAILS
        assert abs(v.witness.violation_margin - 1.0) < 1e-9
        assert_replays(p, v, fn=lambda z: ExtendedReal.of(f(z)).numeric())

    def test_value_function_lsc_holds_for_step(self):
        p = load("ex4_9")
        plan = default_plan(p, tp(0))
        f = lambda z: mz.value(p, z).value
        v = ck.check_lsc_at(f, tp(0), plan, domain=p.x_domain, fn_id="v", problem=p)
        assert v.status == HOLDS


class TestGraphChecks:
    def test_step_cost_not_usc_at_origin_pair(self):
        p = load("ex4_9")
        plan = default_plan(p, tp(0))
        v = ck.check_graph_semicontinuity_at(p, tp(0), tp(0), plan, sense="usc")
        assert v.status == FAILS
        assert_replays(p, v)

    def test_step_cost_lsc_on_graph(self):
        p = load("ex4_9")
        plan = default_plan(p, tp(0))
        v = ck.check_graph_semicontinuity_at(p, tp(0), tp(0), plan, sense="lsc")
        assert v.status == HOLDS

    def test_overshoot_indicator_not_usc_on_diagonal(self):
        p = load("ex4_5")
        plan = default_plan(p, half(1, 2))
        v = ck.check_graph_semicontinuity_at(p, half(1, 2), half(1, 2), plan, sense="usc")
        assert v.status == FAILS
        assert_replays(p, v)

    def test_overshoot_indicator_lsc_everywhere(self):
        p = load("ex4_5")
        plan = default_plan(p, half(1, 2))
        v = ck.check_graph_semicontinuity_on_set(p, half(1, 2), p.eval_phi(half(1, 2)), plan, sense="lsc")
        assert v.status == HOLDS

    def test_distance_cost_continuous_on_graph(self):
        p = load("ex4_1")
        plan = default_plan(p, tp(0))
        for sense in ("lsc", "usc"):
            v = ck.check_graph_semicontinuity_on_set(p, tp(0), p.eval_phi(tp(0)), plan, sense=sense)
            assert v.status == HOLDS, (sense, v.note)

    def test_isolated_graph_point_vacuously_fine(self):
        p = load("ex4_7")
        plan = default_plan(p, tp(0))
        v = ck.check_graph_semicontinuity_at(p, tp(0), tp(0), plan, sense="usc")
        assert v.status == HOLDS


class TestMapChecks:
    def test_two_point_map_not_lsc(self):
        p = load("ex4_3b")
        plan = default_plan(p, tp(0))
        v = ck.check_map_lsc_at(p, ck.phi_map(p), tp(0), plan)
        assert v.status == FAILS
        assert abs(v.witness.violation_margin - 1.0) < 1e-9
        assert_replays(p, v)

    def test_constant_half_open_map_lsc(self):
        p = load("ex4_3a")
        plan = default_plan(p, tp(0))
        v = ck.check_map_lsc_at(p, ck.phi_map(p), tp(0), plan)
        assert v.status == HOLDS

    def test_diagonal_map_lsc(self):
        p = load("ex4_9")
        plan = default_plan(p, tp(0))
        v = ck.check_map_lsc_at(p, ck.phi_map(p), tp(0), plan)
        assert v.status == HOLDS

    def test_reciprocal_map_not_usc(self):
        p = load("ex4_6")
        plan = default_plan(p, tp(0))
        v = ck.check_map_usc_at(p, ck.phi_map(p), tp(0), plan)
        assert v.status == FAILS
        assert_replays(p, v)

    def test_two_point_map_usc(self):
        p = load("ex4_3b")
        plan = default_plan(p, tp(0))
        v = ck.check_map_usc_at(p, ck.phi_map(p), tp(0), plan)
        assert v.status == HOLDS

    def test_noncompact_image_downgrades_to_unknown(self):
        p = load("ex4_3a")
        plan = default_plan(p, tp(0))
        v = ck.check_map_usc_at(p, ck.phi_map(p), tp(0), plan)
        assert v.status == UNKNOWN

    def test_solution_map_usc_fails_on_blowup(self):
        p = load("ex4_7")
        plan = default_plan(p, tp(0))
        v = ck.check_map_usc_at(p, ck.solution_map(p), tp(0), plan)
        assert v.status == FAILS
        assert_replays(p, v)


class TestClosedGraph:
    def test_reciprocal_graph_closed(self):
        p = load("ex4_6")
        plan = default_plan(p, tp(0))
        v = ck.check_closed_graph(p, ck.phi_map(p), plan, focus=tp(0))
        assert v.status == HOLDS

    def test_half_open_graph_not_closed(self):
        p = load("ex4_3a")
        plan = default_plan(p, tp(0))
        v = ck.check_closed_graph(p, ck.phi_map(p), plan, focus=tp(0))
        assert v.status == FAILS
        assert_replays(p, v)

    def test_full_line_graph_closed(self):
        p = load("ex4_1")
        plan = default_plan(p, tp(0))
        v = ck.check_closed_graph(p, ck.phi_map(p), plan, focus=tp(0))
        assert v.status == HOLDS

    def test_two_point_graph_closed(self):
        p = load("ex4_3b")
        plan = default_plan(p, tp(0))
        v = ck.check_closed_graph(p, ck.phi_map(p), plan, focus=tp(0))
        assert v.status == HOLDS


class TestCompactness:
    def test_capped_cost_not_inf_compact(self):
        p = load("ex4_1")
        v = ck.check_inf_compact(p, tp(0))
        assert v.status == FAILS
        assert_replays(p, v)

    def test_singleton_inf_compact(self):
        p = load("ex4_6")
        v = ck.check_inf_compact(p, tp(0))
        assert v.status == HOLDS

    def test_kn_fails_full_line(self):
        p = load("ex4_1")
        plan = default_plan(p, tp(0))
        v = ck.check_kn_inf_compact_at(p, tp(0), plan)
        assert v.status == FAILS
        assert v.witness.kind == "escaping-sequence"
        assert_replays(p, v)

    def test_kn_fails_reciprocal_escape(self):
        p = load("ex4_6")
        plan = default_plan(p, tp(0))
        v = ck.check_kn_inf_compact_at(p, tp(0), plan)
        assert v.status == FAILS
        assert v.witness.kind == "escaping-sequence"
        assert_replays(p, v)

    def test_kn_holds_when_cost_gates_escape(self):
        p = load("ex4_7")
        plan = default_plan(p, tp(0))
        v = ck.check_kn_inf_compact_at(p, tp(0), plan)
        assert v.status == HOLDS, v.note

    def test_kn_fails_half_open_stray(self):
        p = load("ex4_3a")
        plan = default_plan(p, tp(0))
        v = ck.check_kn_inf_compact_at(p, tp(0), plan)
        assert v.status == FAILS
        assert v.witness.kind == "stray-accumulation-point"
        assert_replays(p, v)

    def test_kn_holds_two_point_map(self):
        p = load("ex4_3b")
        plan = default_plan(p, tp(0))
        v = ck.check_kn_inf_compact_at(p, tp(0), plan)
        assert v.status == HOLDS, v.note

    def test_kn_holds_step_cost(self):
        p = load("ex4_9")
        plan = default_plan(p, tp(0))
        v = ck.check_kn_inf_compact_at(p, tp(0), plan)
        assert v.status == HOLDS, v.note

    def test_kn_holds_rationality_cost(self):
        p = load("ex4_8")
        plan = default_plan(p, tp(0))
        v = ck.check_kn_inf_compact_at(p, tp(0), plan)
        assert v.status == HOLDS, v.note

    def test_kn_holds_compact_constant(self):
        p = load("ex4_5")
        plan = default_plan(p, half(1, 2))
        v = ck.check_kn_inf_compact_at(p, half(1, 2), plan)
        assert v.status == HOLDS, v.note

    def test_truncated_kn_holds_step(self):
        p = load("ex4_9")
        tr = mz.truncate(p, Fraction(1, 2), tp(0))
        plan = default_plan(tr, tp(0))
        v = ck.check_kn_inf_compact_at(tr, tp(0), plan)
        assert v.status == HOLDS, v.note

    def test_truncated_kn_holds_capped_distance(self):
        p = load("ex4_1")
        tr = mz.truncate(p, Fraction(1, 2), tp(0))
        plan = default_plan(tr, tp(0))
        v = ck.check_kn_inf_compact_at(tr, tp(0), plan)
        assert v.status == HOLDS, v.note

    def test_k_inf_compact_fails_full_line(self):
        p = load("ex4_1")
        plan = default_plan(p, tp(0))
        v = ck.check_k_inf_compact(p, IntervalSet.closed(0, 1), plan)
        assert v.status == FAILS
        assert_replays(p, v)

    def test_k_inf_compact_holds_overshoot(self):
        p = load("ex4_5")
        plan = default_plan(p, half(1, 2))
        v = ck.check_k_inf_compact(p, IntervalSet.closed(0, 1), plan)
        assert v.status == HOLDS, v.note

    def test_k_inf_compact_fails_reciprocal(self):
        p = load("ex4_6")
        plan = default_plan(p, tp(0))
        v = ck.check_k_inf_compact(p, IntervalSet.closed(0, 1), plan)
        assert v.status == FAILS
        assert_replays(p, v)

    def test_k_set_must_be_compact(self):
        p = load("ex4_5")
        plan = default_plan(p, half(1, 2))
        with pytest.raises(ValueError):
            ck.check_k_inf_compact(p, IntervalSet.of(), plan)


class TestNeighborhoodConditions:
    def test_gap_holds_full_line(self):
        p = load("ex4_1")
        plan = default_plan(p, tp(0))
        assert ck.check_condition_iv(p, tp(0), plan).status == HOLDS

    def test_gap_holds_two_point(self):
        p = load("ex4_3b")
        plan = default_plan(p, tp(0))
        assert ck.check_condition_iv(p, tp(0), plan).status == HOLDS

    def test_gap_fails_reciprocal(self):
        p = load("ex4_6")
        plan = default_plan(p, tp(0))
        v = ck.check_condition_iv(p, tp(0), plan)
        assert v.status == FAILS
        assert_replays(p, v)

    def test_gap_undefined_for_empty_minimizers(self):
        p = load("ex4_3a")
        plan = default_plan(p, tp(0))
        assert ck.check_condition_iv(p, tp(0), plan).status == UNKNOWN

    def test_container_certified_for_capped_distance(self):
        p = load("ex4_1")
        plan = default_plan(p, tp(0))
        v = ck.check_condition_iii(p, tp(0), Fraction(1, 2), plan)
        assert v.status == HOLDS
        assert v.budget_used.get("radius") == "1/2"
        assert v.budget_used.get("container") == "[-1, 1]"

    def test_container_fails_step(self):
        p = load("ex4_9")
        plan = default_plan(p, tp(0))
        v = ck.check_condition_iii(p, tp(0), Fraction(1, 2), plan)
        assert v.status == FAILS
        assert_replays(p, v)

    def test_container_fails_reciprocal(self):
        p = load("ex4_6")
        plan = default_plan(p, tp(0))
        v = ck.check_condition_iii(p, tp(0), Fraction(1), plan)
        assert v.status == FAILS
        assert_replays(p, v)

    def test_step_certifies_at_level_one(self):
        p = load("ex4_9")
        plan = default_plan(p, tp(0))
        v = ck.check_condition_iii(p, tp(0), Fraction(1), plan)
        assert v.status == HOLDS
