"""Witness serialization round-trips and replay from serialized form."""

import math
from fractions import Fraction

import pytest

from paramin import checks as ck
from paramin import corpus
from paramin import minimize as mz
from paramin.plans import default_plan
from paramin.scalars import TaggedPoint
from paramin.verdicts import FAILS, Verdict, Witness, replay_witness


def tp(v):
    return TaggedPoint.of(Fraction(v))


def roundtrip(w: Witness) -> Witness:
    return Witness.from_dict(w.to_dict())


class TestSerialization:
    def test_witness_round_trip_exact_points(self):
        p = corpus.load_case("ex4_6").problem
        plan = default_plan(p, tp(0))
        v = ck.check_kn_inf_compact_at(p, tp(0), plan)
        assert v.status == FAILS
        w2 = roundtrip(v.witness)
        assert w2.x_seq == v.witness.x_seq
        assert w2.y_seq == v.witness.y_seq
        assert w2.aux == v.witness.aux
        assert w2.violation_margin == v.witness.violation_margin

    def test_fails_requires_witness(self):
        with pytest.raises(ValueError):
            Verdict(FAILS, 1.0, None)

    def test_replay_from_serialized(self):
        p = corpus.load_case("ex4_3a").problem
        plan = default_plan(p, tp(0))
        v = ck.check_kn_inf_compact_at(p, tp(0), plan)
        assert v.status == FAILS
        rr = replay_witness(p, roundtrip(v.witness))
        assert rr.ok, rr.detail
        assert abs(rr.margin - v.witness.violation_margin) <= 1e-12

    def test_replay_detects_tampering(self):
        p = corpus.load_case("ex4_3a").problem
        plan = default_plan(p, tp(0))
        v = ck.check_kn_inf_compact_at(p, tp(0), plan)
        d = v.witness.to_dict()
        d["aux"]["stray_point"] = "-1/2"  # an interior point, not a stray
        rr = replay_witness(p, Witness.from_dict(d))
        assert not rr.ok

    def test_truncated_witness_resolves_through_base(self):
        p = corpus.load_case("ex4_5").problem
        x = TaggedPoint.of(Fraction(1, 2))
        tr = mz.truncate(p, Fraction(-1), x)  # empty anchor
        plan = default_plan(p, x)
        # graph check on a truncated problem embeds the truncation in aux
        tr2 = mz.truncate(p, Fraction(1), x)
        v = ck.check_graph_semicontinuity_at(tr2, x, x, plan, sense="usc")
        if v.status == FAILS:
            rr = replay_witness(p, roundtrip(v.witness))
            assert rr.ok, rr.detail
