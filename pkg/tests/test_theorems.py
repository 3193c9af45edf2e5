"""Statement-engine invariants: catalog, memoization, equivalence, detectors."""

import random
from fractions import Fraction

import pytest

from paramin import checks as ck
from paramin import expr as ex
from paramin import theorems as th
from paramin.corpus import load_case
from paramin.plans import default_plan
from paramin.randgen import random_cost, random_problem
from paramin.scalars import ExtendedReal, TaggedPoint
from paramin.verdicts import FAILS, HOLDS, UNKNOWN


def tp(v):
    return TaggedPoint.of(Fraction(v))


class TestCatalog:
    def test_sixteen_statements(self):
        specs = th.statement_catalog()
        assert len(specs) == 16
        ids = {s.statement_id for s in specs}
        assert ids == {
            "TH1.1", "TH1.2", "TH1.3", "TH1.4i", "TH1.4ii", "TH1.5", "TH1.6",
            "TH1.7", "COR1.1", "B1", "B2", "B3", "BS1", "BS2", "BS3", "LEM2.1",
        }

    def test_every_reference_resolves(self):
        p = load_case("ex4_3b").problem
        session = th.CheckSession(p, tp(0), th.EngineConfig(light=True))
        for spec in th.statement_catalog():
            for cid in spec.hypotheses:
                session.verdict(cid)
            for cid in spec.conclusions:
                session.verdict(cid.split("?", 1)[0])
            if spec.equivalence:
                for cid in spec.equivalence:
                    session.verdict(cid)

    def test_memoization(self):
        p = load_case("ex4_3b").problem
        session = th.CheckSession(p, tp(0), th.EngineConfig(light=True))
        a = session.verdict("kn_at")
        b = session.verdict("kn_at")
        assert a is b


class TestCorpusPatterns:
    def test_non_implication_pairs(self, corpus_outcomes):
        def status(case_id, sid):
            return corpus_outcomes[case_id].report.statements[sid].status

        # the two local routes do not imply each other
        assert status("ex4_1", "TH1.2") == HOLDS and status("ex4_1", "TH1.1") == FAILS
        assert status("ex4_3a", "B2") == HOLDS and status("ex4_3a", "BS2") == FAILS
        assert status("ex4_3b", "BS2") == HOLDS and status("ex4_3b", "B2") == FAILS
        assert status("ex4_4", "BS3") == HOLDS and status("ex4_4", "B3") == FAILS
        assert status("ex4_5", "B3") == HOLDS and status("ex4_5", "BS3") == FAILS

    def test_equivalence_pair_agrees_when_applicable(self, corpus_outcomes):
        for oc in corpus_outcomes.values():
            if oc.skipped:
                continue
            for sid in ("TH1.6", "TH1.7"):
                res = oc.report.statements[sid]
                if res.applicability == th.APPLICABLE and res.equivalence is not None:
                    pair = {res.equivalence["lhs_status"], res.equivalence["rhs_status"]}
                    assert pair != {HOLDS, FAILS}, (oc.case_id, sid, res.equivalence)

    def test_double_failure_is_consistent_equivalence(self, corpus_outcomes):
        res = corpus_outcomes["ex4_7"].report.statements["TH1.6"]
        assert res.applicability == th.APPLICABLE
        assert res.equivalence["lhs_status"] == FAILS
        assert res.equivalence["rhs_status"] == FAILS
        assert res.equivalence["consistent"]

    def test_lower_route_chain(self, corpus_outcomes):
        # whenever the neighborhood lower-stability route applies, the
        # truncation route is not blocked on the same case
        for oc in corpus_outcomes.values():
            if oc.skipped:
                continue
            bs1 = oc.report.statements["BS1"]
            cor = oc.report.statements["COR1.1"]
            if bs1.applicability == th.APPLICABLE:
                assert cor.status != FAILS, oc.case_id

    def test_no_soundness_violations_on_corpus(self, corpus_outcomes):
        for oc in corpus_outcomes.values():
            if not oc.skipped:
                assert oc.report.violations == [], oc.case_id


class TestCrossValidation:
    def test_fault_injection_trips_detector(self, corpus_outcomes):
        rep = corpus_outcomes["ex4_3b"].report
        assert th.cross_validate(rep) == []
        # negate every measured lower-semicontinuity conclusion
        import copy

        mutated = copy.deepcopy(rep)
        flipped = 0
        for res in mutated.statements.values():
            if "v_lsc" in res.measured:
                res.measured["v_lsc"] = FAILS if res.measured["v_lsc"] == HOLDS else HOLDS
                flipped += 1
        assert flipped > 0
        violations = th.cross_validate(mutated)
        assert len(violations) >= 1

    def test_fault_injection_on_equivalence(self, corpus_outcomes):
        import copy

        rep = corpus_outcomes["ex4_3b"].report
        mutated = copy.deepcopy(rep)
        res = mutated.statements["TH1.6"]
        assert res.applicability == th.APPLICABLE
        res.equivalence["lhs_status"] = FAILS
        res.equivalence["rhs_status"] = HOLDS
        violations = th.cross_validate(mutated)
        assert any(v["kind"] == "equivalence" for v in violations)


class TestDuality:
    def test_negation_duality_random_functions(self):
        rng = random.Random(31)
        p = load_case("ex4_5").problem
        plan = default_plan(p, tp(0), light=True)
        agree = 0
        for _ in range(200):
            ast = random_cost(rng, rng.randint(0, 3), allow_y=False)
            f = lambda z, _a=ast: ex.eval_expr(_a, z, None)
            neg_f = lambda z, _a=ast: -ex.eval_expr(_a, z, None)
            a = TaggedPoint.of(Fraction(rng.randint(-2, 2), 2))
            lhs = ck.check_usc_at(f, a, plan, domain=p.x_domain)
            rhs = ck.check_lsc_at(neg_f, a, plan, domain=p.x_domain)
            assert lhs.status == rhs.status, ex.print_expr(ast)
            agree += 1
        assert agree == 200

    def test_corpus_duality(self):
        for cid, x in (("ex4_7", 0), ("ex4_9", 0)):
            p = load_case(cid).problem
            plan = default_plan(p, tp(x))
            from paramin import minimize as mz

            f = lambda z: mz.value(p, z).value
            neg_f = lambda z: -mz.value(p, z).value
            lhs = ck.check_usc_at(f, tp(x), plan, domain=p.x_domain, fn_id="v", problem=p)
            rhs = ck.check_lsc_at(neg_f, tp(x), plan, domain=p.x_domain, fn_id="neg_v", problem=p)
            assert lhs.status == rhs.status


class TestGlobalForm:
    def test_pointwise_and_global_agree_on_compact_windows(self, corpus_outcomes):
        # on compact parameter windows the pointwise check and the global
        # sublevel-closedness form never disagree as HOLDS vs FAILS
        for cid in ("ex4_3b", "ex4_5", "ex4_9"):
            oc = corpus_outcomes[cid]
            p = load_case(cid).problem
            plan = default_plan(p, oc.report and tp(0))
            pointwise = oc.report.checks["kn_win"].status
            global_form = ck.check_kn_global(p, plan).status
            assert {pointwise, global_form} != {HOLDS, FAILS}, cid

    def test_global_form_fails_where_pointwise_fails(self):
        p = load_case("ex4_6").problem
        plan = default_plan(p, tp(0))
        assert ck.check_kn_global(p, plan).status == FAILS


class TestLemmaConsistency:
    def test_constant_compact_continuous_never_fails(self):
        rng = random.Random(97)
        for _ in range(25):
            p, focus = random_problem(rng, continuous=True, constant_phi=True)
            plan = default_plan(p, focus, light=True)
            v = ck.check_kn_inf_compact_at(p, focus, plan)
            assert v.status != FAILS, (p.name, v.witness and v.witness.limit_claim)

    def test_lemma_statement_sound_on_corpus(self, corpus_outcomes):
        for oc in corpus_outcomes.values():
            if oc.skipped:
                continue
            res = oc.report.statements["LEM2.1"]
            if res.applicability == th.APPLICABLE:
                assert res.measured.get("kn_at") != FAILS, oc.case_id
