"""Problem-file loading, validation, and structural queries."""

from fractions import Fraction

import pytest

from paramin import corpus
from paramin.problem import ProblemFormatError, problem_from_dict
from paramin.scalars import TaggedPoint
from paramin.setexpr import parse_set_expr, print_set_expr, eval_set
from paramin.sets import IntervalSet


def base_doc(**overrides):
    doc = {
        "name": "toy",
        "x_domain": "[0, 1]",
        "y_domain": "[-2, 2]",
        "u": "abs(x - y)",
        "phi": "[-1, 1]",
        "nonempty_required": True,
        "focus": {"x": "0"},
    }
    doc.update(overrides)
    return doc


class TestLoader:
    def test_valid_document(self):
        doc = problem_from_dict(base_doc())
        assert doc.problem is not None
        assert doc.focus_x == TaggedPoint.of(0)

    def test_malformed_interval_is_schema_error(self):
        with pytest.raises(ProblemFormatError):
            problem_from_dict(base_doc(phi="[1, 0]"))

    def test_missing_field_rejected(self):
        with pytest.raises(ProblemFormatError):
            problem_from_dict({"name": "broken", "u": "x"})

    def test_phi_outside_y_domain_rejected(self):
        with pytest.raises(ProblemFormatError):
            problem_from_dict(base_doc(phi="[-5, 5]"))

    def test_empty_phi_rejected_when_required(self):
        with pytest.raises(ProblemFormatError):
            problem_from_dict(base_doc(phi="if x > 2 then {0} else (0, 0)"))

    def test_phi_may_not_mention_y(self):
        with pytest.raises(ProblemFormatError):
            problem_from_dict(base_doc(phi="[y, 1]"))

    def test_bad_expected_status_rejected(self):
        with pytest.raises(ProblemFormatError):
            problem_from_dict(base_doc(expected={"kn_at": "MAYBE"}))

    def test_focus_outside_domain_rejected(self):
        with pytest.raises(ProblemFormatError):
            problem_from_dict(base_doc(focus={"x": "7"}))

    def test_corpus_files_all_load(self):
        cases = corpus.all_cases()
        assert len(cases) == 10
        assert sum(1 for c in cases if c.skip) == 1
        for c in cases:
            if not c.skip:
                assert c.problem is not None
                assert c.focus_x is not None


class TestSetExpressions:
    def test_round_trip(self):
        for text in [
            "[-1, 0)",
            "(-inf, +inf)",
            "{x}",
            "{0, -I{x == 0}}",
            "union({0}, [1, 2])",
            "if x > 0 then {1/x} else {0}",
            "ray(0, +inf, closed)",
        ]:
            node = parse_set_expr(text)
            assert parse_set_expr(print_set_expr(node)) == node

    def test_conditional_is_lazy(self):
        node = parse_set_expr("if x > 0 then {1/x} else {0}")
        assert eval_set(node, TaggedPoint.of(0)) == IntervalSet.point(0)
        assert eval_set(node, TaggedPoint.of(Fraction(1, 4))) == IntervalSet.point(4)

    def test_breakpoints_found(self):
        p = corpus.load_case("ex4_6").problem
        assert TaggedPoint.of(0) in p.x_breakpoints()

    def test_sliding_interval(self):
        node = parse_set_expr("[x - 1/2, x + 1/2]")
        got = eval_set(node, TaggedPoint.of(Fraction(1, 5)))
        assert got == IntervalSet.closed(Fraction(-3, 10), Fraction(7, 10))
