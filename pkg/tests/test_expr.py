"""Parser round-trips, exact evaluation, and piecewise-affine reduction."""

import random
from fractions import Fraction

import pytest

from paramin import expr as ex
from paramin.affine import NonAffineError, pwa_value, reduce_affine
from paramin.scalars import ExtendedReal, TaggedPoint


def tp(v, s=0):
    return TaggedPoint(Fraction(v), Fraction(s))


class TestParse:
    def test_corpus_costs_parse(self):
        ast = ex.parse_expr("min(abs(x - y), 1)")
        assert isinstance(ast, ex.MinMax)
        ast = ex.parse_expr("y*I{x > 0}")
        assert isinstance(ast, ex.Bin) and isinstance(ast.rhs, ex.Indicator)
        ast = ex.parse_expr("-x*I{is_rat(x)}")
        assert isinstance(ast, ex.Bin) and isinstance(ast.lhs, ex.Neg)

    def test_error_position(self):
        with pytest.raises(ex.ParseError) as ei:
            ex.parse_expr("min(x,")
        assert "column" in str(ei.value)

    def test_unknown_identifier(self):
        with pytest.raises(ex.ParseError):
            ex.parse_expr("z + 1")

    def test_decimal_is_exact(self):
        ast = ex.parse_expr("0.25")
        assert ast == ex.Const(Fraction(1, 4))

    def test_constant_fraction_folds(self):
        assert ex.parse_expr("5/3") == ex.Const(Fraction(5, 3))
        assert ex.parse_expr("-2") == ex.Const(Fraction(-2))


def random_expr(rng, depth, allow_y=True, continuous=False):
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.45:
            return ex.Const(Fraction(rng.randint(-16, 16), rng.randint(1, 4)))
        if r < 0.75 and allow_y:
            return ex.Var("y")
        return ex.Var("x")
    kind = rng.choice(["add", "sub", "mul", "neg", "abs", "min", "max"] + ([] if continuous else ["ind", "pw"]))
    sub = lambda ay: random_expr(rng, depth - 1, allow_y=ay, continuous=continuous)
    if kind == "add":
        return ex.Bin("+", sub(allow_y), sub(allow_y))
    if kind == "sub":
        return ex.Bin("-", sub(allow_y), sub(allow_y))
    if kind == "mul":
        # keep one factor free of y so the result stays affine in y
        if rng.random() < 0.5:
            return ex.Bin("*", sub(False), sub(allow_y))
        return ex.Bin("*", sub(allow_y), sub(False))
    if kind == "neg":
        inner = sub(allow_y)
        # mirror the parser's constant folding so round-trips are structural
        if isinstance(inner, ex.Const):
            return ex.Const(-inner.value)
        return ex.Neg(inner)
    if kind == "abs":
        return ex.Abs(sub(allow_y))
    if kind in ("min", "max"):
        return ex.MinMax(kind, sub(allow_y), sub(allow_y))
    pred = ex.Cmp(rng.choice(["<", "<=", ">", ">=", "==", "!="]), sub(allow_y), sub(allow_y))
    if kind == "ind":
        return ex.Indicator(pred)
    return ex.Piecewise(pred, sub(allow_y), sub(allow_y))


class TestRoundTrip:
    def test_random_asts_round_trip(self):
        rng = random.Random(101)
        for _ in range(400):
            ast = random_expr(rng, rng.randint(0, 6))
            text = ex.print_expr(ast)
            assert ex.parse_expr(text) == ast, text

    def test_corpus_strings_round_trip(self):
        for text in [
            "min(abs(x - y), 1)",
            "y*I{x > 0}",
            "-x*I{is_rat(x)}",
            "I{x != 0}",
            "I{x - y < 0}",
            "abs(x - y)",
            "piecewise(x <= 1/2, x + y, 2 - y)",
        ]:
            ast = ex.parse_expr(text)
            assert ex.parse_expr(ex.print_expr(ast)) == ast


class TestEval:
    def test_rational_indicator(self):
        ast = ex.parse_expr("-x*I{is_rat(x)}")
        assert ex.eval_expr(ast, tp(Fraction(1, 3)), tp(0)) == Fraction(-1, 3)
        irr = TaggedPoint(Fraction(0), Fraction(1, 2))  # sqrt2/2
        assert ex.eval_expr(ast, irr, tp(0)) == 0

    def test_indicator_at_zero(self):
        ast = ex.parse_expr("I{x != 0}")
        assert ex.eval_expr(ast, tp(0), tp(0)) == 0
        assert ex.eval_expr(ast, tp(1), tp(0)) == 1

    def test_division_by_zero_errors(self):
        ast = ex.parse_expr("1/x")
        with pytest.raises(ex.EvalError):
            ex.eval_expr(ast, tp(0), tp(0))

    def test_exact_rational_agreement(self):
        # independent big-rational evaluator over indicator-free ASTs
        def slow_eval(e, x: Fraction, y: Fraction) -> Fraction:
            if isinstance(e, ex.Const):
                return e.value
            if isinstance(e, ex.Var):
                return x if e.name == "x" else y
            if isinstance(e, ex.Neg):
                return -slow_eval(e.arg, x, y)
            if isinstance(e, ex.Abs):
                return abs(slow_eval(e.arg, x, y))
            if isinstance(e, ex.Bin):
                l, r = slow_eval(e.lhs, x, y), slow_eval(e.rhs, x, y)
                return {"+": l + r, "-": l - r, "*": l * r, "/": l / r if r != 0 else None}[e.op]
            if isinstance(e, ex.MinMax):
                l, r = slow_eval(e.lhs, x, y), slow_eval(e.rhs, x, y)
                return min(l, r) if e.op == "min" else max(l, r)
            if isinstance(e, ex.Indicator):
                return Fraction(1) if slow_pred(e.pred, x, y) else Fraction(0)
            if isinstance(e, ex.Piecewise):
                return slow_eval(e.if_true if slow_pred(e.pred, x, y) else e.if_false, x, y)
            raise TypeError

        def slow_pred(p, x, y):
            l, r = slow_eval(p.lhs, x, y), slow_eval(p.rhs, x, y)
            return {"<": l < r, "<=": l <= r, ">": l > r, ">=": l >= r, "==": l == r, "!=": l != r}[p.op]

        rng = random.Random(77)
        checked = 0
        for _ in range(400):
            ast = random_expr(rng, rng.randint(0, 5))
            xv = Fraction(rng.randint(-8, 8), rng.randint(1, 4))
            yv = Fraction(rng.randint(-8, 8), rng.randint(1, 4))
            try:
                want = slow_eval(ast, xv, yv)
            except ZeroDivisionError:
                continue
            if want is None:
                continue
            got = ex.eval_expr(ast, tp(xv), tp(yv))
            assert got == want
            checked += 1
        assert checked > 200


class TestAffineReduction:
    def test_matches_direct_eval(self):
        rng = random.Random(55)
        checked = 0
        for _ in range(300):
            ast = random_expr(rng, rng.randint(0, 5))
            xv = tp(Fraction(rng.randint(-6, 6), rng.randint(1, 3)))
            try:
                pwa = reduce_affine(ast, "y", {"x": xv})
            except NonAffineError:
                continue
            except ex.EvalError:
                continue
            for _ in range(6):
                yv = tp(Fraction(rng.randint(-20, 20), rng.randint(1, 4)))
                try:
                    want = ex.eval_expr(ast, xv, yv)
                except ex.EvalError:
                    with pytest.raises(ex.EvalError):
                        pwa_value(pwa, yv)
                    continue
                assert ExtendedReal.of(pwa_value(pwa, yv)) == want
                checked += 1
        assert checked > 400

    def test_nonlinear_rejected(self):
        ast = ex.parse_expr("y*y")
        with pytest.raises(NonAffineError):
            reduce_affine(ast, "y", {"x": tp(0)})

    def test_reduction_in_x(self):
        ast = ex.parse_expr("abs(x) + 1")
        pwa = reduce_affine(ast, "x", {})
        assert pwa_value(pwa, tp(-3)) == 4
        assert pwa_value(pwa, tp(2)) == 3
