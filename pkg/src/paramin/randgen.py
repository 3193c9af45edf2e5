"""Random piecewise problems for property and soundness suites.

Generated costs are piecewise affine in the decision variable (products
always keep one factor free of y), with exact rational coefficients in
[-4, 4] and expression depth bounded by the caller.  Feasible mappings
are finite unions of constant, sliding, or conditionally switching
interval pieces inside a fixed compact decision window.  Problems load
through the standard document path, so every generated instance passes
the same validation as a file.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import expr as ex
from .problem import Problem, problem_from_dict
from .scalars import TaggedPoint


def _coeff(rng: random.Random) -> Fraction:
    den = rng.choice((1, 2, 4))
    return Fraction(rng.randint(-4 * den, 4 * den), den)


def _const(rng) -> ex.Const:
    return ex.Const(_coeff(rng))


def random_cost(rng: random.Random, depth: int, allow_y: bool = True, continuous: bool = False):
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.4:
            return _const(rng)
        if r < 0.75 and allow_y:
            return ex.Var("y")
        return ex.Var("x")
    kinds = ["add", "sub", "mul", "neg", "abs", "min", "max"]
    if not continuous:
        kinds += ["ind", "pw"]
    kind = rng.choice(kinds)
    sub = lambda ay: random_cost(rng, depth - 1, allow_y=ay, continuous=continuous)
    if kind == "add":
        return ex.Bin("+", sub(allow_y), sub(allow_y))
    if kind == "sub":
        return ex.Bin("-", sub(allow_y), sub(allow_y))
    if kind == "mul":
        if rng.random() < 0.5:
            return ex.Bin("*", sub(False), sub(allow_y))
        return ex.Bin("*", sub(allow_y), sub(False))
    if kind == "neg":
        inner = sub(allow_y)
        if isinstance(inner, ex.Const):
            return ex.Const(-inner.value)
        return ex.Neg(inner)
    if kind == "abs":
        return ex.Abs(sub(allow_y))
    if kind in ("min", "max"):
        return ex.MinMax(kind, sub(allow_y), sub(allow_y))
    pred = ex.Cmp(
        rng.choice(["<", "<=", ">", ">=", "==", "!="]),
        random_cost(rng, 1, allow_y=allow_y, continuous=True),
        random_cost(rng, 1, allow_y=allow_y, continuous=True),
    )
    if kind == "ind":
        return ex.Indicator(pred)
    return ex.Piecewise(pred, sub(allow_y), sub(allow_y))


def _interval_text(rng, lo: Fraction, hi: Fraction, slide: Fraction) -> str:
    lb = "[" if rng.random() < 0.7 else "("
    rb = "]" if rng.random() < 0.7 else ")"
    lo_s = _endpoint_text(lo, slide)
    hi_s = _endpoint_text(hi, slide)
    return f"{lb}{lo_s}, {hi_s}{rb}"


def _endpoint_text(c: Fraction, slide: Fraction) -> str:
    base = f"({c})" if c.denominator != 1 else str(c)
    if slide == 0:
        return base
    s = f"({slide})" if slide.denominator != 1 else str(slide)
    return f"{base} + {s}*x"


def random_phi_text(rng: random.Random, constant_compact: bool = False) -> str:
    if constant_compact:
        lo = Fraction(rng.randint(-10, 6), 2)
        hi = lo + Fraction(rng.randint(1, 8), 2)
        return f"[({lo}), ({hi})]"
    kind = rng.random()
    slide = rng.choice((Fraction(0), Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2)))
    lo = Fraction(rng.randint(-10, 4), 2)
    hi = lo + Fraction(rng.randint(0, 8), 2)
    if kind < 0.2 and hi > lo:
        main = _interval_text(rng, lo, hi, slide)
    elif kind < 0.35:
        main = "{%s}" % _endpoint_text(lo, slide)
    elif kind < 0.55 and hi > lo:
        other_lo = Fraction(rng.randint(-10, 4), 2)
        other_hi = other_lo + Fraction(rng.randint(1, 6), 2)
        main = f"union({_interval_text(rng, lo, max(hi, lo + 1), Fraction(0))}, {_interval_text(rng, other_lo, other_hi, Fraction(0))})"
    elif kind < 0.8:
        c = Fraction(rng.randint(-2, 2), 2)
        op = rng.choice(["<", "<=", ">", ">="])
        s1 = _interval_text(rng, lo, lo + Fraction(rng.randint(1, 6), 2), Fraction(0))
        s2 = _interval_text(rng, Fraction(rng.randint(-10, 4), 2), Fraction(rng.randint(5, 11), 2), Fraction(0))
        main = f"if x {op} ({c}) then {s1} else {s2}"
    else:
        main = _interval_text(rng, lo, max(hi, lo + 1), slide)
    return main


def random_problem(
    rng: random.Random,
    depth: int = 4,
    continuous: bool = False,
    constant_phi: bool = False,
    name: str = "",
) -> tuple[Problem, TaggedPoint]:
    """A validated random problem and a focus point inside its domain."""
    for attempt in range(40):
        u = random_cost(rng, rng.randint(1, depth), continuous=continuous)
        phi = random_phi_text(rng, constant_compact=constant_phi)
        doc = {
            "name": name or f"rand-{rng.randint(0, 10**9)}",
            "x_domain": "[-1, 1]",
            "y_domain": "[-16, 16]",
            "y_window": "[-12, 12]",
            "u": ex.print_expr(u),
            "phi": phi,
            "nonempty_required": True,
        }
        focus = TaggedPoint.of(rng.choice((Fraction(0), Fraction(1, 2), Fraction(-1, 2), Fraction(1, 4), Fraction(-1, 4))))
        doc["focus"] = {"x": str(focus.value)}
        try:
            parsed = problem_from_dict(doc)
        except Exception:
            continue
        return parsed.problem, focus
    raise RuntimeError("could not generate a valid random problem in 40 attempts")
