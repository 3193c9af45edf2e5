"""Brute-force minimization oracle, independent of the exact solver path.

Evaluates the cost directly on dense float grids (vectorized over numpy
arrays), includes closed endpoints exactly, approaches open endpoints
within 1e-9, and polishes the best bracket by golden section on the raw
scalar evaluator.  Used by tests to cross-check ``minimize.value``; it
shares no code with the piecewise-affine reduction it audits.
"""

from __future__ import annotations

import math

import numpy as np

from . import expr as ex
from .scalars import TaggedPoint
from .sets import IntervalSet

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def eval_expr_array(e, x: TaggedPoint, ys: np.ndarray, float_is_irrational: bool = False) -> np.ndarray:
    xv = x.numeric()
    if isinstance(e, ex.Const):
        return np.full_like(ys, float(e.value))
    if isinstance(e, ex.Var):
        return np.full_like(ys, xv) if e.name == "x" else ys
    if isinstance(e, ex.Neg):
        return -eval_expr_array(e.arg, x, ys, float_is_irrational)
    if isinstance(e, ex.Bin):
        lhs = eval_expr_array(e.lhs, x, ys, float_is_irrational)
        rhs = eval_expr_array(e.rhs, x, ys, float_is_irrational)
        if e.op == "+":
            return lhs + rhs
        if e.op == "-":
            return lhs - rhs
        if e.op == "*":
            return lhs * rhs
        with np.errstate(divide="ignore", invalid="ignore"):
            return lhs / rhs
    if isinstance(e, ex.Abs):
        return np.abs(eval_expr_array(e.arg, x, ys, float_is_irrational))
    if isinstance(e, ex.MinMax):
        lhs = eval_expr_array(e.lhs, x, ys, float_is_irrational)
        rhs = eval_expr_array(e.rhs, x, ys, float_is_irrational)
        return np.minimum(lhs, rhs) if e.op == "min" else np.maximum(lhs, rhs)
    if isinstance(e, ex.Indicator):
        return _pred_mask(e.pred, x, ys, float_is_irrational).astype(float)
    if isinstance(e, ex.Piecewise):
        mask = _pred_mask(e.pred, x, ys, float_is_irrational)
        return np.where(
            mask,
            eval_expr_array(e.if_true, x, ys, float_is_irrational),
            eval_expr_array(e.if_false, x, ys, float_is_irrational),
        )
    raise TypeError(f"not an expression node: {e!r}")


def _pred_mask(p, x: TaggedPoint, ys: np.ndarray, fir: bool) -> np.ndarray:
    if isinstance(p, ex.IsRational):
        flag = x.is_rational if p.var == "x" else False
        return np.full(ys.shape, flag, dtype=bool)
    lhs = eval_expr_array(p.lhs, x, ys, fir)
    rhs = eval_expr_array(p.rhs, x, ys, fir)
    ops = {
        "<": np.less,
        "<=": np.less_equal,
        ">": np.greater,
        ">=": np.greater_equal,
        "==": np.equal,
        "!=": np.not_equal,
    }
    return ops[p.op](lhs, rhs)


def _scalar(p, x: TaggedPoint, y: float) -> float:
    try:
        return p.eval_u(x, y).numeric()
    except ex.EvalError:
        return math.inf


def brute_force_value(
    p,
    x: TaggedPoint,
    samples_per_piece: int = 1_000_000,
    endpoint_eps: float = 1e-9,
) -> float:
    """Direct dense-sampling estimate of inf over Phi(x) of u(x, .).

    Unbounded pieces are clipped to an inflated copy of the y window; each
    bounded stretch is sampled uniformly, closed endpoints are included
    exactly, open endpoints are approached within ``endpoint_eps``, and the
    best bracket is golden-polished.  Returns +inf for an empty feasible set.
    """
    feasible: IntervalSet = p.eval_phi(x)
    if feasible.is_empty:
        return math.inf
    w_lo = p.y_window.inf_value().numeric()
    w_hi = p.y_window.sup_value().numeric()
    pad = 4.0 * max(abs(w_lo), abs(w_hi), 1.0, abs(x.numeric()))
    best = math.inf
    for seg in feasible.pieces:
        lo = seg.lo.numeric() if seg.lo.is_finite else -pad
        hi = seg.hi.numeric() if seg.hi.is_finite else pad
        if seg.lo.is_finite and not seg.lo_closed:
            lo += endpoint_eps
        if seg.hi.is_finite and not seg.hi_closed:
            hi -= endpoint_eps
        if hi < lo:
            continue
        if hi == lo:
            best = min(best, _scalar(p, x, lo))
            continue
        ys = np.linspace(lo, hi, samples_per_piece)
        vals = eval_expr_array(p.u, x, ys, p.float_is_irrational) if hasattr(p, "u") else None
        if vals is None:
            vals = np.array([_scalar(p, x, float(yv)) for yv in ys])
        vals = np.where(np.isnan(vals), np.inf, vals)
        idx = int(np.argmin(vals))
        if vals[idx] < best:
            best = float(vals[idx])
        a = float(ys[max(0, idx - 1)])
        b = float(ys[min(len(ys) - 1, idx + 1)])
        best = min(best, _golden_scalar(lambda t: _scalar(p, x, t), a, b))
    return best


def _golden_scalar(f, a: float, b: float, tol: float = 1e-12) -> float:
    if b - a <= tol:
        return f(0.5 * (a + b))
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return min(f1, f2)
