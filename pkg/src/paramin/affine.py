"""Exact piecewise-affine reduction of DSL expressions in one variable.

With the parameter fixed to an exact tagged point, every corpus cost is
piecewise affine in the decision variable: abs/min/max introduce kinks at
exactly computable points and indicators introduce jumps at predicate
boundaries.  Reducing to that form makes infima, argmin sets, and level
sets exactly computable with endpoint flags intact.

Expressions that are genuinely nonlinear in the reduction variable
(products or quotients of two variable-dependent factors) raise
:class:`NonAffineError`; callers fall back to a numeric path.

A reduction is a tuple of :class:`AffinePiece` covering the whole line.
Pieces on which evaluation is impossible (constant zero denominator)
carry an ``error`` marker instead of coefficients; the error surfaces
only if a query actually touches such a piece.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from . import expr as ex
from .scalars import NEG_INF, POS_INF, ExtendedReal, TaggedPoint
from .sets import Interval, IntervalSet, piece, _iv


class NonAffineError(ValueError):
    """Expression is not piecewise affine in the reduction variable."""


_TP_ZERO = TaggedPoint.of(0)
_TP_ONE = TaggedPoint.of(1)


@dataclass(frozen=True)
class AffinePiece:
    seg: Interval
    a: TaggedPoint = _TP_ZERO  # constant coefficient
    b: TaggedPoint = _TP_ZERO  # slope
    error: Optional[str] = None

    def value_at(self, y: TaggedPoint) -> TaggedPoint:
        if self.error:
            raise ex.EvalError(self.error, y=y)
        return self.a + self.b * y


PWA = tuple[AffinePiece, ...]


def _whole(a: TaggedPoint, b: TaggedPoint) -> PWA:
    return (AffinePiece(Interval(NEG_INF, POS_INF, False, False), a, b),)


def _seg_test_point(seg: Interval) -> TaggedPoint:
    """An exact interior probe point of a segment."""
    if seg.lo.is_finite and seg.hi.is_finite:
        if seg.is_singleton:
            return seg.lo.as_tagged()
        return ((seg.lo + seg.hi) / ExtendedReal.of(2)).as_tagged()
    if seg.lo.is_finite:
        return (seg.lo + ExtendedReal.of(1)).as_tagged()
    if seg.hi.is_finite:
        return (seg.hi - ExtendedReal.of(1)).as_tagged()
    return _TP_ZERO


def _atomize(breaks: Sequence[TaggedPoint]) -> list[Interval]:
    """Partition of the line into rays/opens/singletons at the given points."""
    pts = sorted(set(breaks))
    if not pts:
        return [_iv(NEG_INF, POS_INF, False, False)]
    segs: list[Interval] = [_iv(NEG_INF, ExtendedReal.of(pts[0]), False, False)]
    for i, p in enumerate(pts):
        xp = ExtendedReal.of(p)
        segs.append(_iv(xp, xp, True, True))
        nxt = ExtendedReal.of(pts[i + 1]) if i + 1 < len(pts) else POS_INF
        segs.append(_iv(xp, nxt, False, False))
    return segs


def _breakpoints(p: PWA) -> list[TaggedPoint]:
    out = []
    for ap in p:
        if ap.seg.lo.is_finite:
            out.append(ap.seg.lo.as_tagged())
        if ap.seg.hi.is_finite:
            out.append(ap.seg.hi.as_tagged())
    return out


def _piece_at(p: PWA, probe: TaggedPoint) -> AffinePiece:
    xp = ExtendedReal.of(probe)
    for ap in p:
        if ap.seg.member(xp):
            return ap
    raise AssertionError("reduction does not cover the line")


def _merge(pieces: list[AffinePiece]) -> PWA:
    out: list[AffinePiece] = []
    for ap in pieces:
        if out:
            prev = out[-1]
            contiguous = prev.seg.hi == ap.seg.lo and (prev.seg.hi_closed or ap.seg.lo_closed)
            same = prev.a == ap.a and prev.b == ap.b and prev.error == ap.error
            if contiguous and same:
                out[-1] = AffinePiece(
                    _iv(prev.seg.lo, ap.seg.hi, prev.seg.lo_closed, ap.seg.hi_closed),
                    prev.a,
                    prev.b,
                    prev.error,
                )
                continue
        out.append(ap)
    return tuple(out)


def _zip2(p: PWA, q: PWA, fn: Callable[[AffinePiece, AffinePiece, Interval], AffinePiece]) -> PWA:
    segs = _atomize(_breakpoints(p) + _breakpoints(q))
    out = []
    for seg in segs:
        probe = _seg_test_point(seg)
        out.append(fn(_piece_at(p, probe), _piece_at(q, probe), seg))
    return _merge(out)


def _map(p: PWA, fn: Callable[[AffinePiece], AffinePiece]) -> PWA:
    return _merge([fn(ap) for ap in p])


def _split_at_root(ap: AffinePiece) -> list[AffinePiece]:
    """Split a piece at the root of its affine function (if interior)."""
    if ap.error or ap.b == _TP_ZERO:
        return [ap]
    root = -ap.a / ap.b
    xr_root = ExtendedReal.of(root)
    if not (ap.seg.lo < xr_root < ap.seg.hi):
        return [ap]
    lo_part = piece(ap.seg.lo, xr_root, ap.seg.lo_closed, False)
    hi_part = piece(xr_root, ap.seg.hi, False, ap.seg.hi_closed)
    parts = []
    if lo_part:
        parts.append(AffinePiece(lo_part, ap.a, ap.b))
    parts.append(AffinePiece(Interval(xr_root, xr_root), ap.a, ap.b))
    if hi_part:
        parts.append(AffinePiece(hi_part, ap.a, ap.b))
    return parts


def reduce_affine(e, var: str, env: dict) -> PWA:
    """Reduce expression ``e`` to a piecewise-affine function of ``var``.

    ``env`` maps the other variable name to its exact TaggedPoint value.
    """
    fir = bool(env.get("__float_is_irrational__", False))

    def rec(node) -> PWA:
        if isinstance(node, ex.Const):
            return _whole(TaggedPoint.of(node.value), _TP_ZERO)
        if isinstance(node, ex.Var):
            if node.name == var:
                return _whole(_TP_ZERO, _TP_ONE)
            if node.name in env:
                return _whole(TaggedPoint.of(env[node.name]), _TP_ZERO)
            raise ex.EvalError(f"variable {node.name} has no value")
        if isinstance(node, ex.Neg):
            return _map(rec(node.arg), lambda ap: ap if ap.error else AffinePiece(ap.seg, -ap.a, -ap.b))
        if isinstance(node, ex.Bin):
            lhs, rhs = rec(node.lhs), rec(node.rhs)
            if node.op == "+":
                return _zip2(lhs, rhs, _add_piece)
            if node.op == "-":
                return _zip2(lhs, rhs, _sub_piece)
            if node.op == "*":
                return _zip2(lhs, rhs, _mul_piece)
            return _zip2(lhs, rhs, _div_piece)
        if isinstance(node, ex.Abs):
            parts = []
            for ap in rec(node.arg):
                for sub in _split_at_root(ap):
                    if sub.error:
                        parts.append(sub)
                        continue
                    probe = _seg_test_point(sub.seg)
                    if sub.value_at(probe).sign() < 0:
                        parts.append(AffinePiece(sub.seg, -sub.a, -sub.b))
                    else:
                        parts.append(sub)
            return _merge(parts)
        if isinstance(node, ex.MinMax):
            keep_min = node.op == "min"

            def pick(ap, bp, seg):
                if ap.error:
                    return AffinePiece(seg, error=ap.error)
                if bp.error:
                    return AffinePiece(seg, error=bp.error)
                pa = _seg_test_point(seg)
                va, vb = ap.value_at(pa), bp.value_at(pa)
                if (va <= vb) == keep_min and not va == vb:
                    return AffinePiece(seg, ap.a, ap.b)
                if not va == vb:
                    return AffinePiece(seg, bp.a, bp.b)
                return AffinePiece(seg, ap.a, ap.b)

            segs = _atomize(_breakpoints(rec_l := rec(node.lhs)) + _breakpoints(rec_r := rec(node.rhs)) + _crossings(rec_l, rec_r))
            out = []
            for seg in segs:
                probe = _seg_test_point(seg)
                out.append(pick(_piece_at(rec_l, probe), _piece_at(rec_r, probe), seg))
            return _merge(out)
        if isinstance(node, ex.Indicator):
            return _pred_pwa(node.pred, rec, fir, env)
        if isinstance(node, ex.Piecewise):
            ind = _pred_pwa(node.pred, rec, fir, env)
            t_pwa, f_pwa = rec(node.if_true), rec(node.if_false)
            segs = _atomize(_breakpoints(ind) + _breakpoints(t_pwa) + _breakpoints(f_pwa))
            out = []
            for seg in segs:
                probe = _seg_test_point(seg)
                ip = _piece_at(ind, probe)
                if ip.error:
                    out.append(AffinePiece(seg, error=ip.error))
                    continue
                src = _piece_at(t_pwa if ip.a == _TP_ONE else f_pwa, probe)
                out.append(AffinePiece(seg, src.a, src.b, src.error))
            return _merge(out)
        raise TypeError(f"not an expression node: {node!r}")

    return rec(e)


def _add_piece(ap: AffinePiece, bp: AffinePiece, seg: Interval) -> AffinePiece:
    if ap.error or bp.error:
        return AffinePiece(seg, error=ap.error or bp.error)
    return AffinePiece(seg, ap.a + bp.a, ap.b + bp.b)


def _sub_piece(ap: AffinePiece, bp: AffinePiece, seg: Interval) -> AffinePiece:
    if ap.error or bp.error:
        return AffinePiece(seg, error=ap.error or bp.error)
    return AffinePiece(seg, ap.a - bp.a, ap.b - bp.b)


def _mul_piece(ap: AffinePiece, bp: AffinePiece, seg: Interval) -> AffinePiece:
    if ap.error or bp.error:
        return AffinePiece(seg, error=ap.error or bp.error)
    if ap.b == _TP_ZERO:
        return AffinePiece(seg, ap.a * bp.a, ap.a * bp.b)
    if bp.b == _TP_ZERO:
        return AffinePiece(seg, bp.a * ap.a, bp.a * ap.b)
    raise NonAffineError("product of two variable-dependent factors")


def _div_piece(ap: AffinePiece, bp: AffinePiece, seg: Interval) -> AffinePiece:
    if ap.error or bp.error:
        return AffinePiece(seg, error=ap.error or bp.error)
    if bp.b != _TP_ZERO:
        raise NonAffineError("variable-dependent denominator")
    if bp.a == _TP_ZERO:
        return AffinePiece(seg, error="division by zero")
    return AffinePiece(seg, ap.a / bp.a, ap.b / bp.a)


def _crossings(p: PWA, q: PWA) -> list[TaggedPoint]:
    """Interior intersection points of two reductions (for min/max splits)."""
    segs = _atomize(_breakpoints(p) + _breakpoints(q))
    out = []
    for seg in segs:
        probe = _seg_test_point(seg)
        ap, bp = _piece_at(p, probe), _piece_at(q, probe)
        if ap.error or bp.error:
            continue
        db = ap.b - bp.b
        if db == _TP_ZERO:
            continue
        root = (bp.a - ap.a) / db
        if seg.lo < ExtendedReal.of(root) < seg.hi:
            out.append(root)
    return out


def _pred_pwa(pred, rec, fir: bool, env: dict) -> PWA:
    """Indicator of a predicate as a 0/1-valued reduction."""
    if isinstance(pred, ex.IsRational):
        v = env.get(pred.var)
        if isinstance(v, TaggedPoint):
            flag = v.is_rational
        elif isinstance(v, float):
            if not fir:
                raise ex.EvalError("rationality of an untagged float is undecidable")
            flag = False
        elif v is None:
            raise ex.EvalError(f"variable {pred.var} has no value")
        else:
            flag = True
        return _whole(_TP_ONE if flag else _TP_ZERO, _TP_ZERO)
    diff = _zip2(rec(pred.lhs), rec(pred.rhs), _sub_piece)
    parts: list[AffinePiece] = []
    at_zero = pred.op in ("<=", ">=", "==")
    for ap in diff:
        if ap.error:
            parts.append(ap)
            continue
        for sub in _split_at_root(ap):
            probe = _seg_test_point(sub.seg)
            v = sub.value_at(probe)
            s = v.sign()
            if s == 0:
                truth = at_zero
            elif pred.op in ("<", "<="):
                truth = s < 0
            elif pred.op in (">", ">="):
                truth = s > 0
            elif pred.op == "==":
                truth = False
            else:  # !=
                truth = True
            parts.append(AffinePiece(sub.seg, _TP_ONE if truth else _TP_ZERO, _TP_ZERO))
    return _merge(parts)


# ---------------------------------------------------------------------------
# Queries against a reduction
# ---------------------------------------------------------------------------


def pwa_value(p: PWA, y: TaggedPoint) -> TaggedPoint:
    return _piece_at(p, y).value_at(y)


def restrict(p: PWA, feasible: IntervalSet) -> list[tuple[Interval, AffinePiece]]:
    """Overlaps of reduction pieces with a feasible set, with error pieces surfaced."""
    out = []
    for fp in feasible.pieces:
        for ap in p:
            seg = ap.seg
            if seg.lo > fp.hi or fp.lo > seg.hi:
                continue
            lo = seg.lo if seg.lo > fp.lo else fp.lo
            lo_closed = (seg.lo_closed if seg.lo > fp.lo else fp.lo_closed) if seg.lo != fp.lo else (seg.lo_closed and fp.lo_closed)
            hi = seg.hi if seg.hi < fp.hi else fp.hi
            hi_closed = (seg.hi_closed if seg.hi < fp.hi else fp.hi_closed) if seg.hi != fp.hi else (seg.hi_closed and fp.hi_closed)
            if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
                continue
            try:
                ov = piece(lo, hi, lo_closed, hi_closed)
            except Exception:
                continue
            if ov is None:
                continue
            if ap.error:
                raise ex.EvalError(ap.error + f" on feasible piece {ov.text()}")
            out.append((ov, ap))
    return out
