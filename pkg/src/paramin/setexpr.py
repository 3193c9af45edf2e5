"""Set-expression DSL for feasible mappings x -> IntervalSet.

Shapes: interval literals with expression endpoints and open/closed
brackets, singleton lists ``{e1, e2, ...}``, ``union(S1, S2, ...)``,
``ray(a, +inf, open|closed)``, and conditionals
``if pred then S1 else S2``.  Endpoint expressions may mention only the
parameter ``x``; conditional branches evaluate lazily, so division by
zero inside a branch that is not taken is harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import expr as ex
from .scalars import NEG_INF, POS_INF, ExtendedReal, TaggedPoint
from .sets import IntervalSet, MalformedIntervalError, normalize, piece


class SetEvalError(ValueError):
    def __init__(self, message: str, x=None):
        super().__init__(f"{message}" + (f" at x={x}" if x is not None else ""))
        self.x = x


@dataclass(frozen=True)
class SetInterval:
    lo: Optional[ex.Expr]  # None = -inf
    hi: Optional[ex.Expr]  # None = +inf
    lo_closed: bool
    hi_closed: bool


@dataclass(frozen=True)
class SetUnion:
    items: tuple["SetExpr", ...]


@dataclass(frozen=True)
class SetIf:
    pred: ex.Pred
    if_true: "SetExpr"
    if_false: "SetExpr"


SetExpr = Union[SetInterval, SetUnion, SetIf]


def _singleton(e: ex.Expr) -> SetInterval:
    return SetInterval(e, e, True, True)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _SetParser(ex._Parser):
    def setexpr(self) -> SetExpr:
        t = self.peek()
        if t.kind == "punct" and t.text in ("[", "("):
            return self.interval()
        if t.kind == "punct" and t.text == "{":
            return self.points()
        if t.kind == "ident" and t.text == "union":
            self.next()
            self.expect("(")
            items = [self.setexpr()]
            while self.peek().text == ",":
                self.next()
                items.append(self.setexpr())
            self.expect(")")
            return SetUnion(tuple(items))
        if t.kind == "ident" and t.text == "ray":
            return self.ray()
        if t.kind == "ident" and t.text == "if":
            self.next()
            pred = self.pred()
            tok = self.next()
            if tok.text != "then":
                raise ex.ParseError("expected 'then'", tok.line, tok.col)
            a = self.setexpr()
            tok = self.next()
            if tok.text != "else":
                raise ex.ParseError("expected 'else'", tok.line, tok.col)
            b = self.setexpr()
            return SetIf(pred, a, b)
        raise ex.ParseError(f"expected a set expression, found {t.text!r}", t.line, t.col)

    def bound(self) -> Optional[ex.Expr]:
        t = self.peek()
        if t.kind == "ident" and t.text == "inf":
            self.next()
            return None
        if t.kind == "punct" and t.text in ("+", "-"):
            nxt = self.toks[self.pos + 1]
            if nxt.kind == "ident" and nxt.text == "inf":
                self.next()
                self.next()
                return None
        return self.expr()

    def interval(self) -> SetInterval:
        opener = self.next()
        lo_closed = opener.text == "["
        lo = self.bound()
        self.expect(",")
        hi = self.bound()
        closer = self.next()
        if closer.text not in ("]", ")"):
            raise ex.ParseError(f"expected interval close, found {closer.text!r}", closer.line, closer.col)
        hi_closed = closer.text == "]"
        return SetInterval(lo, hi, lo_closed and lo is not None, hi_closed and hi is not None)

    def points(self) -> SetExpr:
        self.expect("{")
        items = [self.expr()]
        while self.peek().text == ",":
            self.next()
            items.append(self.expr())
        self.expect("}")
        if len(items) == 1:
            return _singleton(items[0])
        return SetUnion(tuple(_singleton(e) for e in items))

    def ray(self) -> SetInterval:
        self.next()
        self.expect("(")
        lo = self.bound()
        self.expect(",")
        hi = self.bound()
        self.expect(",")
        flag = self.next()
        if flag.text not in ("open", "closed"):
            raise ex.ParseError("ray flag must be 'open' or 'closed'", flag.line, flag.col)
        self.expect(")")
        closed = flag.text == "closed"
        if lo is None and hi is None:
            raise ex.ParseError("ray needs one finite endpoint", flag.line, flag.col)
        if lo is None:
            return SetInterval(None, hi, False, closed)
        if hi is None:
            return SetInterval(lo, None, closed, False)
        raise ex.ParseError("ray needs exactly one infinite endpoint", flag.line, flag.col)


def parse_set_expr(text: str) -> SetExpr:
    p = _SetParser(ex.tokenize(text))
    node = p.setexpr()
    end = p.peek()
    if end.kind != "end":
        raise ex.ParseError(f"trailing input {end.text!r}", end.line, end.col)
    return node


def print_set_expr(s: SetExpr) -> str:
    if isinstance(s, SetInterval):
        if s.lo is not None and s.hi is not None and s.lo == s.hi and s.lo_closed and s.hi_closed:
            return "{%s}" % ex.print_expr(s.lo)
        lo = ex.print_expr(s.lo) if s.lo is not None else "-inf"
        hi = ex.print_expr(s.hi) if s.hi is not None else "+inf"
        lb = "[" if s.lo_closed else "("
        rb = "]" if s.hi_closed else ")"
        return f"{lb}{lo}, {hi}{rb}"
    if isinstance(s, SetUnion):
        return "union(%s)" % ", ".join(print_set_expr(i) for i in s.items)
    if isinstance(s, SetIf):
        return f"if {ex.print_pred(s.pred)} then {print_set_expr(s.if_true)} else {print_set_expr(s.if_false)}"
    raise TypeError(f"not a set expression: {s!r}")


# ---------------------------------------------------------------------------
# Evaluation and structure queries
# ---------------------------------------------------------------------------


def set_free_vars(s: SetExpr) -> set[str]:
    if isinstance(s, SetInterval):
        out = set()
        if s.lo is not None:
            out |= ex.free_vars(s.lo)
        if s.hi is not None:
            out |= ex.free_vars(s.hi)
        return out
    if isinstance(s, SetUnion):
        out = set()
        for i in s.items:
            out |= set_free_vars(i)
        return out
    if isinstance(s, SetIf):
        return ex.free_vars(s.pred) | set_free_vars(s.if_true) | set_free_vars(s.if_false)
    raise TypeError(f"not a set expression: {s!r}")


def eval_set(s: SetExpr, x: TaggedPoint, *, float_is_irrational: bool = False) -> IntervalSet:
    """Evaluate a set expression at x; always returns a canonical IntervalSet."""
    try:
        return normalize(_collect(s, x, float_is_irrational))
    except MalformedIntervalError as exc:
        raise SetEvalError(str(exc), x=x) from None
    except ex.EvalError as exc:
        raise SetEvalError(f"endpoint expression error: {exc}", x=x) from None


def _collect(s: SetExpr, x: TaggedPoint, fir: bool) -> list:
    if isinstance(s, SetInterval):
        lo = NEG_INF if s.lo is None else ExtendedReal.of(ex.eval_expr(s.lo, x, None, float_is_irrational=fir))
        hi = POS_INF if s.hi is None else ExtendedReal.of(ex.eval_expr(s.hi, x, None, float_is_irrational=fir))
        p = piece(lo, hi, s.lo_closed, s.hi_closed)
        return [p] if p is not None else []
    if isinstance(s, SetUnion):
        out = []
        for item in s.items:
            out.extend(_collect(item, x, fir))
        return out
    if isinstance(s, SetIf):
        branch = s.if_true if ex.eval_pred(s.pred, x, None, float_is_irrational=fir) else s.if_false
        return _collect(branch, x, fir)
    raise TypeError(f"not a set expression: {s!r}")


def set_breakpoints_in_x(s: SetExpr) -> list[ex.Expr]:
    """Expressions whose roots in x mark structural switches of the mapping."""
    out: list[ex.Expr] = []
    if isinstance(s, SetInterval):
        return out
    if isinstance(s, SetUnion):
        for i in s.items:
            out.extend(set_breakpoints_in_x(i))
        return out
    if isinstance(s, SetIf):
        if isinstance(s.pred, ex.Cmp):
            out.append(ex.Bin("-", s.pred.lhs, s.pred.rhs))
        out.extend(set_breakpoints_in_x(s.if_true))
        out.extend(set_breakpoints_in_x(s.if_false))
        return out
    raise TypeError(f"not a set expression: {s!r}")
