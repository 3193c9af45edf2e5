"""Cost-expression DSL: AST, parser, printer, and exact evaluator.

The grammar (published in docs/grammar.txt) covers exact rational
constants, the variables ``x`` and ``y``, the four arithmetic operators,
``abs``, binary ``min``/``max``, indicator terms ``I{pred}``, and
``piecewise(pred, a, b)``.  Predicates are comparisons of subexpressions
plus the exact rationality test ``is_rat(x)``.

Evaluation is exact whenever the inputs are exact tagged points: the
result of every operation stays in the field Q(sqrt2).  Division by zero
and indeterminate infinite forms raise :class:`EvalError`; they are never
silently mapped to +-inf.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .scalars import ExtendedReal, InfArithmeticError, TaggedPoint


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class EvalError(ValueError):
    """Expression evaluation failed (division by zero, untagged float rationality, ...)."""

    def __init__(self, message: str, x=None, y=None):
        at = ""
        if x is not None or y is not None:
            at = f" at (x={x}, y={y})"
        super().__init__(message + at)
        self.x = x
        self.y = y


# ---------------------------------------------------------------------------
# AST nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str  # 'x' or 'y'


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str  # '+', '-', '*', '/'
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Abs:
    arg: "Expr"


@dataclass(frozen=True)
class MinMax:
    op: str  # 'min' or 'max'
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Cmp:
    op: str  # '<', '<=', '>', '>=', '==', '!='
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class IsRational:
    var: str  # 'x' (rationality of the parameter; decided by the tag)


Pred = Union[Cmp, IsRational]


@dataclass(frozen=True)
class Indicator:
    pred: Pred


@dataclass(frozen=True)
class Piecewise:
    pred: Pred
    if_true: "Expr"
    if_false: "Expr"


Expr = Union[Const, Var, Neg, Bin, Abs, MinMax, Indicator, Piecewise]


def free_vars(e) -> set[str]:
    if isinstance(e, Const):
        return set()
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, (Neg, Abs)):
        return free_vars(e.arg)
    if isinstance(e, (Bin, MinMax, Cmp)):
        return free_vars(e.lhs) | free_vars(e.rhs)
    if isinstance(e, IsRational):
        return {e.var}
    if isinstance(e, Indicator):
        return free_vars(e.pred)
    if isinstance(e, Piecewise):
        return free_vars(e.pred) | free_vars(e.if_true) | free_vars(e.if_false)
    raise TypeError(f"not an expression node: {e!r}")


def mentions_is_rational(e) -> bool:
    if isinstance(e, IsRational):
        return True
    if isinstance(e, (Const, Var)):
        return False
    if isinstance(e, (Neg, Abs)):
        return mentions_is_rational(e.arg)
    if isinstance(e, (Bin, MinMax, Cmp)):
        return mentions_is_rational(e.lhs) or mentions_is_rational(e.rhs)
    if isinstance(e, Indicator):
        return mentions_is_rational(e.pred)
    if isinstance(e, Piecewise):
        return any(mentions_is_rational(c) for c in (e.pred, e.if_true, e.if_false))
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = ("<=", ">=", "==", "!=", "<", ">", "+", "-", "*", "/", "(", ")", "{", "}", "[", "]", ",")
_UNICODE_MAP = str.maketrans({"−": "-", "×": "*", "÷": "/"})


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'ident', 'punct', 'end'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    src = text.translate(_UNICODE_MAP)
    toks: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (src[j].isdigit() or (src[j] == "." and not seen_dot)):
                if src[j] == ".":
                    seen_dot = True
                j += 1
            toks.append(Token("num", src[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(Token("ident", src[i:j], line, col))
            col += j - i
            i = j
            continue
        matched = None
        for p in _PUNCT:
            if src.startswith(p, i):
                matched = p
                break
        if matched is None:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        toks.append(Token("punct", matched, line, col))
        col += len(matched)
        i += len(matched)
    toks.append(Token("end", "", line, col))
    return toks


def _number_to_fraction(text: str) -> Fraction:
    # exact decimal semantics: "0.25" -> 1/4
    return Fraction(text)


# ---------------------------------------------------------------------------
# Parser (recursive descent)
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # expr := term (('+'|'-') term)*
    def expr(self) -> Expr:
        node = self.term()
        while self.peek().text in ("+", "-") and self.peek().kind == "punct":
            op = self.next().text
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek().text in ("*", "/") and self.peek().kind == "punct":
            op = self.next().text
            rhs = self.factor()
            if op == "/" and isinstance(node, Const) and isinstance(rhs, Const) and rhs.value != 0:
                node = Const(node.value / rhs.value)  # keep "5/3" a single constant
            else:
                node = Bin(op, node, rhs)
        return node

    def factor(self) -> Expr:
        if self.peek().text == "-" and self.peek().kind == "punct":
            self.next()
            inner = self.factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        return self.atom()

    def atom(self) -> Expr:
        t = self.peek()
        if t.kind == "num":
            self.next()
            return Const(_number_to_fraction(t.text))
        if t.kind == "punct" and t.text == "(":
            self.next()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "ident":
            name = self.next().text
            if name in ("x", "y"):
                return Var(name)
            if name == "abs":
                self.expect("(")
                node = self.expr()
                self.expect(")")
                return Abs(node)
            if name in ("min", "max"):
                self.expect("(")
                lhs = self.expr()
                self.expect(",")
                rhs = self.expr()
                self.expect(")")
                return MinMax(name, lhs, rhs)
            if name == "I":
                self.expect("{")
                pred = self.pred()
                self.expect("}")
                return Indicator(pred)
            if name == "piecewise":
                self.expect("(")
                pred = self.pred()
                self.expect(",")
                a = self.expr()
                self.expect(",")
                b = self.expr()
                self.expect(")")
                return Piecewise(pred, a, b)
            raise ParseError(f"unknown identifier {name!r}", t.line, t.col)
        raise ParseError(f"unexpected token {t.text!r}", t.line, t.col)

    def pred(self) -> Pred:
        t = self.peek()
        if t.kind == "ident" and t.text == "is_rat":
            self.next()
            self.expect("(")
            v = self.next()
            if v.kind != "ident" or v.text not in ("x", "y"):
                raise ParseError("is_rat applies to a variable", v.line, v.col)
            if v.text != "x":
                raise ParseError("is_rat is only defined for the parameter x", v.line, v.col)
            self.expect(")")
            return IsRational(v.text)
        lhs = self.expr()
        op_tok = self.next()
        if op_tok.text not in ("<", "<=", ">", ">=", "==", "!="):
            raise ParseError(f"expected a comparison operator, found {op_tok.text!r}", op_tok.line, op_tok.col)
        rhs = self.expr()
        return Cmp(op_tok.text, lhs, rhs)


def parse_expr(text: str) -> Expr:
    """Parse an expression; raises :class:`ParseError` with line/column info."""
    p = _Parser(tokenize(text))
    node = p.expr()
    end = p.peek()
    if end.kind != "end":
        raise ParseError(f"trailing input {end.text!r}", end.line, end.col)
    return node


def parse_pred(text: str) -> Pred:
    p = _Parser(tokenize(text))
    node = p.pred()
    end = p.peek()
    if end.kind != "end":
        raise ParseError(f"trailing input {end.text!r}", end.line, end.col)
    return node


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def print_expr(e) -> str:
    return _print(e, 0)


def _print(e, parent_prec: int) -> str:
    if isinstance(e, Const):
        s = str(e.value)
        # "p/q" re-lexes as a division, so fractional constants carry
        # multiplicative precedence and get parenthesized under '*' and '/'
        if e.value.denominator != 1 and parent_prec >= 2:
            return f"({s})"
        return s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        inner = _print(e.arg, 3)
        s = f"-{inner}"
        return f"({s})" if parent_prec >= 3 else s
    if isinstance(e, Bin):
        prec = _PREC[e.op]
        lhs = _print(e.lhs, prec - 1)
        rhs = _print(e.rhs, prec)  # right operand parenthesized at equal precedence
        s = f"{lhs} {e.op} {rhs}" if e.op in "+-" else f"{lhs}{e.op}{rhs}"
        return f"({s})" if parent_prec >= prec else s
    if isinstance(e, Abs):
        return f"abs({_print(e.arg, 0)})"
    if isinstance(e, MinMax):
        return f"{e.op}({_print(e.lhs, 0)}, {_print(e.rhs, 0)})"
    if isinstance(e, Indicator):
        return "I{%s}" % print_pred(e.pred)
    if isinstance(e, Piecewise):
        return f"piecewise({print_pred(e.pred)}, {_print(e.if_true, 0)}, {_print(e.if_false, 0)})"
    raise TypeError(f"not an expression node: {e!r}")


def print_pred(p) -> str:
    if isinstance(p, IsRational):
        return f"is_rat({p.var})"
    if isinstance(p, Cmp):
        return f"{_print(p.lhs, 0)} {p.op} {_print(p.rhs, 0)}"
    raise TypeError(f"not a predicate node: {p!r}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _lift(v) -> ExtendedReal:
    return ExtendedReal.of(v)


def eval_pred(
    p: Pred,
    x,
    y=None,
    *,
    float_is_irrational: bool = False,
) -> bool:
    if isinstance(p, IsRational):
        v = x if p.var == "x" else y
        if isinstance(v, TaggedPoint):
            return v.is_rational
        if isinstance(v, (int, Fraction)):
            return True
        if isinstance(v, float):
            if float_is_irrational:
                return False
            raise EvalError("rationality of an untagged float is undecidable", x=x, y=y)
        raise EvalError(f"is_rat applied to {type(v).__name__}", x=x, y=y)
    lhs = eval_expr(p.lhs, x, y, float_is_irrational=float_is_irrational)
    rhs = eval_expr(p.rhs, x, y, float_is_irrational=float_is_irrational)
    if p.op == "<":
        return lhs < rhs
    if p.op == "<=":
        return lhs <= rhs
    if p.op == ">":
        return lhs > rhs
    if p.op == ">=":
        return lhs >= rhs
    if p.op == "==":
        return lhs == rhs
    if p.op == "!=":
        return lhs != rhs
    raise TypeError(f"unknown comparison {p.op!r}")


def eval_expr(
    e: Expr,
    x,
    y=None,
    *,
    float_is_irrational: bool = False,
) -> ExtendedReal:
    """Evaluate an expression at (x, y); exact for tagged-point inputs."""
    try:
        return _eval(e, x, y, float_is_irrational)
    except ZeroDivisionError:
        raise EvalError("division by zero", x=x, y=y) from None
    except InfArithmeticError as exc:
        raise EvalError(str(exc), x=x, y=y) from None


_XR_ONE = ExtendedReal.of(1)
_XR_ZERO = ExtendedReal.of(0)


def _eval(e, x, y, fir) -> ExtendedReal:
    if isinstance(e, Const):
        return ExtendedReal.of(TaggedPoint.of(e.value))
    if isinstance(e, Var):
        v = x if e.name == "x" else y
        if v is None:
            raise EvalError(f"variable {e.name} has no value", x=x, y=y)
        return _lift(v)
    if isinstance(e, Neg):
        return -_eval(e.arg, x, y, fir)
    if isinstance(e, Bin):
        lhs = _eval(e.lhs, x, y, fir)
        rhs = _eval(e.rhs, x, y, fir)
        if e.op == "+":
            return lhs + rhs
        if e.op == "-":
            return lhs - rhs
        if e.op == "*":
            return lhs * rhs
        return lhs / rhs
    if isinstance(e, Abs):
        return abs(_eval(e.arg, x, y, fir))
    if isinstance(e, MinMax):
        lhs = _eval(e.lhs, x, y, fir)
        rhs = _eval(e.rhs, x, y, fir)
        if e.op == "min":
            return lhs if lhs <= rhs else rhs
        return lhs if lhs >= rhs else rhs
    if isinstance(e, Indicator):
        return _XR_ONE if eval_pred(e.pred, x, y, float_is_irrational=fir) else _XR_ZERO
    if isinstance(e, Piecewise):
        branch = e.if_true if eval_pred(e.pred, x, y, float_is_irrational=fir) else e.if_false
        return _eval(branch, x, y, fir)
    raise TypeError(f"not an expression node: {e!r}")
