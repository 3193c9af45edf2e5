"""Exact scalar arithmetic: tagged points and extended reals.

A :class:`TaggedPoint` is a number of the form ``value + sqrt2_coef * sqrt(2)``
with both components exact rationals.  This field is closed under the four
arithmetic operations, supports an exact total order, and carries an exact
rationality predicate (``is_rational`` is true iff the sqrt(2) component is
zero).  Irrational sample points generated by the checkers are tagged points
with a nonzero sqrt(2) component, so rationality is decided by the tag and
never by inspecting a float.

An :class:`ExtendedReal` is a tagged point, a float (inexact), or one of the
two infinities.  Arithmetic follows inf/sup conventions; indeterminate forms
such as ``(+inf) + (-inf)`` raise :class:`InfArithmeticError` rather than
producing a silent result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

_SQRT2 = math.sqrt(2.0)

RationalLike = Union[int, Fraction]


class InfArithmeticError(ArithmeticError):
    """Raised for indeterminate extended-real forms (inf - inf, 0 * inf, ...)."""


def _tp(value: Fraction, coef: Fraction) -> "TaggedPoint":
    out = object.__new__(TaggedPoint)
    object.__setattr__(out, "value", value)
    object.__setattr__(out, "sqrt2_coef", coef)
    return out


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"expected an exact rational, got {type(v).__name__}")


@dataclass(frozen=True, eq=False)
class TaggedPoint:
    """Exact real of the form ``value + sqrt2_coef * sqrt(2)``."""

    value: Fraction
    sqrt2_coef: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "value", _as_fraction(self.value))
        object.__setattr__(self, "sqrt2_coef", _as_fraction(self.sqrt2_coef))

    # -- constructors ------------------------------------------------------

    @staticmethod
    def of(v: Union["TaggedPoint", RationalLike, str]) -> "TaggedPoint":
        """Coerce an exact value.  Floats are rejected: exactness is a promise."""
        if isinstance(v, TaggedPoint):
            return v
        return TaggedPoint(_as_fraction(v))

    @staticmethod
    def rational(num: int, den: int = 1) -> "TaggedPoint":
        return TaggedPoint(Fraction(num, den))

    @staticmethod
    def irrational(rational_part: RationalLike, sqrt2_part: RationalLike) -> "TaggedPoint":
        return TaggedPoint(_as_fraction(rational_part), _as_fraction(sqrt2_part))

    # -- predicates --------------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.sqrt2_coef == 0

    def numeric(self) -> float:
        """Float approximation, accurate to ~1e-15 relative error."""
        if self.sqrt2_coef == 0:
            return float(self.value)
        return float(self.value) + float(self.sqrt2_coef) * _SQRT2

    def __float__(self) -> float:
        return self.numeric()

    # -- exact sign and order ----------------------------------------------

    def sign(self) -> int:
        """Exact sign of value + sqrt2_coef*sqrt(2)."""
        a, b = self.value, self.sqrt2_coef
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # Mixed signs: compare a^2 with 2 b^2 (never equal unless both zero).
        if a > 0:  # b < 0
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1

    def _cmp_key(self, other) -> int:
        """Sign of (self - other) with other any exact/float real."""
        if isinstance(other, TaggedPoint):
            if self.sqrt2_coef == other.sqrt2_coef:
                a, b = self.value, other.value
                return (a > b) - (a < b)
            return _tp(self.value - other.value, self.sqrt2_coef - other.sqrt2_coef).sign()
        if isinstance(other, (int, Fraction)):
            if self.sqrt2_coef == 0:
                a = self.value
                return (a > other) - (a < other)
            return _tp(self.value - other, self.sqrt2_coef).sign()
        if isinstance(other, float):
            if math.isinf(other):
                return -1 if other > 0 else 1
            # float -> Fraction is exact, so the comparison is exact.
            return _tp(self.value - Fraction(other), self.sqrt2_coef).sign()
        return NotImplemented  # type: ignore[return-value]

    def __eq__(self, other) -> bool:
        if not isinstance(other, (TaggedPoint, int, float, Fraction)):
            return NotImplemented
        return self._cmp_key(other) == 0

    def __lt__(self, other) -> bool:
        k = self._cmp_key(other)
        if k is NotImplemented:
            return NotImplemented
        return k < 0

    def __le__(self, other) -> bool:
        k = self._cmp_key(other)
        if k is NotImplemented:
            return NotImplemented
        return k <= 0

    def __gt__(self, other) -> bool:
        return not self.__le__(other)

    def __ge__(self, other) -> bool:
        return not self.__lt__(other)

    def __hash__(self) -> int:
        if self.sqrt2_coef == 0:
            return hash(self.value)  # consistent with float/Fraction hashing
        return hash((self.value, self.sqrt2_coef))

    # -- field arithmetic ----------------------------------------------------

    def __add__(self, other) -> "TaggedPoint":
        o = TaggedPoint.of(other) if not isinstance(other, TaggedPoint) else other
        return _tp(self.value + o.value, self.sqrt2_coef + o.sqrt2_coef)

    __radd__ = __add__

    def __sub__(self, other) -> "TaggedPoint":
        o = TaggedPoint.of(other) if not isinstance(other, TaggedPoint) else other
        return _tp(self.value - o.value, self.sqrt2_coef - o.sqrt2_coef)

    def __rsub__(self, other) -> "TaggedPoint":
        return TaggedPoint.of(other) - self

    def __mul__(self, other) -> "TaggedPoint":
        o = TaggedPoint.of(other) if not isinstance(other, TaggedPoint) else other
        a, b, c, d = self.value, self.sqrt2_coef, o.value, o.sqrt2_coef
        if b == 0 and d == 0:
            return _tp(a * c, _F0)
        return _tp(a * c + 2 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TaggedPoint":
        o = TaggedPoint.of(other) if not isinstance(other, TaggedPoint) else other
        c, d = o.value, o.sqrt2_coef
        denom = c * c - 2 * d * d
        if denom == 0:
            raise ZeroDivisionError("division by zero tagged point")
        # 1/(c + d sqrt2) = (c - d sqrt2) / (c^2 - 2 d^2)
        inv = TaggedPoint(c / denom, -d / denom)
        return self * inv

    def __rtruediv__(self, other) -> "TaggedPoint":
        return TaggedPoint.of(other) / self

    def __neg__(self) -> "TaggedPoint":
        return _tp(-self.value, -self.sqrt2_coef)

    def __abs__(self) -> "TaggedPoint":
        return -self if self.sign() < 0 else self

    def __repr__(self) -> str:
        if self.sqrt2_coef == 0:
            return f"TaggedPoint({self.value})"
        return f"TaggedPoint({self.value} + {self.sqrt2_coef}*sqrt2)"

    def text(self) -> str:
        """Exact printable form, parseable by :func:`parse_point`."""
        if self.sqrt2_coef == 0:
            return str(self.value)
        if self.value == 0:
            return f"{self.sqrt2_coef}*sqrt2"
        coef = str(self.sqrt2_coef)
        if self.sqrt2_coef < 0:
            return f"{self.value}{coef}*sqrt2"
        return f"{self.value}+{coef}*sqrt2"


_F0 = Fraction(0)

ZERO = TaggedPoint(Fraction(0))
ONE = TaggedPoint(Fraction(1))


def parse_point(text: str) -> TaggedPoint:
    """Parse an exact point: 'p/q', '0.25', 'a+b*sqrt2', 'sqrt2/2', '-sqrt2'."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty point literal")

    def rat(tok: str) -> Fraction:
        if tok in ("", "+"):
            return Fraction(1)
        if tok == "-":
            return Fraction(-1)
        return Fraction(tok)  # handles 'p/q' and decimal strings exactly

    if "sqrt2" not in s:
        return TaggedPoint(rat(s))
    # Split into rational part and sqrt2 term.  Accepted shapes:
    #   [rat][+|-][coef*]sqrt2[/den]
    idx = s.index("sqrt2")
    head, tail = s[:idx], s[idx + len("sqrt2"):]
    den = Fraction(1)
    if tail.startswith("/"):
        den = Fraction(tail[1:])
        tail = ""
    if tail:
        raise ValueError(f"malformed point literal: {text!r}")
    coef_tok = head
    rational_part = Fraction(0)
    if head.endswith("*"):
        coef_tok = head[:-1]
        # look for a +/- splitting a leading rational part (not inside the coef)
        for i in range(len(coef_tok) - 1, 0, -1):
            if coef_tok[i] in "+-" and coef_tok[i - 1] not in "+-*/eE":
                rational_part = rat(coef_tok[:i])
                coef_tok = coef_tok[i:]
                break
        coef = rat(coef_tok)
    else:
        for i in range(len(coef_tok) - 1, 0, -1):
            if coef_tok[i] in "+-" and coef_tok[i - 1] not in "+-*/eE":
                rational_part = rat(coef_tok[:i])
                coef_tok = coef_tok[i:]
                break
        coef = rat(coef_tok)
    return TaggedPoint(rational_part, coef / den)


# ---------------------------------------------------------------------------
# Extended reals
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExtendedReal:
    """Element of the extended real line.

    ``payload`` is a :class:`TaggedPoint` (exact) or a float (inexact) for
    finite values and ``None`` for the infinities; ``inf_sign`` is -1, 0, +1.
    """

    payload: Union[TaggedPoint, float, None]
    inf_sign: int = 0

    # -- constructors ------------------------------------------------------

    @staticmethod
    def of(v) -> "ExtendedReal":
        if isinstance(v, ExtendedReal):
            return v
        if isinstance(v, TaggedPoint):
            return _xr(v)
        if isinstance(v, (int, Fraction)):
            return ExtendedReal(TaggedPoint.of(v))
        if isinstance(v, float):
            if math.isnan(v):
                raise ValueError("NaN is not an extended real")
            if math.isinf(v):
                return POS_INF if v > 0 else NEG_INF
            return ExtendedReal(v)
        raise TypeError(f"cannot make an ExtendedReal from {type(v).__name__}")

    def __post_init__(self):
        if self.inf_sign not in (-1, 0, 1):
            raise ValueError("inf_sign must be -1, 0, or +1")
        if (self.payload is None) != (self.inf_sign != 0):
            raise ValueError("payload must be None exactly for infinite values")

    # -- predicates --------------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.inf_sign == 0

    @property
    def is_pos_inf(self) -> bool:
        return self.inf_sign > 0

    @property
    def is_neg_inf(self) -> bool:
        return self.inf_sign < 0

    @property
    def is_exact(self) -> bool:
        return isinstance(self.payload, TaggedPoint)

    def numeric(self) -> float:
        if self.inf_sign:
            return math.inf * self.inf_sign
        if isinstance(self.payload, TaggedPoint):
            return self.payload.numeric()
        return self.payload  # type: ignore[return-value]

    def __float__(self) -> float:
        return self.numeric()

    def as_tagged(self) -> TaggedPoint:
        if not isinstance(self.payload, TaggedPoint):
            raise ValueError(f"{self!r} is not an exact finite value")
        return self.payload

    # -- order -------------------------------------------------------------

    def _cmp(self, other: "ExtendedReal") -> int:
        p = self.payload
        q = other.payload
        if type(p) is TaggedPoint and type(q) is TaggedPoint:
            if p.sqrt2_coef == q.sqrt2_coef:
                a, b = p.value, q.value
                return (a > b) - (a < b)
            return _tp(p.value - q.value, p.sqrt2_coef - q.sqrt2_coef).sign()
        if self.inf_sign or other.inf_sign:
            a, b = self.inf_sign, other.inf_sign
            if a != 0 and b != 0:
                return (a > b) - (a < b)
            if a != 0:
                return a
            return -b
        p, q = self.payload, other.payload
        if isinstance(p, TaggedPoint):
            return p._cmp_key(q)
        if isinstance(q, TaggedPoint):
            return -q._cmp_key(p)
        return (p > q) - (p < q)  # type: ignore[operator]

    def __eq__(self, other) -> bool:
        try:
            o = ExtendedReal.of(other)
        except TypeError:
            return NotImplemented
        return self._cmp(o) == 0

    def __lt__(self, other) -> bool:
        return self._cmp(ExtendedReal.of(other)) < 0

    def __le__(self, other) -> bool:
        return self._cmp(ExtendedReal.of(other)) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(ExtendedReal.of(other)) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(ExtendedReal.of(other)) >= 0

    def __hash__(self) -> int:
        if self.inf_sign:
            return hash(math.inf * self.inf_sign)
        return hash(self.payload)

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self) -> "ExtendedReal":
        if self.inf_sign:
            return NEG_INF if self.inf_sign > 0 else POS_INF
        return _xr(-self.payload)  # type: ignore[operator]

    def __abs__(self) -> "ExtendedReal":
        return -self if self < 0 else self

    def __add__(self, other) -> "ExtendedReal":
        o = ExtendedReal.of(other)
        if self.inf_sign or o.inf_sign:
            if self.inf_sign and o.inf_sign and self.inf_sign != o.inf_sign:
                raise InfArithmeticError("(+inf) + (-inf) is undefined")
            return POS_INF if (self.inf_sign or o.inf_sign) > 0 else NEG_INF
        p, q = self.payload, o.payload
        if type(p) is TaggedPoint and type(q) is TaggedPoint:
            return _xr(p + q)
        return _xr(float(self) + float(o))

    __radd__ = __add__

    def __sub__(self, other) -> "ExtendedReal":
        return self + (-ExtendedReal.of(other))

    def __rsub__(self, other) -> "ExtendedReal":
        return ExtendedReal.of(other) + (-self)

    def __mul__(self, other) -> "ExtendedReal":
        o = ExtendedReal.of(other)
        if self.inf_sign or o.inf_sign:
            if (self.is_finite and self == 0) or (o.is_finite and o == 0):
                raise InfArithmeticError("0 * inf is undefined")
            sign = (self.inf_sign or (1 if self > 0 else -1)) * (o.inf_sign or (1 if o > 0 else -1))
            return POS_INF if sign > 0 else NEG_INF
        p, q = self.payload, o.payload
        if type(p) is TaggedPoint and type(q) is TaggedPoint:
            return _xr(p * q)
        return _xr(float(self) * float(o))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExtendedReal":
        o = ExtendedReal.of(other)
        if o.is_finite and o == 0:
            raise ZeroDivisionError("division by zero")
        if self.inf_sign and o.inf_sign:
            raise InfArithmeticError("inf / inf is undefined")
        if o.inf_sign:
            return ExtendedReal(TaggedPoint.of(0))
        if self.inf_sign:
            sign = self.inf_sign * (1 if o > 0 else -1)
            return POS_INF if sign > 0 else NEG_INF
        p, q = self.payload, o.payload
        if type(p) is TaggedPoint and type(q) is TaggedPoint:
            return _xr(p / q)
        return _xr(float(self) / float(o))

    def __rtruediv__(self, other) -> "ExtendedReal":
        return ExtendedReal.of(other) / self

    def __repr__(self) -> str:
        if self.inf_sign > 0:
            return "ExtendedReal(+inf)"
        if self.inf_sign < 0:
            return "ExtendedReal(-inf)"
        return f"ExtendedReal({self.payload!r})"

    def text(self) -> str:
        if self.inf_sign > 0:
            return "+inf"
        if self.inf_sign < 0:
            return "-inf"
        if isinstance(self.payload, TaggedPoint):
            return self.payload.text()
        return repr(self.payload)


def _xr(payload) -> "ExtendedReal":
    out = object.__new__(ExtendedReal)
    object.__setattr__(out, "payload", payload)
    object.__setattr__(out, "inf_sign", 0)
    return out


POS_INF = ExtendedReal(None, 1)
NEG_INF = ExtendedReal(None, -1)
XR_ZERO = ExtendedReal(ZERO)


def xr_min(*vals: ExtendedReal) -> ExtendedReal:
    best = vals[0]
    for v in vals[1:]:
        if v < best:
            best = v
    return best


def xr_max(*vals: ExtendedReal) -> ExtendedReal:
    best = vals[0]
    for v in vals[1:]:
        if v > best:
            best = v
    return best


_SQRT2_CONVERGENTS: list[Fraction] = [Fraction(1), Fraction(3, 2)]


def sqrt2_convergent(n: int) -> Fraction:
    """n-th continued-fraction convergent of sqrt(2); error shrinks geometrically."""
    while len(_SQRT2_CONVERGENTS) <= n:
        p = _SQRT2_CONVERGENTS[-1]
        _SQRT2_CONVERGENTS.append(Fraction(p.numerator + 2 * p.denominator, p.numerator + p.denominator))
    return _SQRT2_CONVERGENTS[n]
