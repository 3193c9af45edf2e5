"""paramin: parametric minimization with certified semicontinuity checks.

The package computes value functions v(x) = inf over the feasible set
Phi(x) of a cost u(x, y), recovers solution multifunctions and level sets,
and runs three-valued (HOLDS / FAILS / UNKNOWN) numerical checks for the
semicontinuity and compactness properties that local optimum theorems
hypothesize and conclude.  Every FAILS verdict carries a replayable
witness; a statement engine cross-validates hypothesis verdicts against
independently measured conclusions.
"""

__version__ = "0.1.0"

from .scalars import ExtendedReal, InfArithmeticError, TaggedPoint, parse_point
from .sets import (
    AccumulationResult,
    Interval,
    IntervalSet,
    MalformedIntervalError,
    accumulation_set,
    closure,
    dist,
    excess,
    gap,
    intersect,
    is_bounded,
    is_closed,
    is_compact,
    member,
    normalize,
    piece,
    union_sets,
)

__all__ = [
    "ExtendedReal",
    "InfArithmeticError",
    "TaggedPoint",
    "parse_point",
    "AccumulationResult",
    "Interval",
    "IntervalSet",
    "MalformedIntervalError",
    "accumulation_set",
    "closure",
    "dist",
    "excess",
    "gap",
    "intersect",
    "is_bounded",
    "is_closed",
    "is_compact",
    "member",
    "normalize",
    "piece",
    "union_sets",
    "__version__",
]
