"""Sequence plans, shrinking-ball ladders, and limit-trend classification.

A scheme generates a geometric parameter sequence x_n = x +- d0 * r^n
toward a focus point, optionally tagged to stay rational or irrational
(used when a cost mentions the rationality predicate).  A plan bundles
schemes with an adversarial-search budget and the decision tolerance.

Checks reduce to classifying nonnegative trend sequences (deficits,
distances, excesses) along a ladder: converging to zero means no
violation, stalling above tolerance is a certified violation, geometric
growth is an escape, anything else is honestly unsettled.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .scalars import ExtendedReal, TaggedPoint, sqrt2_convergent
from .sets import IntervalSet, intersect

TOL_CHECK = 1e-7
TOL_GEOM = 1e-9

SEED_ENV = "PARAMIN_SEED"


def plan_seed() -> int:
    try:
        return int(os.environ.get(SEED_ENV, "0"))
    except ValueError:
        return 0


@dataclass(frozen=True)
class Scheme:
    scheme_id: str
    direction: int  # +1 or -1
    delta0: Fraction
    ratio: Fraction
    depth: int
    tag: str = "none"  # 'none' | 'rational' | 'irrational'

    def points(self, x: TaggedPoint, domain: IntervalSet) -> list[TaggedPoint]:
        """Sequence prefix x_n -> x inside the domain (x itself excluded)."""
        out = []
        step = self.delta0
        for n in range(1, self.depth + 1):
            step = step * self.ratio
            if self.tag == "irrational":
                cand = TaggedPoint(x.value, x.sqrt2_coef + self.direction * step / 2)
            elif self.tag == "rational":
                if x.is_rational:
                    cand = TaggedPoint(x.value + self.direction * step)
                else:
                    # rational approach to an irrational focus via sqrt2 convergents
                    # (consecutive convergents alternate sides of sqrt2)
                    idx = min(2 * n + (1 if self.direction > 0 else 2), 60)
                    cand = TaggedPoint(x.value + x.sqrt2_coef * sqrt2_convergent(idx))
            else:
                cand = TaggedPoint(x.value + self.direction * step, x.sqrt2_coef)
            if cand == x:
                continue
            if domain.member(cand):
                out.append(cand)
        return out


@dataclass(frozen=True)
class SequencePlan:
    schemes: tuple[Scheme, ...]
    adversarial_budget: int = 10_000
    tol_check: float = TOL_CHECK
    ladder_depth: int = 20
    y_samples: int = 33
    grid_points: int = 9
    seed: int = 0
    light: bool = False

    def ladder(self) -> list[Fraction]:
        return [Fraction(1, 2 ** k) for k in range(1, self.ladder_depth + 1)]


def default_plan(problem, focus: Optional[TaggedPoint] = None, light: bool = False) -> SequencePlan:
    """Plan with geometric two-sided schemes sized to the analysis window."""
    region = intersect(problem.x_window, problem.x_domain)
    width = (region.sup_value() - region.inf_value()).as_tagged().value if region.is_nonempty else Fraction(1)
    if width <= 0:
        width = Fraction(1)
    delta0 = width / 10
    depth = 14 if light else 28
    ratio = Fraction(1, 2)
    schemes = []
    tags = ["none"]
    if problem.mentions_rationality:
        tags += ["rational", "irrational"]
    for tag in tags:
        for direction in (1, -1):
            sid = f"geo:{'+' if direction > 0 else '-'}:d0={delta0}:r={ratio}:N={depth}:tag={tag}"
            schemes.append(Scheme(sid, direction, delta0, ratio, depth, tag))
    return SequencePlan(
        schemes=tuple(schemes),
        adversarial_budget=2_000 if light else 10_000,
        ladder_depth=8 if light else 16,
        y_samples=3 if light else 5,
        grid_points=4 if light else 9,
        seed=plan_seed(),
        light=light,
    )


def adversarial_offsets(plan: SequencePlan, width: Fraction, count: int = 12) -> list[Fraction]:
    """Seeded exact-rational offsets used to pick worst-case directions."""
    rng = random.Random(plan.seed)
    out = []
    denom = 2048
    for _ in range(count):
        num = rng.randint(1, denom - 1)
        sign = 1 if rng.random() < 0.5 else -1
        out.append(sign * width * Fraction(num, denom))
    return out


# ---------------------------------------------------------------------------
# Trend classification
# ---------------------------------------------------------------------------

ZERO = "zero"
STALL = "stall"
DIVERGE = "diverge"
UNSETTLED = "unsettled"


def classify_trend(vals: list[float], tol: float, lookback: int = 5) -> tuple[str, float]:
    """Classify a nonnegative ladder sequence; returns (kind, level).

    ``zero``: the extrapolated limit is at or below tol (no violation).
    ``stall``: the tail settles at a level above tol (certified violation);
    ``diverge``: the tail grows geometrically or hits infinity;
    ``unsettled``: budget exhausted without a stable trend.
    """
    xs = [v for v in vals if not math.isnan(v)]
    if not xs:
        return UNSETTLED, 0.0
    tail = xs[-min(len(xs), lookback + 1):]
    last = tail[-1]
    if math.isinf(last):
        return DIVERGE, math.inf
    if len(xs) >= 3 and all(math.isfinite(v) for v in tail):
        if last > max(4.0 * tail[0], tol) and tail[0] > 0 and last > 100 * tol:
            return DIVERGE, last
    if last <= tol:
        return ZERO, last
    limit = _extrapolate_tail(xs)
    if limit <= tol:
        return ZERO, last
    lo, hi = min(tail), max(tail)
    if lo > tol and hi <= 2.0 * max(lo, tol):
        return STALL, lo
    if hi <= tol:
        return ZERO, hi
    # shrinking but not arrived, or oscillating across the threshold
    if len(tail) >= 3 and tail[-1] < 0.5 * tail[0]:
        return UNSETTLED, last
    if lo > tol:
        return STALL, lo
    return UNSETTLED, last


def _extrapolate_tail(xs: list[float]) -> float:
    if len(xs) < 3:
        return xs[-1]
    x0, x1, x2 = xs[-3], xs[-2], xs[-1]
    if not all(math.isfinite(v) for v in (x0, x1, x2)):
        return x2
    d1, d2 = x1 - x0, x2 - x1
    if d2 == 0:
        return x2
    if abs(d2) >= abs(d1):
        return x2
    denom = d2 - d1
    if denom == 0:
        return x2
    cand = x2 - d2 * d2 / denom
    if abs(cand - x2) > 2 * abs(d2):
        return x2
    return max(cand, 0.0)


def tail_min(vals: list[float], k: int = 6) -> float:
    xs = vals[-min(len(vals), k):]
    return min(xs) if xs else math.inf


def tail_max(vals: list[float], k: int = 6) -> float:
    xs = vals[-min(len(vals), k):]
    return max(xs) if xs else -math.inf
