"""Golden corpus: packaged problem files with expected verdict maps."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Optional

from ..problem import Problem, ProblemDocument, problem_from_dict
from ..scalars import TaggedPoint

import sys

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml


@dataclass(frozen=True)
class CorpusCase:
    """One executable variant of a corpus example."""

    case_id: str
    example: str
    variant: str
    problem: Optional[Problem]
    focus_x: Optional[TaggedPoint]
    lam: Optional[Fraction]
    expected: dict[str, str]
    anchor: str
    skip: bool
    notes: str


def _load_case(name: str) -> CorpusCase:
    data = resources.files(__package__).joinpath(f"{name}.toml").read_bytes()
    doc: ProblemDocument = problem_from_dict(_toml.loads(data.decode("utf-8")), name_hint=name)
    notes = doc.problem.notes if doc.problem is not None else ""
    return CorpusCase(
        case_id=name,
        example=doc.example,
        variant=doc.variant,
        problem=doc.problem,
        focus_x=doc.focus_x,
        lam=doc.lam,
        expected=doc.expected,
        anchor=doc.anchor,
        skip=doc.skip,
        notes=notes,
    )


_CASE_FILES = [
    "ex4_1",
    "ex4_2",
    "ex4_3a",
    "ex4_3b",
    "ex4_4",
    "ex4_5",
    "ex4_6",
    "ex4_7",
    "ex4_8",
    "ex4_9",
]

# example id -> case ids (4.3 has two variants under one example)
EXAMPLES: dict[str, tuple[str, ...]] = {
    "ex4_1": ("ex4_1",),
    "ex4_2": ("ex4_2",),
    "ex4_3": ("ex4_3a", "ex4_3b"),
    "ex4_4": ("ex4_4",),
    "ex4_5": ("ex4_5",),
    "ex4_6": ("ex4_6",),
    "ex4_7": ("ex4_7",),
    "ex4_8": ("ex4_8",),
    "ex4_9": ("ex4_9",),
}


def load_case(case_id: str) -> CorpusCase:
    if case_id not in _CASE_FILES:
        raise KeyError(f"unknown corpus case {case_id!r}")
    return _load_case(case_id)


def all_cases() -> list[CorpusCase]:
    return [_load_case(n) for n in _CASE_FILES]


def cases_for(example_id: str) -> list[CorpusCase]:
    if example_id in EXAMPLES:
        return [_load_case(n) for n in EXAMPLES[example_id]]
    if example_id in _CASE_FILES:
        return [_load_case(example_id)]
    raise KeyError(f"unknown corpus case {example_id!r}")
