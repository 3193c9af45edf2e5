"""Corpus execution: compare measured statuses against expected maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import corpus as corpus_pkg
from . import theorems as th
from .corpus import CorpusCase
from .scalars import TaggedPoint
from .theorems import STANDARD_EXTRA_CHECKS, EngineConfig, TheoremReport


@dataclass
class CaseOutcome:
    case_id: str
    example: str
    skipped: bool
    mismatches: list = field(default_factory=list)
    soundness_violations: list = field(default_factory=list)
    report: Optional[TheoremReport] = None
    checked: int = 0

    @property
    def ok(self) -> bool:
        return self.skipped or (not self.mismatches and not self.soundness_violations)


def run_case(case: CorpusCase, light: bool = False) -> CaseOutcome:
    if case.skip:
        return CaseOutcome(case.case_id, case.example, True)
    cfg = EngineConfig(
        lam=TaggedPoint.of(case.lam) if case.lam is not None else None,
        light=light,
    )
    extra = tuple(
        dict.fromkeys(
            list(STANDARD_EXTRA_CHECKS)
            + [k for k in case.expected if not _is_statement_id(k)]
        )
    )
    rep = th.evaluate(case.problem, case.focus_x, cfg, extra_checks=extra)
    mismatches = []
    for key, want in sorted(case.expected.items()):
        got = _measured_status(rep, key)
        if got != want:
            mismatches.append({"key": key, "expected": want, "measured": got})
    return CaseOutcome(
        case.case_id,
        case.example,
        False,
        mismatches,
        list(rep.violations),
        rep,
        len(case.expected),
    )


def _is_statement_id(key: str) -> bool:
    return key in {s.statement_id for s in th.statement_catalog()}


def _measured_status(rep: TheoremReport, key: str) -> str:
    if key in rep.statements:
        return rep.statements[key].status
    v = rep.checks.get(key)
    if v is None:
        return "MISSING"
    return v.status


def run_examples(example_id: Optional[str] = None, light: bool = False) -> list[CaseOutcome]:
    if example_id is None:
        cases = corpus_pkg.all_cases()
    else:
        cases = corpus_pkg.cases_for(example_id)
    return [run_case(c, light=light) for c in cases]
