"""Analysis-report assembly and canonical serialization.

Reports serialize to a schema-versioned JSON document with byte-stable
key ordering and floats rendered to 12 significant digits, so two runs of
the same tool version on the same inputs produce byte-identical output.
Exact quantities carry both their exact text form and a float rendering.
"""

from __future__ import annotations

import json
import math
from typing import Optional

from . import minimize as mz
from .scalars import ExtendedReal, TaggedPoint
from .sets import IntervalSet
from .theorems import TheoremReport
from .verdicts import Verdict

SCHEMA = "paramin-report/1"


def _fmt_float(v: float) -> str:
    if math.isinf(v):
        return '"+inf"' if v > 0 else '"-inf"'
    if math.isnan(v):
        return '"nan"'
    if v == int(v) and abs(v) < 1e15:
        return format(v, ".1f")
    return format(v, ".12g")


def canonical_json(obj, indent: int = 0, pretty: bool = True) -> str:
    """Deterministic JSON: sorted keys, floats at 12 significant digits."""
    pad = "  " * (indent + 1) if pretty else ""
    end_pad = "  " * indent if pretty else ""
    nl = "\n" if pretty else ""
    sep = "," + nl
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + canonical_json(v, indent + 1, pretty) for v in obj]
        return "[" + nl + sep.join(items) + nl + end_pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            pad + json.dumps(str(k)) + ": " + canonical_json(v, indent + 1, pretty)
            for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))
        ]
        return "{" + nl + sep.join(items) + nl + end_pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def exact_number(v) -> dict:
    if isinstance(v, TaggedPoint):
        return {"text": v.text(), "float": v.numeric()}
    if isinstance(v, ExtendedReal):
        return {"text": v.text(), "float": v.numeric()}
    if isinstance(v, float):
        return {"text": repr(v), "float": v}
    raise TypeError(f"not a number: {v!r}")


def set_payload(s: IntervalSet) -> dict:
    return {
        "text": s.text(),
        "pieces": [
            {
                "lo": pc.lo.text(),
                "hi": pc.hi.text(),
                "lo_closed": pc.lo_closed,
                "hi_closed": pc.hi_closed,
            }
            for pc in s.pieces
        ],
    }


def verdict_payload(v: Verdict) -> dict:
    out = {"status": v.status, "margin": float(v.margin)}
    if v.note:
        out["note"] = v.note
    if v.witness is not None:
        out["witness"] = v.witness.to_dict()
    if v.budget_used:
        out["budget_used"] = {str(k): n for k, n in v.budget_used.items()}
    return out


def analysis_report(
    problem,
    focus: TaggedPoint,
    theorem_report: TheoremReport,
    version: str,
    wall_clock_ms: Optional[float] = None,
) -> dict:
    res = mz.value(problem, focus)
    argmin = mz.solution_set(problem, focus)
    statements = {}
    for sid, sres in theorem_report.statements.items():
        entry = {
            "applicability": sres.applicability,
            "status": sres.status,
            "hypotheses": dict(sres.hypotheses),
            "predicted": list(sres.predicted),
            "measured": dict(sres.measured),
            "blocked_by": list(sres.blocked_by),
        }
        if sres.equivalence is not None:
            entry["equivalence"] = dict(sres.equivalence)
        statements[sid] = entry
    report = {
        "schema": SCHEMA,
        "tool_version": version,
        "problem": theorem_report.problem_name,
        "x": exact_number(focus),
        "lambda": theorem_report.lam_text,
        "value": {
            "value": exact_number(res.value),
            "attained": res.attained,
            "argmin": set_payload(argmin),
            "evaluations": res.evaluations,
        },
        "checks": {cid: verdict_payload(v) for cid, v in theorem_report.checks.items()},
        "statements": statements,
        "soundness_violations": list(theorem_report.violations),
        "wall_clock_ms": wall_clock_ms,
    }
    return report
