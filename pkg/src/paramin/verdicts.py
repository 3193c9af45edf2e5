"""Three-valued verdicts and independently replayable witnesses.

A check returns HOLDS (no violation found at this budget), FAILS (with a
witness), or UNKNOWN (budget exhausted or the surrogate is not faithful).
A FAILS witness stores finite sequence prefixes with exact points and
enough context that :func:`replay_witness` can re-verify the violation
from the problem and the witness alone, reproducing the stored margin to
1e-12.  Witnesses serialize to JSON-compatible dictionaries; exact points
serialize as text, floats as hex strings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import minimize as mz
from .plans import tail_max, tail_min
from .scalars import ExtendedReal, TaggedPoint, parse_point
from .sets import IntervalSet, dist, excess, gap

HOLDS = "HOLDS"
FAILS = "FAILS"
UNKNOWN = "UNKNOWN"

VIOLATING_SEQUENCE = "violating-sequence"
ESCAPING_SEQUENCE = "escaping-sequence"
STRAY_ACCUMULATION = "stray-accumulation-point"
NEIGHBORHOOD_GAP = "neighborhood-gap"

MARGIN_REPLAY_TOL = 1e-12


@dataclass(frozen=True)
class Witness:
    kind: str
    check_id: str
    scheme_id: str
    x_seq: tuple[TaggedPoint, ...]
    y_seq: Optional[tuple] = None  # TaggedPoint or float entries
    limit_claim: str = ""
    violation_margin: float = 0.0
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        # aux always holds serialized forms so that replay handlers see the
        # same representation whether the witness is fresh or deserialized
        object.__setattr__(self, "aux", {k: _aux_to_text(v) for k, v in self.aux.items()})
        object.__setattr__(self, "x_seq", tuple(self.x_seq))
        if self.y_seq is not None:
            object.__setattr__(self, "y_seq", tuple(self.y_seq))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "check_id": self.check_id,
            "scheme_id": self.scheme_id,
            "x_seq": [p.text() for p in self.x_seq],
            "y_seq": None if self.y_seq is None else [_num_to_text(v) for v in self.y_seq],
            "limit_claim": self.limit_claim,
            "violation_margin": _num_to_text(self.violation_margin),
            "aux": {k: _aux_to_text(v) for k, v in sorted(self.aux.items())},
        }

    @staticmethod
    def from_dict(d: dict) -> "Witness":
        return Witness(
            kind=d["kind"],
            check_id=d["check_id"],
            scheme_id=d.get("scheme_id", ""),
            x_seq=tuple(parse_point(t) for t in d["x_seq"]),
            y_seq=None if d.get("y_seq") is None else tuple(_num_from_text(t) for t in d["y_seq"]),
            limit_claim=d.get("limit_claim", ""),
            violation_margin=_num_from_float_text(d.get("violation_margin", "0.0")),
            aux={k: _aux_from_text(v) for k, v in d.get("aux", {}).items()},
        )


def _num_to_text(v) -> str:
    if isinstance(v, TaggedPoint):
        return v.text()
    if isinstance(v, ExtendedReal):
        return v.text() if v.is_exact or not v.is_finite else "f:" + float(v).hex()
    if isinstance(v, (int, Fraction)):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        return "f:" + v.hex()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _num_from_text(t: str):
    if t.startswith("f:"):
        return float.fromhex(t[2:])
    if t in ("+inf", "inf"):
        return math.inf
    if t == "-inf":
        return -math.inf
    return parse_point(t)


def _num_from_float_text(t) -> float:
    if isinstance(t, (int, float)):
        return float(t)
    v = _num_from_text(t)
    return float(v) if not isinstance(v, float) else v


def _aux_to_text(v):
    if isinstance(v, (TaggedPoint, ExtendedReal, float, Fraction)):
        return _num_to_text(v)
    if isinstance(v, (str, int, bool)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_aux_to_text(i) for i in v]
    raise TypeError(f"cannot serialize aux value {type(v).__name__}")


def _aux_from_text(v):
    if isinstance(v, str) and (v.startswith("f:") or v in ("+inf", "-inf", "inf")):
        return _num_from_text(v)
    if isinstance(v, list):
        return [_aux_from_text(i) for i in v]
    return v


@dataclass(frozen=True)
class Verdict:
    status: str
    margin: float = 0.0
    witness: Optional[Witness] = None
    note: str = ""
    budget_used: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status == FAILS and self.witness is None:
            raise ValueError("FAILS verdicts must carry a witness")

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    def to_dict(self) -> dict:
        out = {"status": self.status, "margin": _num_to_text(float(self.margin))}
        if self.note:
            out["note"] = self.note
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.budget_used:
            out["budget_used"] = dict(sorted(self.budget_used.items()))
        return out


def holds(note: str = "", budget: Optional[dict] = None) -> Verdict:
    return Verdict(HOLDS, 0.0, None, note, budget or {})


def unknown(note: str, budget: Optional[dict] = None) -> Verdict:
    return Verdict(UNKNOWN, 0.0, None, note, budget or {})


def fails(witness: Witness, budget: Optional[dict] = None) -> Verdict:
    return Verdict(FAILS, witness.violation_margin, witness, "", budget or {})


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    margin: float
    detail: str = ""


def _resolve_problem(problem, witness: Witness):
    """Rebuild the (possibly truncated) problem a witness refers to."""
    lam = witness.aux.get("trunc_lambda")
    if lam is None:
        return problem
    anchor = witness.aux.get("trunc_anchor")
    return mz.truncate(problem, parse_point(str(lam)), parse_point(anchor))


def _resolve_map(problem, map_id: str) -> Callable[[TaggedPoint], IntervalSet]:
    if map_id == "phi":
        return problem.eval_phi
    if map_id == "solution":
        return lambda z: mz.solution_set(problem, z)
    if map_id.startswith("level:"):
        lam = parse_point(map_id.split(":", 1)[1])
        return lambda z: mz.level_set(problem, z, lam)
    raise ValueError(f"unknown map id {map_id!r}")


def _resolve_function(problem, fn_id: str) -> Callable[[TaggedPoint], float]:
    if fn_id == "v":
        return lambda z: mz.value(problem, z).value.numeric()
    if fn_id == "neg_v":
        return lambda z: -mz.value(problem, z).value.numeric()
    raise ValueError(f"unknown function id {fn_id!r}")


def _margins_close(a: float, b: float) -> bool:
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= MARGIN_REPLAY_TOL


def finalize_witness(problem, witness: Witness, fn: Optional[Callable] = None) -> Optional[Witness]:
    """Freeze a witness's margin through the replay code path itself.

    Computing the stored margin with the exact function the replayer uses
    makes margin reproduction a determinism property rather than a
    tolerance hope.  Returns None when the claims do not re-verify (the
    caller should then not emit FAILS).
    """
    p = _resolve_problem(problem, witness)
    kind = witness.check_id.split("#", 1)[0]
    handler = _REPLAYERS.get(kind)
    if handler is None:
        raise ValueError(f"no replayer for {witness.check_id!r}")
    try:
        margin, ok, _ = handler(p, witness, fn)
    except Exception:
        return None
    if not ok:
        return None
    return Witness(
        kind=witness.kind,
        check_id=witness.check_id,
        scheme_id=witness.scheme_id,
        x_seq=witness.x_seq,
        y_seq=witness.y_seq,
        limit_claim=witness.limit_claim,
        violation_margin=margin,
        aux=witness.aux,
    )


def replay_witness(problem, witness: Witness, fn: Optional[Callable] = None) -> ReplayResult:
    """Re-verify a FAILS witness from scratch; no search state is consulted."""
    p = _resolve_problem(problem, witness)
    kind = witness.check_id.split("#", 1)[0]
    handler = _REPLAYERS.get(kind)
    if handler is None:
        return ReplayResult(False, math.nan, f"no replayer for {witness.check_id!r}")
    try:
        margin, ok, detail = handler(p, witness, fn)
    except Exception as exc:  # replay must never crash the caller
        return ReplayResult(False, math.nan, f"replay error: {exc}")
    if not ok:
        return ReplayResult(False, margin, detail or "witness claims did not re-verify")
    if not _margins_close(margin, witness.violation_margin):
        return ReplayResult(False, margin, f"margin drift: stored {witness.violation_margin!r}, replayed {margin!r}")
    return ReplayResult(True, margin, "")


def _sign_from(witness: Witness) -> float:
    return -1.0 if witness.aux.get("sense") == "usc" else 1.0


def _replay_fn_semicontinuity(p, witness: Witness, fn) -> tuple[float, bool, str]:
    if fn is None:
        fn = _resolve_function(p, witness.aux.get("fn_id", "v"))
    ref = float(_num_from_float_text(witness.aux["ref_value"]))
    sign = _sign_from(witness)
    vals = [sign * fn(x) for x in witness.x_seq]
    margin = sign * ref - tail_max(vals)
    return margin, margin > 0, ""


def _replay_graph_semicontinuity(p, witness: Witness, fn) -> tuple[float, bool, str]:
    x0 = parse_point(witness.aux["x0"])
    sign = _sign_from(witness)
    u0 = sign * float(_num_from_float_text(witness.aux["ref_value"]))
    feas_checked = True
    vals = []
    for xn, yn in zip(witness.x_seq, witness.y_seq or ()):
        if not p.eval_phi(xn).member(yn) and not witness.aux.get("product_space"):
            feas_checked = False
        vals.append(sign * p.eval_u(xn, yn).numeric())
    margin = u0 - tail_max(vals)
    return margin, margin > 0 and feas_checked and bool(vals), "" if feas_checked else "infeasible witness point"


def _replay_map_lsc(p, witness: Witness, fn) -> tuple[float, bool, str]:
    target_y = witness.aux["y_target"]
    y = _num_from_text(target_y) if isinstance(target_y, str) else target_y
    probe = _resolve_map(p, witness.aux.get("map_id", "phi"))
    dists = []
    for xn in witness.x_seq:
        img = probe(xn)
        if img.is_empty:
            continue
        dists.append(dist(y, img).numeric())
    margin = tail_min(dists) if dists else math.inf
    return margin, margin > 0 and bool(dists), ""


def _replay_map_usc(p, witness: Witness, fn) -> tuple[float, bool, str]:
    x0 = parse_point(witness.aux["x0"])
    probe = _resolve_map(p, witness.aux.get("map_id", "phi"))
    target = probe(x0)
    ok = True
    dists = []
    for xn, yn in zip(witness.x_seq, witness.y_seq or ()):
        if not probe(xn).member(yn):
            ok = False
        dists.append(dist(yn, target).numeric())
    margin = tail_min(dists) if dists else 0.0
    return margin, ok and margin > 0, "" if ok else "witness point not in the mapping"


def _replay_escape(p, witness: Witness, fn) -> tuple[float, bool, str]:
    lam = witness.aux.get("lambda")
    threshold = float(_num_from_float_text(witness.aux.get("threshold", 0.0)))
    ok = True
    mags = []
    for xn, yn in zip(witness.x_seq, witness.y_seq or ()):
        feas = p.eval_phi(xn)
        if not feas.member(yn):
            ok = False
        if lam is not None:
            uval = p.eval_u(xn, yn)
            if not uval <= ExtendedReal.of(parse_point(str(lam))):
                ok = False
        mags.append(abs(float(yn) if isinstance(yn, float) else yn.numeric()))
    if len(mags) >= 2 and mags[-1] <= mags[0]:
        ok = False
    margin = (mags[-1] - threshold) if mags else 0.0
    return margin, ok and margin > 0, "" if ok else "escape claims did not re-verify"


def _replay_stray(p, witness: Witness, fn) -> tuple[float, bool, str]:
    x0 = parse_point(witness.aux["x0"])
    s = _num_from_text(witness.aux["stray_point"])
    lam = witness.aux.get("lambda")
    probe_id = witness.aux.get("map_id", "phi")
    probe = _resolve_map(p, probe_id)
    target = _resolve_map(p, witness.aux.get("target_id", "phi"))(x0)
    ok = not target.member(s)
    for xn, yn in zip(witness.x_seq, witness.y_seq or ()):
        if not probe(xn).member(yn):
            ok = False
        if lam is not None and not p.eval_u(xn, yn) <= ExtendedReal.of(parse_point(str(lam))):
            ok = False
    if witness.y_seq:
        approach = abs((witness.y_seq[-1] if isinstance(witness.y_seq[-1], float) else witness.y_seq[-1].numeric()) - float(s if isinstance(s, float) else s.numeric()))
        if approach > float(_num_from_float_text(witness.aux.get("tail_gap", 1e-6))) + MARGIN_REPLAY_TOL:
            ok = False
    margin = dist(s, target).numeric()
    return margin, ok, "" if ok else "stray claims did not re-verify"


def _replay_gap(p, witness: Witness, fn) -> tuple[float, bool, str]:
    x0 = parse_point(witness.aux["x0"])
    target = _resolve_map(p, witness.aux.get("target_id", "solution"))(x0)
    gaps = []
    for xn in witness.x_seq:
        img = p.eval_phi(xn)
        if img.is_empty:
            continue
        gaps.append(gap(img, target).numeric())
    margin = tail_min(gaps) if gaps else math.inf
    return margin, margin > 0 and bool(gaps), ""


def _replay_level_empty(p, witness: Witness, fn) -> tuple[float, bool, str]:
    lam = parse_point(str(witness.aux["lambda"]))
    vals = []
    ok = True
    for xn in witness.x_seq:
        res = mz.value(p, xn)
        if mz.level_set(p, xn, lam).is_nonempty:
            ok = False
        vals.append(res.value.numeric() - lam.numeric())
    margin = tail_min(vals) if vals else math.inf
    return margin, ok and margin >= 0, "" if ok else "a witness level set is nonempty"


def _replay_unattained(p, witness: Witness, fn) -> tuple[float, bool, str]:
    x0 = parse_point(witness.aux["x0"])
    res = mz.value(p, x0)
    want_empty = witness.aux.get("claim") == "empty"
    ok = res.argmin.is_empty if want_empty else True
    feas = p.eval_phi(x0)
    vref = res.value.numeric()
    for yn in witness.y_seq or ():
        if not feas.member(yn):
            ok = False
    if witness.y_seq:
        last_u = p.eval_u(x0, witness.y_seq[-1]).numeric()
        if not last_u - vref <= float(_num_from_float_text(witness.aux.get("tail_gap", 1e-6))) + 1e-12:
            ok = False
    return 0.0, ok, "" if ok else "attainment claims did not re-verify"


def _replay_noncompact(p, witness: Witness, fn) -> tuple[float, bool, str]:
    x0 = parse_point(witness.aux["x0"])
    lam = witness.aux.get("lambda")
    map_id = witness.aux.get("map_id", "solution")
    target = _resolve_map(p, map_id)(x0)
    claim = witness.aux.get("claim", "")
    if claim == "empty":
        return 0.0, target.is_empty, ""
    if claim == "unbounded":
        mags = [abs(float(v) if isinstance(v, float) else v.numeric()) for v in (witness.y_seq or ())]
        ok = all(target.member(y) for y in (witness.y_seq or ())) and len(mags) >= 2 and mags[-1] > mags[0]
        threshold = float(_num_from_float_text(witness.aux.get("threshold", 0.0)))
        margin = (mags[-1] - threshold) if mags else 0.0
        return margin, ok and margin > 0, ""
    if claim == "not_closed":
        s = _num_from_text(witness.aux["stray_point"])
        ok = not target.member(s) and dist(s, target) == 0
        for yn in witness.y_seq or ():
            if not target.member(yn):
                ok = False
        return 0.0, ok, ""
    return math.nan, False, f"unknown compactness claim {claim!r}"


def _replay_feasibility(p, witness: Witness, fn) -> tuple[float, bool, str]:
    x0 = parse_point(witness.aux["x0"])
    lam = parse_point(str(witness.aux["lambda"]))
    strict = bool(witness.aux.get("strict", False))
    res = mz.value(p, x0)
    lam_x = ExtendedReal.of(lam)
    if strict:
        ok = not res.value < lam_x
    else:
        ok = not (res.value < lam_x or (res.value == lam_x and res.attained))
    margin = res.value.numeric() - lam.numeric()
    return margin, ok and margin >= 0, ""


_REPLAYERS = {
    "fn_semicontinuity": _replay_fn_semicontinuity,
    "graph_semicontinuity": _replay_graph_semicontinuity,
    "map_lsc": _replay_map_lsc,
    "map_usc": _replay_map_usc,
    "escape": _replay_escape,
    "stray": _replay_stray,
    "cond_iv_gap": _replay_gap,
    "level_empty": _replay_level_empty,
    "unattained": _replay_unattained,
    "noncompact": _replay_noncompact,
    "feasibility": _replay_feasibility,
}
