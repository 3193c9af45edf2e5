"""Statement engine: hypothesis checks versus independently measured conclusions.

Each statement pairs named hypothesis checks with named conclusion checks.
The engine evaluates both sides from one memoized check table, reports
applicability (all hypotheses HOLD / blocked by a FAILS / unknown), and
flags a soundness violation whenever an applicable statement has a
measured conclusion that FAILS.  Three-valued logic is conservative: a
statement with any UNKNOWN hypothesis is excluded from soundness
accounting.

The two local-optimum statements additionally encode their equivalence
claim: when their standing hypotheses hold, the neighborhood condition
and upper semicontinuity of the minimizer map must agree, and either of
them forces continuity of the value function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import checks as ck
from . import minimize as mz
from .plans import SequencePlan, default_plan
from .scalars import ExtendedReal, POS_INF, TaggedPoint
from .sets import IntervalSet, closure, intersect
from .verdicts import (
    FAILS,
    HOLDS,
    UNKNOWN,
    VIOLATING_SEQUENCE,
    Verdict,
    Witness,
    fails,
    finalize_witness,
    holds,
    unknown,
)

APPLICABLE = "applicable"
BLOCKED = "blocked"
UNDECIDED = "unknown"


@dataclass(frozen=True)
class StatementSpec:
    statement_id: str
    title: str
    hypotheses: tuple[str, ...]
    conclusions: tuple[str, ...]
    equivalence: Optional[tuple[str, str]] = None
    implied_conclusions: tuple[str, ...] = ()
    anchor: str = ""


def statement_catalog() -> list[StatementSpec]:
    """All sixteen encoded statements, in report order."""
    return [
        StatementSpec(
            "TH1.1",
            "global maximum theorem for noncompact images",
            ("kn_win", "u_usc_graph_win", "phi_lsc_win"),
            ("v_cont", "solution_usc", "argmin_compact"),
            anchor="value function is continuous and the solution multifunction",
        ),
        StatementSpec(
            "TH1.2",
            "neighborhood-based local optimum theorem",
            ("u_cont_xy", "phi_closed_graph", "cond_iii_scan", "cond_iv"),
            ("v_cont", "solution_usc"),
            anchor="nonempty and contained in",
        ),
        StatementSpec(
            "TH1.3",
            "lower stability of the value at a point",
            ("kn_at",),
            ("v_lsc", "argmin_compact?finite"),
            anchor="is a nonempty compact set",
        ),
        StatementSpec(
            "TH1.4i",
            "upper stability via mapping lower semicontinuity",
            ("u_usc_graph", "phi_lsc"),
            ("v_usc",),
            anchor="upper semi-continuous at",
        ),
        StatementSpec(
            "TH1.4ii",
            "upper stability via minimizer compactness",
            ("argmin_compact", "u_usc_graph_argmin", "cond_iv"),
            ("v_usc",),
            anchor="upper semi-continuous at",
        ),
        StatementSpec(
            "TH1.5",
            "minimizer stability under continuous value",
            ("kn_at", "v_cont", "v_finite"),
            ("argmin_compact", "solution_usc"),
            anchor="is upper semi-continuous at",
        ),
        StatementSpec(
            "TH1.6",
            "local optimum theorem",
            ("v_finite", "kn_at", "u_usc_graph_argmin"),
            ("argmin_compact",),
            equivalence=("cond_iv", "solution_usc"),
            implied_conclusions=("v_cont",),
            anchor="the following two assumptions are equivalent",
        ),
        StatementSpec(
            "TH1.7",
            "local optimum theorem through truncation",
            ("feasible_lt_lambda", "kn_trunc", "u_usc_graph_argmin"),
            (),
            equivalence=("cond_iv", "solution_usc"),
            implied_conclusions=("v_cont",),
            anchor="the following two assumptions are equivalent",
        ),
        StatementSpec(
            "COR1.1",
            "lower stability through truncation",
            ("feasible_le_lambda", "kn_trunc"),
            ("v_lsc", "argmin_compact"),
            anchor="lower semi-continuous at",
        ),
        StatementSpec(
            "B1",
            "lower stability, graph-compactness route",
            ("kn_win",),
            ("v_lsc",),
            anchor="is lower semi-continuous",
        ),
        StatementSpec(
            "B2",
            "upper stability, mapping route",
            ("u_usc_graph_win", "phi_lsc_win"),
            ("v_usc",),
            anchor="is upper semi-continuous",
        ),
        StatementSpec(
            "B3",
            "minimizer stability, graph-compactness route",
            ("kn_win", "v_cont_win"),
            ("solution_usc", "argmin_compact"),
            anchor="upper semi-continuous and compact-valued",
        ),
        StatementSpec(
            "BS1",
            "lower stability, neighborhood route",
            ("u_lsc_xy", "phi_closed_graph", "cond_iii_scan"),
            ("v_lsc",),
            anchor="lower semi-continuous at",
        ),
        StatementSpec(
            "BS2",
            "upper stability, neighborhood route",
            ("u_usc_xy", "argmin_compact", "cond_iv"),
            ("v_usc",),
            anchor="upper semi-continuous at",
        ),
        StatementSpec(
            "BS3",
            "minimizer stability, neighborhood route",
            ("u_cont_xy", "phi_closed_graph", "cond_iii_scan", "cond_iv"),
            ("solution_usc",),
            anchor="upper semi-continuous at",
        ),
        StatementSpec(
            "LEM2.1",
            "graph compactness from mapping compactness",
            ("u_lsc_graph", "phi_compact_valued", "phi_usc"),
            ("kn_at",),
            anchor="upper semi-continuous at all",
        ),
    ]


# ---------------------------------------------------------------------------
# Check session
# ---------------------------------------------------------------------------


@dataclass
class EngineConfig:
    lam: Optional[TaggedPoint] = None
    light: bool = False
    plan: Optional[SequencePlan] = None
    kn_window_grid: Optional[int] = None  # override grid size for global checks


class CheckSession:
    """Memoized evaluation of named checks for one (problem, focus, lambda)."""

    def __init__(self, problem, focus: TaggedPoint, config: Optional[EngineConfig] = None):
        self.problem = problem
        self.focus = focus
        self.config = config or EngineConfig()
        self.plan = self.config.plan or default_plan(problem, focus, light=self.config.light)
        self._memo: dict[str, Verdict] = {}
        self._lam: Optional[TaggedPoint] = None
        self._trunc: Optional[mz.TruncatedProblem] = None

    # -- shared quantities ---------------------------------------------------

    def min_result(self) -> mz.MinResult:
        return mz.value(self.problem, self.focus)

    def lam_value(self) -> Optional[TaggedPoint]:
        """Configured lambda, defaulting to v(x) + 1 when the value is finite."""
        if self._lam is None:
            if self.config.lam is not None:
                self._lam = self.config.lam
            else:
                v = self.min_result().value
                if v.is_finite and v.is_exact:
                    self._lam = v.as_tagged() + TaggedPoint.of(1)
                else:
                    self._lam = None
        return self._lam

    def truncated(self) -> Optional[mz.TruncatedProblem]:
        lam = self.lam_value()
        if lam is None:
            return None
        if self._trunc is None:
            self._trunc = mz.truncate(self.problem, lam, self.focus)
        return self._trunc

    def grid(self) -> list[TaggedPoint]:
        return ck._grid_points(self.problem, self.plan, self.focus)

    def coarse_grid(self) -> list[TaggedPoint]:
        return ck._grid_points(self.problem, self.plan, self.focus, twins=False)

    # -- memoized dispatch -----------------------------------------------------

    def verdict(self, check_id: str) -> Verdict:
        hit = self._memo.get(check_id)
        if hit is None:
            hit = self._compute(check_id)
            self._memo[check_id] = hit
        return hit

    def all_computed(self) -> dict[str, Verdict]:
        return dict(self._memo)

    def _compute(self, cid: str) -> Verdict:
        p, x, plan = self.problem, self.focus, self.plan
        region = intersect(p.x_window, p.x_domain)
        if cid == "v_lsc":
            return ck.check_lsc_at(self._v_fn(), x, plan, domain=region, fn_id="v", problem=p)
        if cid == "v_usc":
            return ck.check_usc_at(self._v_fn(), x, plan, domain=region, fn_id="v", problem=p)
        if cid == "v_cont":
            return _conjoin(self.verdict("v_lsc"), self.verdict("v_usc"))
        if cid == "v_cont_win":
            parts = []
            for g in self.grid():
                gp = default_plan(p, g, light=self.plan.light)
                parts.append(ck.check_lsc_at(self._v_fn(), g, gp, domain=region, fn_id="v", problem=p))
                if parts[-1].fails:
                    break
                parts.append(ck.check_usc_at(self._v_fn(), g, gp, domain=region, fn_id="v", problem=p))
                if parts[-1].fails:
                    break
            return _conjoin(*parts)
        if cid == "u_lsc_graph":
            return ck.check_graph_semicontinuity_on_set(p, x, p.eval_phi(x), plan, sense="lsc")
        if cid == "u_usc_graph":
            return ck.check_graph_semicontinuity_on_set(p, x, p.eval_phi(x), plan, sense="usc")
        if cid == "u_usc_graph_argmin":
            argmin = mz.solution_set(p, x)
            if argmin.is_empty:
                return unknown("the minimizer set is empty; the graph restriction is vacuous")
            return ck.check_graph_semicontinuity_on_set(p, x, argmin, plan, sense="usc", check_label="u_argmin")
        if cid in ("u_lsc_graph_win", "u_usc_graph_win"):
            sense = "lsc" if cid.startswith("u_lsc") else "usc"
            parts = []
            for g in self.grid():
                gp = default_plan(p, g, light=self.plan.light)
                img = p.eval_phi(g)
                if img.is_empty:
                    continue
                parts.append(ck.check_graph_semicontinuity_on_set(p, g, img, gp, sense=sense))
                if parts[-1].fails:
                    break
            return _conjoin(*parts)
        if cid in ("u_lsc_xy", "u_usc_xy"):
            sense = "lsc" if cid == "u_lsc_xy" else "usc"
            parts = []
            for g in self.grid():
                gp = default_plan(p, g, light=self.plan.light)
                ys = intersect(p.y_domain, ck._padded_y_window(p))
                parts.append(
                    ck.check_graph_semicontinuity_on_set(
                        p, g, ys, gp, sense=sense, product_space=True, check_label="u_xy"
                    )
                )
                if parts[-1].fails:
                    break
            return _conjoin(*parts)
        if cid == "u_cont_xy":
            return _conjoin(self.verdict("u_lsc_xy"), self.verdict("u_usc_xy"))
        if cid == "phi_lsc":
            return ck.check_map_lsc_at(p, ck.phi_map(p), x, plan)
        if cid == "phi_usc":
            return ck.check_map_usc_at(p, ck.phi_map(p), x, plan)
        if cid == "phi_lsc_win":
            parts = []
            for g in self.grid():
                gp = default_plan(p, g, light=self.plan.light)
                if p.eval_phi(g).is_empty:
                    continue
                parts.append(ck.check_map_lsc_at(p, ck.phi_map(p), g, gp))
                if parts[-1].fails:
                    break
            return _conjoin(*parts)
        if cid == "phi_compact_valued":
            for g in self.grid():
                img = p.eval_phi(g)
                if img.is_empty or img.is_compact:
                    continue
                w = ck._noncompact_witness(p, g, _big_level(p, g), img, map_id="phi")
                if w is not None:
                    return fails(w)
                return unknown("a feasible set is noncompact but no clean witness formed")
            return holds(note=f"{len(self.grid())} parameter samples")
        if cid == "phi_closed_graph":
            return ck.check_closed_graph(p, ck.phi_map(p), plan, focus=x)
        if cid == "argmin_compact":
            return self._argmin_compact()
        if cid == "solution_usc":
            target = mz.solution_set(p, x)
            if target.is_empty:
                return unknown("the minimizer set at the focus is empty; the map restriction is vacuous")
            return ck.check_map_usc_at(p, ck.solution_map(p), x, plan)
        if cid == "inf_compact":
            return ck.check_inf_compact(p, x, plan=plan)
        if cid == "kn_at":
            return ck.check_kn_inf_compact_at(p, x, plan)
        if cid == "kn_win":
            parts = []
            for g in self.coarse_grid():
                gp = default_plan(p, g, light=self.plan.light)
                parts.append(ck.check_kn_inf_compact_at(p, g, gp))
                if parts[-1].fails:
                    break
            return _conjoin(*parts)
        if cid == "kn_trunc":
            tr = self.truncated()
            if tr is None:
                return unknown("no usable truncation level (the value is not finite)")
            if tr.anchor_empty:
                return unknown("the anchored sublevel set is empty; the truncation is undefined")
            return ck.check_kn_inf_compact_at(tr, x, plan)
        if cid == "k_inf_compact":
            k_set = closure(region)
            if not k_set.subset_of(p.x_domain) or not k_set.is_compact:
                return unknown("the analysis window does not close up inside the domain")
            return ck.check_k_inf_compact(p, k_set, plan)
        if cid == "cond_iii":
            lam = self.lam_value()
            if lam is None:
                return unknown("no level available for the container condition")
            return ck.check_condition_iii(p, x, lam, plan)
        if cid == "cond_iii_scan":
            return self._cond_iii_scan()
        if cid == "cond_iv":
            return ck.check_condition_iv(p, x, plan)
        if cid == "v_finite":
            return self._value_finite()
        if cid == "feasible_lt_lambda":
            return self._feasible(strict=True)
        if cid == "feasible_le_lambda":
            return self._feasible(strict=False)
        raise KeyError(f"unknown check id {cid!r}")

    # -- helpers ---------------------------------------------------------------

    def _v_fn(self):
        p = self.problem
        return lambda z: mz.value(p, z).value

    def _argmin_compact(self) -> Verdict:
        p, x = self.problem, self.focus
        res = mz.value(p, x)
        argmin = res.argmin
        if res.attained and argmin.is_nonempty and argmin.is_compact:
            return holds(note=f"minimizer set {argmin.text()}")
        if argmin.is_nonempty and not argmin.is_compact:
            w = ck._noncompact_witness(p, x, _big_level(p, x), argmin, map_id="solution")
            if w is not None:
                return fails(w)
            return unknown("the minimizer set is noncompact but no clean witness formed")
        w = self._unattained_witness(res)
        if w is not None:
            return fails(w)
        return unknown("no minimizer and no clean infimizing sequence formed")

    def _unattained_witness(self, res: mz.MinResult) -> Optional[Witness]:
        p, x = self.problem, self.focus
        feas = p.eval_phi(x)
        ys: list[TaggedPoint] = []
        if res.value.is_finite:
            # march toward the unattained infimum through sublevel slices
            for j in range(2, 20):
                lam = res.value + ExtendedReal.of(Fraction(1, 2 ** j))
                ls = mz.level_set(p, x, lam)
                if ls.is_empty:
                    continue
                cand = None
                for pc in ls.pieces:
                    for endpoint in (pc.lo, pc.hi):
                        if endpoint.is_finite and endpoint.is_exact:
                            t = ck._inward_nudge(ls, endpoint.as_tagged(), Fraction(1, 2 ** (j + 6)))
                            if t is not None and feas.member(t):
                                cand = t
                                break
                    if cand is not None:
                        break
                if cand is not None:
                    ys.append(cand)
        else:
            for pc in feas.pieces:
                if not pc.is_bounded:
                    ys.extend(t[1] for t in ck._ray_probe_points(x, feas))
                    break
        if len(ys) < 8:
            return None
        tail_gap = 1.0
        if res.value.is_finite:
            tail_gap = abs(p.eval_u(x, ys[-1]).numeric() - res.value.numeric()) * 4 + 1e-9
        w = Witness(
            kind=VIOLATING_SEQUENCE,
            check_id="unattained#argmin",
            scheme_id="sublevel-march",
            x_seq=tuple([x] * len(ys)),
            y_seq=tuple(ys),
            limit_claim="feasible costs approach the infimum but no point attains it",
            aux={"x0": x.text(), "claim": "empty", "tail_gap": tail_gap, **ck._trunc_aux(p)},
        )
        return finalize_witness(ck._base_problem(p), w)

    def _cond_iii_scan(self) -> Verdict:
        p, x, plan = self.problem, self.focus, self.plan
        res = self.min_result()
        lams: list[TaggedPoint] = []
        if self.config.lam is not None:
            lams.append(self.config.lam)
        if res.value.is_finite and res.value.is_exact:
            base = res.value.as_tagged()
            lams.extend(base + TaggedPoint.of(Fraction(1, 2 ** j)) for j in range(0, 11))
        else:
            lams.extend(TaggedPoint.of(c) for c in (0, 1))
        last_fail: Optional[Verdict] = None
        saw_unknown = False
        for lam in lams:
            v = ck.check_condition_iii(p, x, lam, plan)
            if v.holds:
                return v
            if v.fails:
                last_fail = v
            else:
                saw_unknown = True
        if last_fail is not None and not saw_unknown:
            return last_fail
        if last_fail is not None:
            return last_fail
        return unknown("no level certified and no level produced a clean witness")

    def _value_finite(self) -> Verdict:
        res = self.min_result()
        if res.value < POS_INF:
            return holds(note=f"value {res.value.text()}")
        w = self._infinite_value_witness()
        if w is not None:
            return fails(w)
        return unknown("the value is +inf but no witness formed")

    def _infinite_value_witness(self) -> Optional[Witness]:
        p, x = self.problem, self.focus
        lam = self.lam_value() or TaggedPoint.of(0)
        w = Witness(
            kind=VIOLATING_SEQUENCE,
            check_id="feasibility#value",
            scheme_id="exact",
            x_seq=tuple([x] * 8),
            limit_claim="no feasible point has cost below any finite level",
            aux={"x0": x.text(), "lambda": lam.text(), "strict": True, **ck._trunc_aux(p)},
        )
        return finalize_witness(ck._base_problem(p), w)

    def _feasible(self, strict: bool) -> Verdict:
        lam = self.lam_value()
        if lam is None:
            return unknown("no level available for the feasibility premise")
        p, x = self.problem, self.focus
        res = self.min_result()
        lam_x = ExtendedReal.of(lam)
        ok = res.value < lam_x if strict else (res.value < lam_x or (res.value == lam_x and res.attained))
        if ok:
            return holds(note=f"value {res.value.text()} vs level {lam.text()}")
        w = Witness(
            kind=VIOLATING_SEQUENCE,
            check_id="feasibility#premise",
            scheme_id="exact",
            x_seq=tuple([x] * 8),
            limit_claim="no feasible point beats the level",
            aux={"x0": x.text(), "lambda": lam.text(), "strict": strict, **ck._trunc_aux(p)},
        )
        fw = finalize_witness(ck._base_problem(p), w)
        if fw is not None:
            return fails(fw)
        return unknown("feasibility premise fails but no witness formed")


def _conjoin(*parts: Verdict) -> Verdict:
    parts = tuple(parts)
    if not parts:
        return unknown("no applicable sample points")
    for v in parts:
        if v.fails:
            return v
    for v in parts:
        if v.status == UNKNOWN:
            return v
    budget: dict = {}
    for v in parts:
        for k, n in v.budget_used.items():
            if isinstance(n, (int, float)):
                budget[k] = budget.get(k, 0) + n
    return holds(budget=budget)


def _big_level(p, x) -> TaggedPoint:
    res = mz.value(p, x)
    if res.value.is_finite and res.value.is_exact:
        return res.value.as_tagged() + TaggedPoint.of(1 << 20)
    return TaggedPoint.of(1 << 20)


# ---------------------------------------------------------------------------
# Statement evaluation
# ---------------------------------------------------------------------------


@dataclass
class StatementResult:
    statement_id: str
    applicability: str
    hypotheses: dict[str, str]
    blocked_by: tuple[str, ...]
    predicted: tuple[str, ...]
    measured: dict[str, str]
    equivalence: Optional[dict] = None
    violations: list = field(default_factory=list)

    @property
    def status(self) -> str:
        """Statement status as corpus files expect: HOLDS = applicable."""
        if self.applicability == APPLICABLE:
            return HOLDS
        if self.applicability == BLOCKED:
            return FAILS
        return UNKNOWN


@dataclass
class TheoremReport:
    problem_name: str
    focus_text: str
    lam_text: Optional[str]
    statements: dict[str, StatementResult]
    checks: dict[str, Verdict]
    violations: list

    def soundness_flags(self) -> list:
        return list(self.violations)


def _applicability(hyp_status: dict[str, str]) -> tuple[str, tuple[str, ...]]:
    blocked = tuple(k for k, s in hyp_status.items() if s == FAILS)
    if blocked:
        return BLOCKED, blocked
    if any(s == UNKNOWN for s in hyp_status.values()):
        return UNDECIDED, ()
    return APPLICABLE, ()


# checks worth reporting even when no statement consults them
STANDARD_EXTRA_CHECKS = (
    "inf_compact",
    "k_inf_compact",
    "cond_iii",
    "phi_usc",
    "kn_trunc",
    "u_lsc_graph",
    "u_usc_graph",
)


def evaluate(
    problem,
    focus: TaggedPoint,
    config: Optional[EngineConfig] = None,
    extra_checks: tuple[str, ...] = STANDARD_EXTRA_CHECKS,
) -> TheoremReport:
    """Run every statement against one problem at one focus point."""
    session = CheckSession(problem, focus, config)
    statements: dict[str, StatementResult] = {}
    for spec in statement_catalog():
        statements[spec.statement_id] = _evaluate_statement(session, spec)
    for cid in extra_checks:
        try:
            session.verdict(cid)
        except KeyError:
            raise
        except ValueError:
            pass  # preconditions not met (e.g. noncompact window); leave absent
    violations = []
    for res in statements.values():
        violations.extend(res.violations)
    lam = session.lam_value()
    return TheoremReport(
        problem_name=getattr(problem, "name", "problem"),
        focus_text=focus.text(),
        lam_text=lam.text() if lam is not None else None,
        statements=statements,
        checks=session.all_computed(),
        violations=violations,
    )


def _evaluate_statement(session: CheckSession, spec: StatementSpec) -> StatementResult:
    hyp_status = {h: session.verdict(h).status for h in spec.hypotheses}
    applicability, blocked = _applicability(hyp_status)

    predicted: list[str] = []
    measured: dict[str, str] = {}
    violations: list = []

    conclusions = []
    for c in spec.conclusions:
        if c.endswith("?finite"):
            base = c.split("?", 1)[0]
            if session.min_result().value < POS_INF:
                conclusions.append(base)
            continue
        conclusions.append(c)

    for c in conclusions:
        v = session.verdict(c)
        measured[c] = v.status
        if applicability == APPLICABLE:
            predicted.append(c)
            if v.status == FAILS:
                violations.append(
                    {
                        "statement": spec.statement_id,
                        "conclusion": c,
                        "hypotheses": dict(hyp_status),
                        "kind": "conclusion",
                    }
                )

    equivalence = None
    if spec.equivalence is not None:
        lhs_id, rhs_id = spec.equivalence
        lhs, rhs = session.verdict(lhs_id), session.verdict(rhs_id)
        measured[lhs_id] = lhs.status
        measured[rhs_id] = rhs.status
        consistent = not (
            applicability == APPLICABLE
            and {lhs.status, rhs.status} == {HOLDS, FAILS}
        )
        equivalence = {
            "lhs": lhs_id,
            "rhs": rhs_id,
            "lhs_status": lhs.status,
            "rhs_status": rhs.status,
            "consistent": consistent,
        }
        if applicability == APPLICABLE:
            if not consistent:
                violations.append(
                    {
                        "statement": spec.statement_id,
                        "conclusion": f"{lhs_id} <=> {rhs_id}",
                        "hypotheses": dict(hyp_status),
                        "kind": "equivalence",
                    }
                )
            if HOLDS in (lhs.status, rhs.status):
                for c in spec.implied_conclusions:
                    v = session.verdict(c)
                    measured[c] = v.status
                    predicted.append(c)
                    if v.status == FAILS:
                        violations.append(
                            {
                                "statement": spec.statement_id,
                                "conclusion": c,
                                "hypotheses": dict(hyp_status),
                                "kind": "implied-conclusion",
                            }
                        )

    return StatementResult(
        statement_id=spec.statement_id,
        applicability=applicability,
        hypotheses=hyp_status,
        blocked_by=blocked,
        predicted=tuple(predicted),
        measured=measured,
        equivalence=equivalence,
        violations=violations,
    )


def cross_validate(report: TheoremReport) -> list:
    """Recompute soundness violations from the report's recorded statuses."""
    specs = {s.statement_id: s for s in statement_catalog()}
    out = []
    for sid, res in report.statements.items():
        spec = specs[sid]
        applicability, _ = _applicability(res.hypotheses)
        if applicability != APPLICABLE:
            continue
        for c in res.predicted:
            if res.measured.get(c) == FAILS:
                out.append({"statement": sid, "conclusion": c, "hypotheses": dict(res.hypotheses), "kind": "conclusion"})
        if spec.equivalence is not None and res.equivalence is not None:
            pair = {res.equivalence["lhs_status"], res.equivalence["rhs_status"]}
            if pair == {HOLDS, FAILS}:
                out.append(
                    {
                        "statement": sid,
                        "conclusion": f"{spec.equivalence[0]} <=> {spec.equivalence[1]}",
                        "hypotheses": dict(res.hypotheses),
                        "kind": "equivalence",
                    }
                )
    return out
