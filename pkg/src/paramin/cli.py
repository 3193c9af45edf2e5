"""Command-line front end.

Subcommands:
  analyze <file-or-case> --at X [--lambda L] [--budget N] [--json]
      Full statement analysis at a parameter point; canonical JSON report
      on stdout.  Exit code 0 on success, 2 when any soundness violation
      is flagged, 1 on load or usage errors (structured JSON on stderr).
  value <file-or-case> --range A B --samples N [--plot FILE]
      CSV rows (x, v(x), attained) on stdout; optionally renders the curve
      to an image file next to the delimited output.
  corpus run [case]
      Executes the packaged example corpus and compares measured statuses
      against the expected maps; nonzero exit on any mismatch.

The environment variable PARAMIN_SEED fixes the adversarial-search
randomness (default 0; runs are deterministic either way).
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from fractions import Fraction

from . import __version__
from . import corpus as corpus_pkg
from . import minimize as mz
from . import runner
from . import theorems as th
from .expr import EvalError, ParseError
from .problem import ProblemFormatError, load_document
from .report import analysis_report, canonical_json
from .scalars import ExtendedReal, TaggedPoint, parse_point
from .setexpr import SetEvalError


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


def _error_json(message: str, kind: str) -> str:
    return canonical_json({"error": {"kind": kind, "message": message}}, pretty=False)


def _resolve_document(token: str):
    if os.path.exists(token):
        return load_document(token)
    try:
        cases = corpus_pkg.cases_for(token)
    except KeyError:
        raise CliError(f"no such file or corpus case: {token}")
    live = [c for c in cases if not c.skip]
    if not live:
        raise CliError(f"corpus case {token} is a documented stub with no executable problem")
    if len(live) > 1:
        ids = ", ".join(c.case_id for c in live)
        raise CliError(f"{token} has multiple variants ({ids}); pick one")
    c = live[0]
    from .problem import ProblemDocument

    return ProblemDocument(
        problem=c.problem,
        focus_x=c.focus_x,
        lam=c.lam,
        expected=c.expected,
        anchor=c.anchor,
        skip=False,
        example=c.example,
        variant=c.variant,
        name=c.case_id,
    )


def cmd_analyze(args) -> int:
    doc = _resolve_document(args.problem)
    if doc.problem is None:
        raise CliError(f"{doc.name} has no executable problem")
    if args.at is not None:
        focus = parse_point(args.at)
    elif doc.focus_x is not None:
        focus = doc.focus_x
    else:
        raise CliError("--at is required (the file declares no focus point)")
    if not doc.problem.x_domain.member(focus):
        raise CliError(f"x={focus.text()} is outside the parameter domain")
    lam = None
    if args.lam is not None:
        lam = parse_point(args.lam)
    elif doc.lam is not None:
        lam = TaggedPoint.of(doc.lam)
    light = args.budget is not None and args.budget < 5000
    cfg = th.EngineConfig(lam=lam, light=light)
    t0 = time.perf_counter()
    rep = th.evaluate(doc.problem, focus, cfg)
    wall = (time.perf_counter() - t0) * 1000.0
    payload = analysis_report(
        doc.problem,
        focus,
        rep,
        version=__version__,
        wall_clock_ms=wall if args.timings else None,
    )
    print(canonical_json(payload, pretty=not args.json))
    return 2 if rep.violations else 0


def cmd_value(args) -> int:
    doc = _resolve_document(args.problem)
    if doc.problem is None:
        raise CliError(f"{doc.name} has no executable problem")
    p = doc.problem
    a, b = parse_point(args.range[0]), parse_point(args.range[1])
    n = args.samples
    if n < 2:
        raise CliError("--samples must be at least 2")
    if not (a < b or a == b):
        raise CliError("--range expects a <= b")
    for endpoint in (a, b):
        if not p.x_domain.member(endpoint):
            raise CliError(f"range endpoint {endpoint.text()} is outside the parameter domain")
    xs, vals, attained = [], [], []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "value", "attained"])
    for k in range(n):
        x = a + (b - a) * TaggedPoint.of(Fraction(k, n - 1))
        if not p.x_domain.member(x):
            continue
        res = mz.value(p, x)
        xs.append(x.numeric())
        vals.append(res.value.numeric())
        attained.append(res.attained)
        writer.writerow([format(x.numeric(), ".12g"), format(res.value.numeric(), ".12g"), str(res.attained).lower()])
    sys.stdout.write(buf.getvalue())
    if args.plot:
        _render_curve(xs, vals, attained, doc.name, args.plot)
    return 0


def _render_curve(xs, vals, attained, title: str, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(xs, vals, lw=1.2, color="#1f77b4", label="value")
    miss = [(x, v) for x, v, att in zip(xs, vals, attained) if not att]
    if miss:
        ax.scatter([m[0] for m in miss], [m[1] for m in miss], s=18, color="#d62728", label="infimum not attained")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("x")
    ax.set_ylabel("v(x)")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def cmd_corpus(args) -> int:
    if args.action != "run":
        raise CliError(f"unknown corpus action {args.action!r}; expected 'run'")
    try:
        outcomes = runner.run_examples(args.case, light=args.light)
    except KeyError:
        raise CliError(f"unknown corpus case {args.case!r}")
    executed = skipped = mismatched = 0
    for oc in sorted(outcomes, key=lambda o: o.case_id):
        if oc.skipped:
            skipped += 1
            print(f"{oc.case_id}: SKIPPED (documented stub)")
            continue
        executed += 1
        if oc.ok:
            print(f"{oc.case_id}: ok ({oc.checked} expected entries)")
        else:
            mismatched += 1
            for m in oc.mismatches:
                print(f"{oc.case_id}: MISMATCH {m['key']}: expected {m['expected']}, measured {m['measured']}")
            for v in oc.soundness_violations:
                print(f"{oc.case_id}: SOUNDNESS VIOLATION {v['statement']} -> {v['conclusion']}")
    if args.case is None:
        examples = {oc.example or oc.case_id for oc in outcomes if not oc.skipped}
        skipped_examples = {oc.example or oc.case_id for oc in outcomes if oc.skipped}
        print(f"{len(examples)} executed, {len(skipped_examples)} skipped")
    return 1 if mismatched else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="paramin",
        description="Parametric minimization with certified semicontinuity checks.",
    )
    ap.add_argument("--version", action="version", version=f"paramin {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="full statement analysis at a parameter point")
    pa.add_argument("problem", help="problem file or packaged corpus case id")
    pa.add_argument("--at", help="parameter point (exact: '0', '1/3', '0.25', 'sqrt2/2')")
    pa.add_argument("--lambda", dest="lam", help="level for truncation statements")
    pa.add_argument("--budget", type=int, help="evaluation budget per check (small values run light plans)")
    pa.add_argument("--json", action="store_true", help="compact single-line JSON")
    pa.add_argument("--timings", action="store_true", help="include wall-clock time in the report")
    pa.set_defaults(fn=cmd_analyze)

    pv = sub.add_parser("value", help="value-function curve as CSV")
    pv.add_argument("problem", help="problem file or packaged corpus case id")
    pv.add_argument("--range", nargs=2, required=True, metavar=("A", "B"))
    pv.add_argument("--samples", type=int, required=True)
    pv.add_argument("--plot", help="also render the curve to this image file")
    pv.set_defaults(fn=cmd_value)

    pc = sub.add_parser("corpus", help="run the packaged example corpus")
    pc.add_argument("action", choices=["run"])
    pc.add_argument("case", nargs="?", help="example id (e.g. ex4_6); default all")
    pc.add_argument("--light", action="store_true", help="use light budgets")
    pc.set_defaults(fn=cmd_corpus)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        sys.stderr.write(_error_json(str(exc), "usage") + "\n")
        return exc.code
    except (ProblemFormatError, ParseError, SetEvalError, EvalError, FileNotFoundError) as exc:
        sys.stderr.write(_error_json(str(exc), "load") + "\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
