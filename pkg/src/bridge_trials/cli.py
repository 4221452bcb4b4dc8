"""Command-line entry point. Every workflow is a subcommand; all outputs
are reproducible functions of the flags, input files, and explicit seeds.

Exit codes: 0 success, 1 validation or domain error (including unknown
flags), 2 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import concordance as conc
from . import diagnostics, io
from .design import design_report
from .errors import BridgeError, DataFormatError, ValidationError
from .estimation import estimate_delta, pool_reused_and_new, superiority_test
from .simulator import simulate_with_trace

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract reserves 2 for I/O errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_concordance(args) -> int:
    records = io.load_scores(args.scores)
    doc: dict = {}
    legacy = conc.classify_top_fraction(records, args.legacy, args.q)
    new = conc.classify_top_fraction(records, args.new, args.q)
    if args.bootstrap:
        if args.seed is None:
            raise ValidationError("--bootstrap requires an explicit --seed")
        estimate = conc.bootstrap_ci(records, args.legacy, args.new, args.q,
                                     n_bootstrap=args.bootstrap, seed=args.seed,
                                     cluster_by=args.cluster_by)
    else:
        estimate = conc.concordance_rates(legacy, new)
    doc["estimate"] = io.to_document(estimate)
    doc["legacy_model"] = args.legacy
    doc["new_model"] = args.new

    curve = None
    if args.grid:
        grid = [float(v) for v in args.grid.split(",") if v.strip()]
        curve = conc.overlap_curve(records, args.legacy, args.new, grid)
        doc["curve"] = [{"q": q, "cr12": cr} for q, cr in curve]
    if args.union:
        labelings = [conc.classify_top_fraction(records, name, args.q)
                     for name in args.union]
        doc["union"] = {
            "models": list(args.union),
            "value": conc.union_concordance(labelings, new),
        }

    if args.out.endswith(".csv"):
        if curve is None:
            raise ValidationError("CSV output requires --grid (curve table)")
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["q", "cr12"])
            for q, cr in curve:
                writer.writerow([f"{q:.10g}", f"{cr:.10g}"])
    else:
        Path(args.out).write_text(io.canonical_json(io.to_document(doc)), encoding="utf-8")
    return EXIT_OK


def _design_table(result) -> str:
    rows = [
        ("effect (benefit scale)", f"{result.delta_effect:.6g}"),
        ("required total (real)", f"{result.n2_real:.2f}"),
        ("required total", f"{result.n2:,}"),
        ("  treatment arm", f"{result.arm_treat:,}"),
        ("  control arm", f"{result.arm_control:,}"),
        ("concordant stratum", f"{result.n_c:,}"),
        ("discordant stratum", f"{result.n_d:,}"),
        ("reused (treatment)", f"{result.reuse_treat:,}"),
        ("reused (control)", f"{result.reuse_control:,}"),
        ("recruit (treatment)", f"{result.recruit_treat:,}"),
        ("recruit (control)", f"{result.recruit_control:,}"),
        ("enrollment with reuse", f"{result.n2_prime:,}"),
    ]
    if result.savings is not None:
        rows.append(("savings", f"${result.savings:,.0f}"))
    width = max(len(label) for label, _ in rows)
    return "\n".join(f"{label.ljust(width)}  {value}" for label, value in rows) + "\n"


def _cmd_design(args) -> int:
    spec = io.load_design_spec(args.spec)
    result = design_report(spec, include_reuse=not args.no_reuse)
    Path(args.out).write_text(io.canonical_json(io.to_document(result)), encoding="utf-8")
    sys.stdout.write(_design_table(result))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    scenario = io.load_scenario(args.scenario)
    oc, rows = simulate_with_trace(scenario, workers=args.workers)
    Path(args.out).write_text(io.canonical_json(io.to_document(oc)), encoding="utf-8")
    if args.trace:
        io.write_trace_csv(rows, args.trace)
    return EXIT_OK


def _cmd_estimate(args) -> int:
    reused, fresh = io.load_trial_records(args.data)
    cells = pool_reused_and_new(reused, fresh)
    delta_hat, variance = estimate_delta(cells, args.cr12)
    estimate = superiority_test(delta_hat, variance, args.margin, args.alpha, args.cr12)
    _write_or_print(io.canonical_json(io.to_document(estimate)), args.out)
    return EXIT_OK


def _cmd_checklist(args) -> int:
    items = io.load_checklist_items(args.items)
    balance = None
    if args.balance:
        parts = args.balance.split(",")
        if len(parts) != 2:
            raise ValidationError("--balance takes two paths: legacy.csv,new.csv")
        if not args.covariates:
            raise ValidationError("--balance requires --covariates")
        names = [c.strip() for c in args.covariates.split(",") if c.strip()]
        legacy_records = io.load_scores(parts[0], covariates=names)
        new_records = io.load_scores(parts[1], covariates=names)
        balance = diagnostics.balance_report(legacy_records, new_records, names)
    report = diagnostics.render_checklist(items, balance)
    if args.out:
        Path(args.out).write_text(io.canonical_json(io.to_document(report)), encoding="utf-8")
    sys.stdout.write(diagnostics.render_checklist_text(report) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bridge",
                     description="Trial design with legacy-data reuse: concordance, "
                                 "sample size, estimation, simulation, diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("concordance", help="top-q%% overlap between two models",
                       parents=[], add_help=True)
    p.add_argument("--scores", required=True, help="risk-score CSV")
    p.add_argument("--legacy", required=True, help="legacy model column")
    p.add_argument("--new", required=True, help="new model column")
    p.add_argument("--q", type=float, required=True, help="high-risk fraction in (0,1]")
    p.add_argument("--grid", help="comma-separated q grid for the overlap curve")
    p.add_argument("--bootstrap", type=int, help="number of bootstrap replicates")
    p.add_argument("--seed", type=int, help="bootstrap seed (required with --bootstrap)")
    p.add_argument("--cluster-by", dest="cluster_by", help="resample clusters of this field")
    p.add_argument("--union", nargs="+", help="legacy models for union overlap")
    p.add_argument("--out", required=True, help="output path (.json, or .csv with --grid)")
    p.set_defaults(func=_cmd_concordance)

    p = sub.add_parser("design", help="sample size and reuse ledger from a spec")
    p.add_argument("--spec", required=True, help="design spec JSON")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--no-reuse", action="store_true", help="conventional design only")
    p.set_defaults(func=_cmd_design)

    p = sub.add_parser("simulate", help="Monte Carlo operating characteristics")
    p.add_argument("--scenario", required=True, help="scenario JSON")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--trace", help="optional per-replicate CSV")
    p.add_argument("--workers", type=int, default=1, help="parallel workers")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("estimate", help="stratified effect estimate from trial records")
    p.add_argument("--data", required=True, help="trial-record CSV")
    p.add_argument("--cr12", type=float, required=True, help="design-stage concordance")
    p.add_argument("--margin", type=float, required=True, help="superiority margin")
    p.add_argument("--alpha", type=float, required=True, help="one-sided alpha")
    p.add_argument("--out", help="output JSON path (default: stdout)")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("checklist", help="render the reuse-validity checklist")
    p.add_argument("--items", required=True, help="checklist statuses JSON")
    p.add_argument("--balance", help="two CSVs: legacy.csv,new.csv")
    p.add_argument("--covariates", help="comma-separated covariate names")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=_cmd_checklist)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (DataFormatError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
