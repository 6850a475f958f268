"""Command-line entry point.

Subcommands: run (execute a batch), metrics (score a stored batch),
plotdata (emit tidy tables for external plotting), validate (pre-flight a
config without running anything).

Exit codes: 0 success, 1 usage error, 2 config error, 3 runtime failure.
The SWARM_OUT environment variable overrides the output root.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

from . import metrics as metrics_mod
from .config import load_config
from .errors import ConfigError, UsageError
from .metrics import ALL_METRICS, MetricReport, build_report
from .runner import BatchData, run_batch

FIGURES = ("performance", "scalability", "selforg", "reactivity",
           "adaptability")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="swarmscale",
                description="Swarm-foraging simulator and metrics engine")
    sub = p.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a batch from a config file")
    run_p.add_argument("config", help="path to INI config file")
    run_p.add_argument("--set", dest="overrides", action="append",
                       default=[], metavar="SECTION.KEY=VALUE",
                       help="override a config field")
    run_p.add_argument("--out", help="output root (default: $SWARM_OUT "
                       "or ./out)")
    run_p.add_argument("--force", action="store_true",
                       help="overwrite an existing batch directory")

    val_p = sub.add_parser("validate",
                           help="check a config without running anything")
    val_p.add_argument("config")
    val_p.add_argument("--set", dest="overrides", action="append",
                       default=[], metavar="SECTION.KEY=VALUE")

    met_p = sub.add_parser("metrics",
                           help="compute metric reports from a stored batch")
    met_p.add_argument("batch", help="batch directory")
    met_p.add_argument("--which", nargs="+", choices=ALL_METRICS,
                       default=[metrics_mod.SCALABILITY,
                                metrics_mod.SELFORG])
    met_p.add_argument("--ideal", help="ideal-conditions batch directory "
                       "(required for reactivity/adaptability)")
    met_p.add_argument("--out", help="directory for report files "
                       "(default: $SWARM_OUT or .)")
    met_p.add_argument("--phi-literal-sum", action="store_true",
                       help="aggregate the projection ratios by raw sum "
                       "instead of mean")

    plot_p = sub.add_parser("plotdata",
                            help="emit plot-ready CSV tables")
    plot_p.add_argument("--figure", required=True,
                        help=f"one of: {', '.join(FIGURES)}")
    plot_p.add_argument("--batch", help="batch directory (performance)")
    plot_p.add_argument("--report", help="report JSON (metric figures)")
    plot_p.add_argument("--out", help="output directory "
                        "(default: $SWARM_OUT or .)")
    return p


def _parse_overrides(pairs):
    out = {}
    for item in pairs:
        if "=" not in item:
            raise UsageError(f"override must be SECTION.KEY=VALUE, "
                             f"got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _out_root(explicit, default="out"):
    if explicit:
        return Path(explicit)
    env = os.environ.get("SWARM_OUT")
    if env:
        return Path(env)
    return Path(default)


def _cmd_run(args) -> int:
    cfg = load_config(args.config, _parse_overrides(args.overrides))
    result = run_batch(cfg, _out_root(args.out), force=args.force)
    print(f"batch {result.batch_id} -> {result.batch_dir}")
    print(f"{'controller':<10} {'N':>6} {'P(T)':>10}")
    for (kind, n), cell in sorted(result.cells.items()):
        print(f"{kind:<10} {n:>6} {cell.cumulative.values[-1]:>10.2f}")
    return 0


def _cmd_validate(args) -> int:
    cfg = load_config(args.config, _parse_overrides(args.overrides))
    print(f"config OK (digest {cfg.digest()[:12]})")
    return 0


def _cmd_metrics(args) -> int:
    which = list(args.which)
    needs_ideal = metrics_mod.REACTIVITY in which or \
        metrics_mod.ADAPTABILITY in which
    if needs_ideal and not args.ideal:
        raise UsageError("reactivity/adaptability require --ideal "
                         "(the ideal-conditions batch)")
    batch = BatchData(args.batch)
    ideal = BatchData(args.ideal) if args.ideal else None
    if ideal is not None and \
            ideal.grid().num_intervals != batch.grid().num_intervals:
        raise ConfigError("ideal and variance batches have mismatched "
                          "time grids")
    phi_mode = metrics_mod.PHI_LITERAL_SUM if args.phi_literal_sum \
        else metrics_mod.PHI_MEAN
    report = build_report(batch, which=which, ideal=ideal,
                          phi_mode=phi_mode)
    out_dir = _out_root(args.out, default=".")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(report.to_json() + "\n")
    (out_dir / "report.csv").write_text(report.to_csv())
    print(f"wrote {out_dir / 'report.json'} and {out_dir / 'report.csv'}")
    return 0


def _plot_rows(args):
    fig = args.figure
    if fig not in FIGURES:
        raise UsageError(f"unknown figure {fig!r}; valid figures: "
                         f"{', '.join(FIGURES)}")
    if fig == "performance":
        if not args.batch:
            raise UsageError("figure 'performance' needs --batch")
        batch = BatchData(args.batch)
        rows = [["controller", "N", "t_seconds", "value"]]
        for kind in batch.kinds:
            for n in batch.sizes:
                curve = batch.curve(kind, n, "cumulative")
                for i, v in enumerate(curve.values):
                    rows.append([kind, n,
                                 f"{(i + 1) * curve.interval_seconds:.17g}",
                                 f"{v:.17g}"])
        return rows
    if not args.report:
        raise UsageError(f"figure {fig!r} needs --report")
    report = MetricReport.from_json(Path(args.report).read_text())
    if fig == "scalability":
        rows = [["controller", "N1", "N2", "e"]]
        rows += [[r["controller"], r["N1"], r["N2"], f"{r['e']:.17g}"]
                 for r in report.scalability]
    elif fig == "selforg":
        rows = [["controller", "m_prev", "m", "Z"]]
        rows += [[r["controller"], r["m_prev"], r["m"], f"{r['Z']:.17g}"]
                 for r in report.selforg]
    elif fig == "reactivity":
        rows = [["controller", "N", "beta", "R"]]
        rows += [[r["controller"], r["N"], f"{r['beta']:.17g}",
                  f"{r['R']:.17g}"] for r in report.reactivity]
    else:
        rows = [["controller", "N", "beta", "A"]]
        rows += [[r["controller"], r["N"], f"{r['beta']:.17g}",
                  f"{r['A']:.17g}"] for r in report.adaptability]
    return rows


def _cmd_plotdata(args) -> int:
    rows = _plot_rows(args)
    if len(rows) < 2:
        raise ConfigError(f"no data for figure {args.figure!r}")
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    out_dir = _out_root(args.out, default=".")
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{args.figure}.csv"
    path.write_text(buf.getvalue())
    print(f"wrote {path}")
    return 0


_COMMANDS = {"run": _cmd_run, "validate": _cmd_validate,
             "metrics": _cmd_metrics, "plotdata": _cmd_plotdata}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
