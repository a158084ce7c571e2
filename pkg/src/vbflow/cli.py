"""Command line entry points.

Subcommands:

- ``run``: one configured flow case from a JSON file
- ``bench``: the reference benchmark cases with pass/fail grading
- ``sweep``: terminal slip error against the integral gain
- ``stability``: flow-measured probes of the gain stability map

Exit status: 0 when everything passed, 1 when a metric missed its
tolerance, 2 when a solver diverged or a case errored out.
"""

import argparse
import os
import sys

from . import bench as bench_mod
from .config import ConfigError, apply_overrides, parse_config
from .runner import run_flow_case

EXIT_OK = 0
EXIT_METRIC = 1
EXIT_SOLVER = 2


def _status_exit(results):
    worst = EXIT_OK
    for res in results:
        if res.status != "completed":
            worst = max(worst, EXIT_SOLVER)
        elif any(v == "fail" for v in res.verdicts.values()):
            worst = max(worst, EXIT_METRIC)
    return worst


def _print_result(res):
    for line in res.summary_lines():
        print(line)


def _maybe_plots(args, res, out_dir):
    if not getattr(args, "plots", False) or out_dir is None:
        return
    from . import plots

    case_dir = os.path.join(out_dir, res.name)
    try:
        if res.name == "beam-fsi":
            plots.render_fsi_report(case_dir, band=bench_mod.MODE_BAND)
        elif res.name == "stability-map":
            plots.render_stability_report(res.extra.get("probes", []),
                                          case_dir)
        elif os.path.exists(os.path.join(case_dir, "series.csv")):
            plots.render_series_report(case_dir)
    except (OSError, ValueError) as exc:
        print(f"[{res.name}] figure rendering skipped: {exc}")


def cmd_run(args):
    try:
        with open(args.config) as fh:
            text = fh.read()
        if args.override:
            text = apply_overrides(text, args.override)
        cfg = parse_config(text)
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    out_dir = args.out or cfg.output.directory
    result = run_flow_case(cfg, out_dir=out_dir)
    print(f"[{cfg.name}] status = {result.status}"
          + (f" ({result.message})" if result.message else ""))
    print(f"  steps = {result.n_steps}, final time = {result.final_time:g}")
    if result.series["t"].size:
        print(f"  final cd = {result.series['cd'][-1]:.6g}, "
              f"cl = {result.series['cl'][-1]:.6g}, "
              f"ex = {result.series['ex'][-1]:.3e}")
    if args.plots and result.series["t"].size >= 2:
        from . import plots

        plots.render_series_report(out_dir)
    return EXIT_OK if result.ok else EXIT_SOLVER


def cmd_bench(args):
    names = args.case or list(bench_mod.CASE_NAMES)
    bad = [n for n in names if n not in bench_mod.CASE_NAMES]
    if bad:
        print(f"unknown case(s): {', '.join(bad)}; "
              f"choose from {', '.join(bench_mod.CASE_NAMES)}",
              file=sys.stderr)
        return EXIT_SOLVER
    results = []
    for name in names:
        res = None
        if not args.rerun:
            res = bench_mod.load_result(name, args.out)
            if res is not None:
                print(f"[{name}] using cached result "
                      f"({os.path.join(args.out, name, 'result.json')})")
        if res is None:
            res = bench_mod.run_case(name, out_dir=args.out)
        _print_result(res)
        _maybe_plots(args, res, args.out)
        results.append(res)
    return _status_exit(results)


def cmd_sweep(args):
    res = None
    if not args.rerun:
        res = bench_mod.load_result("gain-sweep", args.out)
    if res is None:
        res = bench_mod.gain_sensitivity_sweep(out_dir=args.out)
    _print_result(res)
    for row in res.extra.get("rows", []):
        print(f"  -alpha dt^2 = {row['alpha_x']:g}: "
              f"terminal ex = {row['ex_terminal']:.3e} [{row['status']}]")
    return _status_exit([res])


def cmd_stability(args):
    res = None
    if not args.rerun:
        res = bench_mod.load_result("stability-map", args.out)
    if res is None:
        res = bench_mod.stability_map_experiment(out_dir=args.out)
    _print_result(res)
    _maybe_plots(args, res, args.out)
    return _status_exit([res])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="vbflow",
        description="Immersed-boundary flow solver with feedback forcing.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configured flow case")
    p_run.add_argument("--config", required=True, help="JSON config file")
    p_run.add_argument("--override", action="append", default=[],
                       metavar="PATH=VALUE",
                       help="dotted-path config override, e.g. time.dt=0.005")
    p_run.add_argument("--out", default=None,
                       help="output directory (default: config output.directory)")
    p_run.add_argument("--plots", action="store_true",
                       help="render figures next to the series output")
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="run the reference benchmarks")
    p_bench.add_argument("case", nargs="*",
                         help=f"cases to run (default: all of "
                              f"{', '.join(bench_mod.CASE_NAMES)})")
    p_bench.add_argument("--out", default="bench_results",
                         help="result cache directory")
    p_bench.add_argument("--rerun", action="store_true",
                         help="ignore cached results")
    p_bench.add_argument("--plots", action="store_true",
                         help="render figures next to the results")
    p_bench.set_defaults(func=cmd_bench)

    p_sweep = sub.add_parser("sweep",
                             help="slip error vs integral gain sweep")
    p_sweep.add_argument("--out", default="bench_results")
    p_sweep.add_argument("--rerun", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_stab = sub.add_parser("stability",
                            help="flow probes of the gain stability map")
    p_stab.add_argument("--out", default="bench_results")
    p_stab.add_argument("--rerun", action="store_true")
    p_stab.add_argument("--plots", action="store_true")
    p_stab.set_defaults(func=cmd_stability)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
