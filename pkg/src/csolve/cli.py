"""``csolve`` command line.

    csolve <instance.cspi> --branching B --voh V [options]
    csolve gen rb|queens ...
    csolve sweep <instance.cspi> --voh V --e-from F --e-to F --step F --out FILE
    csolve suite --instances DIR|LIST --grid GRID.json --out FILE [--jobs N]
    csolve ttest A.csv B.csv --column NAME

Exit status: 0 when the run completed (any verdict), 2 on usage errors,
3 on I/O or parse errors.
"""

from __future__ import annotations

import argparse
import logging
import pathlib
import sys

from . import harness
from .model import InstanceError, generate_nqueens, generate_rb, render_instance
from .search import Mode, solve
from .stats import paired_t_test

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3


class _UsageError(Exception):
    pass


def _solve_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csolve", description="MAC solver with adaptive branching")
    ap.add_argument("instance")
    ap.add_argument("--branching", required=True, choices=harness.BRANCHING_NAMES)
    ap.add_argument("--voh", required=True, choices=list(harness.VOH_NAMES))
    ap.add_argument("--e", type=float, default=None)
    ap.add_argument("--secondary", choices=list(harness.SECONDARY_NAMES), default="wdeg")
    ap.add_argument("--mode", choices=[m.value for m in Mode], default="first")
    ap.add_argument("--timeout", type=float, default=None, help="seconds")
    ap.add_argument("--node-limit", type=int, default=None)
    ap.add_argument("--trace", default=None, help="write the decision trace here")
    ap.add_argument("--stats", default=None, help="write a one-row stats CSV here")
    return ap


def _gen_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csolve gen")
    sub = ap.add_subparsers(dest="family", required=True)
    rb = sub.add_parser("rb")
    rb.add_argument("--n", type=int, required=True)
    rb.add_argument("--alpha", type=float, required=True)
    rb.add_argument("--r", type=float, required=True)
    rb.add_argument("--p", type=float, required=True)
    rb.add_argument("--seed", type=int, required=True)
    rb.add_argument("--out", required=True)
    q = sub.add_parser("queens")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--out", required=True)
    return ap


def _sweep_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csolve sweep")
    ap.add_argument("instance")
    ap.add_argument("--voh", required=True, choices=list(harness.VOH_NAMES))
    ap.add_argument("--e-from", type=float, required=True)
    ap.add_argument("--e-to", type=float, required=True)
    ap.add_argument("--step", type=float, required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--mode", choices=[m.value for m in Mode], default="first")
    ap.add_argument("--timeout", type=float, default=None)
    ap.add_argument("--node-limit", type=int, default=None)
    return ap


def _suite_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csolve suite")
    ap.add_argument("--instances", required=True)
    ap.add_argument("--grid", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--jobs", type=int, default=1)
    return ap


def _ttest_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csolve ttest")
    ap.add_argument("a")
    ap.add_argument("b")
    ap.add_argument("--column", required=True)
    return ap


def _cmd_solve(args) -> int:
    try:
        config = harness.make_config(
            args.branching, args.voh, args.e, args.secondary, args.mode,
            args.timeout, args.node_limit, trace=args.trace is not None,
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    problem = harness.load_source(args.instance)
    report = solve(problem, config)

    out = sys.stdout
    out.write(f"verdict {report.verdict.value}\n")
    for sol in report.solutions:
        out.write("solution " + " ".join(f"{k}={v}" for k, v in problem.named(sol).items()) + "\n")
    out.write(
        f"solutions {report.solution_count}\nnodes {report.nodes}\nvc {report.vc}\n"
        f"vc_blocked {report.vc_blocked}\ndwo {report.dwo_count}\n"
        f"deletion_events {report.deletion_event_count}\n"
        f"time_ms {int(report.wall_time * 1000)}\n"
    )
    if report.dis_mean is not None:
        out.write(f"dis_mean {report.dis_mean:.4f}\n")

    if args.trace:
        names = [v.name for v in problem.variables]
        with open(args.trace, "w") as fh:
            for d in report.decision_trace:
                fh.write(f"{d.depth} {d.kind.value} {names[d.var]} {d.value}\n")
    if args.stats:
        name = pathlib.Path(args.instance).stem if problem.name == "" else problem.name
        harness.write_records([harness.RunRecord.from_report(name, config, report)], args.stats)
    return EXIT_OK


def _cmd_gen(args) -> int:
    try:
        if args.family == "rb":
            problem = generate_rb(args.n, args.alpha, args.r, args.p, args.seed)
        else:
            problem = generate_nqueens(args.n)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    pathlib.Path(args.out).write_text(render_instance(problem))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    problem = harness.load_source(args.instance)
    try:
        rows = harness.e_sweep(
            problem, harness.VOH_NAMES[args.voh], args.e_from, args.e_to, args.step, args.out,
            mode=Mode(args.mode), node_limit=args.node_limit, time_limit=args.timeout,
        )
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    for row in rows:
        print(f"e={row.e:g} nodes={row.nodes} vc={row.vc} time_ms={row.time_ms}")
    return EXIT_OK


def _cmd_suite(args) -> int:
    sources = harness.list_sources(args.instances)
    try:
        configs = harness.load_grid(args.grid)
    except (ValueError, TypeError) as exc:
        raise _UsageError(f"bad grid: {exc}") from None
    records = harness.run_suite(sources, configs, args.out, jobs=args.jobs)
    print(f"{len(records)} records written to {args.out}")
    return EXIT_OK


def _paired_column(a, b, column):
    if column not in harness.CSV_HEADER or column in ("instance", "scheme", "voh", "verdict"):
        raise _UsageError(f"{column!r} is not a numeric column")

    def keyed(records):
        seen = {}
        out = {}
        for r in records:
            k = seen.get(r.instance, 0)
            seen[r.instance] = k + 1
            out[(r.instance, k)] = getattr(r, column)
        return out

    ka, kb = keyed(a), keyed(b)
    pairs = [(ka[k], kb[k]) for k in ka if k in kb and ka[k] is not None and kb[k] is not None]
    return [float(x) for x, _ in pairs], [float(y) for _, y in pairs]


def _cmd_ttest(args) -> int:
    try:
        a = harness.read_records(args.a)
        b = harness.read_records(args.b)
    except ValueError as exc:
        raise InstanceError(str(exc)) from None
    xs, ys = _paired_column(a, b, args.column)
    try:
        res = paired_t_test(xs, ys)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    print(f"pairs {res.n_pairs}")
    print(f"mean {res.mean:.6g}")
    print(f"sd {res.sd:.6g}")
    print(f"t {res.t_value:.6g}")
    print(f"ci95 ({res.ci_low:.6g}, {res.ci_high:.6g})")
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    argv = list(sys.argv[1:] if argv is None else argv)
    commands = {
        "gen": (_gen_parser, _cmd_gen),
        "sweep": (_sweep_parser, _cmd_sweep),
        "suite": (_suite_parser, _cmd_suite),
        "ttest": (_ttest_parser, _cmd_ttest),
    }
    if argv and argv[0] in commands:
        make_parser, run = commands[argv[0]]
        argv = argv[1:]
    else:
        make_parser, run = _solve_parser, _cmd_solve
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(args)
    except _UsageError as exc:
        print(f"csolve: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, InstanceError) as exc:
        print(f"csolve: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
