"""Command-line entry point: ``rightsize <command> ...``.

Exit codes: 0 success, 2 infeasible instance, 3 solver failure, 4 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import load_scenarios, no_timeline_bound, run_bench, write_csv
from .costs import CostParams, GenSpec, generate_synthetic
from .ingest import TraceParseError, ingest_trace
from .lp import LpSolverError, build_lp, lower_bound, solve_mapping_lp, write_lp
from .model import (
    InfeasibleTaskError,
    InstanceError,
    StructuralError,
    instance_to_dict,
    load_instance,
    load_solution,
    save_solution,
    trim_timeline,
    verify_solution,
)
from .placement import SolveConfig, solve, solve_preset

EXIT_OK, EXIT_INFEASIBLE, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

FIT_CHOICES = ("first", "sim-dot", "sim-cos")


def _dump(obj, out):
    text = json.dumps(obj, indent=1)
    if out in (None, "-"):
        print(text)
    else:
        Path(out).write_text(text + "\n", encoding="utf-8")


def cmd_generate(args):
    cost = "homogeneous"
    if args.exponent is not None or args.heterogeneous:
        cost = CostParams.heterogeneous(args.D, args.exponent or 1.0, seed=args.seed)
    spec = GenSpec(args.n, args.m, args.D, args.T, tuple(args.demand), tuple(args.capacity), cost, args.seed)
    _dump(instance_to_dict(generate_synthetic(spec)), args.out)


def cmd_ingest(args):
    cost = CostParams(tuple(args.coefficients)) if args.coefficients else None
    inst, report = ingest_trace(args.tasks, args.types, args.n, args.m, args.seed, cost, args.quantum)
    print(f"dropped rows: {report.dropped_tasks} tasks, {report.dropped_types} node-types; "
          f"overlap changes under quantization: {report.overlap_changes}; "
          f"horizon {report.horizon_before_trim} -> {report.horizon}", file=sys.stderr)
    _dump(instance_to_dict(inst), args.out)


def cmd_solve(args):
    inst = load_instance(args.instance)
    algo = args.algo
    fill = args.fill or algo.endswith("-f")
    base = algo.removesuffix("-f")
    if args.fit is None and args.height is None:
        name = base + ("-f" if fill else "")
        sol = solve_preset(inst, name, segregate_large=args.segregate_large)
    else:
        if base == "penmap":
            source = f"penalty-{args.height or 'avg'}"
        else:
            source = "lp"
        cfg = SolveConfig(source, args.fit or "first", fill, args.segregate_large)
        sol = solve(inst, cfg)
    report = verify_solution(inst, sol)
    if not report.feasible:
        raise AssertionError("solver produced an infeasible solution")
    print(f"cost {sol.cost:.6g} with {len(sol.nodes)} nodes ({sol.meta.get('algorithm')})", file=sys.stderr)
    if args.out:
        save_solution(sol, args.out)


def cmd_verify(args):
    inst = load_instance(args.instance)
    sol = load_solution(args.solution, inst)
    report = verify_solution(inst, sol)
    for v in report.violations:
        print(f"violation: node {v.node} slot {v.timeslot} dim {v.dim} slack {v.slack:.3g}")
    for tid in report.unassigned:
        print(f"unassigned task {tid!r}")
    for tid in report.multiply_assigned:
        print(f"task {tid!r} placed more than once")
    print("feasible" if report.feasible else "INFEASIBLE", f"cost {sol.cost:.6g}")
    return EXIT_OK if report.feasible else 1


def cmd_bound(args):
    inst = load_instance(args.instance)
    if args.lp_out:
        write_lp(build_lp(trim_timeline(inst)[0]), args.lp_out)
    if args.report:
        from .lp import fractionality_report

        lp = solve_mapping_lp(inst)
        print(f"{lp.objective_value:.10g}")
        for line in fractionality_report(lp).lines():
            print(line, file=sys.stderr)
    else:
        print(f"{lower_bound(inst):.10g}")


def cmd_no_timeline(args):
    inst = load_instance(args.instance)
    nt = no_timeline_bound(inst)
    print(f"{nt:.10g}")
    if args.ratio:
        cost = solve_preset(inst, "LPMapF").cost
        print(f"timeline-aware LPMapF cost {cost:.6g}; ratio {nt / cost:.4f}", file=sys.stderr)


def cmd_bench(args):
    scenarios = load_scenarios(args.scenario)
    base = Path(args.scenario).resolve().parent
    rows, summary = [], {}
    for sc in scenarios:
        r, s = run_bench(sc, base)
        rows += r
        summary.update(s)
    write_csv(rows, args.out, record_time=not args.no_time)
    for (scenario, alg), mean in summary.items():
        print(f"{scenario}\t{alg}\tmean normalized {mean:.4f}")
    errors = [r for r in rows if r.status != "ok"]
    if errors:
        print(f"{len(errors)} row(s) failed", file=sys.stderr)
        return EXIT_SOLVER if any("solver" in r.status for r in errors) else EXIT_INFEASIBLE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rightsize", description="Cold-start cluster rightsizing for time-limited tasks.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="synthetic instance JSON")
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--m", type=int, default=10)
    g.add_argument("--D", type=int, default=5)
    g.add_argument("--T", type=int, default=24)
    g.add_argument("--demand", type=float, nargs=2, default=(0.01, 0.1))
    g.add_argument("--capacity", type=float, nargs=2, default=(0.2, 1.0))
    g.add_argument("--heterogeneous", action="store_true", help="random cost coefficients in [0.3, 1]")
    g.add_argument("--exponent", type=float, default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", "-o", default="-")
    g.set_defaults(func=cmd_generate)

    i = sub.add_parser("ingest", help="sample an instance from trace CSVs")
    i.add_argument("tasks")
    i.add_argument("types")
    i.add_argument("--n", type=int, required=True)
    i.add_argument("--m", type=int, required=True)
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--quantum", type=float, default=3600.0, help="seconds per timeslot")
    i.add_argument("--coefficients", type=float, nargs=2, help="cpu and memory price coefficients")
    i.add_argument("--out", "-o", default="-")
    i.set_defaults(func=cmd_ingest)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("instance")
    s.add_argument("--algo", choices=["penmap", "penmap-f", "lpmap", "lpmap-f"], default="lpmap-f")
    s.add_argument("--fit", choices=FIT_CHOICES)
    s.add_argument("--height", choices=["avg", "max"])
    s.add_argument("--fill", action="store_true")
    s.add_argument("--segregate-large", action="store_true")
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a solution against an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bound", help="LP lowerbound")
    b.add_argument("instance")
    b.add_argument("--lp-out", help="also write the LP in CPLEX LP format")
    b.add_argument("--report", action="store_true", help="print fractionality statistics")
    b.set_defaults(func=cmd_bound)

    nt = sub.add_parser("no-timeline-bound", help="lowerbound with every task always active")
    nt.add_argument("instance")
    nt.add_argument("--ratio", action="store_true", help="also compare with the LPMapF cost")
    nt.set_defaults(func=cmd_no_timeline)

    be = sub.add_parser("bench", help="run a scenario file")
    be.add_argument("--scenario", required=True)
    be.add_argument("--out", required=True)
    be.add_argument("--no-time", action="store_true", help="leave time_ms empty (byte-stable output)")
    be.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args) or EXIT_OK
    except InfeasibleTaskError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (LpSolverError, AssertionError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (OSError, TraceParseError, InstanceError, StructuralError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
