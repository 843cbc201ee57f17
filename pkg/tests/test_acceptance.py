"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s``; the summary also appears
at the end of any pytest run that includes this module.
"""
import itertools
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import always_active, brute_force_opt
from rightsize.bench import evaluate, no_timeline_bound, no_timeline_ratio, summarize
from rightsize.costs import GenSpec, generate_synthetic
from rightsize.ingest import ingest_trace, write_synthetic_trace
from rightsize.lp import build_lp, fractionality_report, lower_bound, solve_lp, solve_mapping_lp
from rightsize.model import Instance, NodeType, Task, trim_timeline, verify_solution
from rightsize.oracle import exact_opt
from rightsize.penmap import is_small
from rightsize.placement import PRESETS, SolveConfig, make_mapping, solve, solve_preset, solve_two_phase

pytestmark = pytest.mark.acceptance

ALL_CONFIGS = [SolveConfig(src, fit, fill) for src in ("penalty-avg", "penalty-max", "lp")
               for fit in ("first", "sim-dot", "sim-cos") for fill in (False, True)]


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def tiny(rng, n_max=6, m_max=2, T_max=4, D_max=2, small=False):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    T = int(rng.integers(1, T_max + 1))
    D = int(rng.integers(1, D_max + 1))
    lo = 0.5 if small else 0.3
    types = tuple(NodeType(j, tuple(rng.uniform(lo, 1.0, D)), float(rng.uniform(1, 10))) for j in range(m))
    tasks = []
    for i in range(n):
        s, e = sorted(rng.integers(1, T + 1, size=2))
        if small:
            dem = rng.uniform(0, 0.25, D)
        else:
            dem = np.minimum(rng.uniform(0, 0.9, D), types[rng.integers(m)].capacity)
        tasks.append(Task(i, tuple(dem), int(s), int(e)))
    return Instance(tuple(tasks), types, T, D)


# 1 ---------------------------------------------------------------------------

def grid_instances(count=200, n=120):
    grid = list(itertools.product((2, 5, 7), (5, 10, 15), ((0.01, 0.05), (0.01, 0.1), (0.01, 0.2))))
    for k in range(count):
        D, m, dem = grid[k % len(grid)]
        yield generate_synthetic(GenSpec(n=n, m=m, D=D, T=24, demand_interval=dem, seed=1000 + k))


def test_criterion_1_feasibility_suite():
    checked = violations = worst = 0
    for inst in grid_instances():
        lp = solve_mapping_lp(inst)
        sols = [solve(inst, cfg, lp) for cfg in ALL_CONFIGS]
        sols += [solve(inst, SolveConfig(c.mapping_source, c.fit, c.cross_fill, True), lp) for c in ALL_CONFIGS[::2]]
        sols += [solve_preset(inst, name, lp) for name in PRESETS]
        for sol in sols:
            rep = verify_solution(inst, sol)
            checked += 1
            violations += len(rep.violations) + len(rep.unassigned) + len(rep.multiply_assigned)
            if rep.violations:
                worst = min(worst, min(v.slack for v in rep.violations))
    ok = violations == 0
    record(1, "feasibility on 200 grid instances", ok,
           f"{checked} solutions verified, {violations} violations (worst slack {worst:.2e})")
    assert ok


# 2 ---------------------------------------------------------------------------

def test_criterion_2_sandwich():
    rng = np.random.default_rng(2)
    bad = []
    for k in range(50):
        inst = tiny(rng)
        lb = lower_bound(inst)
        _, opt = exact_opt(inst)
        brute = brute_force_opt(inst)  # independent route to the optimum
        heur = {name: solve_preset(inst, name).cost for name in PRESETS}
        if not (lb <= opt * (1 + 1e-6) + 1e-12 and abs(opt - brute) <= 1e-9 * max(1, brute)
                and all(opt <= c + 1e-9 for c in heur.values())):
            bad.append((k, lb, opt, brute, heur))
    ok = not bad
    record(2, "LB <= exact <= heuristics on 50 tiny instances", ok,
           f"{50 - len(bad)}/50 hold" + (f"; first failure {bad[0]}" if bad else ""))
    assert ok


# 3 ---------------------------------------------------------------------------

def test_criterion_3_approximation_bounds():
    rng = np.random.default_rng(3)
    bad, checked = [], 0
    while checked < 50:
        inst = tiny(rng, n_max=7, m_max=3, T_max=5, small=True)
        if not is_small(inst).all():
            continue
        checked += 1
        _, opt = exact_opt(inst)
        base = float(inst.costs.sum())
        T_trim = trim_timeline(inst)[0].horizon
        pen_bound = base + 2 * inst.dims * min(inst.m, T_trim) * opt
        lp_bound = base + 2 * inst.dims * inst.m * opt
        pen = [solve_preset(inst, "PenMap").cost] + [solve(inst, c).cost for c in PRESETS["PenMap"]]
        lpm = [solve_preset(inst, "LPMap").cost] + [solve(inst, c).cost for c in PRESETS["LPMap"]]
        if max(pen) > pen_bound + 1e-9 or max(lpm) > lp_bound + 1e-9:
            bad.append((checked, max(pen), pen_bound, max(lpm), lp_bound))
    ok = not bad
    record(3, "approximation bounds on 50 small-task instances", ok,
           f"{checked - len(bad)}/{checked} hold for every PenMap/LPMap configuration and preset")
    assert ok


# 4 ---------------------------------------------------------------------------

def test_criterion_4_fill_monotonicity():
    pairs = bad = 0
    for k, inst in enumerate(grid_instances(count=100, n=100)):
        lp = solve_mapping_lp(inst)
        for src in ("penalty-avg", "penalty-max", "lp"):
            mapping = make_mapping(inst, src, lp)
            for fit in ("first", "sim-dot", "sim-cos"):
                plain = solve_two_phase(inst, mapping, SolveConfig(src, fit)).cost
                filled = solve_two_phase(inst, mapping, SolveConfig(src, fit, cross_fill=True)).cost
                pairs += 1
                bad += filled > plain + 1e-9
        for a, b in (("PenMap", "PenMapF"), ("LPMap", "LPMapF")):
            pairs += 1
            bad += solve_preset(inst, b, lp).cost > solve_preset(inst, a, lp).cost + 1e-9
    ok = bad == 0
    record(4, "cross-fill never increases cost (100 instances)", ok, f"{pairs - bad}/{pairs} comparisons hold")
    assert ok


# 5, 6 ------------------------------------------------------------------------

@pytest.fixture(scope="module")
def default_means():
    rows = []
    for seed in range(5):
        rows += evaluate(generate_synthetic(GenSpec(seed=seed)), list(PRESETS), "defaults", seed)
    assert all(r.status == "ok" for r in rows)
    return {alg: mean for (_, alg), mean in summarize(rows).items()}


def test_criterion_5_headline_quality(default_means):
    mean = default_means["LPMapF"]
    ok = mean <= 1.25
    record(5, "LPMapF mean normalized cost <= 1.25 at default generator settings", ok,
           "means " + ", ".join(f"{a} {v:.4f}" for a, v in default_means.items()))
    assert ok


def test_criterion_6_ordering(default_means):
    m = default_means
    ok = m["LPMapF"] <= m["LPMap"] <= m["PenMap"] and m["LPMapF"] <= m["PenMapF"]
    record(6, "LPMapF <= LPMap <= PenMap and LPMapF <= PenMapF on means", ok,
           f"LPMapF {m['LPMapF']:.4f}, LPMap {m['LPMap']:.4f}, PenMap {m['PenMap']:.4f}, PenMapF {m['PenMapF']:.4f}")
    assert ok


# 7 ---------------------------------------------------------------------------

def test_criterion_7_near_integrality():
    trimmed, _ = trim_timeline(generate_synthetic(GenSpec(seed=0)))
    lp = solve_lp(build_lp(trimmed), certify_vertex=True)
    rep = fractionality_report(lp)
    ok = lp.basic and rep.within_bound
    share_note = "meets" if rep.near_integral_share >= 0.60 else "below"
    record(7, "vertex LP has <= n + m*T'*D fractional variables", ok,
           f"vertex certified {lp.basic}, {rep.fractional} fractional (bound {rep.bound}); "
           f"x_max >= 0.99 for {rep.near_integral_share:.1%} of tasks ({share_note} the 60% reading, report-only)")
    assert ok


# 8 ---------------------------------------------------------------------------

def day_parted(parts, copies, cost_small=6.5):
    """``parts`` large tasks in disjoint slots plus one long small task, replicated ``copies`` times.

    A capacity-1 node at cost 10 hosts one copy; the small type (capacity 0.6)
    costs more per unit of capacity, so the LP has a unique best type.
    """
    types = (NodeType("big", (1.0, 1.0), 10.0), NodeType("small", (0.6, 0.6), cost_small))
    tasks = []
    for c in range(copies):
        tasks += [Task(f"p{c}_{k}", (0.6, 0.6), k + 1, k + 1) for k in range(parts)]
        tasks.append(Task(f"l{c}", (0.4, 0.4), 1, parts))
    return Instance(tuple(tasks), types, parts, 2)


def test_criterion_8_no_timeline_factor(tmp_path):
    results = []
    for parts, copies in itertools.product((2, 3, 4), (1, 2, 3)):
        inst = day_parted(parts, copies)
        bound, cost, ratio = no_timeline_ratio(inst)
        # hand value: with every task always on, all load on "big" is cheapest
        expected = 10.0 * (0.6 * parts + 0.4) * copies
        results.append((parts, copies, bound, expected, cost, ratio))
    flat = always_active(day_parted(2, 1))
    ok = all(r[5] >= 1.5 and abs(r[2] - r[3]) <= 1e-6 * r[3] for r in results)
    ok = ok and brute_force_opt(flat) >= no_timeline_bound(day_parted(2, 1)) - 1e-9

    tasks, types = tmp_path / "tasks.csv", tmp_path / "types.csv"
    write_synthetic_trace(tasks, types, n_tasks=3000, n_types=13, seed=0)
    trace, _ = ingest_trace(tasks, types, n=500, m=13, seed=0)
    _, _, trace_ratio = no_timeline_ratio(trace)
    record(8, "no-timeline bound / LPMapF >= 1.5 on day-parted instances", ok,
           f"min ratio {min(r[5] for r in results):.3f} over {len(results)} instances; "
           f"trace-shaped sample (n=500, m=13) ratio {trace_ratio:.2f} (reported)")
    assert ok


# 9 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_9_runtime(tmp_path):
    tasks, types = tmp_path / "tasks.csv", tmp_path / "types.csv"
    write_synthetic_trace(tasks, types, n_tasks=13000, n_types=13, seed=0)
    inst, _ = ingest_trace(tasks, types, n=2000, m=13, seed=0)
    t0 = time.perf_counter()
    pen = solve_preset(inst, "PenMap")
    t_pen = time.perf_counter() - t0
    t0 = time.perf_counter()
    lp = solve_mapping_lp(inst)
    lpf = solve_preset(inst, "LPMapF", lp)
    t_lp = time.perf_counter() - t0
    feasible = verify_solution(inst, pen).feasible and verify_solution(inst, lpf).feasible
    ok = t_pen <= 60 and t_lp <= 1800 and feasible
    record(9, "runtime on trace-shaped n=2000, m=13", ok,
           f"PenMap {t_pen:.2f}s (limit 60s), LPMapF with LP {t_lp:.2f}s (limit 1800s), "
           f"T'={inst.horizon}, costs {pen.cost:.3f} / {lpf.cost:.3f}")
    assert ok
