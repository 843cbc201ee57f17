"""Benchmark harness: scenarios, normalized-cost rows, CSV output."""
from __future__ import annotations

import copy
import csv
import itertools
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .costs import genspec_from_dict, generate_synthetic
from .ingest import ingest_trace
from .lp import LpSolverError, lower_bound, solve_mapping_lp
from .model import InfeasibleTaskError, Instance, load_instance, trim_timeline, verify_solution
from .placement import PRESETS, PRESET_ALIASES, solve_preset

log = logging.getLogger(__name__)

CSV_COLUMNS = ("scenario", "seed", "algorithm", "cost", "lb", "normalized", "time_ms", "status")
ALGORITHMS = tuple(PRESETS)


@dataclass
class Scenario:
    name: str
    source: dict
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])

    def __post_init__(self):
        self.algorithms = [PRESET_ALIASES.get(a, a) for a in self.algorithms]
        if not self.algorithms or not self.seeds:
            raise ValueError(f"scenario {self.name!r}: need at least one algorithm and one seed")
        unknown = [a for a in self.algorithms if a not in PRESETS]
        if unknown:
            raise ValueError(f"scenario {self.name!r}: unknown algorithms {unknown}")
        if self.source.get("kind") not in ("synthetic", "trace", "file"):
            raise ValueError(f"scenario {self.name!r}: source kind must be synthetic, trace or file")

    def instance(self, seed: int, base_dir: Path | None = None) -> Instance:
        src = self.source
        kind = src["kind"]
        if kind == "synthetic":
            return generate_synthetic(genspec_from_dict(dict(src.get("gen", {}), seed=seed)))
        if kind == "trace":
            root = base_dir or Path(".")
            inst, _ = ingest_trace(root / src["tasks"], root / src["types"], int(src["n"]), int(src["m"]),
                                   seed=seed, quantum=float(src.get("quantum", 3600.0)))
            return inst
        return load_instance((base_dir or Path(".")) / src["path"])


@dataclass
class BenchRow:
    scenario: str
    seed: int
    algorithm: str
    cost: float | None
    lowerbound: float | None
    normalized_cost: float | None
    wall_time: float | None  # milliseconds
    status: str = "ok"

    def csv_fields(self, record_time: bool = True) -> list:
        def fmt(x):
            return "" if x is None else f"{x:.10g}"

        t = fmt(self.wall_time) if record_time and self.wall_time is not None else ""
        return [self.scenario, self.seed, self.algorithm, fmt(self.cost), fmt(self.lowerbound),
                fmt(self.normalized_cost), t, self.status]


def expand_scenarios(data: dict) -> list[Scenario]:
    """One scenario per point of the optional ``sweep`` grid over generator fields."""
    sweep = data.get("sweep") or {}
    base = {k: v for k, v in data.items() if k != "sweep"}
    if not sweep:
        return [Scenario(base["name"], base["source"], base.get("algorithms", list(ALGORITHMS)),
                         base.get("seeds", [0, 1, 2, 3, 4]))]
    keys = list(sweep)
    out = []
    for values in itertools.product(*(sweep[k] for k in keys)):
        d = copy.deepcopy(base)
        gen = d["source"].setdefault("gen", {})
        tag = []
        for k, v in zip(keys, values):
            if k == "exponent":
                cost = gen.get("cost_params")
                cost = dict(cost) if isinstance(cost, dict) else {}
                cost["exponent"] = v
                gen["cost_params"] = cost
            else:
                gen[k] = v
            tag.append(f"{k}={json.dumps(v, separators=(',', ':'))}")
        out.append(Scenario(f"{base['name']}[{';'.join(tag)}]", d["source"],
                            d.get("algorithms", list(ALGORITHMS)), d.get("seeds", [0, 1, 2, 3, 4])))
    return out


def load_scenarios(path) -> list[Scenario]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    items = data if isinstance(data, list) else [data]
    return [s for item in items for s in expand_scenarios(item)]


def evaluate(instance: Instance, algorithms, scenario: str = "", seed: int = 0) -> list[BenchRow]:
    """Rows for one instance; the LP is solved once and shared."""
    rows = []
    try:
        t0 = time.perf_counter()
        lp = solve_mapping_lp(instance) if instance.n else None
        lp_ms = (time.perf_counter() - t0) * 1e3
        lb = lp.objective_value if lp else 0.0
    except InfeasibleTaskError as exc:
        return [BenchRow(scenario, seed, a, None, None, None, None, f"error: infeasible: {exc}") for a in algorithms]
    except LpSolverError as exc:
        return [BenchRow(scenario, seed, a, None, None, None, None, f"error: solver: {exc}") for a in algorithms]
    for alg in algorithms:
        try:
            instance.check_hostable()
            sol = solve_preset(instance, alg, lp_solution=lp)
            report = verify_solution(instance, sol)
            if not report.feasible:
                raise AssertionError(f"{alg} produced an infeasible solution: {report.violations[:3]}")
            wall = sol.meta["time_ms"] + (lp_ms if alg.startswith("LP") else 0.0)
            norm = sol.cost / lb if lb > 0 else (1.0 if sol.cost == 0 else float("inf"))
            rows.append(BenchRow(scenario, seed, alg, sol.cost, lb, norm, wall))
        except InfeasibleTaskError as exc:
            rows.append(BenchRow(scenario, seed, alg, None, lb, None, None, f"error: infeasible: {exc}"))
        except (LpSolverError, AssertionError) as exc:
            rows.append(BenchRow(scenario, seed, alg, None, lb, None, None, f"error: solver: {exc}"))
    return rows


def run_bench(scenario: Scenario, base_dir: Path | None = None) -> tuple[list[BenchRow], dict]:
    """Per-seed rows plus the per-algorithm mean normalized cost."""
    rows = []
    for seed in scenario.seeds:
        try:
            inst = scenario.instance(seed, base_dir)
        except (InfeasibleTaskError, ValueError) as exc:
            status = f"error: instance: {exc}"
            rows += [BenchRow(scenario.name, seed, a, None, None, None, None, status)
                     for a in scenario.algorithms]
            continue
        rows += evaluate(inst, scenario.algorithms, scenario.name, seed)
    rows.sort(key=lambda r: (r.seed, scenario.algorithms.index(r.algorithm)))
    return rows, summarize(rows)


def summarize(rows) -> dict:
    out: dict = {}
    for r in rows:
        if r.normalized_cost is not None:
            out.setdefault((r.scenario, r.algorithm), []).append(r.normalized_cost)
    return {k: float(np.mean(v)) for k, v in out.items()}


def write_csv(rows, path, record_time: bool = True) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow(r.csv_fields(record_time))


def no_timeline_bound(instance: Instance) -> float:
    """Lowerbound when every task is treated as always active."""
    if instance.n == 0:
        return 0.0
    trimmed, _ = trim_timeline(instance)
    wide = trimmed.replace_spans(np.ones(trimmed.n, dtype=int),
                                 np.full(trimmed.n, trimmed.horizon), trimmed.horizon)
    return lower_bound(wide)


def no_timeline_ratio(instance: Instance) -> tuple[float, float, float]:
    """(no-timeline bound, timeline-aware LPMapF cost, their ratio)."""
    bound = no_timeline_bound(instance)
    cost = solve_preset(instance, "LPMapF").cost
    return bound, cost, (bound / cost if cost > 0 else float("nan"))
