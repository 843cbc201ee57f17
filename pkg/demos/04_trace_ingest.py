"""
From trace CSVs to a solved instance
====================================

Writes a trace-shaped pair of CSV files (tasks with second-resolution spans,
a handful of machine shapes), samples 2000 tasks and 13 node-types, quantizes
to hourly slots and compares PenMap with LPMapF. Point it at real files with
``python 04_trace_ingest.py tasks.csv types.csv``.
"""
import sys
import tempfile
import time
from pathlib import Path

from rightsize.bench import no_timeline_bound
from rightsize.ingest import ingest_trace, write_synthetic_trace
from rightsize.lp import solve_mapping_lp
from rightsize.placement import solve_preset

if len(sys.argv) == 3:
    tasks_csv, types_csv = map(Path, sys.argv[1:])
else:
    tmp = Path(tempfile.mkdtemp())
    tasks_csv, types_csv = tmp / "tasks.csv", tmp / "types.csv"
    write_synthetic_trace(tasks_csv, types_csv, n_tasks=13000, n_types=13)

inst, report = ingest_trace(tasks_csv, types_csv, n=2000, m=13, seed=0)
print(f"{inst.n} tasks, {inst.m} node-types, horizon {report.horizon_before_trim} -> {report.horizon} slots")
print(f"dropped rows: {report.dropped_tasks}; pairs whose overlap changed: {report.overlap_changes}")

t0 = time.perf_counter()
pen = solve_preset(inst, "PenMap")
print(f"PenMap  cost {pen.cost:8.3f}  in {time.perf_counter() - t0:.2f}s")

t0 = time.perf_counter()
lp = solve_mapping_lp(inst)
lpf = solve_preset(inst, "LPMapF", lp)
print(f"LPMapF  cost {lpf.cost:8.3f}  in {time.perf_counter() - t0:.2f}s (LP included)")
print(f"LP lowerbound {lp.objective_value:.3f}; if every task ran all day: {no_timeline_bound(inst):.3f}")
