"""Load preprocessed cluster-trace CSVs into instances.

Task file columns (header required, UTF-8)::

    id,start_seconds,end_seconds,cpu,memory

Node-type file columns (``cost`` optional)::

    id,cpu_capacity,memory_capacity[,cost]

cpu/memory values are normalized to [0, 1].  Rows with an empty required
field are dropped; rows with unparseable values raise ``TraceParseError``.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from .costs import CostParams, node_cost
from .model import Instance, NodeType, Task, trim_timeline

log = logging.getLogger(__name__)

TASK_COLUMNS = ("id", "start_seconds", "end_seconds", "cpu", "memory")
TYPE_COLUMNS = ("id", "cpu_capacity", "memory_capacity")
DEFAULT_QUANTUM = 3600.0


class TraceParseError(ValueError):
    def __init__(self, path, line, message):
        self.path, self.line = path, line
        super().__init__(f"{path}:{line}: {message}")


@dataclass(frozen=True)
class TraceTask:
    id: str
    start_seconds: float
    end_seconds: float
    cpu: float
    memory: float


@dataclass(frozen=True)
class TraceNodeType:
    id: str
    cpu_capacity: float
    memory_capacity: float
    cost: float | None = None


@dataclass
class IngestReport:
    dropped_tasks: int
    dropped_types: int
    overlap_changes: int  # task pairs whose overlap status differs after quantization
    horizon_before_trim: int
    horizon: int


def _read(path, required, optional=()):
    """Yield (line number, row dict); None for rows with missing fields."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise TraceParseError(path, 1, "missing header row")
        header = [h.strip() for h in reader.fieldnames]
        missing = [c for c in required if c not in header]
        if missing:
            raise TraceParseError(path, 1, f"missing column(s) {missing}")
        reader.fieldnames = header
        for row in reader:
            line = reader.line_num
            vals = {k: (row.get(k) or "").strip() for k in (*required, *optional)}
            if any(vals[k] == "" for k in required):
                yield line, None
            else:
                yield line, vals


def _num(path, line, value, column):
    try:
        x = float(value)
    except ValueError:
        raise TraceParseError(path, line, f"column {column!r}: cannot parse {value!r}") from None
    if not math.isfinite(x):
        raise TraceParseError(path, line, f"column {column!r}: non-finite value")
    return x


def read_tasks_csv(path) -> tuple[list[TraceTask], int]:
    rows, dropped = [], 0
    for line, vals in _read(path, TASK_COLUMNS):
        if vals is None:
            dropped += 1
            continue
        s, e, cpu, mem = (_num(path, line, vals[c], c) for c in TASK_COLUMNS[1:])
        if s > e:
            raise TraceParseError(path, line, f"start {s} after end {e}")
        if not (0 <= cpu <= 1 and 0 <= mem <= 1):
            raise TraceParseError(path, line, "normalized demand outside [0, 1]")
        rows.append(TraceTask(vals["id"], s, e, cpu, mem))
    return rows, dropped


def read_node_types_csv(path) -> tuple[list[TraceNodeType], int]:
    rows, dropped = [], 0
    for line, vals in _read(path, TYPE_COLUMNS, ("cost",)):
        if vals is None:
            dropped += 1
            continue
        cpu, mem = (_num(path, line, vals[c], c) for c in TYPE_COLUMNS[1:])
        if not (0 < cpu <= 1 and 0 < mem <= 1):
            raise TraceParseError(path, line, "normalized capacity outside (0, 1]")
        cost = _num(path, line, vals["cost"], "cost") if vals["cost"] else None
        if cost is not None and cost <= 0:
            raise TraceParseError(path, line, "cost must be positive")
        rows.append(TraceNodeType(vals["id"], cpu, mem, cost))
    return rows, dropped


def quantize(start_seconds, end_seconds, quantum: float = DEFAULT_QUANTUM, origin: float = 0.0):
    """1-based slots of every quantum that [start, end) intersects.

    A zero-length task still occupies the quantum containing its start.
    """
    s = np.asarray(start_seconds, dtype=float) - origin
    e = np.asarray(end_seconds, dtype=float) - origin
    first = np.floor(s / quantum).astype(int) + 1
    last = np.maximum(first, np.ceil(e / quantum).astype(int))
    return first, last


def overlap_changes(rows, first, last) -> int:
    s = np.array([r.start_seconds for r in rows])
    e = np.array([r.end_seconds for r in rows])
    true = (s[:, None] < e[None, :]) & (s[None, :] < e[:, None])
    quant = (first[:, None] <= last[None, :]) & (first[None, :] <= last[:, None])
    np.fill_diagonal(true, False)
    np.fill_diagonal(quant, False)
    return int(np.count_nonzero(np.triu(true != quant)))


def ingest_trace(task_csv, types_csv, n: int, m: int, seed: int = 0,
                 cost_params: CostParams | None = None,
                 quantum: float = DEFAULT_QUANTUM) -> tuple[Instance, IngestReport]:
    """Sample ``n`` tasks and ``m`` node-types, quantize, trim.

    Explicit ``cost`` values win; otherwise node prices come from
    ``cost_params`` (homogeneous when omitted).
    """
    tasks, dropped_t = read_tasks_csv(task_csv)
    types, dropped_b = read_node_types_csv(types_csv)
    if n > len(tasks):
        raise ValueError(f"requested {n} tasks but only {len(tasks)} usable rows in {task_csv}")
    if m > len(types) or m < 1:
        raise ValueError(f"requested {m} node-types but only {len(types)} usable rows in {types_csv}")
    rng = np.random.default_rng(seed)
    tasks = [tasks[i] for i in np.sort(rng.choice(len(tasks), size=n, replace=False))]
    types = [types[i] for i in np.sort(rng.choice(len(types), size=m, replace=False))]
    params = cost_params or CostParams.homogeneous(2)

    node_types = tuple(
        NodeType(b.id, (b.cpu_capacity, b.memory_capacity),
                 b.cost if b.cost is not None else node_cost((b.cpu_capacity, b.memory_capacity), params))
        for b in types
    )
    if tasks:
        origin = math.floor(min(r.start_seconds for r in tasks) / quantum) * quantum
        first, last = quantize([r.start_seconds for r in tasks], [r.end_seconds for r in tasks],
                               quantum, origin)
        changes = overlap_changes(tasks, first, last)
        horizon = int(last.max())
    else:
        first = last = np.zeros(0, dtype=int)
        changes, horizon = 0, 1
    inst = Instance(
        tuple(Task(r.id, (r.cpu, r.memory), s, e) for r, s, e in zip(tasks, first, last)),
        node_types, horizon, 2,
    )
    trimmed, _ = trim_timeline(inst)
    report = IngestReport(dropped_t, dropped_b, changes, horizon, trimmed.horizon)
    if dropped_t or dropped_b:
        log.info("dropped %d task rows and %d node-type rows with missing fields", dropped_t, dropped_b)
    return trimmed, report


def write_synthetic_trace(tasks_path, types_path, n_tasks: int = 13000, n_types: int = 13,
                          seed: int = 0, days: float = 1.0) -> None:
    """Write a trace-shaped CSV pair: small two-dimensional demands, a few machine shapes.

    Stand-in for a processed cluster trace when the real one is not at hand.
    """
    rng = np.random.default_rng(seed)
    horizon = days * 86400.0
    start = np.sort(rng.uniform(0, horizon, size=n_tasks))
    dur = np.minimum(rng.exponential(4 * 3600.0, size=n_tasks), horizon)
    end = np.minimum(start + dur, horizon + 6 * 3600.0)
    cpu = np.clip(rng.lognormal(np.log(0.02), 0.8, size=n_tasks), 1e-4, 0.25)
    mem = np.clip(cpu * rng.lognormal(0.0, 0.5, size=n_tasks), 1e-4, 0.25)
    shapes = [0.25, 0.5, 0.75, 1.0]
    with open(tasks_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TASK_COLUMNS)
        for i in range(n_tasks):
            w.writerow([f"t{i}", f"{start[i]:.0f}", f"{end[i]:.0f}", f"{cpu[i]:.6f}", f"{mem[i]:.6f}"])
    with open(types_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TYPE_COLUMNS)
        seen = set()
        while len(seen) < min(n_types, len(shapes) ** 2):
            pair = (float(rng.choice(shapes)), float(rng.choice(shapes)))
            if pair not in seen:
                seen.add(pair)
                w.writerow([f"b{len(seen) - 1}", pair[0], pair[1]])
