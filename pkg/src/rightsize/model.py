"""Core domain types: tasks, node-types, instances, solutions.

Timeslots are 1-based integers.  All types are frozen after construction;
numeric views (``demand_matrix`` etc.) are cached numpy arrays.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Sequence

import numpy as np

FEAS_TOL = 1e-9


class InstanceError(ValueError):
    """Malformed instance data (dimension mismatch, bad span, ...)."""


class InfeasibleTaskError(ValueError):
    """A task cannot be hosted by any (or the required) node-type."""

    def __init__(self, task_id, message=None):
        self.task_id = task_id
        super().__init__(message or f"task {task_id!r} does not fit any node-type")


class StructuralError(ValueError):
    """A solution references tasks or node-types that are not in the instance."""


@dataclass(frozen=True)
class Task:
    id: Hashable
    demand: tuple[float, ...]
    start: int
    end: int

    def __post_init__(self):
        object.__setattr__(self, "demand", tuple(float(x) for x in self.demand))
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "end", int(self.end))
        if self.start > self.end:
            raise InstanceError(f"task {self.id!r}: start {self.start} > end {self.end}")
        if any(not (x >= 0.0) for x in self.demand):
            raise InstanceError(f"task {self.id!r}: negative demand")

    @property
    def span(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class NodeType:
    id: Hashable
    capacity: tuple[float, ...]
    cost: float

    def __post_init__(self):
        object.__setattr__(self, "capacity", tuple(float(x) for x in self.capacity))
        object.__setattr__(self, "cost", float(self.cost))
        if any(not (x > 0.0) for x in self.capacity):
            raise InstanceError(f"node-type {self.id!r}: capacity must be positive")
        if not self.cost > 0.0:
            raise InstanceError(f"node-type {self.id!r}: cost must be positive")


@dataclass(frozen=True)
class Instance:
    tasks: tuple[Task, ...]
    node_types: tuple[NodeType, ...]
    horizon: int
    dims: int

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "node_types", tuple(self.node_types))
        if self.dims < 1 or self.horizon < 1 or not self.node_types:
            raise InstanceError("need dims >= 1, horizon >= 1 and at least one node-type")
        for b in self.node_types:
            if len(b.capacity) != self.dims:
                raise InstanceError(f"node-type {b.id!r}: capacity has wrong length")
        for u in self.tasks:
            if len(u.demand) != self.dims:
                raise InstanceError(f"task {u.id!r}: demand has wrong length")
            if u.start < 1 or u.end > self.horizon:
                raise InstanceError(f"task {u.id!r}: span outside [1, {self.horizon}]")
        if len({u.id for u in self.tasks}) != len(self.tasks):
            raise InstanceError("duplicate task ids")
        if len({b.id for b in self.node_types}) != len(self.node_types):
            raise InstanceError("duplicate node-type ids")

    @property
    def n(self) -> int:
        return len(self.tasks)

    @property
    def m(self) -> int:
        return len(self.node_types)

    @cached_property
    def demand_matrix(self) -> np.ndarray:
        """(n, D) float array."""
        out = np.array([u.demand for u in self.tasks], dtype=float)
        return out.reshape(self.n, self.dims)

    @cached_property
    def capacity_matrix(self) -> np.ndarray:
        """(m, D) float array."""
        return np.array([b.capacity for b in self.node_types], dtype=float)

    @cached_property
    def costs(self) -> np.ndarray:
        return np.array([b.cost for b in self.node_types], dtype=float)

    @cached_property
    def starts(self) -> np.ndarray:
        return np.array([u.start for u in self.tasks], dtype=int)

    @cached_property
    def ends(self) -> np.ndarray:
        return np.array([u.end for u in self.tasks], dtype=int)

    @cached_property
    def task_index(self) -> dict:
        return {u.id: i for i, u in enumerate(self.tasks)}

    @cached_property
    def type_index(self) -> dict:
        return {b.id: j for j, b in enumerate(self.node_types)}

    @cached_property
    def hostable(self) -> np.ndarray:
        """(n, m) bool: task alone fits an empty node of the type."""
        if self.n == 0:
            return np.zeros((0, self.m), dtype=bool)
        dem = self.demand_matrix[:, None, :]
        cap = self.capacity_matrix[None, :, :]
        return np.all(dem <= cap + FEAS_TOL, axis=2)

    def check_hostable(self) -> None:
        """Raise InfeasibleTaskError for the first task no node-type can host."""
        bad = np.flatnonzero(~self.hostable.any(axis=1))
        if bad.size:
            u = self.tasks[bad[0]]
            raise InfeasibleTaskError(
                u.id,
                f"task {u.id!r} (demand {list(u.demand)}) exceeds every node-type's capacity",
            )

    def overlap_matrix(self) -> np.ndarray:
        """(n, n) bool: spans of u and v share at least one timeslot."""
        s, e = self.starts, self.ends
        return (s[:, None] <= e[None, :]) & (s[None, :] <= e[:, None])

    def replace_spans(self, starts, ends, horizon: int) -> "Instance":
        tasks = tuple(
            Task(u.id, u.demand, int(s), int(e))
            for u, s, e in zip(self.tasks, starts, ends)
        )
        return Instance(tasks, self.node_types, horizon, self.dims)

    def scale_costs(self, factor: float) -> "Instance":
        types = tuple(NodeType(b.id, b.capacity, b.cost * factor) for b in self.node_types)
        return Instance(self.tasks, types, self.horizon, self.dims)


@dataclass(frozen=True)
class Node:
    node_type: NodeType
    placed: tuple = ()
    purchase_order: int = 0

    @property
    def cost(self) -> float:
        return self.node_type.cost


@dataclass(frozen=True)
class Solution:
    nodes: tuple[Node, ...]
    assignment: dict
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_nodes(cls, nodes: Iterable[Node], meta: dict | None = None) -> "Solution":
        nodes = tuple(nodes)
        assignment = {}
        for k, node in enumerate(nodes):
            for tid in node.placed:
                assignment[tid] = k
        return cls(nodes, assignment, dict(meta or {}))

    @property
    def cost(self) -> float:
        return solution_cost(self)

    def node_counts(self) -> dict:
        out: dict = {}
        for node in self.nodes:
            out[node.node_type.id] = out.get(node.node_type.id, 0) + 1
        return out


@dataclass(frozen=True)
class TrimMap:
    slot_of: dict
    original_of: tuple[int, ...]

    @property
    def horizon(self) -> int:
        return max(len(self.original_of), 1)


@dataclass
class Violation:
    node: int
    timeslot: int
    dim: int
    slack: float  # capacity - load, negative


@dataclass
class VerificationReport:
    violations: list[Violation]
    unassigned: list
    multiply_assigned: list

    @property
    def feasible(self) -> bool:
        return not (self.violations or self.unassigned or self.multiply_assigned)

    def __bool__(self):
        return self.feasible


def is_active(task: Task, t: int, horizon: int | None = None) -> bool:
    if t < 1 or (horizon is not None and t > horizon):
        raise ValueError(f"timeslot {t} outside [1, {horizon}]")
    return task.start <= t <= task.end


def trim_timeline(instance: Instance) -> tuple[Instance, TrimMap]:
    """Compress the horizon to the distinct task start slots.

    A span [s, e] becomes [rank(s), rank(largest start <= e)], which keeps
    the pairwise overlap relation intact.
    """
    if instance.n == 0:
        return Instance((), instance.node_types, 1, instance.dims), TrimMap({}, ())
    distinct = np.unique(instance.starts)
    new_s = np.searchsorted(distinct, instance.starts) + 1
    new_e = np.searchsorted(distinct, instance.ends, side="right")
    slot_of = {}
    for t in range(1, instance.horizon + 1):
        r = int(np.searchsorted(distinct, t, side="right"))
        if r:
            slot_of[t] = r
    trimmed = instance.replace_spans(new_s, new_e, len(distinct))
    return trimmed, TrimMap(slot_of, tuple(int(x) for x in distinct))


def node_load(instance: Instance, task_indices: Sequence[int]) -> np.ndarray:
    """(T, D) aggregate demand of the given tasks per timeslot."""
    T, D = instance.horizon, instance.dims
    diff = np.zeros((T + 1, D))
    idx = np.asarray(task_indices, dtype=int)
    if idx.size:
        dem = instance.demand_matrix[idx]
        np.add.at(diff, instance.starts[idx] - 1, dem)
        np.add.at(diff, instance.ends[idx], -dem)
    return np.cumsum(diff, axis=0)[:T]


def verify_solution(instance: Instance, solution: Solution, tol: float = FEAS_TOL) -> VerificationReport:
    types = instance.type_index
    tasks = instance.task_index
    seen: dict = {}
    multiply = []
    for k, node in enumerate(solution.nodes):
        if node.node_type.id not in types or instance.node_types[types[node.node_type.id]] != node.node_type:
            raise StructuralError(f"node {k}: unknown node-type {node.node_type.id!r}")
        for tid in node.placed:
            if tid not in tasks:
                raise StructuralError(f"node {k}: unknown task {tid!r}")
            if tid in seen:
                multiply.append(tid)
            seen[tid] = k
    for tid, k in solution.assignment.items():
        if tid not in tasks:
            raise StructuralError(f"assignment references unknown task {tid!r}")
        if not (0 <= k < len(solution.nodes)) or tid not in solution.nodes[k].placed:
            raise StructuralError(f"assignment of {tid!r} to node {k} disagrees with node contents")
    unassigned = [u.id for u in instance.tasks if u.id not in seen]

    violations = []
    for k, node in enumerate(solution.nodes):
        if not node.placed:
            continue
        load = node_load(instance, [tasks[tid] for tid in node.placed])
        slack = np.asarray(node.node_type.capacity)[None, :] - load
        for t, d in zip(*np.nonzero(slack < -tol)):
            violations.append(Violation(k, int(t) + 1, int(d), float(slack[t, d])))
    return VerificationReport(violations, unassigned, multiply)


def solution_cost(solution: Solution) -> float:
    return float(sum(node.node_type.cost for node in solution.nodes))


# -- JSON interchange ---------------------------------------------------------

def instance_to_dict(instance: Instance) -> dict:
    return {
        "dims": instance.dims,
        "horizon": instance.horizon,
        "node_types": [
            {"id": b.id, "capacity": list(b.capacity), "cost": b.cost}
            for b in instance.node_types
        ],
        "tasks": [
            {"id": u.id, "demand": list(u.demand), "start": u.start, "end": u.end}
            for u in instance.tasks
        ],
    }


def instance_from_dict(data: dict) -> Instance:
    try:
        types = tuple(NodeType(b["id"], b["capacity"], b["cost"]) for b in data["node_types"])
        tasks = tuple(Task(u["id"], u["demand"], u["start"], u["end"]) for u in data["tasks"])
        return Instance(tasks, types, int(data["horizon"]), int(data["dims"]))
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed instance JSON: {exc!r}") from exc


def solution_to_dict(solution: Solution) -> dict:
    return {
        "cost": solution_cost(solution),
        "nodes": [
            {"node_type": node.node_type.id, "tasks": list(node.placed),
             "purchase_order": node.purchase_order}
            for node in solution.nodes
        ],
        # JSON object keys are strings; list pairs keep non-string task ids intact
        "assignment": [[tid, k] for tid, k in solution.assignment.items()],
        "meta": _jsonable(solution.meta),
    }


def solution_from_dict(data: dict, instance: Instance) -> Solution:
    types = instance.type_index
    nodes = []
    try:
        for k, nd in enumerate(data["nodes"]):
            if nd["node_type"] not in types:
                raise StructuralError(f"node {k}: unknown node-type {nd['node_type']!r}")
            nodes.append(Node(instance.node_types[types[nd["node_type"]]],
                              tuple(nd["tasks"]), int(nd.get("purchase_order", k))))
        if "assignment" in data:
            assignment = {tid: int(k) for tid, k in data["assignment"]}
        else:
            assignment = Solution.from_nodes(nodes).assignment
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, StructuralError):
            raise
        raise InstanceError(f"malformed solution JSON: {exc!r}") from exc
    return Solution(tuple(nodes), assignment, dict(data.get("meta", {})))


def _jsonable(obj: Any):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def save_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance), fh, indent=1)


def load_solution(path, instance: Instance) -> Solution:
    with open(path, encoding="utf-8") as fh:
        return solution_from_dict(json.load(fh), instance)


def save_solution(solution: Solution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(solution_to_dict(solution), fh, indent=1)
