"""Penalty-based task -> node-type mapping and the congestion functional."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Instance, NodeType, Task

HEIGHTS = ("avg", "max")


@dataclass(frozen=True)
class Mapping:
    """Task id -> node-type id, plus the policy that produced it.

    ``penalties`` holds p*(u) for penalty mappings (empty for LP ones).
    """

    assign: dict
    policy: str
    penalties: dict | None = None

    def type_indices(self, instance: Instance) -> np.ndarray:
        types = instance.type_index
        try:
            return np.array([types[self.assign[u.id]] for u in instance.tasks], dtype=int)
        except KeyError as exc:
            raise ValueError(f"mapping is not total over the instance: missing {exc}") from None

    def to_dict(self) -> dict:
        return {"policy": self.policy, "assign": [[k, v] for k, v in self.assign.items()]}


def relative_demand_avg(task: Task, node_type: NodeType) -> float:
    return float(np.mean(np.divide(task.demand, node_type.capacity)))


def relative_demand_max(task: Task, node_type: NodeType) -> float:
    return float(np.max(np.divide(task.demand, node_type.capacity)))


def penalty(task: Task, node_type: NodeType, height: str = "avg") -> float:
    if height not in HEIGHTS:
        raise ValueError(f"unknown height policy {height!r}")
    h = relative_demand_avg if height == "avg" else relative_demand_max
    return node_type.cost * h(task, node_type)


def height_matrix(instance: Instance, height: str = "avg") -> np.ndarray:
    """(n, m) relative demand of every task against every node-type."""
    if height not in HEIGHTS:
        raise ValueError(f"unknown height policy {height!r}")
    ratio = instance.demand_matrix[:, None, :] / instance.capacity_matrix[None, :, :]
    if instance.n == 0:
        return np.zeros((0, instance.m))
    return ratio.mean(axis=2) if height == "avg" else ratio.max(axis=2)


def penalty_matrix(instance: Instance, height: str = "avg") -> np.ndarray:
    return height_matrix(instance, height) * instance.costs[None, :]


def best_mapping(instance: Instance, height: str = "avg") -> Mapping:
    """Map each task to its least-penalty node-type among those that can host it.

    Ties go to the lowest node-type index.
    """
    instance.check_hostable()
    pen = np.where(instance.hostable, penalty_matrix(instance, height), np.inf)
    choice = np.argmin(pen, axis=1) if instance.n else np.zeros(0, dtype=int)
    best = pen[np.arange(instance.n), choice]
    assign = {u.id: instance.node_types[j].id for u, j in zip(instance.tasks, choice)}
    pstar = {u.id: float(p) for u, p in zip(instance.tasks, best)}
    return Mapping(assign, f"penalty-{height}", pstar)


def min_penalties(instance: Instance, height: str = "avg") -> np.ndarray:
    """p*(u) as an (n,) array, in task order."""
    mapping = best_mapping(instance, height)
    return np.array([mapping.penalties[u.id] for u in instance.tasks])


def congestion(tasks, penalties, horizon: int) -> float:
    """max over t of the summed penalties of the tasks active at t.

    ``tasks`` is a sequence of Task; ``penalties`` is aligned with it.
    """
    tasks = list(tasks)
    if not tasks:
        return 0.0
    diff = np.zeros(horizon + 2)
    for u, p in zip(tasks, penalties):
        diff[u.start] += p
        diff[u.end + 1] -= p
    return float(np.cumsum(diff).max())


def is_small(instance: Instance) -> np.ndarray:
    """(n,) bool: demand at most half of every node-type's capacity in every dimension."""
    if instance.n == 0:
        return np.zeros(0, dtype=bool)
    half = instance.capacity_matrix.min(axis=0) / 2.0
    return np.all(instance.demand_matrix <= half[None, :], axis=1)
