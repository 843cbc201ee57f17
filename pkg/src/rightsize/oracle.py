"""Exact minimum-cost solutions for tiny instances by branch and bound.

Tasks are assigned one at a time (fail-first order) to an open node or to a
freshly purchased node of some type.  Only one "fresh node" branch per type
is explored, which enumerates each partition of tasks into nodes exactly
once.  ``symmetry=False`` searches labelled node slots instead (n per type,
any task into any slot), which is exponentially slower and exists only to
cross-check the symmetry breaking.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .model import FEAS_TOL, Instance, Node, Solution, trim_timeline
from .penmap import congestion, height_matrix, min_penalties


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleLimits:
    max_tasks: int = 8
    max_types: int = 3
    max_nodes_per_type: int | None = None  # default: n
    time_budget: float = 60.0

    def __post_init__(self):
        if self.max_tasks < 1 or self.max_types < 1 or self.time_budget <= 0:
            raise ValueError("oracle limits must be positive")
        if self.max_nodes_per_type is not None and self.max_nodes_per_type < 1:
            raise ValueError("oracle limits must be positive")


def exact_opt(instance: Instance, limits: OracleLimits = OracleLimits(), *,
              symmetry: bool = True, use_lp_bound: bool = True) -> tuple[Solution, float]:
    if instance.n > limits.max_tasks or instance.m > limits.max_types:
        raise BudgetExceeded(
            f"instance (n={instance.n}, m={instance.m}) exceeds oracle limits "
            f"(n<={limits.max_tasks}, m<={limits.max_types})"
        )
    if instance.n == 0:
        return Solution.from_nodes((), {"algorithm": "exact"}), 0.0
    instance.check_hostable()
    inst, _ = trim_timeline(instance)
    n, m, T = inst.n, inst.m, inst.horizon
    per_type = limits.max_nodes_per_type or n
    deadline = time.monotonic() + limits.time_budget

    cheapest = int(np.argmin(inst.costs))
    hav = height_matrix(inst, "avg")[:, cheapest]
    order = sorted(range(n), key=lambda i: (-hav[i], i))
    dem = inst.demand_matrix
    s0 = inst.starts - 1
    e0 = inst.ends
    cap = inst.capacity_matrix
    costs = inst.costs
    host = inst.hostable
    min_host_cost = np.array([costs[host[i]].min() for i in range(n)])

    lb = congestion(inst.tasks, min_penalties(inst), T)
    if use_lp_bound:
        from .lp import lower_bound

        lb = max(lb, lower_bound(inst))

    # incumbent from the penalty heuristic
    from .placement import SolveConfig, solve

    incumbent = solve(inst, SolveConfig("penalty-avg", "first"))
    best_cost = incumbent.cost
    best_nodes: list | None = None

    # open nodes: type index, remaining (T, D), task list
    nodes_type: list[int] = []
    nodes_rem: list[np.ndarray] = []
    nodes_tasks: list[list[int]] = []
    count = [0] * m
    if not symmetry:
        # every labelled slot exists up front; a slot is paid for once non-empty
        for j in range(m):
            for _ in range(per_type):
                nodes_type.append(j)
                nodes_rem.append(np.tile(cap[j], (T, 1)))
                nodes_tasks.append([])

    def fits(k, i):
        return np.all(dem[i] <= nodes_rem[k][s0[i]:e0[i]] + FEAS_TOL)

    def proven():
        return best_cost <= lb + 1e-9 * max(1.0, lb)

    def recurse(pos: int, cost: float):
        nonlocal best_cost, best_nodes
        if time.monotonic() > deadline:
            raise BudgetExceeded(f"oracle exceeded its {limits.time_budget}s budget")
        if cost >= best_cost - 1e-12:
            return
        if pos == n:
            best_cost = cost
            best_nodes = [(nodes_type[k], list(nodes_tasks[k]))
                          for k in range(len(nodes_type)) if nodes_tasks[k]]
            return
        # a remaining task that fits no open node forces at least one more purchase
        extra = 0.0
        for i in order[pos:]:
            if not any(nodes_tasks[k] and fits(k, i) for k in range(len(nodes_type))):
                extra = max(extra, min_host_cost[i])
        if cost + extra >= best_cost - 1e-12:
            return
        i = order[pos]
        for k in range(len(nodes_type)):
            if not host[i, nodes_type[k]] or not fits(k, i):
                continue
            added = 0.0 if nodes_tasks[k] else costs[nodes_type[k]]
            nodes_rem[k][s0[i]:e0[i]] -= dem[i]
            nodes_tasks[k].append(i)
            recurse(pos + 1, cost + added)
            nodes_tasks[k].pop()
            nodes_rem[k][s0[i]:e0[i]] += dem[i]
            if proven():
                return
        if not symmetry:
            return
        for j in range(m):
            if not host[i, j] or count[j] >= per_type:
                continue
            rem = np.tile(cap[j], (T, 1))
            rem[s0[i]:e0[i]] -= dem[i]
            nodes_type.append(j)
            nodes_rem.append(rem)
            nodes_tasks.append([i])
            count[j] += 1
            recurse(pos + 1, cost + costs[j])
            count[j] -= 1
            nodes_type.pop()
            nodes_rem.pop()
            nodes_tasks.pop()
            if proven():
                return

    if not proven():
        recurse(0, 0.0)

    meta = {"algorithm": "exact", "lower_bound": lb, "symmetry": symmetry}
    if best_nodes is None:
        return Solution.from_nodes(incumbent.nodes, meta), float(best_cost)
    types = instance.node_types
    built = [
        Node(types[j], tuple(instance.tasks[i].id for i in sorted(tasks)), k)
        for k, (j, tasks) in enumerate(best_nodes)
    ]
    return Solution.from_nodes(built, meta), float(best_cost)
