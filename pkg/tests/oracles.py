"""Slow, loop-based reference computations used as independent test oracles.

Nothing here imports the solver paths it checks.
"""
import itertools

import numpy as np

from rightsize.model import Instance, NodeType, Task


def day_night_instance(cost2=6.0):
    """Two day-parted big tasks plus one long small task; two node-types."""
    types = (NodeType("big", (1.0, 1.0), 10.0), NodeType("small", (0.6, 0.6), cost2))
    tasks = (
        Task("t1", (0.6, 0.6), 1, 2),
        Task("t2", (0.6, 0.6), 3, 4),
        Task("t3", (0.4, 0.4), 1, 4),
    )
    return Instance(tasks, types, 4, 2)


def always_active(instance):
    return instance.replace_spans([1] * instance.n, [instance.horizon] * instance.n, instance.horizon)


def slot_overlap(instance):
    """Overlap by explicit slot-set intersection."""
    sets = [set(range(u.start, u.end + 1)) for u in instance.tasks]
    n = len(sets)
    return np.array([[bool(sets[i] & sets[j]) for j in range(n)] for i in range(n)], dtype=bool).reshape(n, n)


def group_fits(tasks, capacity, horizon, tol=1e-9):
    for t in range(1, horizon + 1):
        for d, c in enumerate(capacity):
            if sum(u.demand[d] for u in tasks if u.start <= t <= u.end) > c + tol:
                return False
    return True


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def brute_force_opt(instance):
    """Minimum cost over every partition of tasks into nodes, cheapest feasible type per block."""
    best = 0.0 if instance.n == 0 else float("inf")
    for part in set_partitions(list(instance.tasks)):
        total = 0.0
        for block in part:
            costs = [b.cost for b in instance.node_types
                     if group_fits(block, b.capacity, instance.horizon)]
            if not costs:
                total = float("inf")
                break
            total += min(costs)
            if total >= best:
                break
        best = min(best, total)
    return best


def integral_lb(instance):
    """min over integral mappings of sum_B cost(B) * max_{t,d} load / cap.

    Only types that can host the task on their own are candidates.
    """
    options = [[j for j, b in enumerate(instance.node_types)
                if all(x <= c + 1e-9 for x, c in zip(u.demand, b.capacity))] for u in instance.tasks]
    best = float("inf")
    for choice in itertools.product(*options):
        total = 0.0
        for j, b in enumerate(instance.node_types):
            peak = 0.0
            for t in range(1, instance.horizon + 1):
                for d in range(instance.dims):
                    load = sum(u.demand[d] / b.capacity[d]
                               for u, c in zip(instance.tasks, choice) if c == j and u.start <= t <= u.end)
                    peak = max(peak, load)
            total += b.cost * peak
        best = min(best, total)
    return best


def congestion_loop(tasks, penalties, horizon):
    return max([0.0] + [sum(p for u, p in zip(tasks, penalties) if u.start <= t <= u.end)
                        for t in range(1, horizon + 1)])
