"""Greedy per-node-type placement, cross node-type filling, and the two-phase solvers.

A group of nodes of one type is kept as a dense ``(k, T, D)`` array of
remaining capacity so that feasibility of a task against every open node is
a single vectorised comparison.  ``NodeState`` is the per-node public view.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, replace

import numpy as np

from .model import (
    FEAS_TOL,
    Instance,
    InfeasibleTaskError,
    Node,
    NodeType,
    Solution,
    Task,
    trim_timeline,
)
from .penmap import Mapping, best_mapping, height_matrix, is_small

FITS = ("first", "sim-dot", "sim-cos")
MAPPINGS = ("penalty-avg", "penalty-max", "lp")


@dataclass
class NodeState:
    node: Node
    remaining: np.ndarray  # (T, D) remaining capacity, 1-based slot t at row t-1


@dataclass(frozen=True)
class SolveConfig:
    mapping_source: str = "penalty-avg"
    fit: str = "first"
    cross_fill: bool = False
    segregate_large: bool = False

    def __post_init__(self):
        if self.mapping_source not in MAPPINGS:
            raise ValueError(f"unknown mapping source {self.mapping_source!r}")
        if self.fit not in FITS:
            raise ValueError(f"unknown fit policy {self.fit!r}")

    def label(self) -> str:
        s = f"{self.mapping_source}/{self.fit}"
        if self.cross_fill:
            s += "/fill"
        if self.segregate_large:
            s += "/seg"
        return s


def empty_state(node_type: NodeType, horizon: int, purchase_order: int = 0) -> NodeState:
    rem = np.tile(np.asarray(node_type.capacity, dtype=float), (horizon, 1))
    return NodeState(Node(node_type, (), purchase_order), rem)


def fits(state: NodeState, task: Task, tol: float = FEAS_TOL) -> bool:
    window = state.remaining[task.start - 1:task.end]
    return bool(np.all(np.asarray(task.demand) <= window + tol))


def similarity_score(state: NodeState, task: Task, node_type: NodeType, variant: str = "sim-dot") -> float:
    cap = np.asarray(node_type.capacity)
    a = np.asarray(task.demand) / cap
    w = state.remaining[task.start - 1:task.end] / cap
    dot = float(np.sum(w @ a))
    if variant in ("dot", "sim-dot"):
        return dot
    if variant not in ("cosine", "sim-cos"):
        raise ValueError(f"unknown similarity variant {variant!r}")
    norm = np.linalg.norm(a) * np.sqrt(task.span) * np.linalg.norm(w)
    return dot / norm if norm > 0 else 0.0


class _Pool:
    """Nodes of a single type, grown as tasks are placed."""

    def __init__(self, node_type: NodeType, horizon: int, counter):
        self.node_type = node_type
        self.cap = np.asarray(node_type.capacity, dtype=float)
        self.horizon = horizon
        self.rem = np.empty((4, horizon, self.cap.size))
        self.k = 0
        self.placed: list[list] = []
        self.orders: list[int] = []
        self._counter = counter

    @classmethod
    def from_states(cls, states, node_type, counter):
        horizon = states[0].remaining.shape[0] if states else 1
        pool = cls(node_type, horizon, counter)
        for st in states:
            k = pool._grow(st.node.purchase_order)
            pool.rem[k] = st.remaining
            pool.placed[k] = list(st.node.placed)
        return pool

    def _grow(self, order: int) -> int:
        if self.k == self.rem.shape[0]:
            self.rem = np.concatenate([self.rem, np.empty_like(self.rem)])
        self.rem[self.k] = self.cap
        self.placed.append([])
        self.orders.append(order)
        self.k += 1
        return self.k - 1

    def open(self) -> int:
        return self._grow(next(self._counter))

    def feasible(self, s: int, e: int, dem: np.ndarray) -> np.ndarray:
        window = self.rem[:self.k, s - 1:e, :]
        return np.all(window >= dem - FEAS_TOL, axis=(1, 2))

    def scores(self, s: int, e: int, dem: np.ndarray, variant: str) -> np.ndarray:
        a = dem / self.cap
        w = self.rem[:self.k, s - 1:e, :] / self.cap
        dot = np.einsum("ktd,d->k", w, a)
        if variant == "sim-dot":
            return dot
        norm = np.linalg.norm(a) * np.sqrt(e - s + 1) * np.sqrt(np.einsum("ktd,ktd->k", w, w))
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(norm > 0, dot / np.where(norm > 0, norm, 1.0), 0.0)

    def place(self, k: int, tid, s: int, e: int, dem: np.ndarray) -> None:
        self.rem[k, s - 1:e, :] -= dem
        self.placed[k].append(tid)

    def choose(self, s, e, dem, fit) -> int:
        """Index of the node to use, or -1 if none is feasible."""
        if self.k == 0:
            return -1
        ok = self.feasible(s, e, dem)
        if not ok.any():
            return -1
        if fit == "first":
            return int(np.argmax(ok))
        sc = np.where(ok, self.scores(s, e, dem, fit), -np.inf)
        return int(np.argmax(sc))  # first maximum = earliest purchase

    def states(self) -> list[NodeState]:
        return [
            NodeState(Node(self.node_type, tuple(self.placed[k]), self.orders[k]), self.rem[k].copy())
            for k in range(self.k)
        ]


def _task_arrays(tasks):
    return [(u.id, u.start, u.end, np.asarray(u.demand, dtype=float)) for u in tasks]


def _place_into(pool: _Pool, tasks, fit: str) -> None:
    for tid, s, e, dem in _task_arrays(tasks):
        k = pool.choose(s, e, dem, fit)
        if k < 0:
            if np.any(dem > pool.cap + FEAS_TOL):
                raise InfeasibleTaskError(tid, f"task {tid!r} does not fit an empty {pool.node_type.id!r} node")
            k = pool.open()
        pool.place(k, tid, s, e, dem)


def place_group(node_type: NodeType, tasks, fit: str = "first", horizon: int | None = None,
                first_purchase: int = 0) -> list[NodeState]:
    """Place ``tasks`` (already in processing order) onto nodes of one type.

    The earliest-purchased feasible node wins under first-fit; similarity-fit
    takes the feasible node of maximum score.  A node is purchased only when
    no open node is feasible.
    """
    if fit not in FITS:
        raise ValueError(f"unknown fit policy {fit!r}")
    tasks = list(tasks)
    if horizon is None:
        horizon = max((u.end for u in tasks), default=1)
    pool = _Pool(node_type, horizon, itertools.count(first_purchase))
    _place_into(pool, tasks, fit)
    return pool.states()


def _fill_order(tasks, node_type: NodeType):
    cap = np.asarray(node_type.capacity)
    keyed = [(float(np.mean(np.asarray(u.demand) / cap)), i, u) for i, u in enumerate(tasks)]
    keyed.sort(key=lambda x: (x[0], x[1]))
    return [u for _, _, u in keyed]


def _fill_into(pool: _Pool, ordered) -> list:
    placed = []
    for tid, s, e, dem in _task_arrays(ordered):
        if pool.k == 0:
            break
        ok = pool.feasible(s, e, dem)
        if ok.any():
            pool.place(int(np.argmax(ok)), tid, s, e, dem)
            placed.append(tid)
    return placed


def cross_fill(open_nodes: list[NodeState], remaining, node_type: NodeType) -> set:
    """Piggy-back ``remaining`` tasks onto the leftover capacity of ``open_nodes``.

    Tasks are tried in increasing h_avg against ``node_type`` (input order on
    ties), each going to the earliest-purchased node it fits.  No node is
    purchased.  ``open_nodes`` are updated in place; returns the placed ids.
    """
    if not open_nodes:
        return set()
    pool = _Pool.from_states(open_nodes, node_type, itertools.count())
    placed = _fill_into(pool, _fill_order(list(remaining), node_type))
    for st, new in zip(open_nodes, pool.states()):
        st.node = new.node
        st.remaining = new.remaining
    return set(placed)


def type_order(instance: Instance) -> list[int]:
    """Node-type indices by decreasing total capacity per unit cost (input order on ties)."""
    ratio = instance.capacity_matrix.sum(axis=1) / instance.costs
    return sorted(range(instance.m), key=lambda j: (-ratio[j], j))


def _processing_order(tasks, indices):
    return [tasks[i] for i in sorted(indices, key=lambda i: (tasks[i].start, i))]


def _solve_trimmed(inst: Instance, types_of: np.ndarray, config: SolveConfig, counter) -> list[Node]:
    T = inst.horizon
    pools = []
    if not config.cross_fill:
        for j, btype in enumerate(inst.node_types):
            pool = _Pool(btype, T, counter)
            _place_into(pool, _processing_order(inst.tasks, np.flatnonzero(types_of == j)), config.fit)
            pools.append(pool)
    else:
        remaining = np.ones(inst.n, dtype=bool)
        hav = height_matrix(inst, "avg")
        for j in type_order(inst):
            btype = inst.node_types[j]
            pool = _Pool(btype, T, counter)
            group = np.flatnonzero((types_of == j) & remaining)
            _place_into(pool, _processing_order(inst.tasks, group), config.fit)
            remaining[group] = False
            rest = np.flatnonzero(remaining)
            rest = rest[np.lexsort((rest, hav[rest, j]))]
            filled = _fill_into(pool, [inst.tasks[i] for i in rest])
            if filled:
                remaining[[inst.task_index[tid] for tid in filled]] = False
            pools.append(pool)
    nodes = [st.node for pool in pools for st in pool.states()]
    nodes.sort(key=lambda nd: nd.purchase_order)
    return nodes


def solve_two_phase(instance: Instance, mapping: Mapping, config: SolveConfig = SolveConfig()) -> Solution:
    t0 = time.perf_counter()
    instance.check_hostable()
    types_of = mapping.type_indices(instance)
    if instance.n:
        bad = np.flatnonzero(~instance.hostable[np.arange(instance.n), types_of])
        if bad.size:
            u = instance.tasks[bad[0]]
            raise InfeasibleTaskError(u.id, f"task {u.id!r} is mapped to a node-type that cannot host it")
    trimmed, _ = trim_timeline(instance)
    counter = itertools.count()
    if config.segregate_large and instance.n:
        small = is_small(trimmed)
        nodes = []
        for part in (small, ~small):
            idx = np.flatnonzero(part)
            if not idx.size:
                continue
            sub = Instance(tuple(trimmed.tasks[i] for i in idx), trimmed.node_types,
                           trimmed.horizon, trimmed.dims)
            nodes += _solve_trimmed(sub, types_of[idx], config, counter)
    else:
        nodes = _solve_trimmed(trimmed, types_of, config, counter)
    meta = {
        "algorithm": config.label(),
        "mapping": mapping.policy,
        "fit": config.fit,
        "cross_fill": config.cross_fill,
        "segregate_large": config.segregate_large,
        "time_ms": (time.perf_counter() - t0) * 1e3,
    }
    return Solution.from_nodes(nodes, meta)


def make_mapping(instance: Instance, source: str, lp_solution=None) -> Mapping:
    if source.startswith("penalty-"):
        return best_mapping(instance, source.split("-", 1)[1])
    from .lp import round_mapping, solve_mapping_lp

    instance.check_hostable()
    if lp_solution is None:
        lp_solution = solve_mapping_lp(instance)
    return round_mapping(lp_solution, instance)


def solve(instance: Instance, config: SolveConfig = SolveConfig(), lp_solution=None) -> Solution:
    return solve_two_phase(instance, make_mapping(instance, config.mapping_source, lp_solution), config)


_PEN_GRID = [(h, f) for h in ("penalty-avg", "penalty-max") for f in ("first", "sim-cos")]
_LP_GRID = [("lp", f) for f in ("first", "sim-cos")]

PRESETS = {
    "PenMap": [SolveConfig(h, f) for h, f in _PEN_GRID],
    "PenMapF": [SolveConfig(h, f, cross_fill=True) for h, f in _PEN_GRID],
    "LPMap": [SolveConfig(h, f) for h, f in _LP_GRID],
    "LPMapF": [SolveConfig(h, f, cross_fill=True) for h, f in _LP_GRID],
}
PRESET_ALIASES = {"penmap": "PenMap", "penmap-f": "PenMapF", "lpmap": "LPMap", "lpmap-f": "LPMapF"}


def preset_configs(name: str, segregate_large: bool = False) -> list[SolveConfig]:
    key = PRESET_ALIASES.get(name, name)
    if key not in PRESETS:
        raise ValueError(f"unknown algorithm preset {name!r}")
    return [replace(c, segregate_large=segregate_large) for c in PRESETS[key]]


def solve_preset(instance: Instance, name: str, lp_solution=None, segregate_large: bool = False) -> Solution:
    """Cheapest solution over the preset's policy grid (first in grid order on ties)."""
    t0 = time.perf_counter()
    configs = preset_configs(name, segregate_large)
    if lp_solution is None and any(c.mapping_source == "lp" for c in configs):
        from .lp import solve_mapping_lp

        instance.check_hostable()
        lp_solution = solve_mapping_lp(instance)
    mappings: dict = {}
    best = None
    for cfg in configs:
        if cfg.mapping_source not in mappings:
            mappings[cfg.mapping_source] = make_mapping(instance, cfg.mapping_source, lp_solution)
        sol = solve_two_phase(instance, mappings[cfg.mapping_source], cfg)
        if best is None or sol.cost < best.cost:
            best = sol
    key = PRESET_ALIASES.get(name, name)
    meta = dict(best.meta, preset=key, time_ms=(time.perf_counter() - t0) * 1e3)
    return replace(best, meta=meta)
