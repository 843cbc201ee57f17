"""Parametric node pricing and the synthetic instance generator."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .model import Instance, NodeType, Task


@dataclass(frozen=True)
class CostParams:
    """Price of a node: ``sum_d coefficients[d] * capacity[d] ** exponent``."""

    coefficients: tuple[float, ...]
    exponent: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if any(c <= 0 for c in self.coefficients):
            raise ValueError("cost coefficients must be positive")
        if not self.exponent > 0:
            raise ValueError("cost exponent must be positive")

    @classmethod
    def homogeneous(cls, dims: int) -> "CostParams":
        return cls((1.0,) * dims, 1.0)

    @classmethod
    def heterogeneous(cls, dims: int, exponent: float = 1.0, seed=None,
                      low: float = 0.3, high: float = 1.0) -> "CostParams":
        rng = np.random.default_rng(seed)
        return cls(tuple(rng.uniform(low, high, size=dims)), exponent)


def node_cost(capacity: Sequence[float], params: CostParams) -> float:
    cap = np.asarray(capacity, dtype=float)
    if cap.shape != (len(params.coefficients),):
        raise ValueError("capacity and cost coefficients differ in length")
    if np.any(cap <= 0):
        raise ValueError("capacity must be positive")
    return float(np.dot(params.coefficients, cap ** params.exponent))


Interval = tuple[float, float]


@dataclass(frozen=True)
class GenSpec:
    """Parameters of the synthetic generator; defaults are the standard benchmark setting."""

    n: int = 1000
    m: int = 10
    D: int = 5
    T: int = 24
    demand_interval: Interval = (0.01, 0.1)
    capacity_interval: Interval = (0.2, 1.0)
    cost_params: Union[CostParams, str] = "homogeneous"
    seed: int = 0

    def __post_init__(self):
        if self.n < 0 or self.m < 1 or self.D < 1 or self.T < 1:
            raise ValueError("need n >= 0 and m, D, T >= 1")
        for name, (a, b) in (("demand", self.demand_interval), ("capacity", self.capacity_interval)):
            if not 0.0 <= a <= b <= 1.0:
                raise ValueError(f"{name} interval must satisfy 0 <= a <= b <= 1")
        if self.capacity_interval[0] <= 0:
            raise ValueError("capacity interval must be bounded away from zero")
        if isinstance(self.cost_params, str) and self.cost_params != "homogeneous":
            raise ValueError(f"unknown cost model {self.cost_params!r}")

    def resolved_cost_params(self) -> CostParams:
        if isinstance(self.cost_params, CostParams):
            return self.cost_params
        return CostParams.homogeneous(self.D)


def sample_spans(rng: np.random.Generator, n: int, T: int) -> tuple[np.ndarray, np.ndarray]:
    """Two independent uniform slots in [1, T], sorted into (start, end)."""
    pair = rng.integers(1, T + 1, size=(n, 2))
    pair.sort(axis=1)
    return pair[:, 0], pair[:, 1]


def generate_synthetic(spec: GenSpec) -> Instance:
    rng = np.random.default_rng(spec.seed)
    params = spec.resolved_cost_params()
    caps = rng.uniform(*spec.capacity_interval, size=(spec.m, spec.D))
    types = tuple(NodeType(j, tuple(caps[j]), node_cost(caps[j], params)) for j in range(spec.m))
    dem = rng.uniform(*spec.demand_interval, size=(spec.n, spec.D))
    starts, ends = sample_spans(rng, spec.n, spec.T)
    tasks = tuple(Task(i, tuple(dem[i]), starts[i], ends[i]) for i in range(spec.n))
    return Instance(tasks, types, spec.T, spec.D)


def genspec_from_dict(data: dict) -> GenSpec:
    data = dict(data)
    cost = data.pop("cost_params", "homogeneous")
    if isinstance(cost, dict):
        dims = int(data.get("D", 5))
        if "coefficients" in cost:
            cost = CostParams(tuple(cost["coefficients"]), float(cost.get("exponent", 1.0)))
        else:
            cost = CostParams.heterogeneous(dims, float(cost.get("exponent", 1.0)),
                                            seed=cost.get("seed", data.get("seed", 0)))
    for key in ("demand_interval", "capacity_interval"):
        if key in data:
            data[key] = tuple(float(x) for x in data[key])
    return GenSpec(cost_params=cost, **data)
