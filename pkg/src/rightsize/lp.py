"""The mapping LP: build, solve, lowerbound, rounding, fractionality.

Variables are laid out as ``x(u, B)`` at column ``u * m + B`` followed by one
``alpha_B`` per node-type.  Load rows are indexed ``(B * T + (t - 1)) * D + d``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .model import Instance, trim_timeline
from .penmap import Mapping

log = logging.getLogger(__name__)

FRAC_EPS = 1e-6


class LpSolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class LpModel:
    n: int
    m: int
    T: int
    D: int
    c: np.ndarray
    A_eq: sp.csr_matrix
    b_eq: np.ndarray
    A_ub: sp.csr_matrix
    b_ub: np.ndarray
    bounds: np.ndarray  # (nvars, 2); upper may be inf

    @property
    def num_vars(self) -> int:
        return self.n * self.m + self.m

    @property
    def num_load_rows(self) -> int:
        return self.A_ub.shape[0]


@dataclass(frozen=True)
class LpSolution:
    x_star: np.ndarray  # (n, m)
    alpha_star: np.ndarray  # (m,)
    objective_value: float
    basic: bool
    method: str = ""
    T: int = 0
    D: int = 0

    @property
    def x_max(self) -> np.ndarray:
        if self.x_star.size == 0:
            return np.zeros(self.x_star.shape[0])
        return self.x_star.max(axis=1)


def build_lp(instance: Instance) -> LpModel:
    """Relaxed mapping LP for an (already trimmed) instance.

    Pairs (u, B) where B cannot host u alone get the upper bound 0: no
    feasible placement ever uses them, so the bound stays valid.
    """
    n, m, T, D = instance.n, instance.m, instance.horizon, instance.dims
    nx = n * m
    c = np.concatenate([np.zeros(nx), instance.costs])

    rows = np.repeat(np.arange(n), m)
    A_eq = sp.csr_matrix((np.ones(nx), (rows, np.arange(nx))), shape=(n, nx + m))
    b_eq = np.ones(n)

    # one coefficient per (u, t in span(u), B, d)
    ratio = instance.demand_matrix[:, None, :] / instance.capacity_matrix[None, :, :]  # (n, m, D)
    spans = instance.ends - instance.starts + 1
    u_rep = np.repeat(np.arange(n), spans)
    offsets = np.arange(u_rep.size) - np.repeat(np.cumsum(spans) - spans, spans)
    t_rep = instance.starts[u_rep] - 1 + offsets  # 0-based slot
    B = np.arange(m)
    d = np.arange(D)
    uu = u_rep[:, None, None]
    tt = t_rep[:, None, None]
    BB = B[None, :, None]
    dd = d[None, None, :]
    row = ((BB * T + tt) * D + dd).ravel()
    col = (uu * m + BB + 0 * dd).ravel()
    val = ratio[uu, BB, dd].ravel()
    nrows = m * T * D
    alpha_rows = np.arange(nrows)
    alpha_cols = nx + alpha_rows // (T * D)
    A_ub = sp.csr_matrix(
        (np.concatenate([val, -np.ones(nrows)]),
         (np.concatenate([row, alpha_rows]), np.concatenate([col, alpha_cols]))),
        shape=(nrows, nx + m),
    )
    b_ub = np.zeros(nrows)

    bounds = np.zeros((nx + m, 2))
    bounds[:nx, 1] = instance.hostable.ravel().astype(float) if n else 0.0
    bounds[nx:, 1] = np.inf
    return LpModel(n, m, T, D, c, A_eq, b_eq, A_ub, b_ub, bounds)


def solve_lp(model: LpModel, method: str = "highs-ds", certify_vertex: bool = False) -> LpSolution:
    """Solve with HiGHS.

    The dual simplex returns a basic solution.  ``certify_vertex`` checks the
    extreme-point property numerically instead of trusting the method.
    """
    opts = {"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9}
    res = linprog(
        model.c, A_ub=model.A_ub, b_ub=model.b_ub, A_eq=model.A_eq, b_eq=model.b_eq,
        bounds=[(lo, None if np.isinf(hi) else hi) for lo, hi in model.bounds],
        method=method, options=opts,
    )
    if res.status != 0:
        raise LpSolverError(f"LP solve failed (status {res.status}): {res.message}")
    z = res.x
    nx = model.n * model.m
    x = np.clip(z[:nx].reshape(model.n, model.m), 0.0, 1.0)
    basic = method in ("highs-ds", "highs-ipm")  # ipm runs crossover to a vertex
    if certify_vertex:
        basic = is_vertex(model, z)
    return LpSolution(x, z[nx:], float(res.fun), basic, method, model.T, model.D)


def is_vertex(model: LpModel, z: np.ndarray, tol: float = 1e-7) -> bool:
    """True when z is an extreme point of the LP polytope.

    Equivalent test: the columns of the variables strictly inside their bounds
    are linearly independent within the rows of the tight constraints.
    """
    lo, hi = model.bounds[:, 0], model.bounds[:, 1]
    free = (z > lo + tol) & (z < hi - tol)
    if not free.any():
        return True
    slack = model.b_ub - model.A_ub @ z
    tight = np.abs(slack) <= tol
    A = sp.vstack([model.A_eq, model.A_ub[tight]]).tocsc()[:, free].toarray()
    return int(np.linalg.matrix_rank(A, tol=1e-9)) == int(free.sum())


def solve_mapping_lp(instance: Instance, method: str = "highs-ds") -> LpSolution:
    instance.check_hostable()  # otherwise the LP is infeasible and HiGHS gives a vaguer error
    trimmed, _ = trim_timeline(instance)
    return solve_lp(build_lp(trimmed), method=method)


def lower_bound(instance: Instance, method: str = "highs-ds") -> float:
    if instance.n == 0:
        return 0.0
    return solve_mapping_lp(instance, method).objective_value


def round_mapping(lp_solution: LpSolution, instance: Instance) -> Mapping:
    """Map each task to the node-type carrying most of its LP weight (lowest index on ties)."""
    choice = np.argmax(lp_solution.x_star, axis=1) if instance.n else np.zeros(0, dtype=int)
    assign = {u.id: instance.node_types[j].id for u, j in zip(instance.tasks, choice)}
    return Mapping(assign, "lp")


@dataclass
class FractionalityReport:
    fractional: int
    n: int
    bound: int  # n + m * T' * D
    within_bound: bool
    basic: bool
    near_integral_share: float  # tasks with x_max >= 0.99
    histogram: list  # counts of x_max over bin_edges
    bin_edges: list

    def lines(self) -> list[str]:
        check = "n/a (not a vertex)" if not self.basic else ("ok" if self.within_bound else "VIOLATED")
        return [
            f"fractional x: {self.fractional} (bound {self.bound}, {check})",
            f"tasks with x_max >= 0.99: {self.near_integral_share:.1%}",
        ]


def fractionality_report(lp_solution: LpSolution, eps: float = FRAC_EPS, bins: int = 10) -> FractionalityReport:
    x = lp_solution.x_star
    n, m = x.shape
    frac = int(np.count_nonzero((x > eps) & (x < 1 - eps)))
    bound = n + m * lp_solution.T * lp_solution.D
    xmax = lp_solution.x_max
    hist, edges = np.histogram(xmax, bins=bins, range=(0.0, 1.0))
    share = float(np.mean(xmax >= 0.99)) if n else 1.0
    return FractionalityReport(frac, n, bound, frac <= bound, lp_solution.basic, share,
                               hist.tolist(), edges.tolist())


def write_lp(model: LpModel, path) -> None:
    """Write the model in CPLEX LP text format.

    Variables are named ``x_<u>_<B>`` and ``a_<B>`` by position; load rows
    ``L_<B>_<t>_<d>`` with 1-based t.
    """
    nx = model.n * model.m

    def name(j):
        if j < nx:
            return f"x_{j // model.m}_{j % model.m}"
        return f"a_{j - nx}"

    def expr(row):
        parts = []
        for j, v in zip(row.indices, row.data):
            if v == 0:
                continue
            parts.append(f"{'-' if v < 0 else '+'} {abs(v):.17g} {name(j)}")
        return " ".join(parts) if parts else "0 a_0"

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\\ mapping LP\n")
        fh.write("Minimize\n obj: ")
        fh.write(" ".join(f"+ {model.c[nx + b]:.17g} a_{b}" for b in range(model.m)))
        fh.write("\nSubject To\n")
        for i in range(model.A_eq.shape[0]):
            fh.write(f" assign_{i}: {expr(model.A_eq.getrow(i))} = 1\n")
        A = model.A_ub.tocsr()
        T, D = model.T, model.D
        for r in range(A.shape[0]):
            row = A.getrow(r)
            if row.nnz <= 1:
                continue  # no task active: only -alpha <= 0, implied by the bound
            b, rest = divmod(r, T * D)
            t, d = divmod(rest, D)
            fh.write(f" L_{b}_{t + 1}_{d}: {expr(row)} <= 0\n")
        fh.write("Bounds\n")
        for j in range(nx):
            fh.write(f" 0 <= {name(j)} <= {model.bounds[j, 1]:g}\n")
        for b in range(model.m):
            fh.write(f" a_{b} >= 0\n")
        fh.write("End\n")
