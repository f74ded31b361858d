"""Dense bounded-variable revised simplex and the two routing LP relaxations.

Problems are ``max c.x  s.t.  A x <= b,  lo <= x <= hi``. Entering and leaving
variables follow Bland's rule (lowest index), so pivoting cannot cycle and the
returned vertex is the same for identical input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .model import InvalidArgument, NetworkGraph, RoutePath

FEAS_TOL = 1e-9
OPT_TOL = 1e-7
_PIVOT_TOL = 1e-10
_DJ_TOL = 1e-11
MAX_ITERATIONS = 200_000


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LpProblem:
    objective: np.ndarray
    rows: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    var_names: list[str] = field(default_factory=list)
    row_names: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=float)
        n = self.objective.shape[0]
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, n)
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        self.lower = np.asarray(self.lower, dtype=float).reshape(-1)
        self.upper = np.asarray(self.upper, dtype=float).reshape(-1)
        if n < 1:
            raise InvalidArgument("an LP needs at least one variable")
        if self.rows.shape[0] != self.rhs.shape[0]:
            raise InvalidArgument("row count does not match right-hand side length")
        if self.lower.shape[0] != n or self.upper.shape[0] != n:
            raise InvalidArgument("bounds must have one entry per variable")
        if np.any(self.lower < 0) or np.any(~np.isfinite(self.lower)):
            raise InvalidArgument("lower bounds must be finite and non-negative")
        if np.any(self.upper < self.lower):
            raise InvalidArgument("upper bound below lower bound")
        if not np.all(np.isfinite(self.rows)) or not np.all(np.isfinite(self.rhs)):
            raise InvalidArgument("constraint data must be finite")
        if not self.var_names:
            self.var_names = [f"x{j}" for j in range(n)]
        if not self.row_names:
            self.row_names = [f"r{i}" for i in range(self.rows.shape[0])]

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    def residuals(self, x: np.ndarray) -> np.ndarray:
        """b - A x; non-negative entries mean the row is satisfied."""
        return self.rhs - self.rows @ x

    def to_lp_text(self) -> str:
        def term(coef: float, name: str) -> str:
            return f"{'+' if coef >= 0 else '-'} {abs(coef):.12g} {name}"

        lines = ["Maximize", " obj: " + " ".join(
            term(c, v) for c, v in zip(self.objective, self.var_names) if c != 0
        ), "Subject To"]
        for name, row, b in zip(self.row_names, self.rows, self.rhs):
            body = " ".join(term(c, v) for c, v in zip(row, self.var_names) if c != 0)
            lines.append(f" {name}: {body or '0'} <= {b:.12g}")
        lines.append("Bounds")
        for v, lo, hi in zip(self.var_names, self.lower, self.upper):
            hi_s = "+inf" if np.isinf(hi) else f"{hi:.12g}"
            lines.append(f" {lo:.12g} <= {v} <= {hi_s}")
        lines.append("End")
        return "\n".join(lines) + "\n"


@dataclass
class FractionalSolution:
    values: np.ndarray
    objective_value: float
    status: LpStatus
    iterations: int = 0
    dual_bound: float = float("nan")

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Working state of a bounded revised simplex run."""

    def __init__(self, A, b, lo, hi, basis, x):
        self.A, self.b, self.lo, self.hi = A, b, lo, hi
        self.basis = basis
        self.x = x
        self.iterations = 0

    def run(self, c: np.ndarray) -> tuple[LpStatus, np.ndarray]:
        A, lo, hi, x = self.A, self.lo, self.hi, self.x
        ncols = A.shape[1]
        while True:
            if self.iterations >= MAX_ITERATIONS:
                raise RuntimeError("simplex iteration limit reached")
            basis = self.basis
            B_inv = np.linalg.inv(A[:, basis])
            nonbasic = np.ones(ncols, dtype=bool)
            nonbasic[basis] = False
            # recompute basic values from scratch each pass to stop drift
            x[basis] = B_inv @ (self.b - A[:, nonbasic] @ x[nonbasic])
            y = c[basis] @ B_inv
            d = c - y @ A

            entering, direction = -1, 0
            for j in np.flatnonzero(nonbasic):
                if hi[j] - lo[j] <= 0:
                    continue
                if d[j] > _DJ_TOL and x[j] < hi[j]:
                    entering, direction = j, 1
                    break
                if d[j] < -_DJ_TOL and x[j] > lo[j]:
                    entering, direction = j, -1
                    break
            if entering < 0:
                return LpStatus.OPTIMAL, y

            w = B_inv @ A[:, entering]
            step = hi[entering] - lo[entering]
            leave_pos = -1
            for k, var in enumerate(basis):
                rate = direction * w[k]
                if rate > _PIVOT_TOL:
                    t = (x[var] - lo[var]) / rate
                elif rate < -_PIVOT_TOL and np.isfinite(hi[var]):
                    t = (hi[var] - x[var]) / -rate
                else:
                    continue
                t = max(t, 0.0)
                if t < step - 1e-12 or (
                    leave_pos >= 0 and abs(t - step) <= 1e-12 and var < basis[leave_pos]
                ):
                    step, leave_pos = t, k
            if not np.isfinite(step):
                return LpStatus.UNBOUNDED, y

            x[entering] += direction * step
            x[basis] -= direction * step * w
            if leave_pos >= 0:
                var = basis[leave_pos]
                x[var] = lo[var] if direction * w[leave_pos] > 0 else hi[var]
                basis[leave_pos] = entering
            else:
                x[entering] = hi[entering] if direction > 0 else lo[entering]
            self.iterations += 1


def solve_lp(problem: LpProblem) -> FractionalSolution:
    """Maximize the problem's objective; infeasible/unbounded come back as a status."""
    n = problem.num_vars
    m = problem.rows.shape[0]
    A0, b = problem.rows, problem.rhs
    lo0, hi0 = problem.lower, problem.upper

    start = b - A0 @ lo0
    need_art = np.flatnonzero(start < 0)
    n_art = len(need_art)
    A = np.zeros((m, n + m + n_art))
    A[:, :n] = A0
    A[:, n : n + m] = np.eye(m)
    for k, i in enumerate(need_art):
        A[i, n + m + k] = -1.0
    lo = np.concatenate([lo0, np.zeros(m + n_art)])
    hi = np.concatenate([hi0, np.full(m + n_art, np.inf)])
    x = lo.copy()
    basis = np.arange(n, n + m)
    for k, i in enumerate(need_art):
        basis[i] = n + m + k
    tab = _Tableau(A, b, lo, hi, basis, x)

    if n_art:
        c1 = np.zeros(A.shape[1])
        c1[n + m :] = -1.0
        tab.run(c1)
        if x[n + m :].sum() > FEAS_TOL * max(1.0, np.abs(b).max()):
            return FractionalSolution(np.clip(x[:n], lo0, hi0), float("nan"),
                                      LpStatus.INFEASIBLE, tab.iterations)
        hi[n + m :] = 0.0
        x[n + m :] = np.minimum(x[n + m :], 0.0)

    scale = float(np.abs(problem.objective).max())
    if m == 0:
        # each variable sits at whichever bound its cost prefers
        values = np.where(problem.objective > 0, hi0, lo0)
        if np.any(np.isinf(values)):
            return FractionalSolution(lo0.copy(), float("inf"), LpStatus.UNBOUNDED)
        obj = float(problem.objective @ values)
        return FractionalSolution(values, obj, LpStatus.OPTIMAL, 0, obj)
    if scale == 0.0:
        values = np.clip(x[:n], lo0, hi0)
        return FractionalSolution(values, 0.0, LpStatus.OPTIMAL, tab.iterations, 0.0)

    c = np.zeros(A.shape[1])
    c[:n] = problem.objective / scale
    status, y = tab.run(c)
    if status is LpStatus.UNBOUNDED:
        return FractionalSolution(x[:n].copy(), float("inf"), status, tab.iterations)

    values = np.clip(x[:n], lo0, hi0)
    obj = float(problem.objective @ values)
    y = y * scale
    d = problem.objective - y @ A0
    d[np.abs(d) <= _DJ_TOL * scale] = 0.0
    bound = float(y @ b + sum(dj * (hi0[j] if dj > 0 else lo0[j]) for j, dj in enumerate(d) if dj))
    return FractionalSolution(values, obj, LpStatus.OPTIMAL, tab.iterations, bound)


# -- formulations -----------------------------------------------------------


def _switch_rows(paths: list[RoutePath], graph: NetworkGraph) -> tuple[list[str], np.ndarray]:
    used = sorted({n for p in paths for n in p.switches})
    index = {n: i for i, n in enumerate(used)}
    rows = np.zeros((len(used), len(paths)))
    for j, p in enumerate(paths):
        for n in p.switches:
            rows[index[n], j] += 1.0
    return used, rows


def build_step1_lp(catalog, graph: NetworkGraph) -> tuple[LpProblem, list[RoutePath]]:
    """Relaxed pair-count maximization over the catalog paths.

    One variable per path in [0, 1]; per pair the variables sum to at most one; per
    switch at most half its free qubits worth of selected paths cross it.
    """
    paths = catalog.all_paths
    if not paths:
        raise InvalidArgument("catalog holds no paths")
    pair_ids = sorted({p.pair_id for p in paths})
    pair_rows = np.zeros((len(pair_ids), len(paths)))
    for j, p in enumerate(paths):
        pair_rows[pair_ids.index(p.pair_id), j] = 1.0
    switches, sw_rows = _switch_rows(paths, graph)
    rhs = [1.0] * len(pair_ids) + [graph.residual_qubits(s) // 2 for s in switches]
    problem = LpProblem(
        objective=np.ones(len(paths)),
        rows=np.vstack([pair_rows, sw_rows]),
        rhs=rhs,
        lower=np.zeros(len(paths)),
        upper=np.ones(len(paths)),
        var_names=[f"x_{p.pair_id}_{j}" for j, p in enumerate(paths)],
        row_names=[f"pair_{m}" for m in pair_ids] + [f"cap_{s}" for s in switches],
    )
    return problem, paths


def build_step2_lp(catalog, graph: NetworkGraph) -> tuple[LpProblem, list[RoutePath]]:
    """Relaxed throughput maximization: channel counts per path on the residual capacities."""
    paths = catalog.all_paths
    if not paths:
        raise InvalidArgument("catalog holds no paths")
    switches, sw_rows = _switch_rows(paths, graph)
    upper = []
    for p in paths:
        if not p.switches:
            raise InvalidArgument(f"path {p.nodes} crosses no switch")
        upper.append(min(graph.residual_qubits(n) // 2 for n in p.switches))
    problem = LpProblem(
        objective=np.array([p.success_prob for p in paths]),
        rows=sw_rows,
        rhs=[graph.residual_qubits(s) // 2 for s in switches],
        lower=np.zeros(len(paths)),
        upper=np.array(upper, dtype=float),
        var_names=[f"q_{p.pair_id}_{j}" for j, p in enumerate(paths)],
        row_names=[f"cap_{s}" for s in switches],
    )
    return problem, paths
