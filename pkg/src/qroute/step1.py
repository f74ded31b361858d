"""Step I: serve as many user pairs as possible, one main path each.

The LP relaxation is solved first, paths the LP already fixes at one are committed,
and the rest is recovered by a prefix-branching search that only follows the two
heaviest next hops at every divergence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .lp import FEAS_TOL, FractionalSolution, build_step1_lp, solve_lp
from .model import InvalidArgument, NetworkGraph, RoutePath, reserve_path
from .paths import PathSetCatalog

ONE_TOL = 1e-9
DEFAULT_NODE_LIMIT = 500_000


@dataclass
class Step1Plan:
    selected: dict[int, RoutePath]
    lp_optimum: float
    truncated: bool = False

    @property
    def served_count(self) -> int:
        return len(self.selected)

    @property
    def integral_value(self) -> int:
        return len(self.selected)

    def to_dict(self) -> dict:
        return {
            "served_count": self.served_count,
            "lp_optimum": self.lp_optimum,
            "selected": {str(m): list(p.nodes) for m, p in sorted(self.selected.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class Step1Search:
    """Mutable search state shared by the recursive branch-and-price calls.

    ``chosen``, ``marked`` and ``free`` are changed on the way down and restored on the
    way back up; ``best`` holds the incumbent, replaced only by strictly larger plans.
    """

    def __init__(
        self,
        paths: list[RoutePath],
        fractional: np.ndarray,
        free: dict[str, int],
        node_limit: int | None = DEFAULT_NODE_LIMIT,
    ):
        self.paths = paths
        self.xt = np.asarray(fractional, dtype=float)
        self.free = dict(free)
        self.by_pair: dict[int, list[int]] = {}
        for j, p in enumerate(paths):
            self.by_pair.setdefault(p.pair_id, []).append(j)
        self.chosen: dict[int, int] = {}
        self.marked: set[int] = set()
        self.best: dict[int, int] = {}
        self.node_limit = node_limit
        self.nodes_visited = 0
        self.truncated = False
        self.trace: list[tuple[int, tuple[str, ...]]] = []

    # -- capacity bookkeeping -------------------------------------------

    def fits(self, j: int) -> bool:
        return all(self.free.get(s, 0) >= 1 for s in self.paths[j].switches)

    def commit(self, j: int) -> None:
        for s in self.paths[j].switches:
            self.free[s] -= 1
        self.chosen[self.paths[j].pair_id] = j

    def release(self, j: int) -> None:
        for s in self.paths[j].switches:
            self.free[s] += 1
        del self.chosen[self.paths[j].pair_id]

    # -- search ------------------------------------------------------------

    def next_pair(self) -> int | None:
        """Owner of the heaviest feasible path among pairs not yet decided."""
        best_key, best_pair = None, None
        for m, idx in self.by_pair.items():
            if m in self.marked:
                continue
            for j in idx:
                if self.fits(j):
                    key = (-self.xt[j], j)
                    if best_key is None or key < best_key:
                        best_key, best_pair = key, m
        return best_pair

    def _upper_bound(self) -> int:
        open_pairs = sum(
            1
            for m, idx in self.by_pair.items()
            if m not in self.marked and any(self.fits(j) for j in idx)
        )
        return len(self.chosen) + open_pairs

    def _record(self) -> None:
        if len(self.chosen) > len(self.best):
            self.best = dict(self.chosen)

    def run(self) -> dict[int, int]:
        self._record()
        m = self.next_pair()
        if m is not None:
            self.branch_and_price((), m)
        return self.best

    def branch_and_price(self, prefix: tuple[str, ...], m: int) -> None:
        self.nodes_visited += 1
        self.trace.append((m, prefix))
        # subtrees that cannot beat the incumbent never change it
        if self._upper_bound() <= len(self.best):
            return
        k = len(prefix)
        cands = [
            j for j in self.by_pair[m]
            if self.paths[j].nodes[:k] == prefix and self.fits(j)
        ]
        if len(cands) <= 1:
            self.marked.add(m)
            if cands:
                self.commit(cands[0])
            self._record()
            nxt = self.next_pair()
            if nxt is not None:
                self.branch_and_price((), nxt)
            self.marked.discard(m)
            if cands:
                self.release(cands[0])
            return

        seqs = [self.paths[j].nodes for j in cands]
        i = k
        while all(len(s) > i for s in seqs) and len({s[i] for s in seqs}) == 1:
            i += 1
        stem = seqs[0][:i]
        mass: dict[str, float] = {}
        for j, s in zip(cands, seqs):
            mass[s[i]] = mass.get(s[i], 0.0) + float(self.xt[j])
        ranked = sorted(mass, key=lambda v: (-mass[v], v))[:2]
        for rank, v in enumerate(ranked):
            if rank == 1 and self.node_limit is not None and self.nodes_visited >= self.node_limit:
                self.truncated = True
                break
            self.branch_and_price(stem + (v,), m)


def _check_fractional(fractional: FractionalSolution, problem) -> None:
    if not fractional.optimal:
        raise InvalidArgument(f"LP solution is {fractional.status.value}")
    x = np.asarray(fractional.values, dtype=float)
    if x.shape != (problem.num_vars,):
        raise InvalidArgument("fractional solution does not match the catalog")
    if np.any(x < problem.lower - FEAS_TOL) or np.any(x > problem.upper + FEAS_TOL):
        raise InvalidArgument("fractional solution violates variable bounds")
    if np.any(problem.residuals(x) < -FEAS_TOL):
        raise InvalidArgument("fractional solution violates a constraint")


def recover_integer_step1(
    fractional: FractionalSolution,
    catalog: PathSetCatalog,
    graph: NetworkGraph,
    node_limit: int | None = DEFAULT_NODE_LIMIT,
) -> Step1Plan:
    """Turn the relaxed pair selection into one integral main path per served pair."""
    problem, paths = build_step1_lp(catalog, graph)
    _check_fractional(fractional, problem)
    search = Step1Search(paths, fractional.values, graph.residual_channels(), node_limit)

    order = sorted(range(len(paths)), key=lambda j: (-search.xt[j], j))
    for j in order:
        m = paths[j].pair_id
        if search.xt[j] >= 1.0 - ONE_TOL and m not in search.marked and search.fits(j):
            search.commit(j)
            search.marked.add(m)
    chosen = search.run()
    return Step1Plan(
        {m: paths[j] for m, j in sorted(chosen.items())},
        fractional.objective_value,
        search.truncated,
    )


def solve_step1(
    graph: NetworkGraph,
    pairs=None,
    catalog: PathSetCatalog | None = None,
    node_limit: int | None = DEFAULT_NODE_LIMIT,
) -> Step1Plan:
    """LP, recovery, then one channel reserved on ``graph`` along every selected main path."""
    from .paths import selective_paths

    if catalog is None:
        catalog = selective_paths(graph, pairs)
    if pairs is not None:
        catalog = catalog.restricted(p.pair_id for p in pairs)
    if not catalog.all_paths:
        return Step1Plan({}, 0.0)
    problem, _ = build_step1_lp(catalog, graph)
    fractional = solve_lp(problem)
    plan = recover_integer_step1(fractional, catalog, graph, node_limit)
    for path in plan.selected.values():
        reserve_path(graph, path, 1)
    return plan
