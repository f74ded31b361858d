"""Step II: spend leftover qubits on extra channels to maximize expected throughput."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .lp import build_step2_lp, solve_lp
from .model import ChannelAssignment, NetworkGraph, RoutePath, reserve_path
from .paths import PathSetCatalog, selective_paths
from .step1 import Step1Plan, _check_fractional

RESIDUE_TOL = 1e-9
MAX_RESIDUES = 64


class SearchLimitExceeded(RuntimeError):
    pass


@dataclass
class Step2Plan:
    channels: dict[RoutePath, int]
    additional_throughput: float
    total_throughput: float
    lp_optimum: float
    # diagnostics from the rounding: channels fixed by the floor pass, leftover fractions
    floor_channels: dict[RoutePath, int] = field(default_factory=dict)
    residues: dict[RoutePath, float] = field(default_factory=dict)

    def assignments(self) -> list[ChannelAssignment]:
        return [ChannelAssignment(p, c) for p, c in self.channels.items() if c > 0]

    def to_dict(self) -> dict:
        return {
            "additional_throughput": self.additional_throughput,
            "total_throughput": self.total_throughput,
            "lp_optimum": self.lp_optimum,
            "channels": [a.to_dict() for a in self.assignments()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class Step2Search:
    """Exhaustive include/exclude search over the fractional leftovers of the LP."""

    def __init__(self, paths: list[RoutePath], counts: list[int], residues, free):
        self.paths = paths
        self.prob = [p.success_prob for p in paths]
        self.counts = list(counts)
        self.residues = np.asarray(residues, dtype=float)
        self.free = dict(free)
        self.marked: set[int] = set()
        self.best_counts: list[int] | None = None
        self.best_value = -math.inf
        self.leaves = 0

    def fits(self, j: int) -> bool:
        return all(self.free.get(s, 0) >= 1 for s in self.paths[j].switches)

    def _take(self, j: int, sign: int) -> None:
        for s in self.paths[j].switches:
            self.free[s] -= sign
        self.counts[j] += sign

    def value(self, counts=None) -> float:
        counts = self.counts if counts is None else counts
        return math.fsum(c * p for c, p in zip(counts, self.prob))

    def _open(self) -> list[int]:
        return [
            j for j in range(len(self.paths))
            if j not in self.marked and self.residues[j] > RESIDUE_TOL and self.fits(j)
        ]

    def branch_and_price2(self) -> None:
        open_paths = self._open()
        if not open_paths:
            self.leaves += 1
            v = self.value()
            if v > self.best_value:
                self.best_value, self.best_counts = v, list(self.counts)
            return
        # every open path gains at most one channel below this node
        bound = self.value() + math.fsum(self.prob[j] for j in open_paths)
        if bound < self.best_value - 1e-12 * max(1.0, abs(self.best_value)):
            return
        j = min(open_paths, key=lambda k: (-self.residues[k], k))
        self.marked.add(j)
        self._take(j, +1)
        self.branch_and_price2()
        self._take(j, -1)
        self.branch_and_price2()
        self.marked.discard(j)


def recover_integer_step2(fractional, catalog: PathSetCatalog, graph: NetworkGraph) -> Step2Plan:
    """Commit integer parts greedily, then search the fractional leftovers exhaustively."""
    problem, paths = build_step2_lp(catalog, graph)
    _check_fractional(fractional, problem)
    qt = np.asarray(fractional.values, dtype=float)
    free = graph.residual_channels()
    counts = [0] * len(paths)
    residues = np.zeros(len(paths))

    for j in sorted(range(len(paths)), key=lambda k: (-qt[k], k)):
        whole = math.floor(qt[j] + RESIDUE_TOL)
        for _ in range(whole):
            if not all(free.get(s, 0) >= 1 for s in paths[j].switches):
                break
            for s in paths[j].switches:
                free[s] -= 1
            counts[j] += 1
        residues[j] = max(0.0, qt[j] - whole)

    live = int(np.sum(residues > RESIDUE_TOL))
    if live > MAX_RESIDUES:
        raise SearchLimitExceeded(
            f"{live} fractional channel counts exceed the exhaustive search cap of {MAX_RESIDUES}"
        )
    search = Step2Search(paths, counts, residues, free)
    search.branch_and_price2()
    final = search.best_counts
    additional = search.value(final)
    return Step2Plan(
        {p: c for p, c in zip(paths, final)},
        additional,
        additional,
        fractional.objective_value,
        {p: c for p, c in zip(paths, counts)},
        {p: float(r) for p, r in zip(paths, residues)},
    )


def _solve(graph: NetworkGraph, catalog: PathSetCatalog) -> Step2Plan:
    if not catalog.all_paths:
        return Step2Plan({}, 0.0, 0.0, 0.0)
    problem, _ = build_step2_lp(catalog, graph)
    fractional = solve_lp(problem)
    plan = recover_integer_step2(fractional, catalog, graph)
    for path, c in plan.channels.items():
        if c:
            reserve_path(graph, path, c)
    return plan


def solve_step2(graph: NetworkGraph, step1_plan: Step1Plan, catalog: PathSetCatalog) -> Step2Plan:
    """Extra channels for the pairs Step I served, on the capacity Step I left over.

    ``graph`` must already carry the Step-I reservations; the extra channels are
    reserved on it as well. ``total_throughput`` counts each main path's channel.
    """
    plan = _solve(graph, catalog.restricted(step1_plan.selected))
    main = math.fsum(p.success_prob for p in step1_plan.selected.values())
    plan.total_throughput = main + plan.additional_throughput
    return plan


def solve_throughput_direct(graph: NetworkGraph, pairs=None, catalog=None) -> Step2Plan:
    """Throughput maximization over every pair and full capacity, skipping pair selection."""
    if catalog is None:
        catalog = selective_paths(graph, pairs)
    if pairs is not None:
        catalog = catalog.restricted(p.pair_id for p in pairs)
    return _solve(graph, catalog)


def multi_r_assignments(step1_plan: Step1Plan, step2_plan: Step2Plan) -> list[ChannelAssignment]:
    """Main-path channels plus Step-II channels, merged per path."""
    merged: dict[RoutePath, int] = {}
    for p in step1_plan.selected.values():
        merged[p] = merged.get(p, 0) + 1
    for p, c in step2_plan.channels.items():
        if c:
            merged[p] = merged.get(p, 0) + c
    return [ChannelAssignment(p, c) for p, c in merged.items()]
