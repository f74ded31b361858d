"""Exhaustive reference solvers for tiny instances."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .model import ChannelAssignment, NetworkGraph, RoutePath, check_capacity
from .paths import PathSetCatalog

ENUMERATION_LIMIT = 1_000_000


class InstanceTooLarge(ValueError):
    pass


@dataclass
class OracleStep1:
    optimum: int
    selection: dict[int, RoutePath]


@dataclass
class OracleStep2:
    optimum: float
    channels: dict[RoutePath, int]


def brute_force_step1(catalog: PathSetCatalog, graph: NetworkGraph) -> OracleStep1:
    """Most pairs servable with at most one path each, by trying every combination."""
    pair_ids = sorted(catalog.per_pair)
    options = [[None, *catalog.per_pair[m]] for m in pair_ids]
    size = math.prod(len(o) for o in options)
    if size > ENUMERATION_LIMIT:
        raise InstanceTooLarge(f"{size} combinations exceed {ENUMERATION_LIMIT}")
    free = graph.residual_channels()
    best, witness = -1, {}
    for combo in itertools.product(*options):
        used: dict[str, int] = {}
        ok = True
        for p in combo:
            if p is None:
                continue
            for s in p.switches:
                used[s] = used.get(s, 0) + 1
                if used[s] > free[s]:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        served = sum(p is not None for p in combo)
        # product() order puts the "no path" option first, so the first maximizer is
        # the lexicographically smallest selection
        if served > best:
            best = served
            witness = {p.pair_id: p for p in combo if p is not None}
    _self_check(graph, [ChannelAssignment(p, 1) for p in witness.values()])
    return OracleStep1(best, witness)


def brute_force_step2(catalog: PathSetCatalog, graph: NetworkGraph) -> OracleStep2:
    """Best integer channel vector over the catalog on the graph's residual capacity."""
    paths = catalog.all_paths
    free = graph.residual_channels()
    bounds = [min((free[s] for s in p.switches), default=0) for p in paths]
    size = math.prod(b + 1 for b in bounds)
    if size > ENUMERATION_LIMIT:
        raise InstanceTooLarge(f"{size} channel vectors exceed {ENUMERATION_LIMIT}")

    best_value, best_counts = -1.0, [0] * len(paths)
    counts = [0] * len(paths)

    def visit(j: int) -> None:
        nonlocal best_value, best_counts
        if j == len(paths):
            v = math.fsum(c * p.success_prob for c, p in zip(counts, paths))
            if v > best_value:
                best_value, best_counts = v, list(counts)
            return
        p = paths[j]
        for c in range(bounds[j] + 1):
            if c and any(free[s] < 1 for s in p.switches):
                break
            if c:
                for s in p.switches:
                    free[s] -= 1
            counts[j] = c
            visit(j + 1)
        for s in p.switches:
            free[s] += counts[j]
        counts[j] = 0

    visit(0)
    channels = {p: c for p, c in zip(paths, best_counts)}
    _self_check(graph, [ChannelAssignment(p, c) for p, c in channels.items()])
    return OracleStep2(max(best_value, 0.0), channels)


def _self_check(graph: NetworkGraph, assignments: list[ChannelAssignment]) -> None:
    report = check_capacity(graph, assignments, residual=True)
    if not report.ok:
        raise AssertionError("oracle produced an infeasible witness: " + "; ".join(report.violations))
