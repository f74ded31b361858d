"""Greedy comparison routers: FER, Q-PASS and hop-count (B1).

All three add one channel at a time on the best-ranked feasible catalog path until
nothing fits; they differ only in how a path is ranked.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

from .model import ChannelAssignment, NetworkGraph, RoutePath, plan_throughput
from .paths import PathSetCatalog


class PathMetric(str, Enum):
    EXPECTED_THROUGHPUT = "expected_throughput"
    SUM_INVERSE_P = "sum_inverse_p"
    HOP_COUNT = "hop_count"

    def score(self, path: RoutePath, graph: NetworkGraph) -> float:
        """Smaller is better for every metric (throughput is negated)."""
        if self is PathMetric.EXPECTED_THROUGHPUT:
            return -path.success_prob
        if self is PathMetric.SUM_INVERSE_P:
            return math.fsum(
                1.0 / graph.link(a, b).success_prob for a, b in zip(path.nodes, path.nodes[1:])
            )
        return float(path.hop_count)


FER = PathMetric.EXPECTED_THROUGHPUT
QPASS = PathMetric.SUM_INVERSE_P
B1 = PathMetric.HOP_COUNT


@dataclass
class GreedyPlan:
    metric: PathMetric
    channels: dict[RoutePath, int]

    def assignments(self) -> list[ChannelAssignment]:
        return [ChannelAssignment(p, c) for p, c in self.channels.items() if c > 0]

    @property
    def served_pairs(self) -> int:
        return len({p.pair_id for p, c in self.channels.items() if c > 0})

    @property
    def throughput(self) -> float:
        return plan_throughput(self.assignments())

    def to_dict(self) -> dict:
        return {
            "metric": self.metric.value,
            "served_pairs": self.served_pairs,
            "throughput": self.throughput,
            "channels": [a.to_dict() for a in self.assignments()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def greedy_route(
    graph: NetworkGraph,
    pairs,
    catalog: PathSetCatalog,
    metric: PathMetric,
    *,
    saturate_path: bool = False,
) -> GreedyPlan:
    """Repeatedly put one channel on the best-scoring feasible (pair, path) candidate.

    Scores never change during the run, so re-ranking after each channel picks the same
    path until it stops fitting. ``saturate_path`` is the coarse variant that fills a path
    in one go; both produce the same plan.
    """
    if pairs is not None:
        catalog = catalog.restricted(p.pair_id for p in pairs)
    paths = catalog.all_paths
    free = graph.residual_channels()
    ranked = sorted(
        range(len(paths)),
        key=lambda j: (metric.score(paths[j], graph), paths[j].pair_id, j),
    )
    channels = {p: 0 for p in paths}

    def room(p: RoutePath) -> int:
        return min((free[s] for s in p.switches), default=0)

    while True:
        pick = next((j for j in ranked if room(paths[j]) >= 1), None)
        if pick is None:
            break
        p = paths[pick]
        n = room(p) if saturate_path else 1
        for s in p.switches:
            free[s] -= n
        channels[p] += n
    return GreedyPlan(metric, channels)
