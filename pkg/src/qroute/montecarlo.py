"""Monte Carlo check of the analytic channel success model.

Each trial is one time slot: every link of every channel draws its own Bernoulli
entanglement attempt and every relaying switch its own Bernoulli swap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ChannelAssignment, InvalidArgument, NetworkGraph

CHUNK = 8192


@dataclass
class McResult:
    trials: int
    mean_throughput: float
    std_error: float
    per_pair_means: dict[int, float] = field(default_factory=dict)


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    # Philox is counter based: chunk k gets the same stream whatever order chunks run in
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), chunk]))


def simulate_throughput(
    graph: NetworkGraph, plan: list[ChannelAssignment], trials: int, seed: int = 0
) -> McResult:
    if trials <= 0:
        raise InvalidArgument("trials must be positive")
    channels = []
    for a in plan:
        if a.channels <= 0:
            continue
        nodes = a.path.nodes
        link_p = np.array([graph.link(x, y).success_prob for x, y in zip(nodes, nodes[1:])])
        channels.append((a.path.pair_id, link_p, len(nodes) - 2, a.channels))

    pair_ids = sorted({c[0] for c in channels})
    count_seen, mean, m2 = 0, 0.0, 0.0
    pair_sum = {m: 0.0 for m in pair_ids}
    q = graph.swap_prob
    for k, start in enumerate(range(0, trials, CHUNK)):
        size = min(CHUNK, trials - start)
        rng = _chunk_rng(seed, k)
        per_trial = np.zeros(size)
        for pair_id, link_p, swaps, count in channels:
            draws = rng.random((size, count, len(link_p) + swaps))
            ok = np.all(draws[:, :, : len(link_p)] < link_p, axis=2)
            if swaps:
                ok &= np.all(draws[:, :, len(link_p) :] < q, axis=2)
            up = ok.sum(axis=1)
            per_trial += up
            pair_sum[pair_id] += float(up.sum())
        # pairwise merge of running mean / sum of squared deviations
        c_mean = float(per_trial.mean())
        c_m2 = float(np.square(per_trial - c_mean).sum())
        n = count_seen + size
        delta = c_mean - mean
        mean += delta * size / n
        m2 += c_m2 + delta * delta * count_seen * size / n
        count_seen = n

    var = m2 / (trials - 1) if trials > 1 else 0.0
    return McResult(
        trials, mean, math.sqrt(var / trials), {m: s / trials for m, s in pair_sum.items()}
    )
