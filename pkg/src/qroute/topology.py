"""Random network instances: uniform placement, Waxman switch links, nearest-switch user attachment."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import networkx as nx
import numpy as np

from .model import InvalidArgument, NetworkGraph, SwitchNode, UserNode

MAX_RETRIES = 200
DEGREE_TOLERANCE = 0.10


class GenerationFailed(RuntimeError):
    def __init__(self, seed: int, reason: str):
        super().__init__(f"topology generation failed for seed {seed}: {reason}")
        self.seed = seed


@dataclass
class TopologyConfig:
    area_side: float = 10_000.0
    num_switches: int = 50
    num_pairs: int = 20
    avg_degree: float = 10.0
    qubits_per_switch: int = 2
    swap_prob: float = 0.9
    single_link_target_prob: float = 1e-4
    edge_cutoff_factor: float = 5.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not self.area_side > 0:
            raise InvalidArgument("area_side must be positive")
        if self.num_switches < 1 or self.num_pairs < 1:
            raise InvalidArgument("num_switches and num_pairs must be positive")
        if not self.avg_degree > 0:
            raise InvalidArgument("avg_degree must be positive")
        if self.qubits_per_switch <= 0 or self.qubits_per_switch % 2:
            raise InvalidArgument("qubits_per_switch must be a positive even integer")
        if not 0.0 <= self.swap_prob <= 1.0:
            raise InvalidArgument("swap_prob must lie in [0, 1]")
        if not 0.0 < self.single_link_target_prob < 1.0:
            raise InvalidArgument("single_link_target_prob must lie in (0, 1)")
        if not self.edge_cutoff_factor > 0:
            raise InvalidArgument("edge_cutoff_factor must be positive")

    @property
    def edge_cutoff(self) -> float:
        """Longest admissible switch-switch link; also the Waxman decay scale."""
        return self.edge_cutoff_factor * self.area_side / math.sqrt(self.num_switches)

    @classmethod
    def from_dict(cls, data: dict) -> TopologyConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArgument(f"unknown topology keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def calibrate_alpha(target_prob: float, reference_length: float) -> float:
    """Attenuation constant under which a link of ``reference_length`` succeeds with ``target_prob``."""
    if not 0.0 < target_prob < 1.0:
        raise InvalidArgument(f"target probability must lie in (0, 1), got {target_prob}")
    if not reference_length > 0:
        raise InvalidArgument("reference length must be positive")
    return -math.log(target_prob) / reference_length


def _waxman_probs(dist: np.ndarray, cutoff: float, beta: float) -> np.ndarray:
    probs = np.minimum(1.0, beta * np.exp(-dist / cutoff))
    probs[dist > cutoff] = 0.0
    return probs


def _tune_beta(dist: np.ndarray, cutoff: float, n: int, target_degree: float) -> float:
    # expected mean degree = 2 * sum(p) / n, monotone in beta
    def mean_degree(beta: float) -> float:
        return 2.0 * _waxman_probs(dist, cutoff, beta).sum() / n

    lo, hi = 0.0, 1.0
    while mean_degree(hi) < target_degree and hi < 1e12:
        lo, hi = hi, hi * 2.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mean_degree(mid) < target_degree:
            lo = mid
        else:
            hi = mid
    return hi


def generate_topology(config: TopologyConfig) -> NetworkGraph:
    """Build a random instance; identical configs give identical graphs."""
    n, m = config.num_switches, config.num_pairs
    side = config.area_side
    cutoff = config.edge_cutoff
    rng = np.random.default_rng(config.rng_seed)
    iu = np.triu_indices(n, k=1)

    for _ in range(MAX_RETRIES):
        pos = rng.uniform(0.0, side, size=(n, 2))
        diff = pos[iu[0]] - pos[iu[1]]
        dist = np.hypot(diff[:, 0], diff[:, 1])
        beta = _tune_beta(dist, cutoff, n, config.avg_degree)
        probs = _waxman_probs(dist, cutoff, beta)
        chosen = rng.random(probs.shape) < probs
        upos = rng.uniform(0.0, side, size=(2 * m, 2))

        realized = 2.0 * chosen.sum() / n
        if abs(realized - config.avg_degree) > DEGREE_TOLERANCE * config.avg_degree:
            continue
        g = nx.Graph()
        g.add_nodes_from(range(n))
        g.add_edges_from(zip(iu[0][chosen], iu[1][chosen]))
        if not nx.is_connected(g):
            continue
        return _assemble(config, pos, upos, iu, chosen, dist)

    raise GenerationFailed(
        config.rng_seed, f"no connected graph near degree {config.avg_degree} in {MAX_RETRIES} draws"
    )


def _assemble(config, pos, upos, iu, chosen, dist) -> NetworkGraph:
    n = len(pos)
    width = len(str(max(n, 2 * config.num_pairs) - 1))
    sid = [f"s{i:0{width}d}" for i in range(n)]
    uid = [f"u{i:0{width}d}" for i in range(len(upos))]
    switches = [
        SwitchNode(sid[i], float(pos[i, 0]), float(pos[i, 1]), config.qubits_per_switch)
        for i in range(n)
    ]
    users = [UserNode(uid[i], float(upos[i, 0]), float(upos[i, 1])) for i in range(len(upos))]
    links = [
        (sid[a], sid[b], float(d))
        for a, b, d in zip(iu[0][chosen], iu[1][chosen], dist[chosen])
    ]
    for i, (ux, uy) in enumerate(upos):
        d = np.hypot(pos[:, 0] - ux, pos[:, 1] - uy)
        j = int(np.argmin(d))
        # a user sitting exactly on a switch still needs a positive-length link
        links.append((uid[i], sid[j], max(float(d[j]), 1e-9)))

    alpha = calibrate_alpha(config.single_link_target_prob, config.edge_cutoff)
    graph = NetworkGraph(switches, users, links, alpha, config.swap_prob)
    for k in range(config.num_pairs):
        graph.add_pair(uid[2 * k], uid[2 * k + 1])
    return graph


def mean_switch_degree(graph: NetworkGraph) -> float:
    deg = sum(
        1 for link in graph.links.values() if link.a in graph.switches and link.b in graph.switches
    )
    return 2.0 * deg / len(graph.switches)
