import math

import numpy as np
import pytest

from qroute.model import NetworkGraph, SwitchNode, UserNode
from qroute.topology import GenerationFailed, TopologyConfig, generate_topology


def build_graph(switches, users, links, swap_prob=0.9, pairs=()):
    """Hand-made graph with alpha = 1, so a link of probability p has length -ln p.

    ``switches``: {id: qubits}; ``users``: ids; ``links``: (a, b, p) triples.
    """
    g = NetworkGraph(
        [SwitchNode(s, 0.0, 0.0, q) for s, q in switches.items()],
        [UserNode(u, 0.0, 0.0) for u in users],
        [(a, b, -math.log(p) if p < 1 else 1e-12) for a, b, p in links],
        alpha=1.0,
        swap_prob=swap_prob,
    )
    for s, d in pairs:
        g.add_pair(s, d)
    return g


@pytest.fixture
def star_graph():
    """Two pairs whose only paths share one switch with room for one channel."""
    return build_graph(
        {"c": 2},
        ["u0", "u1", "u2", "u3"],
        [("u0", "c", 0.5), ("u1", "c", 0.5), ("u2", "c", 0.6), ("u3", "c", 0.6)],
        pairs=[("u0", "u1"), ("u2", "u3")],
    )


@pytest.fixture
def disjoint_graph():
    return build_graph(
        {"a": 2, "b": 2},
        ["u0", "u1", "u2", "u3"],
        [("u0", "a", 0.5), ("u1", "a", 0.5), ("u2", "b", 0.5), ("u3", "b", 0.5)],
        pairs=[("u0", "u1"), ("u2", "u3")],
    )


def small_instances(count, seed, *, max_switches=10, max_pairs=4, qubits=(2, 4),
                    target_prob=0.3, max_catalog=12):
    """Random small generated instances whose catalogs stay within ``max_catalog`` paths."""
    from qroute.paths import selective_paths

    rng = np.random.default_rng(seed)
    out = []
    s = seed * 100_000
    while len(out) < count:
        s += 1
        cfg = TopologyConfig(
            num_switches=int(rng.integers(4, max_switches + 1)),
            num_pairs=int(rng.integers(2, max_pairs + 1)),
            avg_degree=float(rng.uniform(2.5, 4.0)),
            qubits_per_switch=int(rng.choice(qubits)),
            single_link_target_prob=target_prob,
            rng_seed=s,
        )
        try:
            g = generate_topology(cfg)
        except GenerationFailed:
            continue
        cat = selective_paths(g)
        if len(cat) > max_catalog:
            continue
        out.append((cfg, g, cat))
    return out


def step2_decision_space_optimum(plan, graph):
    """Best value reachable from the floor commitment by adding at most one channel on each
    path with a leftover fraction: the space the exhaustive search is supposed to cover."""
    import itertools

    from qroute.step2 import RESIDUE_TOL

    floor = plan.floor_channels
    free = graph.residual_channels()
    for p, c in floor.items():
        for s in p.switches:
            free[s] -= c
    base = math.fsum(c * p.success_prob for p, c in floor.items())
    open_paths = [p for p, r in plan.residues.items() if r > RESIDUE_TOL]
    best = base
    for pick in itertools.product((0, 1), repeat=len(open_paths)):
        used: dict[str, int] = {}
        for p, b in zip(open_paths, pick):
            for s in p.switches if b else ():
                used[s] = used.get(s, 0) + 1
        if all(free[s] >= n for s, n in used.items()):
            best = max(best, base + math.fsum(p.success_prob for p, b in zip(open_paths, pick) if b))
    return best


def outside_decision_space(plan, oracle_channels):
    """Paths where the oracle's channel count cannot be produced by floor-plus-one rounding."""
    from qroute.step2 import RESIDUE_TOL

    out = []
    for p, c in oracle_channels.items():
        lo = plan.floor_channels.get(p, 0)
        hi = lo + (1 if plan.residues.get(p, 0.0) > RESIDUE_TOL else 0)
        if not lo <= c <= hi:
            out.append(p)
    return out
