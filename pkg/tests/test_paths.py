import json
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qroute.model import InvalidArgument
from qroute.paths import PathSetCatalog, all_simple_paths, selective_paths, yen_k_shortest
from qroute.topology import TopologyConfig, generate_topology

from conftest import build_graph


def random_graph(rng, n_switches, n_users=2, density=0.45):
    switches = {f"s{i}": 2 for i in range(n_switches)}
    users = [f"u{i}" for i in range(n_users)]
    links = []
    for i in range(n_switches):
        for j in range(i + 1, n_switches):
            if rng.random() < density:
                links.append((f"s{i}", f"s{j}", rng.uniform(0.05, 0.99)))
    for u in users:
        for s in rng.sample(sorted(switches), rng.randint(1, 2)):
            links.append((u, s, rng.uniform(0.05, 0.99)))
    return build_graph(switches, users, links)


def networkx_paths(g, src, dst):
    """Independent enumeration: networkx simple paths on the graph without other users."""
    h = nx.Graph()
    for link in g.links.values():
        h.add_edge(link.a, link.b, length=link.length)
    h.remove_nodes_from([u for u in g.users if u not in (src, dst)])
    if src not in h or dst not in h:
        return []
    found = []
    for p in nx.all_simple_paths(h, src, dst):
        length = sum(h[a][b]["length"] for a, b in zip(p, p[1:]))
        found.append(((len(p) - 1, length), tuple(p)))
    found.sort()
    return [p for _, p in found]


class TestYen:
    def test_triangle(self):
        g = build_graph({"s": 2, "a": 2, "d": 2}, [], [("s", "d", 0.5), ("s", "a", 0.9), ("a", "d", 0.9)])
        paths = yen_k_shortest(g, "s", "d", 2)
        assert [p.nodes for p in paths] == [("s", "d"), ("s", "a", "d")]

    def test_k1_is_bfs_shortest(self):
        rng = random.Random(4)
        for _ in range(30):
            g = random_graph(rng, 7)
            h = nx.Graph([(l.a, l.b) for l in g.links.values()])
            h.remove_nodes_from([u for u in g.users if u not in ("u0", "u1")])
            got = yen_k_shortest(g, "u0", "u1", 1)
            if not nx.has_path(h, "u0", "u1"):
                assert got == []
                continue
            assert got[0].hop_count == nx.shortest_path_length(h, "u0", "u1")

    def test_disconnected(self):
        g = build_graph({"a": 2, "b": 2}, ["s", "d"], [("s", "a", 0.5), ("d", "b", 0.5)])
        assert yen_k_shortest(g, "s", "d", 3) == []

    def test_users_never_relay(self):
        g = build_graph({"a": 2, "b": 2}, ["s", "d", "x"],
                        [("s", "a", 0.5), ("a", "x", 0.5), ("x", "b", 0.5), ("b", "d", 0.5)])
        assert yen_k_shortest(g, "s", "d", 5) == []

    @pytest.mark.parametrize("args", [("u0", "u0", 1), ("u0", "u1", 0), ("u0", "zz", 1)])
    def test_invalid(self, args):
        g = build_graph({"a": 2}, ["u0", "u1"], [("u0", "a", 0.5), ("a", "u1", 0.5)])
        with pytest.raises(InvalidArgument):
            yen_k_shortest(g, *args)

    def test_order_breaks_ties_by_length(self):
        g = build_graph({"a": 2, "b": 2}, ["s", "d"],
                        [("s", "a", 0.5), ("a", "d", 0.5), ("s", "b", 0.9), ("b", "d", 0.9)])
        assert [p.nodes for p in yen_k_shortest(g, "s", "d", 2)] == [("s", "b", "d"), ("s", "a", "d")]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31), st.integers(2, 8))
    def test_full_k_matches_enumeration(self, seed, n):
        g = random_graph(random.Random(seed), n)
        expected = networkx_paths(g, "u0", "u1")
        assert all_simple_paths(g, "u0", "u1") == expected
        if expected:
            got = yen_k_shortest(g, "u0", "u1", len(expected) + 3)
            assert [p.nodes for p in got] == expected

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31), st.integers(1, 12))
    def test_prefix_of_enumeration(self, seed, k):
        g = random_graph(random.Random(seed), 7)
        expected = networkx_paths(g, "u0", "u1")
        got = yen_k_shortest(g, "u0", "u1", k)
        assert [p.nodes for p in got] == expected[:k]
        keys = [(p.hop_count, p.total_length) for p in got]
        assert keys == sorted(keys)


class TestCatalog:
    def test_single_pair_unique_path(self):
        g = build_graph({"a": 2}, ["u0", "u1"], [("u0", "a", 0.5), ("a", "u1", 0.5)], pairs=[("u0", "u1")])
        cat = selective_paths(g)
        assert [p.nodes for p in cat.all_paths] == [("u0", "a", "u1")]

    def test_two_pairs_keep_two_each(self):
        g = build_graph(
            {k: 2 for k in "abcdefg"},
            ["u0", "u1", "u2", "u3"],
            [("u0", "a", 0.9), ("a", "u1", 0.9),
             ("u0", "b", 0.9), ("b", "c", 0.9), ("c", "u1", 0.9),
             ("u0", "d", 0.9), ("d", "e", 0.9), ("e", "f", 0.9), ("f", "u1", 0.9),
             ("u2", "g", 0.9), ("g", "u3", 0.9)],
            pairs=[("u0", "u1"), ("u2", "u3")],
        )
        cat = selective_paths(g)
        assert [p.hop_count for p in cat.per_pair[0]] == [2, 3]
        assert [p.nodes for p in cat.per_pair[1]] == [("u2", "g", "u3")]

    def test_unreachable_pair_recorded(self):
        g = build_graph({"a": 2, "b": 2}, ["u0", "u1", "u2", "u3"],
                        [("u0", "a", 0.5), ("a", "u1", 0.5), ("u2", "b", 0.5), ("u3", "a", 0.5)],
                        pairs=[("u0", "u1"), ("u2", "u3")])
        cat = selective_paths(g)
        assert cat.unreachable == [1] and cat.per_pair[1] == []

    @pytest.mark.parametrize("seed", range(20))
    def test_size_and_fairness(self, seed):
        g = generate_topology(TopologyConfig(num_switches=10, num_pairs=4, avg_degree=4, rng_seed=seed))
        cat = selective_paths(g)
        m = len(g.pairs)
        assert len(cat) <= m * m
        for pair in g.pairs:
            got = cat.per_pair[pair.pair_id]
            assert len(got) <= m
            assert len(set(p.nodes for p in got)) == len(got)
            for p in got:
                assert (p.nodes[0], p.nodes[-1]) == (pair.source, pair.destination)
                assert g.make_path(pair.pair_id, p.nodes) == p
            shortest = yen_k_shortest(g, pair.source, pair.destination, 1, pair.pair_id)
            assert got[:1] == shortest
            keys = [(p.hop_count, p.total_length) for p in got]
            assert keys == sorted(keys)

    def test_json_round_trip(self):
        g = generate_topology(TopologyConfig(num_switches=10, num_pairs=3, avg_degree=4, rng_seed=1))
        cat = selective_paths(g)
        back = PathSetCatalog.from_dict(json.loads(cat.to_json()), g)
        assert back.all_paths == cat.all_paths

    def test_no_pairs(self):
        g = build_graph({"a": 2}, ["u0"], [("u0", "a", 0.5)])
        with pytest.raises(InvalidArgument):
            selective_paths(g)
