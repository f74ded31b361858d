"""Yen's loopless K-shortest paths and the per-pair candidate catalog."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

from .model import InvalidArgument, NetworkGraph, NodeId, RoutePath, UserPair

# Path cost is (hop count, physical length); node sequence breaks exact ties.
Cost = tuple[int, float]


def _dijkstra(
    graph: NetworkGraph,
    source: NodeId,
    target: NodeId,
    banned_nodes: set[NodeId],
    banned_edges: set[frozenset[NodeId]],
) -> tuple[Cost, list[NodeId]] | None:
    best: dict[NodeId, tuple] = {source: (0, 0.0, (source,))}
    heap = [(0, 0.0, (source,))]
    done: set[NodeId] = set()
    while heap:
        hops, length, nodes = heapq.heappop(heap)
        node = nodes[-1]
        if node in done:
            continue
        done.add(node)
        if node == target:
            return (hops, length), list(nodes)
        # users terminate paths; they never relay
        if node != source and not graph.is_switch(node):
            continue
        for nb, link in sorted(graph.neighbors(node).items()):
            if nb in done or nb in banned_nodes:
                continue
            if frozenset((node, nb)) in banned_edges:
                continue
            if nb != target and not graph.is_switch(nb):
                continue
            cand = (hops + 1, length + link.length, nodes + (nb,))
            if nb not in best or cand < best[nb]:
                best[nb] = cand
                heapq.heappush(heap, cand)
    return None


def _cost(graph: NetworkGraph, nodes: list[NodeId]) -> Cost:
    return len(nodes) - 1, sum(graph.link(a, b).length for a, b in zip(nodes, nodes[1:]))


def yen_k_shortest(
    graph: NetworkGraph, source: NodeId, destination: NodeId, k: int, pair_id: int = -1
) -> list[RoutePath]:
    """Up to ``k`` loopless paths ordered by (hops, length, node sequence).

    Paths may only relay through switches. Exact cost ties at the k-th position are
    resolved by node sequence, so the result is the true first-k under that order.
    """
    if k < 1:
        raise InvalidArgument("k must be positive")
    if source == destination:
        raise InvalidArgument("source and destination must differ")
    for n in (source, destination):
        if not graph.has_node(n):
            raise InvalidArgument(f"unknown node {n!r}")

    first = _dijkstra(graph, source, destination, set(), set())
    if first is None:
        return []
    accepted: list[tuple[Cost, tuple[NodeId, ...]]] = [(first[0], tuple(first[1]))]
    seen = {accepted[0][1]}
    candidates: list[tuple[int, float, tuple[NodeId, ...]]] = []

    while True:
        last = accepted[-1][1]
        for i in range(len(last) - 1):
            spur, root = last[i], last[: i + 1]
            banned_edges = {
                frozenset((p[i], p[i + 1]))
                for _, p in accepted
                if len(p) > i + 1 and p[: i + 1] == root
            }
            banned_nodes = set(root[:-1])
            found = _dijkstra(graph, spur, destination, banned_nodes, banned_edges)
            if found is None:
                continue
            nodes = root[:-1] + tuple(found[1])
            if nodes in seen:
                continue
            seen.add(nodes)
            hops, length = _cost(graph, list(nodes))
            heapq.heappush(candidates, (hops, length, nodes))
        if not candidates:
            break
        if len(accepted) >= k and candidates[0][:2] > accepted[k - 1][0]:
            break
        hops, length, nodes = heapq.heappop(candidates)
        accepted.append(((hops, length), nodes))

    accepted.sort(key=lambda item: (item[0], item[1]))
    return [graph.make_path(pair_id, nodes) for _, nodes in accepted[:k]]


def all_simple_paths(graph: NetworkGraph, source: NodeId, destination: NodeId) -> list[tuple]:
    """Exhaustive DFS enumeration (relaying only through switches), sorted by path order."""
    out: list[tuple] = []
    stack = [(source, (source,))]
    while stack:
        node, nodes = stack.pop()
        for nb in graph.neighbors(node):
            if nb in nodes:
                continue
            if nb == destination:
                out.append(nodes + (nb,))
            elif graph.is_switch(nb):
                stack.append((nb, nodes + (nb,)))
    keyed = [(_cost(graph, list(p)), p) for p in out]
    keyed.sort()
    return [p for _, p in keyed]


@dataclass
class PathSetCatalog:
    per_pair: dict[int, list[RoutePath]]
    unreachable: list[int] = field(default_factory=list)

    @property
    def all_paths(self) -> list[RoutePath]:
        return [p for m in sorted(self.per_pair) for p in self.per_pair[m]]

    def __len__(self) -> int:
        return sum(len(v) for v in self.per_pair.values())

    def restricted(self, pair_ids) -> PathSetCatalog:
        keep = set(pair_ids)
        return PathSetCatalog(
            {m: list(v) for m, v in self.per_pair.items() if m in keep},
            [m for m in self.unreachable if m in keep],
        )

    def to_dict(self) -> dict:
        return {str(m): [list(p.nodes) for p in paths] for m, paths in sorted(self.per_pair.items())}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict, graph: NetworkGraph) -> PathSetCatalog:
        per_pair = {
            int(m): [graph.make_path(int(m), nodes) for nodes in seqs] for m, seqs in data.items()
        }
        return cls(per_pair, [m for m, v in sorted(per_pair.items()) if not v])


def selective_paths(
    graph: NetworkGraph, pairs: list[UserPair] | None = None, per_pair_limit: int | None = None
) -> PathSetCatalog:
    """Candidate path catalog: each pair keeps its M shortest paths, M = number of pairs.

    The global pool of M^2 shortest paths per pair, truncated to the M^2 globally
    shortest, always contains each pair's own shortest-first prefix; after trimming
    every pair to M and refilling from its own list, what survives is exactly each
    pair's first M paths. Asking Yen for M paths directly gives the same catalog.
    """
    pairs = graph.pairs if pairs is None else pairs
    if not pairs:
        raise InvalidArgument("at least one user pair is required")
    limit = len(pairs) if per_pair_limit is None else per_pair_limit
    per_pair: dict[int, list[RoutePath]] = {}
    unreachable = []
    for pair in pairs:
        paths = yen_k_shortest(graph, pair.source, pair.destination, limit, pair.pair_id)
        per_pair[pair.pair_id] = paths
        if not paths:
            unreachable.append(pair.pair_id)
    return PathSetCatalog(per_pair, unreachable)
