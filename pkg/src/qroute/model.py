"""Network model: switches, links, user pairs, paths and the expected-throughput metric."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

PROB_TOL = 1e-12

NodeId = str


class InvalidArgument(ValueError):
    pass


class InvalidPath(ValueError):
    pass


class CapacityExceeded(RuntimeError):
    def __init__(self, switch: NodeId, needed: int, available: int):
        super().__init__(
            f"switch {switch!r} needs {needed} qubits but only {available} are free"
        )
        self.switch = switch
        self.needed = needed
        self.available = available


def link_success_prob(length: float, alpha: float) -> float:
    """Per-attempt entanglement success over a fiber of the given length: exp(-alpha*length)."""
    if not length > 0:
        raise InvalidArgument(f"link length must be positive, got {length}")
    if not alpha > 0:
        raise InvalidArgument(f"alpha must be positive, got {alpha}")
    return math.exp(-alpha * length)


@dataclass
class SwitchNode:
    id: NodeId
    x: float
    y: float
    qubit_capacity: int
    reserved_qubits: int = 0

    def __post_init__(self) -> None:
        if self.qubit_capacity < 0 or self.qubit_capacity % 2:
            raise InvalidArgument(
                f"switch {self.id!r}: qubit capacity must be a non-negative even integer"
            )
        if self.reserved_qubits < 0 or self.reserved_qubits % 2:
            raise InvalidArgument(f"switch {self.id!r}: reserved qubits must be even")
        if self.reserved_qubits > self.qubit_capacity:
            raise InvalidArgument(f"switch {self.id!r}: reserved exceeds capacity")

    @property
    def residual_qubits(self) -> int:
        return self.qubit_capacity - self.reserved_qubits


@dataclass(frozen=True)
class UserNode:
    id: NodeId
    x: float
    y: float


@dataclass(frozen=True)
class QuantumLink:
    a: NodeId
    b: NodeId
    length: float
    success_prob: float

    @property
    def endpoints(self) -> frozenset[NodeId]:
        return frozenset((self.a, self.b))


@dataclass(frozen=True)
class UserPair:
    pair_id: int
    source: NodeId
    destination: NodeId


@dataclass(frozen=True)
class RoutePath:
    pair_id: int
    nodes: tuple[NodeId, ...]
    total_length: float
    success_prob: float

    @property
    def hop_count(self) -> int:
        return len(self.nodes) - 1

    @property
    def switches(self) -> tuple[NodeId, ...]:
        """Intermediate nodes; these are the ones that spend qubits on a channel."""
        return self.nodes[1:-1]

    def sort_key(self) -> tuple:
        return (self.hop_count, self.total_length, self.nodes)


class NetworkGraph:
    """Undirected switch/user graph with per-switch qubit capacity and a reservation ledger.

    Topology is fixed after construction; only ``reserved_qubits`` on switches changes,
    through :meth:`reserve_path`. Use :meth:`copy` to get an independent ledger.
    """

    def __init__(
        self,
        switches: Iterable[SwitchNode],
        users: Iterable[UserNode],
        links: Iterable[tuple[NodeId, NodeId, float]],
        alpha: float,
        swap_prob: float,
        pairs: Iterable[UserPair] = (),
    ):
        if not alpha > 0:
            raise InvalidArgument("alpha must be positive")
        if not 0.0 <= swap_prob <= 1.0:
            raise InvalidArgument("swap_prob must lie in [0, 1]")
        self.alpha = float(alpha)
        self.swap_prob = float(swap_prob)
        self.switches: dict[NodeId, SwitchNode] = {}
        self.users: dict[NodeId, UserNode] = {}
        for s in switches:
            if s.id in self.switches:
                raise InvalidArgument(f"duplicate node id {s.id!r}")
            self.switches[s.id] = s
        for u in users:
            if u.id in self.switches or u.id in self.users:
                raise InvalidArgument(f"duplicate node id {u.id!r}")
            self.users[u.id] = u

        self.links: dict[frozenset[NodeId], QuantumLink] = {}
        self._adj: dict[NodeId, dict[NodeId, QuantumLink]] = {
            n: {} for n in (*self.switches, *self.users)
        }
        for a, b, length in links:
            self._add_link(a, b, float(length))

        self.pairs: list[UserPair] = []
        for pair in pairs:
            self.add_pair(pair.source, pair.destination)

    def _add_link(self, a: NodeId, b: NodeId, length: float) -> None:
        if a == b:
            raise InvalidArgument(f"self-loop on {a!r}")
        for n in (a, b):
            if n not in self._adj:
                raise InvalidArgument(f"link references unknown node {n!r}")
        if a in self.users and b in self.users:
            raise InvalidArgument(f"user nodes {a!r} and {b!r} cannot be linked directly")
        key = frozenset((a, b))
        # parallel cables between the same pair add nothing; keep the first
        if key in self.links:
            return
        link = QuantumLink(a, b, length, link_success_prob(length, self.alpha))
        self.links[key] = link
        self._adj[a][b] = link
        self._adj[b][a] = link

    def add_pair(self, source: NodeId, destination: NodeId) -> UserPair:
        if source == destination:
            raise InvalidArgument("pair source and destination must differ")
        for n in (source, destination):
            if n not in self.users:
                raise InvalidArgument(f"pair endpoint {n!r} is not a user node")
        pair = UserPair(len(self.pairs), source, destination)
        self.pairs.append(pair)
        return pair

    # -- queries ---------------------------------------------------------

    @property
    def nodes(self) -> list[NodeId]:
        return list(self._adj)

    def has_node(self, node: NodeId) -> bool:
        return node in self._adj

    def neighbors(self, node: NodeId) -> dict[NodeId, QuantumLink]:
        return self._adj[node]

    def link(self, a: NodeId, b: NodeId) -> QuantumLink:
        try:
            return self._adj[a][b]
        except KeyError:
            raise InvalidPath(f"no link between {a!r} and {b!r}") from None

    def is_switch(self, node: NodeId) -> bool:
        return node in self.switches

    def residual_qubits(self, node: NodeId) -> int:
        return self.switches[node].residual_qubits

    def residual_channels(self) -> dict[NodeId, int]:
        """Free channels per switch; one channel takes two qubits at each switch it crosses."""
        return {sid: s.residual_qubits // 2 for sid, s in self.switches.items()}

    def capacity_channels(self) -> dict[NodeId, int]:
        return {sid: s.qubit_capacity // 2 for sid, s in self.switches.items()}

    def make_path(self, pair_id: int, nodes: Sequence[NodeId]) -> RoutePath:
        nodes = tuple(nodes)
        if len(nodes) < 2:
            raise InvalidPath("a path needs at least two nodes")
        if len(set(nodes)) != len(nodes):
            raise InvalidPath(f"path {nodes} repeats a node")
        length = 0.0
        for a, b in zip(nodes, nodes[1:]):
            length += self.link(a, b).length
        return RoutePath(pair_id, nodes, length, path_success_prob(nodes, self))

    def copy(self) -> NetworkGraph:
        clone = NetworkGraph.__new__(NetworkGraph)
        clone.alpha = self.alpha
        clone.swap_prob = self.swap_prob
        clone.switches = {
            k: SwitchNode(s.id, s.x, s.y, s.qubit_capacity, s.reserved_qubits)
            for k, s in self.switches.items()
        }
        clone.users = dict(self.users)
        clone.links = dict(self.links)
        clone._adj = {n: dict(nb) for n, nb in self._adj.items()}
        clone.pairs = list(self.pairs)
        return clone

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "swap_prob": self.swap_prob,
            "switches": [
                {"id": s.id, "x": s.x, "y": s.y, "qubits": s.qubit_capacity}
                for s in self.switches.values()
            ],
            "users": [{"id": u.id, "x": u.x, "y": u.y} for u in self.users.values()],
            "links": [
                {"a": link.a, "b": link.b, "length": link.length}
                for link in self.links.values()
            ],
            "pairs": [{"source": p.source, "destination": p.destination} for p in self.pairs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> NetworkGraph:
        switches = [
            SwitchNode(str(s["id"]), float(s["x"]), float(s["y"]), int(s["qubits"]))
            for s in data["switches"]
        ]
        users = [UserNode(str(u["id"]), float(u["x"]), float(u["y"])) for u in data["users"]]
        links = [(str(e["a"]), str(e["b"]), float(e["length"])) for e in data["links"]]
        graph = cls(switches, users, links, float(data["alpha"]), float(data["swap_prob"]))
        for p in data.get("pairs", []):
            graph.add_pair(str(p["source"]), str(p["destination"]))
        return graph

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> NetworkGraph:
        return cls.from_dict(json.loads(Path(path).read_text()))


def path_success_prob(path_nodes: Sequence[NodeId], graph: NetworkGraph) -> float:
    """Probability one channel along the path comes up: product of link probs times q^(hops-1)."""
    if len(path_nodes) < 2:
        raise InvalidPath("a path needs at least two nodes")
    if len(set(path_nodes)) != len(path_nodes):
        raise InvalidPath(f"path {tuple(path_nodes)} repeats a node")
    prob = 1.0
    for a, b in zip(path_nodes, path_nodes[1:]):
        prob *= graph.link(a, b).success_prob
    return prob * graph.swap_prob ** (len(path_nodes) - 2)


def expected_throughput(path: RoutePath, assigned_qubits: int) -> float:
    """Expected ebits per slot when every switch on ``path`` dedicates ``assigned_qubits`` qubits."""
    if assigned_qubits < 0 or assigned_qubits % 2:
        raise InvalidArgument("assigned qubits must be a non-negative even integer")
    return (assigned_qubits // 2) * path.success_prob


def reserve_path(graph: NetworkGraph, path: RoutePath, channels: int) -> dict[NodeId, int]:
    """Reserve ``channels`` channels along ``path``; returns the new residual qubits per switch touched.

    Either every switch is charged or none is.
    """
    if channels <= 0:
        raise InvalidArgument("channels must be positive")
    need = 2 * channels
    touched = [n for n in path.switches if n in graph.switches]
    for n in touched:
        free = graph.switches[n].residual_qubits
        if free < need:
            raise CapacityExceeded(n, need, free)
    for n in touched:
        graph.switches[n].reserved_qubits += need
    return {n: graph.switches[n].residual_qubits for n in touched}


@dataclass
class ChannelAssignment:
    """A path and how many parallel channels it carries."""

    path: RoutePath
    channels: int

    def to_dict(self) -> dict:
        return {
            "pair_id": self.path.pair_id,
            "path": list(self.path.nodes),
            "channels": self.channels,
        }


@dataclass
class CapacityReport:
    ok: bool
    violations: list[str] = field(default_factory=list)


def check_capacity(
    graph: NetworkGraph, assignments: Iterable[ChannelAssignment], *, residual: bool = False
) -> CapacityReport:
    """Validate that a set of channel assignments fits the switches' qubit budgets.

    Budgets are total capacities unless ``residual`` is set, in which case the graph's
    current reservations are subtracted first.
    """
    used: dict[NodeId, int] = {}
    violations = []
    for a in assignments:
        if a.channels < 0:
            violations.append(f"negative channel count on {a.path.nodes}")
            continue
        for x, y in zip(a.path.nodes, a.path.nodes[1:]):
            if y not in graph.neighbors(x):
                violations.append(f"path {a.path.nodes} uses missing link {x}-{y}")
        for n in a.path.switches:
            if n not in graph.switches:
                violations.append(f"path {a.path.nodes} relays through non-switch {n!r}")
                continue
            used[n] = used.get(n, 0) + 2 * a.channels
    for n, q in sorted(used.items()):
        s = graph.switches[n]
        budget = s.residual_qubits if residual else s.qubit_capacity
        if q > budget:
            violations.append(f"switch {n!r} uses {q} qubits of {budget}")
    return CapacityReport(not violations, violations)


def plan_throughput(assignments: Iterable[ChannelAssignment]) -> float:
    return sum(a.channels * a.path.success_prob for a in assignments)
