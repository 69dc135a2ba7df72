"""Per-device route computation.

Three route sources are modeled:

  * a link-state IGP: per-router shortest path tree over link costs
    (Dijkstra), metric = sum of costs,
  * a distance-vector IGP: Bellman-Ford iteration with split horizon,
    converging to the same metrics on static graphs,
  * an inter-area path vector: iterative advertisement between peers,
    prepending the sender's AS only when the session crosses an AS
    boundary, rejecting any path already containing the receiver's AS.

Selected entries from all sources are merged into a RIB per device by
administrative distance: connected 0, static 1, path-vector external 20,
distance-vector 90, link-state 110, path-vector internal 200. Lookups are
longest-prefix-match over the per-prefix best entries.
"""

import heapq
from dataclasses import dataclass, field
from typing import Optional

from .addressing import NetAddress, Prefix
from .errors import DisconnectedArea, NonConvergence, ValidationError

AD_CONNECTED = 0
AD_STATIC = 1
AD_BGP_EXTERNAL = 20
AD_EIGRP = 90
AD_OSPF = 110
AD_BGP_INTERNAL = 200

SOURCES = ("connected", "static", "eigrp_like", "ospf_like", "bgp_like")

PRIVATE_AS_MIN = 64512
PRIVATE_AS_MAX = 65535


@dataclass(frozen=True)
class AsNumber:
    value: int

    def __post_init__(self):
        if not (PRIVATE_AS_MIN <= self.value <= PRIVATE_AS_MAX):
            raise ValidationError(
                f"AS number {self.value} outside private range "
                f"[{PRIVATE_AS_MIN}, {PRIVATE_AS_MAX}]")

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class RouteEntry:
    prefix: Prefix
    source: str
    metric: int
    admin_distance: int
    next_hop: Optional[tuple[str, str]] = None  # (neighbor node, neighbor iface)
    next_hop_addr: Optional[NetAddress] = None
    egress_iface: Optional[str] = None  # local iface for connected routes
    as_path: tuple[int, ...] = ()

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValidationError(f"unknown route source {self.source!r}")
        if self.metric < 0:
            raise ValidationError("metric must be non-negative")
        if len(set(self.as_path)) != len(self.as_path):
            raise ValidationError(f"as_path contains a loop: {self.as_path}")

    def preference_key(self):
        addr = self.next_hop_addr.value if self.next_hop_addr is not None else -1
        return (self.admin_distance, self.metric, addr)

    def describe(self) -> str:
        via = str(self.next_hop_addr) if self.next_hop_addr else "directly connected"
        path = f" path {list(self.as_path)}" if self.as_path else ""
        return (f"{self.prefix} [{self.admin_distance}/{self.metric}] "
                f"via {via} ({self.source}){path}")


class Rib:
    """Best route per prefix, longest-prefix-match lookup."""

    def __init__(self, owner: str):
        self.owner = owner
        self._entries: dict[Prefix, RouteEntry] = {}

    def install(self, entry: RouteEntry) -> bool:
        current = self._entries.get(entry.prefix)
        if current is None or entry.preference_key() < current.preference_key():
            self._entries[entry.prefix] = entry
            return True
        return False

    def lookup(self, addr: NetAddress) -> Optional[RouteEntry]:
        best = None
        for prefix, entry in self._entries.items():
            if prefix.contains(addr):
                if best is None or prefix.length > best.prefix.length:
                    best = entry
        return best

    def entry_for(self, prefix: Prefix) -> Optional[RouteEntry]:
        return self._entries.get(prefix)

    def sorted_entries(self) -> list[RouteEntry]:
        return sorted(self._entries.values(),
                      key=lambda e: (e.prefix.base.value, e.prefix.length))

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self.sorted_entries())


def merge_rib(owner: str, *entry_groups: list[RouteEntry]) -> Rib:
    """Merge route sources into one RIB; lowest admin distance wins,
    then lowest metric, then lowest next-hop address. Order-independent."""
    rib = Rib(owner)
    all_entries = [e for group in entry_groups for e in group]
    for entry in sorted(all_entries, key=lambda e: (e.prefix.base.value,
                                                    e.prefix.length,
                                                    e.preference_key())):
        rib.install(entry)
    return rib


# --- IGP graphs ----------------------------------------------------------------


@dataclass(frozen=True)
class Adjacency:
    """Directed view of one router-to-router adjacency."""

    u: str
    v: str
    cost: int
    v_iface: str
    v_addr: NetAddress


@dataclass
class AreaGraph:
    name: str
    routers: list[str] = field(default_factory=list)
    adjacencies: list[Adjacency] = field(default_factory=list)
    # prefixes each router injects, with the stub cost added on top of the path
    origins: dict[str, list[tuple[Prefix, int]]] = field(default_factory=dict)

    def add_router(self, router: str):
        if router not in self.routers:
            self.routers.append(router)

    def connect(self, u: str, u_iface: str, u_addr: NetAddress,
                v: str, v_iface: str, v_addr: NetAddress, cost: int = 1):
        self.add_router(u)
        self.add_router(v)
        self.adjacencies.append(Adjacency(u, v, cost, v_iface, v_addr))
        self.adjacencies.append(Adjacency(v, u, cost, u_iface, u_addr))

    def add_origin(self, router: str, prefix: Prefix, stub_cost: int = 0):
        self.add_router(router)
        self.origins.setdefault(router, []).append((prefix, stub_cost))

    def neighbors(self, u: str) -> list[Adjacency]:
        out = [a for a in self.adjacencies if a.u == u]
        out.sort(key=lambda a: (a.cost, a.v, a.v_iface))
        return out


def _check_connected(graph: AreaGraph):
    if len(graph.routers) <= 1:
        return
    seen = {graph.routers[0]}
    frontier = [graph.routers[0]]
    while frontier:
        u = frontier.pop()
        for adj in graph.neighbors(u):
            if adj.v not in seen:
                seen.add(adj.v)
                frontier.append(adj.v)
    unreachable = [r for r in graph.routers if r not in seen]
    if unreachable:
        raise DisconnectedArea(graph.name, unreachable)


def _entries_from_distances(graph: AreaGraph, source: str, admin_distance: int,
                            dist: dict[str, dict[str, int]],
                            first_hop: dict[str, dict[str, Adjacency]],
                            ) -> dict[str, list[RouteEntry]]:
    result: dict[str, list[RouteEntry]] = {r: [] for r in graph.routers}
    for u in graph.routers:
        for owner, originated in sorted(graph.origins.items()):
            if owner == u or owner not in dist[u]:
                continue
            hop = first_hop[u][owner]
            for prefix, stub in originated:
                result[u].append(RouteEntry(
                    prefix=prefix, source=source, metric=dist[u][owner] + stub,
                    admin_distance=admin_distance,
                    next_hop=(hop.v, hop.v_iface), next_hop_addr=hop.v_addr))
    return result


def compute_linkstate(graph: AreaGraph) -> dict[str, list[RouteEntry]]:
    """Shortest-path-tree routes per router (link-state semantics)."""
    _check_connected(graph)
    dist: dict[str, dict[str, int]] = {}
    first_hop: dict[str, dict[str, Adjacency]] = {}
    for s in graph.routers:
        d = {s: 0}
        hop: dict[str, Adjacency] = {}
        heap: list[tuple[int, str]] = [(0, s)]
        done: set[str] = set()
        while heap:
            du, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for adj in graph.neighbors(u):
                nd = du + adj.cost
                if adj.v not in d or nd < d[adj.v]:
                    d[adj.v] = nd
                    hop[adj.v] = hop[u] if u != s else adj
                    heapq.heappush(heap, (nd, adj.v))
        dist[s] = d
        first_hop[s] = hop
    return _entries_from_distances(graph, "ospf_like", AD_OSPF, dist, first_hop)


def compute_distancevector(graph: AreaGraph) -> dict[str, list[RouteEntry]]:
    """Bellman-Ford iteration with split horizon until fixpoint."""
    _check_connected(graph)
    # table[u][owner] = (metric, learned_from_adjacency or None for self)
    table: dict[str, dict[str, tuple[int, Optional[Adjacency]]]] = {
        r: {r: (0, None)} for r in graph.routers}
    rounds = 0
    changed = True
    while changed:
        rounds += 1
        if rounds > len(graph.routers) + 1:
            raise NonConvergence(
                f"distance-vector did not converge within {len(graph.routers)} rounds")
        changed = False
        for u in sorted(graph.routers):
            for adj in graph.neighbors(u):
                # v advertises its table to u, withholding routes learned from u
                v = adj.v
                for owner, (metric, learned) in sorted(table[v].items()):
                    if learned is not None and learned.v == u:
                        continue  # split horizon
                    candidate = metric + adj.cost
                    current = table[u].get(owner)
                    if current is None or candidate < current[0] or (
                            candidate == current[0]
                            and current[1] is not None
                            and adj.v_addr.value < current[1].v_addr.value):
                        table[u][owner] = (candidate, adj)
                        changed = True
    dist = {u: {owner: m for owner, (m, _) in t.items()} for u, t in table.items()}
    first_hop = {u: {owner: a for owner, (_, a) in t.items() if a is not None}
                 for u, t in table.items()}
    return _entries_from_distances(graph, "eigrp_like", AD_EIGRP, dist, first_hop)


# --- path vector ---------------------------------------------------------------


@dataclass(frozen=True)
class Peering:
    """One path-vector session between two adjacent speakers."""

    u: str
    u_iface: str
    u_addr: NetAddress
    v: str
    v_iface: str
    v_addr: NetAddress


@dataclass(frozen=True)
class _PvRoute:
    as_path: tuple[int, ...]
    hops: int
    via_node: Optional[str]
    next_hop: Optional[tuple[str, str]]
    next_hop_addr: Optional[NetAddress]
    external: bool

    def key(self):
        addr = self.next_hop_addr.value if self.next_hop_addr is not None else -1
        return (len(self.as_path), self.hops, addr)


def compute_pathvector(speakers: dict[str, AsNumber],
                       peerings: list[Peering],
                       origins: dict[str, list[Prefix]],
                       ) -> dict[str, list[RouteEntry]]:
    """Iterative path-vector advertisement to a fixpoint.

    The sender's AS is prepended only on sessions that cross an AS boundary;
    a speaker rejects any path containing its own AS. Selection prefers the
    shortest AS path, then the fewest peering hops (keeps forwarding loop-free
    inside multi-router ASes), then the lowest neighbor address.
    """
    tables: dict[str, dict[Prefix, _PvRoute]] = {s: {} for s in speakers}
    for node, prefixes in origins.items():
        if node not in speakers:
            raise ValidationError(f"origin node {node!r} is not a speaker")
        for prefix in prefixes:
            tables[node][prefix] = _PvRoute((), 0, None, None, None, False)

    # directed sessions: (sender, receiver, sender port, sender address)
    sessions: list[tuple[str, str, tuple[str, str], NetAddress]] = []
    for p in peerings:
        if p.u not in speakers or p.v not in speakers:
            raise ValidationError(f"peering references non-speaker: {p}")
        sessions.append((p.v, p.u, (p.v, p.v_iface), p.v_addr))
        sessions.append((p.u, p.v, (p.u, p.u_iface), p.u_addr))
    sessions.sort(key=lambda s: (s[1], s[0], s[3].value))

    max_rounds = len(speakers) + len(sessions) + 2
    rounds = 0
    changed = True
    while changed:
        rounds += 1
        if rounds > max_rounds:
            raise NonConvergence("path-vector did not reach a fixpoint")
        changed = False
        for sender, receiver, sender_port, sender_addr in sessions:
            crosses_as = speakers[sender].value != speakers[receiver].value
            for prefix, route in sorted(tables[sender].items(),
                                        key=lambda kv: (kv[0].base.value, kv[0].length)):
                if route.via_node == receiver:
                    continue  # never advertise a route back to its teacher
                path = ((speakers[sender].value,) + route.as_path
                        if crosses_as else route.as_path)
                if speakers[receiver].value in path:
                    continue  # loop prevention
                candidate = _PvRoute(
                    as_path=path, hops=route.hops + 1,
                    via_node=sender, next_hop=sender_port,
                    next_hop_addr=sender_addr, external=crosses_as)
                current = tables[receiver].get(prefix)
                if current is None or candidate.key() < current.key():
                    tables[receiver][prefix] = candidate
                    changed = True

    result: dict[str, list[RouteEntry]] = {s: [] for s in speakers}
    for node, table in tables.items():
        for prefix, route in sorted(table.items(),
                                    key=lambda kv: (kv[0].base.value, kv[0].length)):
            if route.via_node is None:
                continue  # self-originated; covered by connected/static routes
            result[node].append(RouteEntry(
                prefix=prefix, source="bgp_like", metric=len(route.as_path),
                admin_distance=AD_BGP_EXTERNAL if route.external else AD_BGP_INTERNAL,
                next_hop=route.next_hop, next_hop_addr=route.next_hop_addr,
                as_path=route.as_path))
    return result
