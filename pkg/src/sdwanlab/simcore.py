"""Deterministic discrete-event WAN simulator core.

Models L3 nodes (hosts, routers, edge devices, controllers) joined by links,
with L2 switches relaying frames transparently inside a segment. Echo probes
are forwarded hop by hop with standard TTL semantics:

  * hosts and controllers consume packets addressed to them and answer echo
    requests with a fresh reply (ttl reset to the initial value),
  * switches relay without touching the TTL,
  * routers decrement the TTL, then look up their RIB,
  * an edge with an active overlay adds one virtual tunnel-endpoint hop
    (one extra TTL decrement plus an encapsulation delay) whenever traffic
    between it and a controller enters or exits the tunnel.

Timing model: every node that handles a packet (emission, relay, forward,
receive) defers its next action by its processing delay, so a lossless,
jitter-free round trip costs exactly

    rtt = 2 * sum(link latencies) + 2 * sum(per-node processing delays)

over the nodes on the path, endpoints included. Jitter adds uniform(0, j)
per link crossing from the seeded generator; loss drops the frame with
probability loss_pct/100. Equal-time events fire in insertion order, which
makes whole runs reproducible bit for bit.
"""

import heapq
import math
import random
from dataclasses import dataclass, field
from hashlib import sha256
from typing import Callable, Optional

from .addressing import NetAddress, Prefix
from .errors import SchedulingInPast, ValidationError
from .routing import Rib, RouteEntry

ROLES = ("host", "switch", "router", "edge", "manage", "bond", "smart")
CONTROLLER_ROLES = ("manage", "bond", "smart")

DEFAULT_INITIAL_TTL = 64

ECHO_REQUEST = "echo_request"
ECHO_REPLY = "echo_reply"
TTL_EXCEEDED = "ttl_exceeded"
UNREACHABLE = "unreachable"


@dataclass(frozen=True)
class Interface:
    name: str
    addr: NetAddress
    prefix: Prefix


@dataclass
class Packet:
    src: NetAddress
    dst: NetAddress
    ttl: int
    size_bytes: int
    seq: int
    sent_at: float
    kind: str = ECHO_REQUEST

    def __post_init__(self):
        if self.size_bytes <= 0:
            raise ValidationError(f"packet size must be positive: {self.size_bytes}")
        if not (0 <= self.ttl <= DEFAULT_INITIAL_TTL):
            raise ValidationError(f"packet ttl out of range: {self.ttl}")


@dataclass
class Node:
    id: str
    role: str
    area: str
    interfaces: dict[str, Interface] = field(default_factory=dict)
    management_mode: str = "local"
    processing_ms: float = 0.1
    tunnel_processing_ms: float = 1.0
    overlay_active: bool = False
    serial: Optional[str] = None
    rib: Rib = None
    # static routes as (prefix, next-hop address); re-resolved on rebuild
    static_routes: list = field(default_factory=list)
    # configuration pushed by the control plane (edges)
    template_statics: list = field(default_factory=list)
    ospf_ifaces: tuple = ()
    bgp_config: Optional[dict] = None
    system_info: dict = field(default_factory=dict)
    applied_directives: tuple = ()
    applied_config_hash: Optional[str] = None
    # hardware activity accumulator (exponentially decayed event count)
    activity: float = 0.0
    last_activity_ms: float = 0.0
    handled_total: int = 0

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValidationError(f"unknown role {self.role!r} for node {self.id}")
        if self.rib is None:
            self.rib = Rib(self.id)

    def owns(self, addr: NetAddress) -> bool:
        return any(i.addr == addr for i in self.interfaces.values())

    @property
    def primary_addr(self) -> Optional[NetAddress]:
        for iface in self.interfaces.values():
            return iface.addr
        return None

    def record_handling(self, now_ms: float, tau_ms: float):
        if tau_ms > 0 and now_ms > self.last_activity_ms:
            self.activity *= math.exp(-(now_ms - self.last_activity_ms) / tau_ms)
        self.last_activity_ms = max(self.last_activity_ms, now_ms)
        self.activity += 1.0
        self.handled_total += 1

    def decayed_activity(self, now_ms: float, tau_ms: float) -> float:
        if tau_ms <= 0 or now_ms <= self.last_activity_ms:
            return self.activity
        return self.activity * math.exp(-(now_ms - self.last_activity_ms) / tau_ms)


@dataclass
class Link:
    a: tuple[str, str]  # (node id, interface/port name)
    b: tuple[str, str]
    latency_ms: float = 0.1
    jitter_ms: float = 0.0
    loss_pct: float = 0.0
    cost: int = 1
    up: bool = True

    def __post_init__(self):
        if self.a[0] == self.b[0]:
            raise ValidationError(f"link endpoints must differ: {self.a} - {self.b}")
        if self.latency_ms < 0 or self.jitter_ms < 0:
            raise ValidationError("latency/jitter must be non-negative")
        if not (0 <= self.loss_pct <= 100):
            raise ValidationError(f"loss_pct out of range: {self.loss_pct}")
        if self.cost < 1:
            raise ValidationError(f"link cost must be >= 1: {self.cost}")

    def other(self, port: tuple[str, str]) -> tuple[str, str]:
        return self.b if port == self.a else self.a


# --- forwarding decisions ----------------------------------------------------

@dataclass(frozen=True)
class Consume:
    reply: bool  # answer with an echo reply


@dataclass(frozen=True)
class Forward:
    target_port: tuple[str, str]  # L2 destination (next hop or final owner)
    ttl: int


@dataclass(frozen=True)
class Relay:
    out_port: tuple[str, str]  # switch egress, TTL untouched


@dataclass(frozen=True)
class TtlExpired:
    pass


@dataclass(frozen=True)
class NoRoute:
    pass


@dataclass(frozen=True)
class Drop:
    reason: str


class Segment:
    """A broadcast domain: links joined through switches."""

    def __init__(self, seg_id: int):
        self.id = seg_id
        self.links: list[Link] = []
        self.switches: list[str] = []
        self.attachments: list[tuple[str, str]] = []  # non-switch ports


class Simulation:
    """Single-threaded event loop over a fixed node/link topology."""

    MAX_EVENTS = 5_000_000

    def __init__(self, seed: int = 0, initial_ttl: int = DEFAULT_INITIAL_TTL,
                 activity_tau_ms: float = 5000.0):
        self.now_ms: float = 0.0
        self.initial_ttl = initial_ttl
        self.activity_tau_ms = activity_tau_ms
        self.rng = random.Random(seed)
        self.seed = seed
        self.nodes: dict[str, Node] = {}
        self.links: list[Link] = []
        self.port_link: dict[tuple[str, str], Link] = {}
        self.segments: list[Segment] = []
        self.port_segment: dict[tuple[str, str], Segment] = {}
        self.switch_segments: dict[str, list[Segment]] = {}
        self.l2_next: dict[tuple[str, tuple[str, str]], tuple[str, str]] = {}
        self.addr_owner: dict[NetAddress, tuple[str, str]] = {}
        self.overlay_peer_addrs: set[NetAddress] = set()
        self.edge_to_edge_tunnels = False
        self.trace: list[tuple[float, str, str, str]] = []
        self.deliveries: list[tuple[Packet, float, str]] = []  # (packet, t, node id)
        self._queue: list[tuple[float, int, Callable[[], None]]] = []
        self._seq = 0
        self._events_run = 0

    # --- topology construction ------------------------------------------

    def add_node(self, node: Node) -> Node:
        if node.id in self.nodes:
            raise ValidationError(f"duplicate node id {node.id!r}")
        self.nodes[node.id] = node
        for iface in node.interfaces.values():
            if iface.addr in self.addr_owner:
                raise ValidationError(f"duplicate address {iface.addr} on {node.id}")
            self.addr_owner[iface.addr] = (node.id, iface.name)
        return node

    def add_link(self, link: Link) -> Link:
        for port in (link.a, link.b):
            if port[0] not in self.nodes:
                raise ValidationError(f"link references unknown node {port[0]!r}")
            if port in self.port_link:
                raise ValidationError(f"port already wired: {port}")
        self.links.append(link)
        self.port_link[link.a] = link
        self.port_link[link.b] = link
        return link

    def assign_interface(self, node_id: str, name: str, addr: NetAddress,
                         prefix: Prefix):
        """Add or replace an addressed interface on a node."""
        node = self.nodes[node_id]
        old = node.interfaces.get(name)
        if old is not None:
            self.addr_owner.pop(old.addr, None)
        owner = self.addr_owner.get(addr)
        if owner is not None and owner != (node_id, name):
            raise ValidationError(f"duplicate address {addr} (held by {owner[0]})")
        node.interfaces[name] = Interface(name, addr, prefix)
        self.addr_owner[addr] = (node_id, name)

    def remove_interface(self, node_id: str, name: str):
        node = self.nodes[node_id]
        iface = node.interfaces.pop(name, None)
        if iface is not None:
            self.addr_owner.pop(iface.addr, None)

    def finalize(self):
        """Build L2 segments and switch relay tables. Call after wiring."""
        self.segments.clear()
        self.port_segment.clear()
        self.switch_segments = {n: [] for n in self.nodes if self.nodes[n].role == "switch"}
        self.l2_next.clear()
        seen_links: set[int] = set()
        for link in self.links:
            if id(link) in seen_links:
                continue
            seg = Segment(len(self.segments))
            stack = [link]
            while stack:
                cur = stack.pop()
                if id(cur) in seen_links:
                    continue
                seen_links.add(id(cur))
                seg.links.append(cur)
                for port in (cur.a, cur.b):
                    node = self.nodes[port[0]]
                    if node.role == "switch":
                        if port[0] not in seg.switches:
                            seg.switches.append(port[0])
                        for other in self.links:
                            if id(other) not in seen_links and port[0] in (other.a[0], other.b[0]):
                                stack.append(other)
                    elif port not in seg.attachments:
                        seg.attachments.append(port)
            self.segments.append(seg)
            for port in seg.attachments:
                self.port_segment[port] = seg
            for sw in seg.switches:
                self.switch_segments[sw].append(seg)
            self._build_l2_table(seg)

    def _build_l2_table(self, seg: Segment):
        # BFS from every attachment toward every switch: first hop on the
        # reverse path becomes the switch's egress for that attachment.
        for target in seg.attachments:
            dist: dict[str, tuple[int, tuple[str, str]]] = {}
            frontier: list[tuple[str, tuple[str, str]]] = []
            link = self.port_link.get(target)
            if link is None:
                continue
            other = link.other(target)
            if self.nodes[other[0]].role != "switch":
                continue  # point-to-point link, no relay table needed
            dist[other[0]] = (1, other)
            frontier.append((other[0], other))
            while frontier:
                next_frontier = []
                for sw, via in frontier:
                    self.l2_next[(sw, target)] = via
                    for lk in seg.links:
                        for port in (lk.a, lk.b):
                            if port[0] == sw:
                                peer = lk.other(port)
                                if self.nodes[peer[0]].role == "switch" and peer[0] not in dist:
                                    dist[peer[0]] = (dist[sw][0] + 1, peer)
                                    next_frontier.append((peer[0], peer))
                frontier = next_frontier

    # --- scheduling -------------------------------------------------------

    def schedule(self, at_ms: float, event: Callable[[], None]) -> int:
        if at_ms < self.now_ms:
            raise SchedulingInPast(f"cannot schedule at {at_ms} (now {self.now_ms})")
        self._seq += 1
        heapq.heappush(self._queue, (at_ms, self._seq, event))
        return self._seq

    def run_until_idle(self):
        while self._queue:
            self._events_run += 1
            if self._events_run > self.MAX_EVENTS:
                raise RuntimeError("event budget exceeded; runaway simulation")
            at_ms, _, event = heapq.heappop(self._queue)
            self.now_ms = at_ms
            event()

    # --- forwarding --------------------------------------------------------

    def node_by_addr(self, addr: NetAddress) -> Optional[Node]:
        owner = self.addr_owner.get(addr)
        return self.nodes[owner[0]] if owner else None

    def decide(self, node: Node, packet: Packet, in_port: Optional[str]) -> object:
        """The per-node forwarding decision (TTL semantics live here)."""
        if node.role == "switch":
            target = getattr(packet, "_l2_target", None)
            if target is None:
                return Drop("switch frame without L2 target")
            out = self.l2_next.get((node.id, target))
            if out is None:
                return Drop("no L2 path")
            return Relay(out)
        if node.owns(packet.dst):
            return Consume(reply=packet.kind == ECHO_REQUEST)
        if node.role in ("host",) + CONTROLLER_ROLES:
            return Drop("not addressed to this endpoint")
        # router / edge: decrement, then look up
        ttl = packet.ttl - 1
        if ttl <= 0:
            return TtlExpired()
        entry = node.rib.lookup(packet.dst)
        if entry is None:
            return NoRoute()
        target = self._resolve_target(node, entry, packet.dst)
        if target is None:
            return NoRoute()
        return Forward(target_port=target, ttl=ttl)

    def _resolve_target(self, node: Node, entry: RouteEntry,
                        dst: NetAddress) -> Optional[tuple[str, str]]:
        if entry.next_hop is not None:
            return entry.next_hop
        # connected route: deliver straight to the address owner on the segment
        owner = self.addr_owner.get(dst)
        if owner is None:
            return None
        seg = self.port_segment.get(owner)
        if seg is None or entry.egress_iface is None:
            return None
        if self.port_segment.get((node.id, entry.egress_iface)) is not seg:
            return None
        return owner

    # --- packet machinery ---------------------------------------------------

    def emit(self, src_id: str, packet: Packet):
        """Source-node emission: processing delay, tunnel on egress, first hop."""
        node = self.nodes[src_id]
        node.record_handling(self.now_ms, self.activity_tau_ms)
        at = self.now_ms + node.processing_ms

        def launch():
            self._egress(node, packet)

        if self._tunnel_applies(node, packet.dst):
            def tunnel_then_launch():
                node.record_handling(self.now_ms, self.activity_tau_ms)
                packet.ttl -= 1
                self._trace("tunnel-encap", node.id, f"seq={packet.seq} ttl={packet.ttl}")
                if packet.ttl <= 0:
                    self._expire(node, packet)
                    return
                self.schedule(self.now_ms + node.tunnel_processing_ms, launch)

            self.schedule(at, tunnel_then_launch)
        else:
            self.schedule(at, launch)

    def _egress(self, node: Node, packet: Packet):
        entry = node.rib.lookup(packet.dst)
        if entry is None:
            self._trace("no-route", node.id, f"dst={packet.dst}")
            self._bounce(node, packet, UNREACHABLE)
            return
        target = self._resolve_target(node, entry, packet.dst)
        if target is None:
            self._trace("no-route", node.id, f"dst={packet.dst}")
            self._bounce(node, packet, UNREACHABLE)
            return
        self._send_frame(node.id, target, packet)

    def _send_frame(self, from_id: str, target: tuple[str, str], packet: Packet):
        """Pick the local port that reaches `target`'s segment and transmit."""
        seg = self.port_segment.get(target)
        if seg is None:
            self._trace("drop", from_id, "target port not on any segment")
            return
        out_port = None
        for iface in self._node_ports(from_id):
            if self.port_segment.get(iface) is seg:
                out_port = iface
                break
            link = self.port_link.get(iface)
            if link is not None:
                peer = link.other(iface)
                if self.nodes[peer[0]].role == "switch" and seg in self.switch_segments[peer[0]]:
                    out_port = iface
                    break
        if out_port is None:
            self._trace("drop", from_id, f"no port toward {target}")
            return
        packet._l2_target = target
        self.transmit(self.port_link[out_port], out_port, packet)

    def _node_ports(self, node_id: str):
        for port in self.port_link:
            if port[0] == node_id:
                yield port

    def transmit(self, link: Link, from_port: tuple[str, str], packet: Packet):
        """Send over one physical link: loss draw, latency plus jitter."""
        if not link.up:
            self._trace("drop", from_port[0], "link down")
            return
        if link.loss_pct > 0:
            if self.rng.uniform(0, 100) < link.loss_pct:
                self._trace("loss", from_port[0], f"seq={packet.seq} kind={packet.kind}")
                return
        delay = link.latency_ms
        if link.jitter_ms > 0:
            delay += self.rng.uniform(0, link.jitter_ms)
        to_port = link.other(from_port)

        def arrive():
            self._handle_arrival(to_port, packet)

        self.schedule(self.now_ms + delay, arrive)

    def _handle_arrival(self, port: tuple[str, str], packet: Packet):
        node = self.nodes[port[0]]
        node.record_handling(self.now_ms, self.activity_tau_ms)
        action = self.decide(node, packet, port[1])
        if isinstance(action, Relay):
            def relay():
                self.transmit(self.port_link[action.out_port], action.out_port, packet)

            self.schedule(self.now_ms + node.processing_ms, relay)
        elif isinstance(action, Forward):
            packet.ttl = action.ttl
            self._trace("forward", node.id, f"seq={packet.seq} ttl={packet.ttl}")

            def fwd():
                self._send_frame(node.id, action.target_port, packet)

            self.schedule(self.now_ms + node.processing_ms, fwd)
        elif isinstance(action, Consume):
            self._consume(node, packet)
        elif isinstance(action, TtlExpired):
            self._trace("ttl-exceeded", node.id, f"seq={packet.seq} from={packet.src}")
            self._bounce(node, packet, TTL_EXCEEDED)
        elif isinstance(action, NoRoute):
            self._trace("no-route", node.id, f"dst={packet.dst}")
            self._bounce(node, packet, UNREACHABLE)
        else:
            self._trace("drop", node.id, getattr(action, "reason", "unspecified"))

    def _consume(self, node: Node, packet: Packet):
        if self._tunnel_applies(node, packet.src):
            # decapsulation hop: the virtual tunnel endpoint in front of the edge
            node.record_handling(self.now_ms, self.activity_tau_ms)
            packet.ttl -= 1
            self._trace("tunnel-decap", node.id, f"seq={packet.seq} ttl={packet.ttl}")
            if packet.ttl <= 0:
                self._expire(node, packet)
                return
            self.schedule(self.now_ms + node.tunnel_processing_ms,
                          lambda: self._deliver(node, packet))
        else:
            self._deliver(node, packet)

    def _deliver(self, node: Node, packet: Packet):
        def finish():
            self._trace("deliver", node.id, f"kind={packet.kind} seq={packet.seq} ttl={packet.ttl}")
            self.deliveries.append((packet, self.now_ms, node.id))
            if packet.kind == ECHO_REQUEST:
                reply = Packet(src=packet.dst, dst=packet.src, ttl=self.initial_ttl,
                               size_bytes=packet.size_bytes, seq=packet.seq,
                               sent_at=packet.sent_at, kind=ECHO_REPLY)
                self.emit(node.id, reply)

        self.schedule(self.now_ms + node.processing_ms, finish)

    def _bounce(self, node: Node, packet: Packet, kind: str):
        """Emit a ttl_exceeded/unreachable notice back to the packet source."""
        src_addr = node.primary_addr
        if src_addr is None or packet.kind != ECHO_REQUEST:
            return  # never bounce a bounce
        notice = Packet(src=src_addr, dst=packet.src, ttl=self.initial_ttl,
                        size_bytes=packet.size_bytes, seq=packet.seq,
                        sent_at=packet.sent_at, kind=kind)
        self.emit(node.id, notice)

    def _expire(self, node: Node, packet: Packet):
        self._trace("ttl-exceeded", node.id, f"seq={packet.seq} from={packet.src}")
        self._bounce(node, packet, TTL_EXCEEDED)

    def _tunnel_applies(self, node: Node, peer_addr: NetAddress) -> bool:
        if node.role != "edge" or not node.overlay_active:
            return False
        if peer_addr in self.overlay_peer_addrs:
            return True
        if self.edge_to_edge_tunnels:
            owner = self.node_by_addr(peer_addr)
            if owner is not None and owner.role == "edge" and owner.overlay_active:
                return True
        return False

    # --- bookkeeping ---------------------------------------------------------

    def _trace(self, kind: str, node_id: str, detail: str):
        self.trace.append((self.now_ms, kind, node_id, detail))

    def refresh_overlay_peers(self):
        """Recompute which addresses count as overlay tunnel peers."""
        self.overlay_peer_addrs = {
            iface.addr
            for node in self.nodes.values()
            if node.role in CONTROLLER_ROLES
            for iface in node.interfaces.values()
        }

    def state_digest(self) -> str:
        """Stable hash of all mutable simulation state (for read-purity checks)."""
        h = sha256()
        h.update(f"t={self.now_ms!r};seq={self._seq}".encode())
        for node_id in sorted(self.nodes):
            node = self.nodes[node_id]
            h.update(f"|{node.id};{node.role};{node.management_mode};"
                     f"{node.overlay_active};{node.activity!r};{node.handled_total};"
                     f"{node.applied_config_hash};{node.bgp_config};"
                     f"{node.system_info};{node.template_statics}".encode())
            for name in sorted(node.interfaces):
                iface = node.interfaces[name]
                h.update(f";{name}={iface.addr}/{iface.prefix.length}".encode())
            for entry in node.rib.sorted_entries():
                h.update(f";{entry.describe()}".encode())
        overlay = getattr(self, "overlay", None)
        if overlay is not None:
            h.update(overlay.state_digest().encode())
        return h.hexdigest()
