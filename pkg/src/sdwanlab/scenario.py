"""Declarative scenario definition, loading and instantiation.

A scenario document (YAML; JSON is accepted since it is a YAML subset)
describes areas, nodes, links, static routes, optional SD-WAN placement and
simulation defaults. ``load_scenario`` validates the document against the
published schema (docs/scenario-format.md) and all semantic invariants;
``build`` turns a spec into a ready simulation with converged routing.

The two canonical documents live in ``scenarios/traditional.yaml`` and
``scenarios/sdwan.yaml``.
"""

import copy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import jsonschema
import yaml

from .addressing import NetAddress, Prefix, interface_spec
from .errors import SchemaError, ValidationError
from .routing import (AD_CONNECTED, AD_STATIC, AreaGraph, AsNumber, Peering,
                      RouteEntry, compute_distancevector, compute_linkstate,
                      compute_pathvector, merge_rib)
from .simcore import CONTROLLER_ROLES, Interface, Link, Node, Simulation

IGP_CHOICES = ("eigrp_like", "ospf_like", "mixed")

DEFAULT_PROCESSING_MS = {
    "host": 0.05, "switch": 0.05, "router": 0.1, "edge": 0.1,
    "manage": 1.6, "bond": 0.3, "smart": 0.3,
}

DEFAULT_HARDWARE_ROLES = {
    "manage": {"num_cpus": 4, "mem_total_mb": 16384, "cpu_base": 3.5,
               "cpu_per_event": 0.008, "mem_base": 52.0, "mem_per_object": 0.6},
    "bond": {"num_cpus": 2, "mem_total_mb": 2048, "cpu_base": 5.1,
             "cpu_per_event": 0.01, "mem_base": 59.0, "mem_per_object": 0.3},
    "smart": {"num_cpus": 2, "mem_total_mb": 2048, "cpu_base": 0.45,
              "cpu_per_event": 0.01, "mem_base": 18.6, "mem_per_object": 0.25},
    "edge": {"num_cpus": 2, "mem_total_mb": 2048, "cpu_base": 18.0,
             "cpu_per_event": 0.09, "mem_base": 45.0, "mem_per_object": 0.35},
    "router": {"num_cpus": 1, "mem_total_mb": 1024, "cpu_base": 4.0,
               "cpu_per_event": 0.015, "mem_base": 35.0, "mem_per_object": 0.2},
    "switch": {"num_cpus": 1, "mem_total_mb": 512, "cpu_base": 2.0,
               "cpu_per_event": 0.01, "mem_base": 25.0, "mem_per_object": 0.2},
    "host": {"num_cpus": 1, "mem_total_mb": 512, "cpu_base": 1.5,
             "cpu_per_event": 0.01, "mem_base": 30.0, "mem_per_object": 0.1},
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["name", "areas", "nodes", "links"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "defaults": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "seed": {"type": "integer"},
                "initial_ttl": {"type": "integer", "minimum": 1, "maximum": 255},
                "ping_interval_ms": {"type": "number", "exclusiveMinimum": 0},
                "tunnel_processing_ms": {"type": "number", "minimum": 0},
                "processing_ms": {
                    "type": "object",
                    "additionalProperties": {"type": "number", "minimum": 0},
                },
                "hardware": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "tau_ms": {"type": "number", "exclusiveMinimum": 0},
                        "roles": {
                            "type": "object",
                            "additionalProperties": {
                                "type": "object",
                                "additionalProperties": {"type": "number"},
                            },
                        },
                    },
                },
            },
        },
        "areas": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "as_number", "prefix", "igp"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "as_number": {"type": "integer"},
                    "prefix": {"type": "string"},
                    "igp": {"enum": list(IGP_CHOICES)},
                    "kind": {"enum": ["enterprise", "provider"]},
                    "endpoint": {"type": "string"},
                },
            },
        },
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "role", "area"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "role": {"enum": ["host", "switch", "router", "edge",
                                       "manage", "bond", "smart"]},
                    "area": {"type": "string"},
                    "interfaces": {
                        "type": "object",
                        "additionalProperties": {"type": "string"},
                    },
                    "serial": {"type": "string"},
                    "processing_ms": {"type": "number", "minimum": 0},
                },
            },
        },
        "links": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b"],
                "additionalProperties": False,
                "properties": {
                    "a": {"type": "string", "pattern": "^[^:]+:[^:]+$"},
                    "b": {"type": "string", "pattern": "^[^:]+:[^:]+$"},
                    "latency_ms": {"type": "number", "minimum": 0},
                    "jitter_ms": {"type": "number", "minimum": 0},
                    "loss_pct": {"type": "number", "minimum": 0, "maximum": 100},
                    "cost": {"type": "integer", "minimum": 1},
                },
            },
        },
        "static_routes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["node", "prefix", "next_hop"],
                "additionalProperties": False,
                "properties": {
                    "node": {"type": "string"},
                    "prefix": {"type": "string"},
                    "next_hop": {"type": "string"},
                },
            },
        },
        "sdwan": {
            "type": "object",
            "required": ["controllers", "edges", "allowlist"],
            "additionalProperties": False,
            "properties": {
                "root_key": {"type": "string"},
                "edge_to_edge_tunnels": {"type": "boolean"},
                "controllers": {
                    "type": "object",
                    "required": ["manage", "bond", "smart"],
                    "additionalProperties": False,
                    "properties": {
                        "manage": {"type": "string"},
                        "bond": {"type": "string"},
                        "smart": {"type": "string"},
                    },
                },
                "edges": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["node", "serial"],
                        "additionalProperties": False,
                        "properties": {
                            "node": {"type": "string"},
                            "serial": {"type": "string"},
                            "template": {"type": "string"},
                            "variables": {"type": "object"},
                        },
                    },
                },
                "allowlist": {"type": "array", "items": {"type": "string"}},
            },
        },
    },
}


@dataclass(frozen=True)
class AreaSpec:
    name: str
    as_number: AsNumber
    prefix: Prefix
    igp: str
    kind: str = "enterprise"
    endpoint: Optional[str] = None


@dataclass(frozen=True)
class NodeSpec:
    id: str
    role: str
    area: str
    interfaces: tuple[tuple[str, str], ...] = ()  # (name, "A.B.C.D/L")
    serial: Optional[str] = None
    processing_ms: Optional[float] = None


@dataclass(frozen=True)
class LinkSpec:
    a: tuple[str, str]
    b: tuple[str, str]
    latency_ms: float = 0.1
    jitter_ms: float = 0.0
    loss_pct: float = 0.0
    cost: int = 1


@dataclass(frozen=True)
class StaticRouteSpec:
    node: str
    prefix: Prefix
    next_hop: NetAddress


@dataclass(frozen=True)
class EdgeSpec:
    node: str
    serial: str
    template: Optional[str] = None  # path relative to the scenario file
    variables: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SdwanSpec:
    controllers: dict[str, str]  # role -> node id
    edges: tuple[EdgeSpec, ...]
    allowlist: tuple[str, ...]
    root_key: str = "lab-root"
    edge_to_edge_tunnels: bool = False


@dataclass(frozen=True)
class Defaults:
    seed: int = 42
    initial_ttl: int = 64
    ping_interval_ms: float = 10.0
    tunnel_processing_ms: float = 0.7
    processing_ms: dict = field(default_factory=dict)
    hardware_tau_ms: float = 5000.0
    hardware_roles: dict = field(default_factory=dict)

    def processing_for(self, role: str) -> float:
        return self.processing_ms.get(role, DEFAULT_PROCESSING_MS[role])

    def hardware_for(self, role: str) -> dict:
        merged = dict(DEFAULT_HARDWARE_ROLES[role])
        merged.update(self.hardware_roles.get(role, {}))
        return merged


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    description: str
    areas: tuple[AreaSpec, ...]
    nodes: tuple[NodeSpec, ...]
    links: tuple[LinkSpec, ...]
    static_routes: tuple[StaticRouteSpec, ...]
    sdwan: Optional[SdwanSpec]
    defaults: Defaults
    source_path: Optional[Path] = None

    def area(self, name: str) -> AreaSpec:
        for a in self.areas:
            if a.name == name:
                return a
        raise ValidationError(f"unknown area {name!r}")

    def endpoint_for(self, area_name: str) -> str:
        area = self.area(area_name)
        if area.endpoint is None:
            raise ValidationError(f"area {area_name!r} has no measurement endpoint")
        return area.endpoint


def _parse_port(text: str) -> tuple[str, str]:
    node, _, port = text.partition(":")
    return node, port


def load_scenario(source: Union[str, Path, dict]) -> ScenarioSpec:
    """Parse and fully validate a scenario document."""
    source_path = None
    if isinstance(source, (str, Path)):
        source_path = Path(source)
        try:
            doc = yaml.safe_load(source_path.read_text())
        except yaml.YAMLError as exc:
            raise SchemaError(str(source_path), f"not parseable: {exc}") from exc
    else:
        doc = copy.deepcopy(source)
    if not isinstance(doc, dict):
        raise SchemaError("$", "document must be a mapping")

    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "$" + "".join(f"/{p}" for p in err.absolute_path)
        raise SchemaError(path, err.message)

    areas = []
    for raw in doc["areas"]:
        areas.append(AreaSpec(
            name=raw["name"], as_number=AsNumber(raw["as_number"]),
            prefix=Prefix.parse(raw["prefix"]), igp=raw["igp"],
            kind=raw.get("kind", "enterprise"), endpoint=raw.get("endpoint")))

    nodes = []
    for raw in doc["nodes"]:
        interfaces = tuple((name, cidr) for name, cidr in
                           (raw.get("interfaces") or {}).items())
        nodes.append(NodeSpec(
            id=raw["id"], role=raw["role"], area=raw["area"],
            interfaces=interfaces, serial=raw.get("serial"),
            processing_ms=raw.get("processing_ms")))

    links = []
    for raw in doc["links"]:
        links.append(LinkSpec(
            a=_parse_port(raw["a"]), b=_parse_port(raw["b"]),
            latency_ms=raw.get("latency_ms", 0.1),
            jitter_ms=raw.get("jitter_ms", 0.0),
            loss_pct=raw.get("loss_pct", 0.0),
            cost=raw.get("cost", 1)))

    statics = []
    for raw in doc.get("static_routes", []):
        statics.append(StaticRouteSpec(
            node=raw["node"], prefix=Prefix.parse(raw["prefix"]),
            next_hop=NetAddress.parse(raw["next_hop"])))

    sdwan = None
    if "sdwan" in doc:
        raw = doc["sdwan"]
        sdwan = SdwanSpec(
            controllers=dict(raw["controllers"]),
            edges=tuple(EdgeSpec(node=e["node"], serial=e["serial"],
                                 template=e.get("template"),
                                 variables=dict(e.get("variables", {})))
                        for e in raw["edges"]),
            allowlist=tuple(raw["allowlist"]),
            root_key=raw.get("root_key", "lab-root"),
            edge_to_edge_tunnels=raw.get("edge_to_edge_tunnels", False))

    raw_defaults = doc.get("defaults", {})
    hardware = raw_defaults.get("hardware", {})
    defaults = Defaults(
        seed=raw_defaults.get("seed", 42),
        initial_ttl=raw_defaults.get("initial_ttl", 64),
        ping_interval_ms=raw_defaults.get("ping_interval_ms", 10.0),
        tunnel_processing_ms=raw_defaults.get("tunnel_processing_ms", 0.7),
        processing_ms=dict(raw_defaults.get("processing_ms", {})),
        hardware_tau_ms=hardware.get("tau_ms", 5000.0),
        hardware_roles={k: dict(v) for k, v in hardware.get("roles", {}).items()})

    spec = ScenarioSpec(
        name=doc["name"], description=doc.get("description", ""),
        areas=tuple(areas), nodes=tuple(nodes), links=tuple(links),
        static_routes=tuple(statics), sdwan=sdwan, defaults=defaults,
        source_path=source_path)
    _validate_semantics(spec)
    return spec


def _validate_semantics(spec: ScenarioSpec):
    area_names = [a.name for a in spec.areas]
    if len(set(area_names)) != len(area_names):
        raise ValidationError("duplicate area names")
    as_numbers = [a.as_number.value for a in spec.areas]
    if len(set(as_numbers)) != len(as_numbers):
        raise ValidationError("AS numbers must be unique across areas")
    for i, a in enumerate(spec.areas):
        for b in spec.areas[i + 1:]:
            if a.prefix.overlaps(b.prefix):
                raise ValidationError(
                    f"areas {a.name!r} and {b.name!r} have overlapping prefixes "
                    f"({a.prefix} / {b.prefix})")

    node_ids = [n.id for n in spec.nodes]
    if len(set(node_ids)) != len(node_ids):
        raise ValidationError("duplicate node ids")
    by_id = {n.id: n for n in spec.nodes}
    areas = {a.name: a for a in spec.areas}
    all_area_prefixes = [a.prefix for a in spec.areas]

    seen_addrs: set[NetAddress] = set()
    for node in spec.nodes:
        if node.area not in areas:
            raise ValidationError(f"node {node.id!r}: unknown area {node.area!r}")
        if node.role == "host" and not node.interfaces:
            raise ValidationError(f"host {node.id!r} needs at least one interface")
        if node.role == "switch" and node.interfaces:
            raise ValidationError(f"switch {node.id!r} must not have addressed interfaces")
        for name, cidr in node.interfaces:
            addr, prefix = interface_spec(cidr)
            if addr in seen_addrs:
                raise ValidationError(f"duplicate interface address {addr}")
            seen_addrs.add(addr)
            own = areas[node.area].prefix
            if own.contains(addr):
                continue
            if any(p.contains(addr) for p in all_area_prefixes):
                raise ValidationError(
                    f"node {node.id!r} iface {name!r}: address {addr} lies in "
                    f"another area's prefix")

    seen_ports: set[tuple[str, str]] = set()
    for link in spec.links:
        for end in (link.a, link.b):
            if end[0] not in by_id:
                raise ValidationError(f"link references unknown node {end[0]!r}")
            if not end[1]:
                raise ValidationError(f"link endpoint missing port: {end}")
            if end in seen_ports:
                raise ValidationError(f"port wired twice: {end[0]}:{end[1]}")
            seen_ports.add(end)
        if link.a[0] == link.b[0]:
            raise ValidationError(f"link endpoints must differ: {link.a[0]}")

    for static in spec.static_routes:
        if static.node not in by_id:
            raise ValidationError(f"static route references unknown node {static.node!r}")

    if spec.sdwan is not None:
        controller_areas = set()
        for role in ("manage", "bond", "smart"):
            node_id = spec.sdwan.controllers[role]
            node = by_id.get(node_id)
            if node is None:
                raise ValidationError(f"sdwan controller {node_id!r} not defined")
            if node.role != role:
                raise ValidationError(
                    f"sdwan controller {node_id!r} must have role {role!r}")
            controller_areas.add(node.area)
        if len(controller_areas) != 1:
            raise ValidationError("sdwan controllers must reside in exactly one area")
        serials = [e.serial for e in spec.sdwan.edges]
        if len(set(serials)) != len(serials):
            raise ValidationError("duplicate edge serials")
        for edge in spec.sdwan.edges:
            node = by_id.get(edge.node)
            if node is None or node.role != "edge":
                raise ValidationError(f"sdwan edge {edge.node!r} must be an edge node")


# --- instantiation ------------------------------------------------------------


def build(spec: ScenarioSpec) -> Simulation:
    """Instantiate a validated spec: nodes, links, converged routing."""
    defaults = spec.defaults
    sim = Simulation(seed=defaults.seed, initial_ttl=defaults.initial_ttl,
                     activity_tau_ms=defaults.hardware_tau_ms)
    sim.scenario = spec
    for node_spec in spec.nodes:
        interfaces = {}
        for name, cidr in node_spec.interfaces:
            addr, prefix = interface_spec(cidr)
            interfaces[name] = Interface(name, addr, prefix)
        processing = (node_spec.processing_ms if node_spec.processing_ms is not None
                      else defaults.processing_for(node_spec.role))
        sim.add_node(Node(
            id=node_spec.id, role=node_spec.role, area=node_spec.area,
            interfaces=interfaces, processing_ms=processing,
            tunnel_processing_ms=defaults.tunnel_processing_ms,
            serial=node_spec.serial,
            static_routes=[(s.prefix, s.next_hop) for s in spec.static_routes
                           if s.node == node_spec.id]))
    for link_spec in spec.links:
        sim.add_link(Link(a=link_spec.a, b=link_spec.b,
                          latency_ms=link_spec.latency_ms,
                          jitter_ms=link_spec.jitter_ms,
                          loss_pct=link_spec.loss_pct, cost=link_spec.cost))
    sim.finalize()
    rebuild_routing(sim)
    sim.refresh_overlay_peers()
    if spec.sdwan is not None:
        sim.edge_to_edge_tunnels = spec.sdwan.edge_to_edge_tunnels
        from .sdwan import ControlPlane
        sim.overlay = ControlPlane(sim, spec.sdwan)
    else:
        sim.overlay = None
    return sim


def _segment_subnet(sim: Simulation, seg) -> Optional[Prefix]:
    for port in seg.attachments:
        node = sim.nodes[port[0]]
        iface = node.interfaces.get(port[1])
        if iface is not None:
            return iface.prefix
    return None


def _segment_cost(sim: Simulation, seg, a: tuple[str, str], b: tuple[str, str]) -> int:
    """Min-cost L2 path between two attachment ports of one segment."""
    if len(seg.switches) == 0:
        link = sim.port_link.get(a)
        return link.cost if link is not None else 1
    # Dijkstra over the segment's links between the two ports
    start = sim.port_link[a]
    best: dict[str, int] = {}
    frontier: list[tuple[int, str]] = []
    other = start.other(a)
    if other == b:
        return start.cost
    best[other[0]] = start.cost
    frontier.append((start.cost, other[0]))
    import heapq as _heapq
    while frontier:
        cost, sw = _heapq.heappop(frontier)
        if cost > best.get(sw, 1 << 30):
            continue
        for link in seg.links:
            for port in (link.a, link.b):
                if port[0] != sw:
                    continue
                peer = link.other(port)
                if peer == b:
                    return cost + link.cost
                if sim.nodes[peer[0]].role == "switch":
                    nd = cost + link.cost
                    if nd < best.get(peer[0], 1 << 30):
                        best[peer[0]] = nd
                        _heapq.heappush(frontier, (nd, peer[0]))
    return 1  # unreachable inside segment; should not happen on valid fabrics


def _igp_participants(sim: Simulation, area: AreaSpec) -> dict[str, list[str]]:
    """Protocol -> participating node ids for one area."""
    protocols = {"mixed": ["eigrp_like", "ospf_like"],
                 "eigrp_like": ["eigrp_like"],
                 "ospf_like": ["ospf_like"]}[area.igp]
    members: dict[str, list[str]] = {p: [] for p in protocols}
    for node in sim.nodes.values():
        if node.area != area.name:
            continue
        if node.role == "router":
            for p in protocols:
                members[p].append(node.id)
        elif node.role == "edge" and node.ospf_ifaces and "ospf_like" in protocols:
            members["ospf_like"].append(node.id)
    return members


def _build_area_graph(sim: Simulation, area: AreaSpec,
                      participants: list[str]) -> AreaGraph:
    graph = AreaGraph(name=area.name)
    for node_id in participants:
        graph.add_router(node_id)
    part_set = set(participants)
    for seg in sim.segments:
        subnet = _segment_subnet(sim, seg)
        if subnet is None or not area.prefix.contains(subnet.base):
            continue
        attached = []
        for port in seg.attachments:
            if port[0] in part_set:
                iface = sim.nodes[port[0]].interfaces.get(port[1])
                if iface is not None:
                    attached.append((port, iface))
        for i, (pa, ia) in enumerate(attached):
            for pb, ib in attached[i + 1:]:
                cost = _segment_cost(sim, seg, pa, pb)
                graph.connect(pa[0], pa[1], ia.addr, pb[0], pb[1], ib.addr, cost)
    for node_id in participants:
        node = sim.nodes[node_id]
        for iface in node.interfaces.values():
            if area.prefix.contains(iface.addr):
                graph.add_origin(node_id, iface.prefix, 0)
    return graph


def rebuild_routing(sim: Simulation):
    """Recompute all RIBs from scratch (global offline convergence)."""
    spec: ScenarioSpec = sim.scenario
    areas = {a.name: a for a in spec.areas}

    connected: dict[str, list[RouteEntry]] = {n: [] for n in sim.nodes}
    for node in sim.nodes.values():
        for iface in node.interfaces.values():
            connected[node.id].append(RouteEntry(
                prefix=iface.prefix, source="connected", metric=0,
                admin_distance=AD_CONNECTED, egress_iface=iface.name))

    statics: dict[str, list[RouteEntry]] = {n: [] for n in sim.nodes}
    sim.unresolved_statics = []
    for node in sim.nodes.values():
        for prefix, next_hop in list(node.static_routes) + list(node.template_statics):
            owner = sim.addr_owner.get(next_hop)
            if owner is None:
                sim.unresolved_statics.append((node.id, prefix, next_hop))
                continue
            statics[node.id].append(RouteEntry(
                prefix=prefix, source="static", metric=0,
                admin_distance=AD_STATIC, next_hop=owner, next_hop_addr=next_hop))

    igp: dict[str, list[RouteEntry]] = {n: [] for n in sim.nodes}
    for area in spec.areas:
        for protocol, participants in _igp_participants(sim, area).items():
            if len(participants) < 1:
                continue
            graph = _build_area_graph(sim, area, participants)
            compute = (compute_distancevector if protocol == "eigrp_like"
                       else compute_linkstate)
            for node_id, entries in compute(graph).items():
                igp[node_id].extend(entries)

    speakers, origins, peerings = _pathvector_inputs(sim, areas)
    pv = compute_pathvector(speakers, peerings, origins) if speakers else {}

    for node in sim.nodes.values():
        node.rib = merge_rib(node.id, connected[node.id], statics[node.id],
                             igp[node.id], pv.get(node.id, []))


def _pathvector_inputs(sim: Simulation, areas: dict[str, AreaSpec]):
    speakers: dict[str, AsNumber] = {}
    origins: dict[str, list[Prefix]] = {}
    for node in sim.nodes.values():
        area = areas[node.area]
        if node.role == "router":
            external = [i for i in node.interfaces.values()
                        if not area.prefix.contains(i.addr)]
            if external:
                speakers[node.id] = area.as_number
                origins[node.id] = [area.prefix] + [i.prefix for i in external]
        elif node.role == "edge" and node.bgp_config is not None:
            speakers[node.id] = AsNumber(int(node.bgp_config["local_as"]))
            origins[node.id] = [Prefix.parse(p)
                                for p in node.bgp_config.get("advertise", [])]

    peerings: list[Peering] = []
    seen_pairs: set[tuple[str, str]] = set()
    for seg in sim.segments:
        attached = []
        for port in seg.attachments:
            if port[0] in speakers:
                iface = sim.nodes[port[0]].interfaces.get(port[1])
                if iface is not None:
                    attached.append((port, iface))
        for i, (pa, ia) in enumerate(attached):
            for pb, ib in attached[i + 1:]:
                pair = tuple(sorted((pa[0], pb[0])))
                if pair in seen_pairs:
                    continue
                seen_pairs.add(pair)
                peerings.append(Peering(pa[0], pa[1], ia.addr,
                                        pb[0], pb[1], ib.addr))
    return speakers, origins, peerings
