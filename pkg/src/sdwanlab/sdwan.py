"""Controller trio and edge lifecycle.

The control plane tracks a DeviceRecord per SD-WAN device (manage, bond,
smart, edges) through the onboarding state machine

    unprovisioned -> bootstrapped -> authenticating -> synced -> managed

Certificates are deterministic tokens bound to (serial, scenario root key);
issuing twice returns the same token. Edges onboard only if their serial is
on the allowlist uploaded through the orchestrator, and become border routers
once a compiled template is pushed. Template-managed devices accept read
commands but reject every write command ("read-only" lockdown).
"""

import copy
from dataclasses import dataclass, field
from hashlib import sha256
from typing import Optional

from .addressing import NetAddress, Prefix, interface_spec
from .errors import (ControllerNotReady, DeviceNotSynced, PermissionDenied,
                     PushFailed, SerialNotAllowed, UnknownCommand,
                     UnknownDevice, Unreachable, ValidationError)
from .simcore import Node, Simulation
from .templates import CompiledConfig, ConfigDiff, DeviceTemplate
from .templates import compile as compile_template
from .templates import diff as config_diff

# onboarding states, in lifecycle order
UNPROVISIONED = "unprovisioned"
BOOTSTRAPPED = "bootstrapped"
AUTHENTICATING = "authenticating"
SYNCED = "synced"
MANAGED = "managed"

_STATE_ORDER = {UNPROVISIONED: 0, BOOTSTRAPPED: 1, AUTHENTICATING: 2,
                SYNCED: 3, MANAGED: 4}

READ_COMMANDS = ("show-routes", "show-interfaces", "show-system",
                 "show-control-connections", "show-config")
WRITE_COMMANDS = ("set-interface", "set-hostname", "set-static-route",
                  "delete-interface", "delete-static-route")


def state_at_least(state: str, floor: str) -> bool:
    return _STATE_ORDER[state] >= _STATE_ORDER[floor]


@dataclass
class DeviceIdentity:
    serial: str
    role: str
    certificate: Optional[str] = None


@dataclass
class DeviceRecord:
    identity: DeviceIdentity
    state: str
    site: str
    node_id: str
    last_sync: Optional[float] = None
    failure_reason: Optional[str] = None

    def describe(self) -> str:
        return (f"{self.identity.serial};{self.identity.role};{self.state};"
                f"{self.identity.certificate};{self.last_sync};{self.failure_reason}")


@dataclass
class ControlConnection:
    device: str  # serial
    controller: str  # node id
    established_at: float
    alive: bool = True


class ControlPlane:
    """Management-side state: inventory, allowlist, certificates, pushes."""

    def __init__(self, sim: Simulation, spec):
        self.sim = sim
        self.spec = spec
        self.root_key = spec.root_key
        self.manage_id = spec.controllers["manage"]
        self.bond_id = spec.controllers["bond"]
        self.smart_id = spec.controllers["smart"]
        self.allowlist: tuple[str, ...] = ()
        self.connections: list[ControlConnection] = []
        self.records: dict[str, DeviceRecord] = {}
        self._register(self.manage_id, "manage")
        self._register(self.bond_id, "bond")
        self._register(self.smart_id, "smart")
        for edge in spec.edges:
            self._register(edge.node, "edge", serial=edge.serial)
        # the management platform itself is up once the scenario is built
        manage = self.records[self._serial_of(self.manage_id)]
        manage.state = SYNCED
        manage.last_sync = sim.now_ms

    def _register(self, node_id: str, role: str, serial: Optional[str] = None):
        node = self.sim.nodes.get(node_id)
        if node is None:
            raise ValidationError(f"sdwan device {node_id!r} missing from topology")
        serial = serial or node.serial or node_id
        node.serial = serial
        state = BOOTSTRAPPED if node.interfaces else UNPROVISIONED
        self.records[serial] = DeviceRecord(
            identity=DeviceIdentity(serial=serial, role=role),
            state=state, site=node.area, node_id=node_id)

    def _serial_of(self, node_id: str) -> str:
        for serial, record in self.records.items():
            if record.node_id == node_id:
                return serial
        raise UnknownDevice(f"no SD-WAN record for node {node_id!r}")

    def record_for(self, serial: str) -> DeviceRecord:
        record = self.records.get(serial)
        if record is None:
            raise UnknownDevice(f"unknown serial {serial!r}")
        return record

    def node_for(self, serial: str) -> Node:
        return self.sim.nodes[self.record_for(serial).node_id]

    # --- reachability ------------------------------------------------------

    def _path_exists(self, src: Node, dst_addr: NetAddress) -> bool:
        """Walk RIBs hop by hop; true when dst is reached both ways."""
        current = src
        for _ in range(64):
            if current.owns(dst_addr):
                return True
            entry = current.rib.lookup(dst_addr)
            if entry is None:
                return False
            if entry.next_hop is not None:
                current = self.sim.nodes[entry.next_hop[0]]
            else:
                owner = self.sim.node_by_addr(dst_addr)
                if owner is None:
                    return False
                current = owner
        return False

    def reachable(self, serial: str) -> bool:
        manage = self.sim.nodes[self.manage_id]
        device = self.node_for(serial)
        if device.primary_addr is None or manage.primary_addr is None:
            return False
        return (self._path_exists(manage, device.primary_addr)
                and self._path_exists(device, manage.primary_addr))

    # --- onboarding --------------------------------------------------------

    def issue_certificate(self, serial: str) -> str:
        """Deterministic token bound to (serial, root key); idempotent."""
        record = self.record_for(serial)
        token = sha256(f"{self.root_key}:{serial}".encode()).hexdigest()[:32]
        if record.identity.certificate is not None:
            return record.identity.certificate  # repeat issuance is a no-op
        if record.state == UNPROVISIONED:
            raise Unreachable(f"{serial}: device has no bootstrap configuration")
        if not self.reachable(serial):
            record.failure_reason = "no underlay path to management"
            raise Unreachable(f"{serial}: no underlay path from management")
        record.identity.certificate = token
        if record.state == BOOTSTRAPPED:
            record.state = AUTHENTICATING
        return token

    def sync(self):
        """Connect every authenticated device into the overlay."""
        for record in self.records.values():
            if record.state != AUTHENTICATING:
                continue
            if not self.reachable(record.identity.serial):
                record.state = BOOTSTRAPPED
                record.failure_reason = "sync failed: unreachable"
                continue
            record.state = SYNCED
            record.last_sync = self.sim.now_ms
            record.failure_reason = None
            self._connect(record, self.manage_id)
            if record.identity.role == "edge":
                self._connect(record, self.smart_id)

    def _connect(self, record: DeviceRecord, controller_id: str):
        for conn in self.connections:
            if conn.device == record.identity.serial and conn.controller == controller_id:
                conn.alive = True
                return
        self.connections.append(ControlConnection(
            device=record.identity.serial, controller=controller_id,
            established_at=self.sim.now_ms))

    def controllers_ready(self) -> bool:
        bond = self.record_for(self._serial_of(self.bond_id))
        smart = self.record_for(self._serial_of(self.smart_id))
        return (state_at_least(bond.state, SYNCED)
                and state_at_least(smart.state, SYNCED))

    def onboard_controllers(self):
        """Certificate + sync for bond and smart (idempotent)."""
        self.issue_certificate(self._serial_of(self.bond_id))
        self.issue_certificate(self._serial_of(self.smart_id))
        self.sync()

    def upload_allowlist(self, serials: list[str]) -> tuple[str, ...]:
        bond = self.record_for(self._serial_of(self.bond_id))
        if not state_at_least(bond.state, SYNCED):
            raise ControllerNotReady(
                "orchestrator is not synced; cannot accept an allowlist")
        self.allowlist = tuple(serials)
        return self.allowlist

    def onboard_edge(self, serial: str) -> DeviceRecord:
        if not self.controllers_ready():
            raise ControllerNotReady("bond/smart controllers are not synced")
        if serial not in self.allowlist:
            raise SerialNotAllowed(f"serial {serial!r} is not on the allowlist")
        record = self.record_for(serial)
        if record.identity.role != "edge":
            raise ValidationError(f"{serial!r} is not an edge device")
        if state_at_least(record.state, SYNCED):
            return record  # already onboarded
        self.issue_certificate(serial)
        self.sync()
        if record.state != SYNCED:
            raise Unreachable(f"{serial}: sync failed "
                              f"({record.failure_reason or 'unknown'})")
        node = self.node_for(serial)
        node.overlay_active = True
        self.sim.refresh_overlay_peers()
        return record

    # --- template push -----------------------------------------------------

    def push_template(self, template: DeviceTemplate, serial: str,
                      variables: dict) -> ConfigDiff:
        record = self.record_for(serial)
        if not state_at_least(record.state, SYNCED):
            raise DeviceNotSynced(
                f"{serial}: device state is {record.state}, push requires synced")
        compiled = compile_template(template, variables)  # CompileError propagates
        node = self.node_for(serial)
        old = CompiledConfig(node.applied_directives, node.applied_config_hash) \
            if node.applied_config_hash else None
        change = config_diff(old, compiled)
        if old is not None and change.empty:
            record.state = MANAGED
            return change  # re-push of identical config is a no-op
        self._apply_config(node, compiled)
        record.state = MANAGED
        node.management_mode = "template_managed"
        return change

    def _apply_config(self, node: Node, compiled: CompiledConfig):
        """All-or-nothing application; roll back on any failure."""
        from .scenario import rebuild_routing

        snapshot = (copy.deepcopy(node.interfaces), list(node.template_statics),
                    node.ospf_ifaces, copy.deepcopy(node.bgp_config),
                    dict(node.system_info), node.applied_directives,
                    node.applied_config_hash)
        wired_ports = {port[1] for port in self.sim.port_link if port[0] == node.id}
        try:
            system: dict[str, str] = {}
            statics: list[tuple[Prefix, NetAddress]] = []
            ospf_ifaces: list[str] = []
            bgp: Optional[dict] = None
            interfaces: list[tuple[str, str]] = []
            static_parts: dict[str, dict[str, str]] = {}
            for key, value in compiled.directives:
                parts = key.split("/")
                if parts[0] == "system":
                    system[parts[1]] = value
                elif parts[0] == "vpn" and parts[2] == "interface":
                    interfaces.append((parts[3], value))
                elif parts[0] == "routing" and parts[1] == "static":
                    static_parts.setdefault(parts[2], {})[parts[3]] = value
                elif parts[0] == "routing" and parts[1] == "ospf":
                    # routing/ospf/area/<id>/interface/<name>/cost
                    ospf_ifaces.append(parts[5])
                elif parts[0] == "routing" and parts[1] == "bgp":
                    if bgp is None:
                        bgp = {"local_as": None, "neighbors": [], "advertise": []}
                    if parts[2] == "local-as":
                        bgp["local_as"] = int(value)
                    elif parts[2] == "neighbor":
                        bgp["neighbors"].append((parts[3], int(value)))
                    elif parts[2] == "advertise":
                        bgp["advertise"].append(value)
            for name, _ in interfaces:
                if name not in wired_ports:
                    raise PushFailed(
                        f"interface {name!r} is not a wired port on {node.id}")
            for idx in sorted(static_parts):
                entry = static_parts[idx]
                statics.append((Prefix.parse(entry["prefix"]),
                                NetAddress.parse(entry["next-hop"])))
            for name in ospf_ifaces:
                if name not in {n for n, _ in interfaces} and name not in node.interfaces:
                    raise PushFailed(f"ospf references unknown interface {name!r}")

            node.system_info = system
            node.template_statics = statics
            node.ospf_ifaces = tuple(ospf_ifaces)
            node.bgp_config = bgp
            for name, cidr in interfaces:
                addr, prefix = interface_spec(cidr)
                self.sim.assign_interface(node.id, name, addr, prefix)
            node.applied_directives = compiled.directives
            node.applied_config_hash = compiled.content_hash
            rebuild_routing(self.sim)
        except Exception as exc:
            (node.interfaces, node.template_statics, node.ospf_ifaces,
             node.bgp_config, node.system_info, node.applied_directives,
             node.applied_config_hash) = snapshot
            # rebuild address ownership from the restored interfaces
            self.sim.addr_owner = {
                iface.addr: (n.id, iface.name)
                for n in self.sim.nodes.values()
                for iface in n.interfaces.values()}
            rebuild_routing(self.sim)
            if isinstance(exc, PushFailed):
                raise
            raise PushFailed(f"config application failed: {exc}") from exc

    # --- views ---------------------------------------------------------------

    def inventory(self) -> list[DeviceRecord]:
        """Devices the management platform displays (state >= synced)."""
        return [r for r in self.records.values() if state_at_least(r.state, SYNCED)]

    def refresh_liveness(self):
        for conn in self.connections:
            conn.alive = self.reachable(conn.device)

    def state_digest(self) -> str:
        h = sha256()
        h.update(f"allowlist={self.allowlist}".encode())
        for serial in sorted(self.records):
            h.update(f"|{self.records[serial].describe()}".encode())
        for conn in self.connections:
            h.update(f"|{conn.device}->{conn.controller}@{conn.established_at}".encode())
        return h.hexdigest()


# --- device CLI ----------------------------------------------------------------


def cli_exec(sim: Simulation, device_id: str, command: str) -> str:
    """Execute one command from the published device command set."""
    node = sim.nodes.get(device_id)
    if node is None and getattr(sim, "overlay", None) is not None:
        try:
            node = sim.overlay.node_for(device_id)
        except UnknownDevice:
            node = None
    if node is None:
        raise UnknownDevice(f"unknown device {device_id!r}")
    words = command.split()
    if not words:
        raise UnknownCommand("empty command")
    name, args = words[0], words[1:]
    if name in READ_COMMANDS:
        return _read_command(sim, node, name)
    if name in WRITE_COMMANDS:
        if node.management_mode == "template_managed":
            raise PermissionDenied("read-only: device is template-managed")
        return _write_command(sim, node, name, args)
    raise UnknownCommand(f"unknown command {name!r}")


def _read_command(sim: Simulation, node: Node, name: str) -> str:
    if name == "show-routes":
        lines = [entry.describe() for entry in node.rib]
        return "\n".join(lines) if lines else "(no routes)"
    if name == "show-interfaces":
        lines = [f"{i.name} {i.addr}/{i.prefix.length}"
                 for i in node.interfaces.values()]
        return "\n".join(lines) if lines else "(no interfaces)"
    if name == "show-system":
        info = {"id": node.id, "role": node.role, "area": node.area,
                "management": node.management_mode, **node.system_info}
        return "\n".join(f"{k}: {v}" for k, v in info.items())
    if name == "show-control-connections":
        overlay = getattr(sim, "overlay", None)
        if overlay is None:
            return "(no overlay)"
        lines = [f"{c.device} -> {c.controller} alive={c.alive}"
                 for c in overlay.connections
                 if c.device == node.serial or node.role in ("manage", "bond", "smart")]
        return "\n".join(lines) if lines else "(no connections)"
    if name == "show-config":
        if not node.applied_directives:
            return "(local configuration)"
        return "\n".join(f"{k} = {v}" for k, v in node.applied_directives)
    raise UnknownCommand(name)


def _write_command(sim: Simulation, node: Node, name: str, args: list[str]) -> str:
    from .scenario import rebuild_routing

    if name == "set-interface":
        if len(args) != 2:
            raise UnknownCommand("usage: set-interface <name> <A.B.C.D/L>")
        addr, prefix = interface_spec(args[1])
        sim.assign_interface(node.id, args[0], addr, prefix)
        rebuild_routing(sim)
        return f"interface {args[0]} set to {args[1]}"
    if name == "set-hostname":
        if len(args) != 1:
            raise UnknownCommand("usage: set-hostname <name>")
        node.system_info["host-name"] = args[0]
        return f"hostname set to {args[0]}"
    if name == "set-static-route":
        if len(args) != 2:
            raise UnknownCommand("usage: set-static-route <prefix> <next-hop>")
        node.static_routes.append((Prefix.parse(args[0]), NetAddress.parse(args[1])))
        rebuild_routing(sim)
        return f"static route {args[0]} via {args[1]} installed"
    if name == "delete-interface":
        if len(args) != 1:
            raise UnknownCommand("usage: delete-interface <name>")
        sim.remove_interface(node.id, args[0])
        rebuild_routing(sim)
        return f"interface {args[0]} removed"
    if name == "delete-static-route":
        if len(args) != 1:
            raise UnknownCommand("usage: delete-static-route <prefix>")
        target = Prefix.parse(args[0])
        node.static_routes = [(p, nh) for p, nh in node.static_routes if p != target]
        rebuild_routing(sim)
        return f"static route {args[0]} removed"
    raise UnknownCommand(name)
