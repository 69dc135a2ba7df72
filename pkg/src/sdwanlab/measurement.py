"""Experiment harness: ping campaigns, hardware sampling, comparisons.

A campaign sends ``count`` echo probes of one size from one node to another,
paced at the scenario's ping interval, and aggregates replies into RTT and
TTL statistics. A comparison builds the two scenario variants, brings the
SD-WAN one to a fully managed state (controller onboarding, allowlist, edge
onboarding, template pushes), runs matched campaigns with identical seeds on
the same area-to-area paths, and collects a hardware snapshot of the SD-WAN
devices.
"""

import random
from dataclasses import dataclass
from typing import Optional

from .errors import UnknownDevice, UnknownEndpoint, ValidationError
from .scenario import ScenarioSpec, build
from .simcore import ECHO_REPLY, ECHO_REQUEST, Packet, Simulation
from .templates import load_template

# the three measured area-to-area paths
PAPER_PATHS = (("headquarter", "datacentre"),
               ("datacentre", "branch3"),
               ("datacentre", "branch4"))


@dataclass(frozen=True)
class PingCampaign:
    src: str  # node id
    dst: str
    count: int = 100
    size_bytes: int = 84
    seed: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValidationError("campaign count must be >= 1")
        if self.size_bytes < 1:
            raise ValidationError("campaign packet size must be >= 1")
        if self.src == self.dst:
            raise ValidationError("campaign source and destination must differ")


@dataclass(frozen=True)
class PingReport:
    src: str
    dst: str
    size_bytes: int
    sent: int
    received: int
    observed_ttl: Optional[int]
    min_rtt_ms: float
    max_rtt_ms: float
    avg_rtt_ms: float

    def as_dict(self) -> dict:
        return {"src": self.src, "dst": self.dst, "size_bytes": self.size_bytes,
                "sent": self.sent, "received": self.received,
                "observed_ttl": self.observed_ttl,
                "min_rtt_ms": self.min_rtt_ms, "max_rtt_ms": self.max_rtt_ms,
                "avg_rtt_ms": self.avg_rtt_ms}


@dataclass(frozen=True)
class HardwareSample:
    device: str
    num_cpus: int
    memory_total_mb: int
    cpu_pct: float
    mem_pct: float
    at: float

    def as_dict(self) -> dict:
        return {"device": self.device, "num_cpus": self.num_cpus,
                "memory_total_mb": self.memory_total_mb,
                "cpu_pct": self.cpu_pct, "mem_pct": self.mem_pct, "at": self.at}


@dataclass(frozen=True)
class PathComparison:
    src_area: str
    dst_area: str
    traditional: PingReport
    sdwan: PingReport
    avg_rtt_ratio: float
    ttl_delta: int

    def as_dict(self) -> dict:
        return {"src_area": self.src_area, "dst_area": self.dst_area,
                "traditional": self.traditional.as_dict(),
                "sdwan": self.sdwan.as_dict(),
                "avg_rtt_ratio": self.avg_rtt_ratio, "ttl_delta": self.ttl_delta}


@dataclass(frozen=True)
class ComparisonReport:
    traditional_name: str
    sdwan_name: str
    paths: tuple[PathComparison, ...]
    hardware: tuple[HardwareSample, ...]

    def as_dict(self) -> dict:
        return {"traditional": self.traditional_name, "sdwan": self.sdwan_name,
                "paths": [p.as_dict() for p in self.paths],
                "hardware": [h.as_dict() for h in self.hardware]}


def run_ping(sim: Simulation, campaign: PingCampaign) -> PingReport:
    """Run one campaign to completion; deterministic for a fixed seed."""
    src = sim.nodes.get(campaign.src)
    dst = sim.nodes.get(campaign.dst)
    if src is None or src.primary_addr is None:
        raise UnknownEndpoint(f"unknown or unaddressed source {campaign.src!r}")
    if dst is None or dst.primary_addr is None:
        raise UnknownEndpoint(f"unknown or unaddressed destination {campaign.dst!r}")

    sim.rng = random.Random(campaign.seed)
    interval = sim.scenario.defaults.ping_interval_ms if hasattr(sim, "scenario") else 10.0
    start_index = len(sim.deliveries)
    t0 = sim.now_ms
    for i in range(campaign.count):
        at = t0 + i * interval
        packet = Packet(src=src.primary_addr, dst=dst.primary_addr,
                        ttl=sim.initial_ttl, size_bytes=campaign.size_bytes,
                        seq=i, sent_at=at, kind=ECHO_REQUEST)
        sim.schedule(at, lambda p=packet: sim.emit(campaign.src, p))
    sim.run_until_idle()

    rtts: list[float] = []
    ttls: set[int] = set()
    for packet, at, node_id in sim.deliveries[start_index:]:
        if (node_id == campaign.src and packet.kind == ECHO_REPLY
                and packet.src == dst.primary_addr):
            rtts.append(at - packet.sent_at)
            ttls.add(packet.ttl)
    if len(ttls) > 1:
        raise ValidationError(f"unstable path: observed reply TTLs {sorted(ttls)}")
    return PingReport(
        src=campaign.src, dst=campaign.dst, size_bytes=campaign.size_bytes,
        sent=campaign.count, received=len(rtts),
        observed_ttl=ttls.pop() if ttls else None,
        min_rtt_ms=min(rtts) if rtts else 0.0,
        max_rtt_ms=max(rtts) if rtts else 0.0,
        avg_rtt_ms=sum(rtts) / len(rtts) if rtts else 0.0)


def _managed_objects(sim: Simulation, node) -> int:
    overlay = getattr(sim, "overlay", None)
    if node.role == "manage":
        return len(overlay.inventory()) if overlay else 0
    if node.role == "bond":
        return len(overlay.allowlist) if overlay else 0
    if node.role == "smart":
        if overlay is None:
            return 0
        return sum(1 for c in overlay.connections if c.controller == overlay.smart_id)
    if node.role == "edge":
        return len(node.applied_directives)
    return len(node.rib)


def sample_hardware(sim: Simulation, device: str) -> HardwareSample:
    """Synthetic, deterministic load model per role (no real CPUs here)."""
    node = sim.nodes.get(device)
    if node is None:
        raise UnknownDevice(f"unknown device {device!r}")
    params = sim.scenario.defaults.hardware_for(node.role)
    tau = sim.scenario.defaults.hardware_tau_ms
    activity = node.decayed_activity(sim.now_ms, tau)
    cpu = min(100.0, params["cpu_base"] + params["cpu_per_event"] * activity)
    mem = min(100.0, params["mem_base"]
              + params["mem_per_object"] * _managed_objects(sim, node))
    return HardwareSample(
        device=device, num_cpus=int(params["num_cpus"]),
        memory_total_mb=int(params["mem_total_mb"]),
        cpu_pct=cpu, mem_pct=mem, at=sim.now_ms)


def run_replication_workflow(sim: Simulation):
    """Bring an SD-WAN scenario to steady state: certificates, allowlist,
    edge onboarding and template pushes, in the documented order."""
    overlay = getattr(sim, "overlay", None)
    if overlay is None:
        return
    overlay.onboard_controllers()
    overlay.upload_allowlist(list(sim.scenario.sdwan.allowlist))
    base = (sim.scenario.source_path.parent
            if sim.scenario.source_path is not None else None)
    for edge in sim.scenario.sdwan.edges:
        overlay.onboard_edge(edge.serial)
        if edge.template:
            path = (base / edge.template) if base is not None else edge.template
            template = load_template(path)
            overlay.push_template(template, edge.serial, dict(edge.variables))


def run_comparison(traditional_spec: ScenarioSpec, sdwan_spec: ScenarioSpec,
                   paths=PAPER_PATHS, count: int = 100, size: int = 84,
                   seed: int = 1) -> ComparisonReport:
    """Build both variants, run matched campaigns, snapshot hardware."""
    sims: dict[str, Simulation] = {}
    for label, spec in (("traditional", traditional_spec), ("sdwan", sdwan_spec)):
        sim = build(spec)
        run_replication_workflow(sim)
        sims[label] = sim

    comparisons: list[PathComparison] = []
    for i, (src_area, dst_area) in enumerate(paths):
        reports: dict[str, PingReport] = {}
        for label, sim in sims.items():
            spec = sim.scenario
            campaign = PingCampaign(
                src=spec.endpoint_for(src_area), dst=spec.endpoint_for(dst_area),
                count=count, size_bytes=size, seed=seed * 1000 + i)
            reports[label] = run_ping(sim, campaign)
        trad, sdw = reports["traditional"], reports["sdwan"]
        ratio = (sdw.avg_rtt_ms / trad.avg_rtt_ms) if trad.avg_rtt_ms else 0.0
        delta = ((sdw.observed_ttl or 0) - (trad.observed_ttl or 0))
        comparisons.append(PathComparison(
            src_area=src_area, dst_area=dst_area, traditional=trad,
            sdwan=sdw, avg_rtt_ratio=ratio, ttl_delta=delta))

    hardware: list[HardwareSample] = []
    overlay = getattr(sims["sdwan"], "overlay", None)
    if overlay is not None:
        for serial in sorted(overlay.records,
                             key=lambda s: ("manage bond smart edge".split().index(
                                 overlay.records[s].identity.role), s)):
            hardware.append(sample_hardware(sims["sdwan"],
                                            overlay.records[serial].node_id))

    return ComparisonReport(
        traditional_name=traditional_spec.name, sdwan_name=sdwan_spec.name,
        paths=tuple(comparisons), hardware=tuple(hardware))
