"""Command-line interface.

Usage errors exit 2 (click's default); domain errors exit 1 with a one-line
message. Scenario arguments accept either a registered name (see `load`) or
a path to a scenario file (the .yaml suffix may be omitted).
"""

import functools
import sys
from pathlib import Path

import click

from ..errors import SdwanLabError
from ..measurement import PingCampaign, run_comparison, run_ping
from ..reporting import write_comparison_report
from ..scenario import load_scenario
from ..sdwan import cli_exec as device_exec
from .session import Session


def domain_errors(fn):
    """Map SdwanLabError to exit code 1 with a single-line message."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SdwanLabError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
def main():
    """Deterministic SD-WAN lab: scenarios, onboarding, experiments."""


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@domain_errors
def load(file):
    """Validate a scenario file and register it by name."""
    session = Session()
    spec = load_scenario(file)
    name = session.register(spec, Path(file))
    click.echo(f"loaded scenario {name!r} "
               f"({len(spec.areas)} areas, {len(spec.nodes)} nodes, "
               f"{len(spec.links)} links)")


@main.command()
@click.argument("scenario")
@domain_errors
def run(scenario):
    """Build a scenario, converge routing, and print a summary."""
    session = Session()
    sim = session.build_sim(scenario)
    spec = sim.scenario
    rib_total = sum(len(n.rib) for n in sim.nodes.values())
    click.echo(f"scenario {spec.name!r}: {len(sim.nodes)} nodes, "
               f"{len(sim.links)} links, {len(sim.segments)} segments, "
               f"{rib_total} routes installed")
    if getattr(sim, "overlay", None) is not None:
        for record in sim.overlay.records.values():
            click.echo(f"  {record.identity.serial:<10} {record.identity.role:<7} "
                       f"{record.state}")


@main.command()
@click.argument("scenario")
@click.argument("serial")
@domain_errors
def onboard(scenario, serial):
    """Onboard an edge device by serial (controllers are prepared first)."""
    session = Session()
    sim = session.build_sim(scenario)
    session.record(sim, {"op": "onboard", "serial": serial})
    record = sim.overlay.record_for(serial)
    click.echo(f"{serial}: state {record.state}")


def _parse_vars(pairs) -> dict:
    variables = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.UsageError(f"--var expects k=v, got {pair!r}")
        key, _, value = pair.partition("=")
        variables[key] = value
    return variables


@main.command()
@click.argument("scenario")
@click.argument("template", type=click.Path(exists=True, dir_okay=False))
@click.argument("serial")
@click.option("--var", "variables", multiple=True,
              help="Template variable binding k=v (repeatable).")
@domain_errors
def push(scenario, template, serial, variables):
    """Compile a template and push it to a device.

    Variables default to the scenario's per-edge bindings; --var overrides."""
    session = Session()
    sim = session.build_sim(scenario)
    merged = {}
    sdwan_spec = sim.scenario.sdwan
    if sdwan_spec is not None:
        for edge in sdwan_spec.edges:
            if edge.serial == serial:
                merged.update(edge.variables)
    merged.update(_parse_vars(variables))
    session.record(sim, {"op": "push", "serial": serial,
                         "template": str(Path(template).resolve()),
                         "variables": merged})
    record = sim.overlay.record_for(serial)
    click.echo(f"{serial}: state {record.state}, "
               f"config {sim.overlay.node_for(serial).applied_config_hash[:12]}")


@main.command()
@click.argument("scenario")
@click.argument("src")
@click.argument("dst")
@click.option("--count", default=100, show_default=True)
@click.option("--size", default=84, show_default=True)
@click.option("--seed", default=1, show_default=True)
@domain_errors
def ping(scenario, src, dst, count, size, seed):
    """Run an echo campaign between two nodes."""
    if src == dst:
        raise click.UsageError("source and destination must differ")
    session = Session()
    sim = session.build_sim(scenario)
    report = run_ping(sim, PingCampaign(src=src, dst=dst, count=count,
                                        size_bytes=size, seed=seed))
    ttl = report.observed_ttl if report.observed_ttl is not None else "-"
    click.echo(f"{src} -> {dst}: {report.received}/{report.sent} replies, "
               f"ttl {ttl}, rtt min/avg/max = "
               f"{report.min_rtt_ms:.3f}/{report.avg_rtt_ms:.3f}/"
               f"{report.max_rtt_ms:.3f} ms")


@main.command()
@click.argument("traditional")
@click.argument("sdwan")
@click.option("--out", required=True, type=click.Path(file_okay=False),
              help="Report output directory.")
@click.option("--count", default=100, show_default=True)
@click.option("--size", default=84, show_default=True)
@click.option("--seed", default=1, show_default=True)
@domain_errors
def compare(traditional, sdwan, out, count, size, seed):
    """Run the three-path comparison between two scenario variants."""
    session = Session()
    trad_spec = session.load_spec(traditional)
    sdwan_spec = session.load_spec(sdwan)
    report = run_comparison(trad_spec, sdwan_spec, count=count, size=size,
                            seed=seed)
    out_dir = write_comparison_report(report, out)
    session.register_report(Path(out).name, out_dir)
    for pair in report.paths:
        click.echo(f"{pair.src_area} -> {pair.dst_area}: "
                   f"traditional {pair.traditional.avg_rtt_ms:.3f} ms "
                   f"(ttl {pair.traditional.observed_ttl}) vs "
                   f"sdwan {pair.sdwan.avg_rtt_ms:.3f} ms "
                   f"(ttl {pair.sdwan.observed_ttl})")
    click.echo(f"report written to {out_dir}")


@main.command(name="exec")
@click.argument("scenario")
@click.argument("device")
@click.argument("command", nargs=-1, required=True)
@domain_errors
def exec_(scenario, device, command):
    """Run a device CLI command (read set always works; write set only on
    locally-managed devices)."""
    session = Session()
    sim = session.build_sim(scenario)
    line = " ".join(command)
    from ..sdwan import WRITE_COMMANDS

    output = device_exec(sim, device, line)
    if line.split()[0] in WRITE_COMMANDS:
        # successful write: keep it for future invocations
        session.append_journal(sim.scenario.name, {"op": "exec", "device": device,
                                                   "command": line})
    click.echo(output)


@main.command()
@click.option("--port", default=None, type=int,
              help="Listen port (default 8080, env SDWANLAB_PORT overrides).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--scenario", "scenario_ref", default=None,
              help="Scenario to serve (default: scenarios/sdwan.yaml).")
@domain_errors
def serve(port, host, scenario_ref):
    """Start the HTTP API (and dashboard, when built) on the given port."""
    import os

    import uvicorn

    from .api import create_app

    if port is None:
        port = int(os.environ.get("SDWANLAB_PORT", "8080"))
    app = create_app(scenario_ref)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
