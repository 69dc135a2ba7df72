"""HTTP API under /api/v1 plus static dashboard hosting under /ui.

The server embeds one active simulation. State-changing requests are
serialized through a process-wide lock; reads never mutate simulation state.
Domain errors map to exactly one status code each (docs/error-mapping.md):
400 malformed input, 404 unknown ids, 409 state conflicts, 500 otherwise.
"""

import os
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..errors import (CompileError, ControllerNotReady, DeviceNotSynced,
                      PermissionDenied, PushFailed, SchemaError, SdwanLabError,
                      SerialNotAllowed, UnknownCommand, UnknownDevice,
                      UnknownEndpoint, Unreachable, ValidationError)
from ..measurement import (PingCampaign, run_comparison, run_ping,
                           sample_hardware)
from ..reporting import write_comparison_report
from ..scenario import build
from ..sdwan import cli_exec
from ..templates import load_template, template_from_dict, validate_template
from .session import Session

STATUS_BY_ERROR = (
    (404, (UnknownDevice, UnknownEndpoint)),
    (400, (SchemaError, ValidationError, CompileError, UnknownCommand)),
    (409, (SerialNotAllowed, ControllerNotReady, DeviceNotSynced,
           PermissionDenied, Unreachable, PushFailed)),
)

DEFAULT_SCENARIO = "scenarios/sdwan.yaml"


def _status_for(exc: SdwanLabError) -> int:
    for status, kinds in STATUS_BY_ERROR:
        if isinstance(exc, kinds):
            return status
    return 500


def _ui_dir() -> Optional[Path]:
    env = os.environ.get("SDWANLAB_UI_DIR")
    candidates = [Path(env)] if env else []
    candidates.append(Path.cwd() / "frontend" / "dist")
    candidates.append(Path(__file__).resolve().parents[4] / "frontend" / "dist")
    for candidate in candidates:
        if candidate.is_dir():
            return candidate
    return None


def create_app(scenario_ref: Optional[str] = None,
               session: Optional[Session] = None) -> FastAPI:
    session = session or Session()
    sim = session.build_sim(scenario_ref or DEFAULT_SCENARIO)

    app = FastAPI(title="sdwanlab", version="0.1.0")
    state = app.state
    state.session = session
    state.sim = sim
    state.lock = threading.Lock()
    state.templates = {}
    state.reports = {}
    state.report_seq = 0

    # canonical templates referenced by the scenario are available by id
    spec = sim.scenario
    if spec.sdwan is not None and spec.source_path is not None:
        for edge in spec.sdwan.edges:
            if edge.template:
                template = load_template(spec.source_path.parent / edge.template)
                state.templates[template.id] = template

    @app.exception_handler(SdwanLabError)
    async def domain_error_handler(request: Request, exc: SdwanLabError):
        return JSONResponse(status_code=_status_for(exc),
                            content={"error": type(exc).__name__,
                                     "detail": str(exc)})

    def overlay_or_conflict():
        overlay = getattr(state.sim, "overlay", None)
        if overlay is None:
            raise ControllerNotReady("active scenario has no SD-WAN control plane")
        return overlay

    def device_view(record) -> dict:
        overlay = overlay_or_conflict()
        node = state.sim.nodes[record.node_id]
        edge_spec = None
        if state.sim.scenario.sdwan is not None:
            for edge in state.sim.scenario.sdwan.edges:
                if edge.serial == record.identity.serial:
                    edge_spec = edge
        return {
            "serial": record.identity.serial,
            "role": record.identity.role,
            "state": record.state,
            "site": record.site,
            "node_id": record.node_id,
            "reachability": ("reachable"
                             if overlay.reachable(record.identity.serial)
                             else "unreachable"),
            "certified": record.identity.certificate is not None,
            "management_mode": node.management_mode,
            "allowlisted": record.identity.serial in overlay.allowlist
                           or record.identity.serial in (state.sim.scenario.sdwan.allowlist
                                                         if state.sim.scenario.sdwan else ()),
            "last_sync": record.last_sync,
            "failure_reason": record.failure_reason,
            "template": edge_spec.template if edge_spec else None,
            "default_variables": dict(edge_spec.variables) if edge_spec else {},
        }

    # --- read endpoints ------------------------------------------------------

    @app.get("/api/v1/scenario")
    def get_scenario():
        spec = state.sim.scenario
        return {"name": spec.name, "description": spec.description,
                "areas": [a.name for a in spec.areas],
                "nodes": len(spec.nodes), "links": len(spec.links),
                "sdwan": spec.sdwan is not None}

    @app.get("/api/v1/devices")
    def get_devices():
        overlay = overlay_or_conflict()
        return [device_view(overlay.records[serial])
                for serial in sorted(overlay.records)]

    def _node_id_for(device_id: str) -> str:
        overlay = getattr(state.sim, "overlay", None)
        if overlay is not None and device_id in overlay.records:
            return overlay.records[device_id].node_id
        if device_id in state.sim.nodes:
            return device_id
        raise UnknownDevice(f"unknown device {device_id!r}")

    @app.get("/api/v1/devices/{device_id}/hardware")
    def get_hardware(device_id: str):
        return sample_hardware(state.sim, _node_id_for(device_id)).as_dict()

    @app.get("/api/v1/devices/{device_id}/routes")
    def get_routes(device_id: str):
        node = state.sim.nodes[_node_id_for(device_id)]
        return {"device": device_id,
                "routes": [{"prefix": str(e.prefix), "source": e.source,
                            "metric": e.metric, "admin_distance": e.admin_distance,
                            "next_hop": str(e.next_hop_addr) if e.next_hop_addr else None,
                            "as_path": list(e.as_path)}
                           for e in node.rib]}

    @app.get("/api/v1/templates")
    def list_templates():
        return [{"id": t.id, "name": t.name,
                 "variables": dict(t.variables),
                 "features": [f.kind for f in t.features]}
                for t in state.templates.values()]

    @app.get("/api/v1/templates/{template_id}")
    def get_template(template_id: str):
        template = state.templates.get(template_id)
        if template is None:
            raise UnknownDevice(f"unknown template {template_id!r}")
        return {"id": template.id, "name": template.name,
                "variables": dict(template.variables),
                "features": [{"kind": f.kind, "parameters": f.parameters}
                             for f in template.features]}

    @app.get("/api/v1/reports")
    def list_reports():
        return sorted(state.reports)

    @app.get("/api/v1/reports/{report_id}")
    def get_report(report_id: str):
        report = state.reports.get(report_id)
        if report is None:
            raise UnknownDevice(f"unknown report {report_id!r}")
        return report

    # --- mutating endpoints ----------------------------------------------------

    @app.post("/api/v1/templates", status_code=201)
    def create_template(document: dict):
        template = template_from_dict(document)
        violations = validate_template(template)
        if violations:
            raise ValidationError("invalid template: " + "; ".join(violations))
        with state.lock:
            state.templates[template.id] = template
        return {"id": template.id, "violations": []}

    @app.post("/api/v1/onboard")
    def onboard(body: dict):
        serial = body.get("serial")
        if not serial:
            raise ValidationError("body must carry a serial")
        overlay = overlay_or_conflict()
        with state.lock:
            overlay.onboard_controllers()
            if not overlay.allowlist:
                overlay.upload_allowlist(list(state.sim.scenario.sdwan.allowlist))
            record = overlay.onboard_edge(serial)
        return device_view(record)

    @app.post("/api/v1/templates/{template_id}/push")
    def push(template_id: str, body: dict):
        template = state.templates.get(template_id)
        if template is None:
            raise UnknownDevice(f"unknown template {template_id!r}")
        serial = body.get("serial")
        if not serial:
            raise ValidationError("body must carry a serial")
        overlay = overlay_or_conflict()
        variables = {}
        if state.sim.scenario.sdwan is not None:
            for edge in state.sim.scenario.sdwan.edges:
                if edge.serial == serial:
                    variables.update(edge.variables)
        variables.update(body.get("variables") or {})
        with state.lock:
            change = overlay.push_template(template, serial, variables)
        return {"device": device_view(overlay.record_for(serial)),
                "diff": {"added": len(change.added), "removed": len(change.removed),
                         "changed": len(change.changed)}}

    @app.post("/api/v1/experiments/ping", status_code=201)
    def ping_experiment(body: dict):
        campaign = PingCampaign(
            src=body.get("src", ""), dst=body.get("dst", ""),
            count=int(body.get("count", 100)),
            size_bytes=int(body.get("size", 84)),
            seed=int(body.get("seed", 1)))
        with state.lock:
            report = run_ping(state.sim, campaign)
        state.report_seq += 1
        report_id = f"ping-{state.report_seq:04d}"
        state.reports[report_id] = {"id": report_id, "kind": "ping",
                                    "report": report.as_dict()}
        return state.reports[report_id]

    @app.post("/api/v1/experiments/compare", status_code=201)
    def compare_experiment(body: dict):
        trad_ref = body.get("traditional", "scenarios/traditional.yaml")
        sdwan_ref = body.get("sdwan", DEFAULT_SCENARIO)
        count = int(body.get("count", 100))
        size = int(body.get("size", 84))
        seed = int(body.get("seed", 1))
        trad_spec = state.session.load_spec(trad_ref)
        sdwan_spec = state.session.load_spec(sdwan_ref)
        with state.lock:
            report = run_comparison(trad_spec, sdwan_spec, count=count,
                                    size=size, seed=seed)
        state.report_seq += 1
        report_id = body.get("name") or f"compare-{state.report_seq:04d}"
        out_dir = body.get("out")
        if out_dir:
            write_comparison_report(report, out_dir)
            state.session.register_report(report_id, Path(out_dir))
        state.reports[report_id] = {"id": report_id, "kind": "comparison",
                                    "report": report.as_dict()}
        return state.reports[report_id]

    @app.post("/api/v1/devices/{device_id}/exec")
    def exec_command(device_id: str, body: dict):
        command = body.get("command")
        if not command:
            raise ValidationError("body must carry a command")
        with state.lock:
            output = cli_exec(state.sim, device_id, command)
        return {"device": device_id, "command": command, "output": output}

    ui = _ui_dir()
    if ui is not None:
        app.mount("/ui", StaticFiles(directory=ui, html=True), name="ui")

    return app
