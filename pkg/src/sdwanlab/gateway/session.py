"""Cross-invocation session state for the CLI.

The CLI is stateless between processes, so mutating commands (onboard, push,
exec writes) are appended to a per-scenario journal. Every invocation rebuilds
the simulation from its scenario file and replays the journal; determinism of
the simulator makes the replayed state identical to a long-running session.

Layout under the session home (env SDWANLAB_HOME, default ~/.sdwanlab):

    registry.json            scenario name -> absolute file path
    journal-<name>.jsonl     one JSON operation per line
    reports.json             report id -> directory
"""

import json
import os
from pathlib import Path
from typing import Optional

from ..errors import SdwanLabError, ValidationError
from ..measurement import run_replication_workflow
from ..scenario import ScenarioSpec, build, load_scenario
from ..sdwan import cli_exec
from ..simcore import Simulation
from ..templates import load_template

ENV_HOME = "SDWANLAB_HOME"


def session_home() -> Path:
    home = os.environ.get(ENV_HOME)
    path = Path(home) if home else Path.home() / ".sdwanlab"
    path.mkdir(parents=True, exist_ok=True)
    return path


def _read_json(path: Path, fallback):
    if not path.exists():
        return fallback
    return json.loads(path.read_text())


class Session:
    """Scenario registry plus replayable operation journals."""

    def __init__(self, home: Optional[Path] = None):
        self.home = home or session_home()
        self.registry_path = self.home / "registry.json"
        self.reports_path = self.home / "reports.json"

    # --- registry -----------------------------------------------------------

    def registry(self) -> dict[str, str]:
        return _read_json(self.registry_path, {})

    def register(self, spec: ScenarioSpec, path: Path) -> str:
        reg = self.registry()
        reg[spec.name] = str(path.resolve())
        self.registry_path.write_text(json.dumps(reg, indent=2))
        return spec.name

    def resolve(self, ref: str) -> Path:
        """A scenario reference is a registered name or a file path
        (a trailing .yaml may be omitted)."""
        reg = self.registry()
        if ref in reg:
            return Path(reg[ref])
        for candidate in (Path(ref), Path(f"{ref}.yaml"), Path(f"{ref}.yml")):
            if candidate.is_file():
                return candidate
        raise ValidationError(f"unknown scenario {ref!r} (not registered, not a file)")

    # --- journal ------------------------------------------------------------

    def _journal_path(self, name: str) -> Path:
        return self.home / f"journal-{name}.jsonl"

    def journal(self, name: str) -> list[dict]:
        path = self._journal_path(name)
        if not path.exists():
            return []
        return [json.loads(line) for line in path.read_text().splitlines() if line]

    def append_journal(self, name: str, op: dict):
        with open(self._journal_path(name), "a") as fh:
            fh.write(json.dumps(op) + "\n")

    def clear_journal(self, name: str):
        self._journal_path(name).unlink(missing_ok=True)

    # --- simulation lifecycle -------------------------------------------------

    def load_spec(self, ref: str) -> ScenarioSpec:
        return load_scenario(self.resolve(ref))

    def build_sim(self, ref: str, replay: bool = True) -> Simulation:
        spec = self.load_spec(ref)
        sim = build(spec)
        if replay:
            for op in self.journal(spec.name):
                self.apply_op(sim, op)
        return sim

    def apply_op(self, sim: Simulation, op: dict):
        kind = op["op"]
        if kind == "onboard":
            overlay = self._overlay(sim)
            overlay.onboard_controllers()
            if not overlay.allowlist:
                overlay.upload_allowlist(list(sim.scenario.sdwan.allowlist))
            overlay.onboard_edge(op["serial"])
        elif kind == "push":
            overlay = self._overlay(sim)
            template = load_template(op["template"])
            overlay.push_template(template, op["serial"], op["variables"])
        elif kind == "exec":
            cli_exec(sim, op["device"], op["command"])
        elif kind == "workflow":
            run_replication_workflow(sim)
        else:
            raise ValidationError(f"unknown journal operation {kind!r}")

    def record(self, sim: Simulation, op: dict):
        """Apply an operation and persist it for future invocations."""
        self.apply_op(sim, op)
        self.append_journal(sim.scenario.name, op)

    @staticmethod
    def _overlay(sim: Simulation):
        overlay = getattr(sim, "overlay", None)
        if overlay is None:
            raise SdwanLabError("scenario has no SD-WAN control plane")
        return overlay

    # --- reports ---------------------------------------------------------------

    def reports(self) -> dict[str, str]:
        return _read_json(self.reports_path, {})

    def register_report(self, report_id: str, directory: Path):
        reports = self.reports()
        reports[report_id] = str(Path(directory).resolve())
        self.reports_path.write_text(json.dumps(reports, indent=2))
