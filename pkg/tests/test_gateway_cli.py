from pathlib import Path

import pytest
from click.testing import CliRunner

from sdwanlab.gateway.cli import main

from conftest import SDWAN, TRADITIONAL


@pytest.fixture()
def runner():
    return CliRunner()


class TestLoadRun:
    def test_load_registers_by_name(self, runner):
        result = runner.invoke(main, ["load", str(TRADITIONAL)])
        assert result.exit_code == 0, result.output
        assert "traditional" in result.output
        # name now resolves without a path
        result = runner.invoke(main, ["run", "traditional"])
        assert result.exit_code == 0, result.output
        assert "routes installed" in result.output

    def test_run_accepts_path_without_suffix(self, runner):
        ref = str(TRADITIONAL)[: -len(".yaml")]
        result = runner.invoke(main, ["run", ref])
        assert result.exit_code == 0, result.output

    def test_unknown_scenario_is_domain_error(self, runner):
        result = runner.invoke(main, ["run", "missing-lab"])
        assert result.exit_code == 1
        assert "error:" in result.output

    def test_load_missing_file_is_usage_error(self, runner):
        result = runner.invoke(main, ["load", "nosuch.yaml"])
        assert result.exit_code == 2


class TestPing:
    def test_ping_reports_statistics(self, runner):
        result = runner.invoke(main, ["ping", str(TRADITIONAL), "hq-host",
                                      "dc-host", "--count", "5"])
        assert result.exit_code == 0, result.output
        assert "5/5 replies" in result.output
        assert "ttl 61" in result.output

    def test_ping_same_endpoints_usage_error(self, runner):
        result = runner.invoke(main, ["ping", str(TRADITIONAL), "hq-host",
                                      "hq-host"])
        assert result.exit_code == 2

    def test_ping_unknown_node_domain_error(self, runner):
        result = runner.invoke(main, ["ping", str(TRADITIONAL), "hq-host",
                                      "nobody"])
        assert result.exit_code == 1
        assert "error:" in result.output


class TestOnboardPushExec:
    def test_full_onboarding_flow_persists_across_invocations(self, runner):
        result = runner.invoke(main, ["onboard", str(SDWAN), "E40"])
        assert result.exit_code == 0, result.output
        assert "synced" in result.output

        template = str(Path(SDWAN).parent.parent / "templates" / "branch3.yaml")
        result = runner.invoke(main, ["push", str(SDWAN), template, "E40"])
        assert result.exit_code == 0, result.output
        assert "managed" in result.output

        # lockdown holds in a fresh process (journal replay)
        result = runner.invoke(main, ["exec", str(SDWAN), "E40",
                                      "set-interface", "lan0", "10.4.0.1/24"])
        assert result.exit_code == 1
        assert "read-only" in result.output

        result = runner.invoke(main, ["exec", str(SDWAN), "E40", "show-routes"])
        assert result.exit_code == 0
        assert "10.4.0.0/24" in result.output

    def test_onboard_unlisted_serial_fails(self, runner):
        result = runner.invoke(main, ["onboard", str(SDWAN), "EVIL"])
        assert result.exit_code == 1
        assert "allowlist" in result.output

    def test_push_with_var_override(self, runner):
        runner.invoke(main, ["onboard", str(SDWAN), "E40"])
        template = str(Path(SDWAN).parent.parent / "templates" / "branch3.yaml")
        result = runner.invoke(main, ["push", str(SDWAN), template, "E40",
                                      "--var", "hostname=EDGE-40"])
        assert result.exit_code == 0, result.output
        result = runner.invoke(main, ["exec", str(SDWAN), "E40", "show-system"])
        assert "EDGE-40" in result.output

    def test_exec_write_on_local_edge_persists(self, runner):
        result = runner.invoke(main, ["exec", str(SDWAN), "E40",
                                      "set-hostname", "bootstrapped-edge"])
        assert result.exit_code == 0, result.output
        result = runner.invoke(main, ["exec", str(SDWAN), "E40", "show-system"])
        assert "bootstrapped-edge" in result.output


class TestCompare:
    def test_compare_writes_report_files(self, runner, tmp_path):
        out = tmp_path / "paper"
        result = runner.invoke(main, ["compare", str(TRADITIONAL), str(SDWAN),
                                      "--out", str(out), "--count", "10"])
        assert result.exit_code == 0, result.output
        for name in ("summary.txt", "pings.csv", "hardware.csv",
                     "rtt_comparison.png", "ttl_comparison.png"):
            assert (out / name).is_file()
        assert "headquarter -> datacentre" in result.output

    def test_compare_requires_out(self, runner):
        result = runner.invoke(main, ["compare", str(TRADITIONAL), str(SDWAN)])
        assert result.exit_code == 2
