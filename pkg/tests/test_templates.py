import pytest

from sdwanlab.errors import CompileError
from sdwanlab.templates import (DeviceTemplate, FeatureSpec, compile, diff,
                                load_template, template_from_dict,
                                validate_template)

from conftest import TEMPLATES


BRANCH3_VARS = {
    "hostname": "E40", "system_ip": "10.4.0.1", "site_id": 40,
    "wan_ip": "172.31.2.6/30", "lan_ip": "10.4.0.1/24",
    "wan_peer": "172.31.2.5", "local_as": 65004, "peer_as": 65008,
    "site_prefix": "10.4.0.0/16",
}

BRANCH4_VARS = {
    "hostname": "E50", "system_ip": "10.5.0.1", "site_id": 50,
    "wan_ip": "172.31.2.10/30", "lan_ip": "10.5.0.1/24",
    "wan_peer": "172.31.2.9", "local_as": 65005, "peer_as": 65008,
    "site_prefix": "10.5.0.0/16",
}


@pytest.fixture()
def branch3():
    return load_template(TEMPLATES / "branch3.yaml")


@pytest.fixture()
def branch4():
    return load_template(TEMPLATES / "branch4.yaml")


class TestValidate:
    def test_canonical_border_template_is_valid(self, branch3):
        assert validate_template(branch3) == []

    def test_missing_system_feature_flagged(self):
        template = DeviceTemplate(id="t", name="t", features=[
            FeatureSpec("interface", {"vpn_id": 0, "name": "wan0",
                                      "address": "10.0.0.1/30"})])
        assert "missing system feature" in validate_template(template)

    def test_undeclared_variable_flagged(self):
        template = DeviceTemplate(id="t", name="t", features=[
            FeatureSpec("system", {"host_name": "x", "system_id": "1.1.1.1",
                                   "site_id": 1}),
            FeatureSpec("interface", {"vpn_id": 0, "name": "wan0",
                                      "address": "${wan_ip}"})])
        assert any("undeclared variable ${wan_ip}" in v
                   for v in validate_template(template))

    def test_duplicate_interface_flagged(self):
        template = DeviceTemplate(id="t", name="t", features=[
            FeatureSpec("system", {"host_name": "x", "system_id": "1.1.1.1",
                                   "site_id": 1}),
            FeatureSpec("interface", {"vpn_id": 0, "name": "wan0",
                                      "address": "10.0.0.1/30"}),
            FeatureSpec("interface", {"vpn_id": 1, "name": "wan0",
                                      "address": "10.0.1.1/30"})])
        assert any("duplicate interface" in v for v in validate_template(template))

    def test_malformed_literal_prefix_flagged(self):
        template = DeviceTemplate(id="t", name="t", features=[
            FeatureSpec("system", {"host_name": "x", "system_id": "1.1.1.1",
                                   "site_id": 1}),
            FeatureSpec("routing_static", {"prefix": "10.0.0.0/99",
                                           "next_hop": "10.0.0.1"})])
        assert any("malformed prefix" in v for v in validate_template(template))

    def test_multiple_system_features_flagged(self):
        sys_feature = FeatureSpec("system", {"host_name": "x",
                                             "system_id": "1.1.1.1",
                                             "site_id": 1})
        template = DeviceTemplate(id="t", name="t",
                                  features=[sys_feature, sys_feature])
        assert any("multiple system features" in v
                   for v in validate_template(template))


class TestCompile:
    def test_branch3_compiles_to_expected_directives(self, branch3):
        compiled = compile(branch3, BRANCH3_VARS)
        directives = compiled.as_dict()
        assert directives["system/host-name"] == "E40"
        assert directives["system/site-id"] == "40"
        assert directives["vpn/0/interface/wan0/address"] == "172.31.2.6/30"
        assert directives["vpn/1/interface/lan0/address"] == "10.4.0.1/24"
        assert directives["routing/ospf/area/0/interface/lan0/cost"] == "1"
        assert directives["routing/bgp/local-as"] == "65004"
        assert directives["routing/bgp/neighbor/172.31.2.5/remote-as"] == "65008"
        assert directives["routing/bgp/advertise/0"] == "10.4.0.0/16"
        # ordering: system first, then interfaces, then routing
        keys = [k for k, _ in compiled.directives]
        assert keys[0].startswith("system/")
        assert keys.index("vpn/0/interface/wan0/address") < \
            keys.index("routing/static/0/prefix")

    def test_compile_is_pure(self, branch3):
        first = compile(branch3, BRANCH3_VARS)
        second = compile(branch3, BRANCH3_VARS)
        assert first.content_hash == second.content_hash
        assert first.directives == second.directives

    def test_unbound_variable_rejected(self, branch3):
        variables = dict(BRANCH3_VARS)
        del variables["wan_ip"]
        with pytest.raises(CompileError, match="unbound variable"):
            compile(branch3, variables)

    def test_non_address_binding_rejected(self, branch3):
        variables = dict(BRANCH3_VARS, wan_ip="not-an-address")
        with pytest.raises(CompileError, match="wan_ip"):
            compile(branch3, variables)

    def test_undeclared_binding_rejected(self, branch3):
        with pytest.raises(CompileError, match="unknown variable"):
            compile(branch3, dict(BRANCH3_VARS, mystery="1"))

    def test_template_without_variables_compiles_on_empty_binding(self):
        template = DeviceTemplate(id="t", name="t", features=[
            FeatureSpec("system", {"host_name": "x", "system_id": "1.1.1.1",
                                   "site_id": 1})])
        compiled = compile(template, {})
        assert compiled.as_dict()["system/host-name"] == "x"

    def test_compile_never_succeeds_on_invalid_template(self):
        template = DeviceTemplate(id="t", name="t", features=[])
        assert validate_template(template)
        with pytest.raises(CompileError):
            compile(template, {})


class TestDiff:
    def test_identical_configs_empty_diff(self, branch3):
        a = compile(branch3, BRANCH3_VARS)
        b = compile(branch3, BRANCH3_VARS)
        change = diff(a, b)
        assert change.empty
        assert a.content_hash == b.content_hash

    def test_hostname_change_yields_single_changed_directive(self, branch3):
        a = compile(branch3, BRANCH3_VARS)
        b = compile(branch3, dict(BRANCH3_VARS, hostname="E40-new"))
        change = diff(a, b)
        assert not change.added and not change.removed
        assert change.changed == (("system/host-name", "E40", "E40-new"),)

    def test_branch3_vs_branch4_differ_in_identity_and_addresses(
            self, branch3, branch4):
        a = compile(branch3, BRANCH3_VARS)
        b = compile(branch4, BRANCH4_VARS)
        change = diff(a, b)
        assert not change.empty
        changed_keys = {k for k, _, _ in change.changed}
        assert {"system/host-name", "system/system-id", "system/site-id",
                "vpn/0/interface/wan0/address", "vpn/1/interface/lan0/address",
                "routing/bgp/local-as", "routing/bgp/advertise/0",
                "routing/static/0/next-hop"} <= changed_keys
        # neighbor address lives in the key path: shows up as add+remove
        assert any("routing/bgp/neighbor/172.31.2.9" in k for k, _ in change.added)
        assert any("routing/bgp/neighbor/172.31.2.5" in k for k, _ in change.removed)

    def test_empty_diff_iff_equal_hashes(self, branch3):
        a = compile(branch3, BRANCH3_VARS)
        b = compile(branch3, dict(BRANCH3_VARS, site_id=41))
        assert (diff(a, b).empty) == (a.content_hash == b.content_hash)
        assert not diff(a, b).empty


def test_template_from_dict_round_trip(branch3):
    doc = {
        "id": "t1", "name": "T1",
        "variables": {"x": "int"},
        "features": [{"kind": "system",
                      "parameters": {"host_name": "h", "system_id": "1.1.1.1",
                                     "site_id": "${x}"}}],
    }
    template = template_from_dict(doc)
    compiled = compile(template, {"x": 7})
    assert compiled.as_dict()["system/site-id"] == "7"
