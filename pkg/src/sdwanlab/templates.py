"""Feature-based device configuration templates.

A device template composes typed features (system, interface, static/BGP/OSPF
routing) and declares variables written as ``${name}``. Compilation binds the
variables, checks their types, and flattens the features into an ordered list
of (key path, value) directives -- system first, then interfaces, then
routing -- hashed for change detection. Diffs are computed per directive.
"""

import re
from dataclasses import dataclass, field
from hashlib import sha256
from typing import Optional

from .addressing import NetAddress, Prefix, interface_spec
from .errors import CompileError, ValidationError

FEATURE_KINDS = ("system", "interface", "routing_static", "routing_bgp", "routing_ospf")
VARIABLE_TYPES = ("string", "int", "address", "cidr", "prefix")

_VAR_RE = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")

_REQUIRED_PARAMS = {
    "system": ("host_name", "system_id", "site_id"),
    "interface": ("vpn_id", "name", "address"),
    "routing_static": ("prefix", "next_hop"),
    "routing_bgp": ("local_as", "neighbors", "advertise"),
    "routing_ospf": ("area_id", "interfaces"),
}

# compile order: system first, then interfaces, then routing
_KIND_ORDER = {"system": 0, "interface": 1, "routing_static": 2,
               "routing_ospf": 3, "routing_bgp": 4}


@dataclass(frozen=True)
class FeatureSpec:
    kind: str
    parameters: dict

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ValidationError(f"unknown feature kind {self.kind!r}")


@dataclass
class DeviceTemplate:
    id: str
    name: str
    features: list[FeatureSpec]
    variables: dict[str, str] = field(default_factory=dict)  # name -> type

    def __post_init__(self):
        for var, vtype in self.variables.items():
            if vtype not in VARIABLE_TYPES:
                raise ValidationError(
                    f"variable {var!r} has unknown type {vtype!r}")


@dataclass(frozen=True)
class CompiledConfig:
    directives: tuple[tuple[str, str], ...]
    content_hash: str

    def as_dict(self) -> dict[str, str]:
        return dict(self.directives)


def _iter_strings(value):
    if isinstance(value, str):
        yield value
    elif isinstance(value, dict):
        for v in value.values():
            yield from _iter_strings(v)
    elif isinstance(value, (list, tuple)):
        for v in value:
            yield from _iter_strings(v)


def _referenced_variables(template: DeviceTemplate) -> set[str]:
    refs = set()
    for feature in template.features:
        for text in _iter_strings(feature.parameters):
            refs.update(_VAR_RE.findall(text))
    return refs


def validate_template(template: DeviceTemplate) -> list[str]:
    """Collect all violations; an empty list means the template is valid."""
    violations: list[str] = []
    system_count = sum(1 for f in template.features if f.kind == "system")
    if system_count == 0:
        violations.append("missing system feature")
    elif system_count > 1:
        violations.append(f"multiple system features ({system_count})")

    for idx, feature in enumerate(template.features):
        for param in _REQUIRED_PARAMS[feature.kind]:
            if param not in feature.parameters:
                violations.append(
                    f"feature[{idx}] ({feature.kind}): missing parameter {param!r}")

    seen_ifaces: set[str] = set()
    for feature in template.features:
        if feature.kind != "interface":
            continue
        name = str(feature.parameters.get("name", ""))
        if name in seen_ifaces:
            violations.append(f"duplicate interface {name!r}")
        seen_ifaces.add(name)

    for var in sorted(_referenced_variables(template)):
        if var not in template.variables:
            violations.append(f"undeclared variable ${{{var}}}")

    for idx, feature in enumerate(template.features):
        for key, value in sorted(feature.parameters.items()):
            for text in _iter_strings(value):
                if _VAR_RE.search(text):
                    continue  # checked after substitution
                if key in ("prefix",) or (feature.kind == "routing_bgp" and key == "advertise"):
                    try:
                        Prefix.parse(text)
                    except ValidationError:
                        violations.append(
                            f"feature[{idx}] ({feature.kind}): malformed prefix {text!r}")
    return violations


def _check_binding(name: str, vtype: str, value) -> str:
    text = str(value)
    try:
        if vtype == "int":
            if not isinstance(value, int) and not text.lstrip("-").isdigit():
                raise ValidationError("not an integer")
            int(text)
        elif vtype == "address":
            NetAddress.parse(text)
        elif vtype == "cidr":
            interface_spec(text)
        elif vtype == "prefix":
            Prefix.parse(text)
    except ValidationError as exc:
        raise CompileError(
            f"variable {name!r} ({vtype}): bad value {text!r}: {exc}") from exc
    return text


def _substitute(value, bindings: dict[str, str]):
    if isinstance(value, str):
        def repl(match):
            return bindings[match.group(1)]

        return _VAR_RE.sub(repl, value)
    if isinstance(value, dict):
        return {k: _substitute(v, bindings) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_substitute(v, bindings) for v in value]
    return value


def compile(template: DeviceTemplate, variables: dict) -> CompiledConfig:  # noqa: A001
    """Bind variables and flatten features into ordered directives."""
    violations = validate_template(template)
    if violations:
        raise CompileError("invalid template: " + "; ".join(violations))

    bindings: dict[str, str] = {}
    for name, vtype in template.variables.items():
        if name not in variables:
            raise CompileError(f"unbound variable ${{{name}}}")
        bindings[name] = _check_binding(name, vtype, variables[name])
    for name in variables:
        if name not in template.variables:
            raise CompileError(f"unknown variable {name!r} (not declared)")

    directives: list[tuple[str, str]] = []
    ordered = sorted(enumerate(template.features),
                     key=lambda kv: (_KIND_ORDER[kv[1].kind], kv[0]))
    static_idx = 0
    for _, feature in ordered:
        params = _substitute(feature.parameters, bindings)
        if feature.kind == "system":
            directives.append(("system/host-name", str(params["host_name"])))
            directives.append(("system/system-id", str(params["system_id"])))
            directives.append(("system/site-id", str(params["site_id"])))
        elif feature.kind == "interface":
            base = f"vpn/{params['vpn_id']}/interface/{params['name']}"
            addr = str(params["address"])
            try:
                interface_spec(addr)
            except ValidationError as exc:
                raise CompileError(f"interface {params['name']}: {exc}") from exc
            directives.append((f"{base}/address", addr))
        elif feature.kind == "routing_static":
            prefix = str(params["prefix"])
            next_hop = str(params["next_hop"])
            try:
                Prefix.parse(prefix)
                NetAddress.parse(next_hop)
            except ValidationError as exc:
                raise CompileError(f"static route: {exc}") from exc
            directives.append((f"routing/static/{static_idx}/prefix", prefix))
            directives.append((f"routing/static/{static_idx}/next-hop", next_hop))
            static_idx += 1
        elif feature.kind == "routing_ospf":
            area = str(params["area_id"])
            for iface in params["interfaces"]:
                base = f"routing/ospf/area/{area}/interface/{iface['name']}"
                directives.append((f"{base}/cost", str(iface.get("cost", 1))))
        elif feature.kind == "routing_bgp":
            local_as = str(params["local_as"])
            if not local_as.isdigit():
                raise CompileError(f"bgp local_as must be numeric: {local_as!r}")
            directives.append(("routing/bgp/local-as", local_as))
            for neighbor in params["neighbors"]:
                addr = str(neighbor["addr"])
                remote = str(neighbor["remote_as"])
                try:
                    NetAddress.parse(addr)
                except ValidationError as exc:
                    raise CompileError(f"bgp neighbor: {exc}") from exc
                if not remote.isdigit():
                    raise CompileError(f"bgp remote_as must be numeric: {remote!r}")
                directives.append((f"routing/bgp/neighbor/{addr}/remote-as", remote))
            for i, prefix in enumerate(params["advertise"]):
                try:
                    Prefix.parse(str(prefix))
                except ValidationError as exc:
                    raise CompileError(f"bgp advertise: {exc}") from exc
                directives.append((f"routing/bgp/advertise/{i}", str(prefix)))

    for key, value in directives:
        if _VAR_RE.search(value) or _VAR_RE.search(key):
            raise CompileError(f"unresolved variable in directive {key}={value}")

    return CompiledConfig(directives=tuple(directives),
                          content_hash=config_hash(directives))


def config_hash(directives) -> str:
    h = sha256()
    for key, value in sorted(directives):
        h.update(f"{key}={value}\n".encode())
    return h.hexdigest()


@dataclass(frozen=True)
class ConfigDiff:
    added: tuple[tuple[str, str], ...]
    removed: tuple[tuple[str, str], ...]
    changed: tuple[tuple[str, str, str], ...]  # key, old, new

    @property
    def empty(self) -> bool:
        return not (self.added or self.removed or self.changed)


def diff(old: Optional[CompiledConfig], new: CompiledConfig) -> ConfigDiff:
    """Directive-level change set; empty iff the content hashes match."""
    old_map = old.as_dict() if old is not None else {}
    new_map = new.as_dict()
    added = tuple((k, new_map[k]) for k in sorted(new_map) if k not in old_map)
    removed = tuple((k, old_map[k]) for k in sorted(old_map) if k not in new_map)
    changed = tuple((k, old_map[k], new_map[k]) for k in sorted(old_map)
                    if k in new_map and old_map[k] != new_map[k])
    return ConfigDiff(added=added, removed=removed, changed=changed)


def template_from_dict(doc: dict) -> DeviceTemplate:
    """Build a DeviceTemplate from its document (YAML/JSON) form."""
    try:
        features = [FeatureSpec(kind=f["kind"], parameters=dict(f["parameters"]))
                    for f in doc.get("features", [])]
        return DeviceTemplate(
            id=str(doc["id"]), name=str(doc.get("name", doc["id"])),
            features=features, variables=dict(doc.get("variables", {})))
    except KeyError as exc:
        raise ValidationError(f"template document missing field: {exc}") from exc


def load_template(path) -> DeviceTemplate:
    """Read a template document from a YAML file."""
    import yaml

    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ValidationError(f"template file {path} must contain a mapping")
    return template_from_dict(doc)
