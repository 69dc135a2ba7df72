"""sdwanlab: a deterministic multi-site WAN simulator with an SD-WAN
control plane, measurement harness, CLI and HTTP API."""

__version__ = "0.1.0"
