import copy
from pathlib import Path

import pytest
import yaml

from sdwanlab import scenario as scenario_mod

REPO = Path(__file__).resolve().parent.parent
TRADITIONAL = REPO / "scenarios" / "traditional.yaml"
SDWAN = REPO / "scenarios" / "sdwan.yaml"
TEMPLATES = REPO / "templates"


@pytest.fixture(scope="session")
def traditional_spec():
    return scenario_mod.load_scenario(TRADITIONAL)


@pytest.fixture(scope="session")
def sdwan_spec():
    return scenario_mod.load_scenario(SDWAN)


@pytest.fixture()
def traditional_sim(traditional_spec):
    return scenario_mod.build(traditional_spec)


@pytest.fixture()
def sdwan_sim(sdwan_spec):
    return scenario_mod.build(sdwan_spec)


@pytest.fixture()
def managed_sdwan_sim(sdwan_spec):
    """SD-WAN scenario fully onboarded and template-managed."""
    from sdwanlab.measurement import run_replication_workflow

    sim = scenario_mod.build(sdwan_spec)
    run_replication_workflow(sim)
    return sim


@pytest.fixture()
def traditional_doc():
    return yaml.safe_load(TRADITIONAL.read_text())


@pytest.fixture()
def sdwan_doc():
    return yaml.safe_load(SDWAN.read_text())


@pytest.fixture(autouse=True)
def isolated_session_home(tmp_path, monkeypatch):
    monkeypatch.setenv("SDWANLAB_HOME", str(tmp_path / "session-home"))


# --- independent oracles ---------------------------------------------------


def l3_adjacency(sim) -> dict[str, set[str]]:
    """Graph of non-switch nodes joined by shared segments (oracle-side)."""
    graph: dict[str, set[str]] = {n: set() for n, node in sim.nodes.items()
                                  if node.role != "switch"}
    for seg in sim.segments:
        ends = [p[0] for p in seg.attachments if sim.nodes[p[0]].role != "switch"]
        for i, a in enumerate(ends):
            for b in ends[i + 1:]:
                graph[a].add(b)
                graph[b].add(a)
    return graph


def bfs_path(sim, src: str, dst: str) -> list[str]:
    """Shortest node path in the L3 adjacency graph (hop-count oracle)."""
    graph = l3_adjacency(sim)
    prev = {src: None}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in sorted(graph[u]):
                if v not in prev:
                    prev[v] = u
                    nxt.append(v)
        frontier = nxt
        if dst in prev:
            break
    assert dst in prev, f"no path {src} -> {dst}"
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return list(reversed(path))


def bfs_decrement_hops(sim, src: str, dst: str) -> int:
    """Routers/edges strictly between the endpoints on the shortest path."""
    path = bfs_path(sim, src, dst)
    return sum(1 for n in path[1:-1] if sim.nodes[n].role in ("router", "edge"))


def floyd_warshall(n: int, edges: list[tuple[int, int, int]]) -> list[list[int]]:
    """All-pairs shortest path metrics (brute-force oracle)."""
    inf = 1 << 30
    dist = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for u, v, w in edges:
        dist[u][v] = min(dist[u][v], w)
        dist[v][u] = min(dist[v][u], w)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if dist[i][k] + dist[k][j] < dist[i][j]:
                    dist[i][j] = dist[i][k] + dist[k][j]
    return dist


def deep_doc(doc: dict) -> dict:
    return copy.deepcopy(doc)


def make_chain_doc(latencies: list[float], processing: list[float],
                   jitter: float = 0.0, seed: int = 7) -> dict:
    """A line topology host0 - r1 - ... - rN - host1 in one area.

    len(latencies) = N + 1 links; len(processing) = N + 2 node delays
    (host0, routers..., host1). The unique path makes the closed-form
    round-trip 2*(sum(latencies) + sum(processing)) exact when jitter is 0.
    """
    n_routers = len(processing) - 2
    assert len(latencies) == n_routers + 1
    nodes = [{"id": "h0", "role": "host", "area": "lab",
              "interfaces": {"eth0": "10.9.0.1/30"},
              "processing_ms": processing[0]}]
    links = []
    for i in range(n_routers):
        left = f"10.9.{i}.2/30"
        right = f"10.9.{i + 1}.1/30"
        nodes.append({"id": f"r{i + 1}", "role": "router", "area": "lab",
                      "interfaces": {"w0": left, "w1": right},
                      "processing_ms": processing[i + 1]})
    nodes.append({"id": "h1", "role": "host", "area": "lab",
                  "interfaces": {"eth0": f"10.9.{n_routers}.2/30"},
                  "processing_ms": processing[-1]})
    prev = ("h0", "eth0")
    for i in range(n_routers):
        links.append({"a": f"{prev[0]}:{prev[1]}", "b": f"r{i + 1}:w0",
                      "latency_ms": latencies[i], "jitter_ms": jitter})
        prev = (f"r{i + 1}", "w1")
    links.append({"a": f"{prev[0]}:{prev[1]}", "b": "h1:eth0",
                  "latency_ms": latencies[-1], "jitter_ms": jitter})
    return {
        "name": "chain",
        "defaults": {"seed": seed},
        "areas": [{"name": "lab", "as_number": 65010,
                   "prefix": "10.9.0.0/16", "igp": "ospf_like",
                   "endpoint": "h0"}],
        "nodes": nodes,
        "links": links,
        "static_routes": [
            {"node": "h0", "prefix": "0.0.0.0/0", "next_hop": "10.9.0.2"},
            {"node": "h1", "prefix": "0.0.0.0/0",
             "next_hop": f"10.9.{n_routers}.1"},
        ],
    }
