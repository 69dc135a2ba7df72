import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api";
import { failingVariable } from "../src/app";
import { stateBadge } from "../src/render/badges";
import {
  chartLayout,
  comparisonGroups,
  renderComparison,
} from "../src/render/comparison";
import { renderHardware } from "../src/render/hardware";
import { renderInventory } from "../src/render/inventory";
import { renderPushForm } from "../src/render/templates";
import type {
  ComparisonReportData,
  DeviceView,
  HardwareSample,
  PingReportData,
  TemplateInfo,
} from "../src/types";

function device(overrides: Partial<DeviceView> = {}): DeviceView {
  return {
    serial: "E40",
    role: "edge",
    state: "bootstrapped",
    site: "branch3",
    node_id: "E40",
    reachability: "reachable",
    certified: false,
    management_mode: "local",
    allowlisted: true,
    last_sync: null,
    failure_reason: null,
    template: "../templates/branch3.yaml",
    default_variables: { hostname: "E40" },
    ...overrides,
  };
}

function ping(avg: number, ttl: number): PingReportData {
  return {
    src: "a",
    dst: "b",
    size_bytes: 84,
    sent: 100,
    received: 100,
    observed_ttl: ttl,
    min_rtt_ms: avg - 0.2,
    max_rtt_ms: avg + 0.4,
    avg_rtt_ms: avg,
  };
}

function comparison(paths: [number, number, number, number][]): ComparisonReportData {
  return {
    traditional: "traditional",
    sdwan: "sdwan",
    hardware: [],
    paths: paths.map(([trad, sdw, tradTtl, sdwTtl], i) => ({
      src_area: `src${i}`,
      dst_area: `dst${i}`,
      traditional: ping(trad, tradTtl),
      sdwan: ping(sdw, sdwTtl),
      avg_rtt_ratio: sdw / trad,
      ttl_delta: sdwTtl - tradTtl,
    })),
  };
}

describe("state badges", () => {
  it("maps every lifecycle state to a badge", () => {
    expect(stateBadge("synced")).toContain("badge-green");
    expect(stateBadge("managed")).toContain("badge-green-dark");
    expect(stateBadge("authenticating")).toContain("badge-amber");
    expect(stateBadge("bootstrapped")).toContain("badge-blue");
    expect(stateBadge("unprovisioned")).toContain("badge-gray");
  });

  it("renders unknown states as 'unknown' without crashing", () => {
    const html = stateBadge("exploded");
    expect(html).toContain("unknown");
    expect(html).not.toContain("exploded");
  });

  it("escapes markup in state values", () => {
    expect(stateBadge("<script>")).not.toContain("<script>");
  });
});

describe("inventory table", () => {
  it("renders one row per device with a state badge", () => {
    const html = renderInventory([
      device(),
      device({ serial: "E50", state: "managed" }),
    ]);
    expect(html.match(/<tr data-serial=/g)).toHaveLength(2);
    expect(html).toContain("badge-green-dark");
  });

  it("renders an empty-state message for no devices", () => {
    expect(renderInventory([])).toContain("No devices");
  });

  it("enables the onboard button only for allowlisted un-onboarded edges", () => {
    const html = renderInventory([
      device(), // allowlisted, bootstrapped edge: button
      device({ serial: "E50", state: "managed" }), // already managed: none
      device({ serial: "GHOST", allowlisted: false }), // not allowlisted: none
      device({ serial: "MGMT-1", role: "manage", state: "synced" }),
    ]);
    const buttons = html.match(/data-action="onboard"/g) ?? [];
    expect(buttons).toHaveLength(1);
    expect(html).toContain('data-action="onboard" data-serial="E40"');
  });

  it("shows recorded failure reasons", () => {
    const html = renderInventory([
      device({ failure_reason: "sync failed: unreachable" }),
    ]);
    expect(html).toContain("sync failed: unreachable");
  });
});

describe("hardware gauges", () => {
  const sample: HardwareSample = {
    device: "E40",
    num_cpus: 2,
    memory_total_mb: 2048,
    cpu_pct: 48.6,
    mem_pct: 50.4,
    at: 3000,
  };

  it("renders a card with cpu and memory gauges", () => {
    const html = renderHardware([sample]);
    expect(html).toContain('data-device="E40"');
    expect(html).toContain("48.6%");
    expect(html).toContain("50.4%");
  });

  it("clamps out-of-range percentages", () => {
    const html = renderHardware([{ ...sample, cpu_pct: 140 }]);
    expect(html).toContain("width:100.0%");
  });

  it("renders an empty state without samples", () => {
    expect(renderHardware([])).toContain("No hardware samples");
  });
});

describe("comparison chart", () => {
  it("renders one group per path with sdwan bars taller when slower", () => {
    const report = comparison([
      [3.4, 6.5, 61, 61],
      [3.6, 8.1, 61, 60],
      [3.6, 8.1, 61, 60],
    ]);
    const html = renderComparison(report);
    expect(html.match(/class="bar bar-traditional"/g)).toHaveLength(4); // 3 + legend
    expect(html.match(/class="bar bar-sdwan"/g)).toHaveLength(4);
    const layout = chartLayout(comparisonGroups(report));
    expect(layout.groups).toHaveLength(3);
    for (const group of layout.groups) {
      expect(group.sdwanHeight).toBeGreaterThan(group.tradHeight);
    }
  });

  it("renders a single group report", () => {
    const html = renderComparison(comparison([[3.0, 7.0, 61, 60]]));
    expect(html.match(/class="group-label"/g)).toHaveLength(1);
  });

  it("equal measurements give equal-height bars", () => {
    const layout = chartLayout(
      comparisonGroups(comparison([[3.0, 3.0, 61, 61]])),
    );
    expect(layout.groups[0].sdwanHeight).toBeCloseTo(layout.groups[0].tradHeight);
  });

  it("includes the observed-TTL table", () => {
    const html = renderComparison(comparison([[3.4, 6.5, 61, 60]]));
    expect(html).toContain("ttl-table");
    expect(html).toContain("<td>61</td>");
    expect(html).toContain("<td>60</td>");
  });

  it("renders a placeholder when there is no report", () => {
    expect(renderComparison(null)).toContain("No comparison report");
  });
});

describe("push form", () => {
  const template: TemplateInfo = {
    id: "branch3",
    name: "Branch 3 border router",
    variables: { hostname: "string", wan_ip: "cidr" },
    features: ["system", "interface"],
  };

  it("prefills variable inputs from the device defaults", () => {
    const html = renderPushForm(
      [template],
      [device({ default_variables: { hostname: "E40", wan_ip: "172.31.2.6/30" } })],
      "branch3",
      "E40",
      null,
    );
    expect(html).toContain('value="E40"');
    expect(html).toContain('value="172.31.2.6/30"');
  });

  it("marks the failing variable after a compile error", () => {
    const html = renderPushForm([template], [device()], "branch3", "E40", "wan_ip");
    expect(html).toContain("field-error");
  });

  it("identifies the failing variable from a compile error message", () => {
    const err = new ApiError(400, "CompileError",
      "variable 'wan_ip' (cidr): bad value 'oops'");
    expect(failingVariable(err, ["hostname", "wan_ip"])).toBe("wan_ip");
    expect(failingVariable(new Error("x"), ["wan_ip"])).toBeNull();
  });
});
