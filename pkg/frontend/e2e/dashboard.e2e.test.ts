// End-to-end: drive a real gateway through the dashboard's own API client
// and renderers -- onboarding E40, pushing its template, and rendering the
// comparison chart. (No browser binary exists in this environment, so the
// DOM surface is exercised as rendered markup; see the unit tests for the
// renderer behavior matrix.)
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import {
  chartLayout,
  comparisonGroups,
  renderComparison,
} from "../src/render/comparison";
import { renderInventory } from "../src/render/inventory";
import type { ComparisonReportData } from "../src/types";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = resolve(__dirname, "..", "..");

let server: ChildProcess;
const api = new ApiClient(BASE);

async function waitForGateway(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/v1/scenario`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("gateway did not come up in time");
}

beforeAll(async () => {
  server = spawn(
    "sdwanlab",
    ["serve", "--port", String(PORT), "--scenario", "scenarios/sdwan.yaml"],
    {
      cwd: REPO_ROOT,
      env: {
        ...process.env,
        SDWANLAB_HOME: mkdtempSync(join(tmpdir(), "sdwanlab-e2e-")),
      },
      stdio: "ignore",
    },
  );
  await waitForGateway();
}, 40_000);

afterAll(() => {
  server?.kill();
});

describe("dashboard round trip against a live gateway", () => {
  it("serves the dashboard under /ui", async () => {
    const response = await fetch(`${BASE}/ui/`);
    expect(response.status).toBe(200);
    const html = await response.text();
    expect(html).toContain("sdwanlab management platform");
    const script = await fetch(`${BASE}/ui/app.js`);
    expect(script.status).toBe(200);
  });

  it("onboards E40 and pushes its template through the UI flow", async () => {
    let devices = await api.getDevices();
    expect(devices).toHaveLength(5);
    const e40 = devices.find((d) => d.serial === "E40")!;
    expect(e40.state).toBe("bootstrapped");
    // the rendered table offers an onboard action for E40
    expect(renderInventory(devices)).toContain(
      'data-action="onboard" data-serial="E40"',
    );

    const onboarded = await api.onboard("E40");
    expect(onboarded.state).toBe("synced");

    const templates = await api.getTemplates();
    expect(templates.map((t) => t.id)).toContain("branch3");
    const pushed = await api.pushTemplate(
      "branch3",
      "E40",
      e40.default_variables as Record<string, string>,
    );
    expect(pushed.device.state).toBe("managed");

    devices = await api.getDevices();
    const after = devices.find((d) => d.serial === "E40")!;
    expect(after.state).toBe("managed");
    expect(after.management_mode).toBe("template_managed");
    // the rendered table no longer offers to onboard E40
    expect(renderInventory(devices)).not.toContain(
      'data-action="onboard" data-serial="E40"',
    );
  });

  it("rejects a push with a broken variable and names it", async () => {
    const devices = await api.getDevices();
    const e40 = devices.find((d) => d.serial === "E40")!;
    const vars = { ...(e40.default_variables as Record<string, string>) };
    vars.wan_ip = "not-an-address";
    await expect(api.pushTemplate("branch3", "E40", vars)).rejects.toMatchObject(
      { status: 400, kind: "CompileError" },
    );
  });

  it("renders the comparison with three groups and taller sdwan bars", async () => {
    const result = await api.runCompare({ count: 100, seed: 1, name: "e2e" });
    const report = result.report as ComparisonReportData;
    expect(report.paths).toHaveLength(3);

    const layout = chartLayout(comparisonGroups(report));
    expect(layout.groups).toHaveLength(3);
    for (const group of layout.groups) {
      expect(group.sdwanHeight).toBeGreaterThan(group.tradHeight);
    }

    const html = renderComparison(report);
    expect(html.match(/class="group-label"/g)).toHaveLength(3);
    expect(html).toContain("ttl-table");

    const fetched = await api.getReport("e2e");
    expect(fetched.kind).toBe("comparison");
  });
});
