import type { ComparisonReportData, PathComparisonData } from "../types.js";
import { escapeHtml } from "./badges.js";

export interface BarGroup {
  label: string;
  traditional: number;
  sdwan: number;
}

export interface ChartLayout {
  width: number;
  height: number;
  maxValue: number;
  groups: {
    label: string;
    tradX: number;
    tradHeight: number;
    sdwanX: number;
    sdwanHeight: number;
  }[];
}

const WIDTH = 560;
const HEIGHT = 260;
const PLOT_HEIGHT = 200;
const BAR_WIDTH = 52;

/** Pure geometry for the grouped bars; heights scale to the tallest bar. */
export function chartLayout(groups: BarGroup[]): ChartLayout {
  const maxValue = Math.max(...groups.map((g) => Math.max(g.traditional, g.sdwan)), 1e-9);
  const slot = WIDTH / Math.max(groups.length, 1);
  return {
    width: WIDTH,
    height: HEIGHT,
    maxValue,
    groups: groups.map((g, i) => ({
      label: g.label,
      tradX: slot * i + slot / 2 - BAR_WIDTH - 4,
      tradHeight: (g.traditional / maxValue) * PLOT_HEIGHT,
      sdwanX: slot * i + slot / 2 + 4,
      sdwanHeight: (g.sdwan / maxValue) * PLOT_HEIGHT,
    })),
  };
}

export function comparisonGroups(report: ComparisonReportData): BarGroup[] {
  return report.paths.map((p: PathComparisonData) => ({
    label: `${p.src_area}→${p.dst_area}`,
    traditional: p.traditional.avg_rtt_ms,
    sdwan: p.sdwan.avg_rtt_ms,
  }));
}

function bar(x: number, height: number, cls: string, value: number): string {
  const y = 20 + PLOT_HEIGHT - height;
  return (
    `<rect class="bar ${cls}" x="${x.toFixed(1)}" y="${y.toFixed(1)}" ` +
    `width="${BAR_WIDTH}" height="${height.toFixed(1)}"></rect>` +
    `<text class="bar-value" x="${(x + BAR_WIDTH / 2).toFixed(1)}" ` +
    `y="${(y - 4).toFixed(1)}" text-anchor="middle">${value.toFixed(2)}</text>`
  );
}

function ttlTable(report: ComparisonReportData): string {
  const rows = report.paths
    .map(
      (p) => `<tr><td>${escapeHtml(p.src_area)} → ${escapeHtml(p.dst_area)}</td>
    <td>${p.traditional.observed_ttl ?? "-"}</td>
    <td>${p.sdwan.observed_ttl ?? "-"}</td>
    <td>${p.ttl_delta >= 0 ? "+" : ""}${p.ttl_delta}</td></tr>`,
    )
    .join("\n");
  return `<table class="ttl-table">
  <thead><tr><th>Path</th><th>TTL (traditional)</th><th>TTL (sdwan)</th>
  <th>&Delta;</th></tr></thead>
  <tbody>${rows}</tbody>
</table>`;
}

/** Grouped avg-RTT bars per path plus the observed-TTL table. */
export function renderComparison(report: ComparisonReportData | null): string {
  if (report === null || report.paths.length === 0) {
    return `<p class="empty-state">No comparison report yet. Run one from the
      experiments panel.</p>`;
  }
  const layout = chartLayout(comparisonGroups(report));
  const slot = layout.width / layout.groups.length;
  const bars = layout.groups
    .map((g, i) => {
      const pair = report.paths[i];
      return (
        bar(g.tradX, g.tradHeight, "bar-traditional", pair.traditional.avg_rtt_ms) +
        bar(g.sdwanX, g.sdwanHeight, "bar-sdwan", pair.sdwan.avg_rtt_ms) +
        `<text class="group-label" x="${(slot * i + slot / 2).toFixed(1)}" ` +
        `y="${layout.height - 8}" text-anchor="middle">${escapeHtml(g.label)}</text>`
      );
    })
    .join("\n");
  const legend =
    `<g class="legend"><rect class="bar bar-traditional" x="8" y="2" width="14" height="10"></rect>` +
    `<text x="26" y="11">traditional avg RTT (ms)</text>` +
    `<rect class="bar bar-sdwan" x="200" y="2" width="14" height="10"></rect>` +
    `<text x="218" y="11">sdwan avg RTT (ms)</text></g>`;
  return `<svg class="comparison-chart" viewBox="0 0 ${layout.width} ${layout.height}"
  role="img" aria-label="average round-trip time per path">
  ${legend}
  ${bars}
</svg>
${ttlTable(report)}`;
}
