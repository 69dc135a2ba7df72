import type { DeviceView, PingReportData } from "../types.js";
import { escapeHtml } from "./badges.js";

export function renderPingForm(devices: DeviceView[]): string {
  const options = devices
    .map((d) => `<option value="${escapeHtml(d.node_id)}">${escapeHtml(d.serial)}</option>`)
    .join("");
  return `<form id="ping-form">
  <label>Source <select name="src">${options}</select></label>
  <label>Destination <select name="dst">${options}</select></label>
  <label>Count <input name="count" type="number" value="100" min="1" /></label>
  <label>Size <input name="size" type="number" value="84" min="1" /></label>
  <label>Seed <input name="seed" type="number" value="1" /></label>
  <button type="submit" data-action="ping">run campaign</button>
</form>`;
}

export function renderPingResult(report: PingReportData | null): string {
  if (report === null) {
    return `<p class="empty-state">No campaign run yet.</p>`;
  }
  return `<table class="ping-result">
  <thead><tr><th>Source</th><th>Destination</th><th>Replies</th><th>TTL</th>
  <th>Min RTT</th><th>Avg RTT</th><th>Max RTT</th></tr></thead>
  <tbody><tr>
    <td>${escapeHtml(report.src)}</td>
    <td>${escapeHtml(report.dst)}</td>
    <td>${report.received}/${report.sent}</td>
    <td>${report.observed_ttl ?? "-"}</td>
    <td>${report.min_rtt_ms.toFixed(3)} ms</td>
    <td>${report.avg_rtt_ms.toFixed(3)} ms</td>
    <td>${report.max_rtt_ms.toFixed(3)} ms</td>
  </tr></tbody>
</table>`;
}
