import type { DeviceView } from "../types.js";
import { escapeHtml, stateBadge } from "./badges.js";

function onboardable(device: DeviceView): boolean {
  return (
    device.role === "edge" &&
    device.allowlisted &&
    device.state !== "synced" &&
    device.state !== "managed"
  );
}

function row(device: DeviceView): string {
  const button = onboardable(device)
    ? `<button data-action="onboard" data-serial="${escapeHtml(device.serial)}">onboard</button>`
    : "";
  const reach =
    device.reachability === "reachable"
      ? `<span class="dot dot-up"></span>`
      : `<span class="dot dot-down"></span>`;
  const failure = device.failure_reason
    ? `<div class="failure">${escapeHtml(device.failure_reason)}</div>`
    : "";
  return `<tr data-serial="${escapeHtml(device.serial)}">
    <td>${escapeHtml(device.serial)}</td>
    <td>${escapeHtml(device.role)}</td>
    <td>${escapeHtml(device.site)}</td>
    <td>${stateBadge(device.state)}${failure}</td>
    <td>${reach}${escapeHtml(device.reachability)}</td>
    <td>${escapeHtml(device.management_mode)}</td>
    <td>${button}</td>
  </tr>`;
}

/** Device table: one row per record, onboard button only where it applies. */
export function renderInventory(devices: DeviceView[]): string {
  if (devices.length === 0) {
    return `<p class="empty-state">No devices in the inventory yet.</p>`;
  }
  const rows = devices.map(row).join("\n");
  return `<table class="inventory">
  <thead><tr><th>Serial</th><th>Role</th><th>Site</th><th>State</th>
  <th>Reachability</th><th>Management</th><th></th></tr></thead>
  <tbody>${rows}</tbody>
</table>`;
}
