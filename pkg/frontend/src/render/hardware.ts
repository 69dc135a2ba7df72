import type { HardwareSample } from "../types.js";
import { escapeHtml } from "./badges.js";

function gauge(label: string, pct: number): string {
  const clamped = Math.max(0, Math.min(100, pct));
  const level = clamped < 50 ? "ok" : clamped < 80 ? "warn" : "hot";
  return `<div class="gauge">
    <span class="gauge-label">${escapeHtml(label)}</span>
    <div class="gauge-track"><div class="gauge-fill gauge-${level}"
      style="width:${clamped.toFixed(1)}%"></div></div>
    <span class="gauge-value">${clamped.toFixed(1)}%</span>
  </div>`;
}

/** Per-device CPU/memory gauges (the hardware dashboard panel). */
export function renderHardware(samples: HardwareSample[]): string {
  if (samples.length === 0) {
    return `<p class="empty-state">No hardware samples available.</p>`;
  }
  const cards = samples
    .map(
      (s) => `<div class="hw-card" data-device="${escapeHtml(s.device)}">
    <h3>${escapeHtml(s.device)}</h3>
    <p class="hw-meta">${s.num_cpus} CPU / ${s.memory_total_mb} MB</p>
    ${gauge("cpu", s.cpu_pct)}
    ${gauge("mem", s.mem_pct)}
  </div>`,
    )
    .join("\n");
  return `<div class="hw-grid">${cards}</div>`;
}
