// onboarding lifecycle states and their badge colors
const BADGE_CLASSES: Record<string, string> = {
  unprovisioned: "badge-gray",
  bootstrapped: "badge-blue",
  authenticating: "badge-amber",
  synced: "badge-green",
  managed: "badge-green-dark",
};

export const KNOWN_STATES = Object.keys(BADGE_CLASSES);

export function escapeHtml(text: unknown): string {
  return String(text)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** A state badge; unknown state values render as "unknown", never crash. */
export function stateBadge(state: string): string {
  const known = state in BADGE_CLASSES;
  const label = known ? state : "unknown";
  const cls = known ? BADGE_CLASSES[state] : "badge-gray";
  return `<span class="badge ${cls}">${escapeHtml(label)}</span>`;
}
