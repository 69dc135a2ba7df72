import type { DeviceView, TemplateInfo } from "../types.js";
import { escapeHtml } from "./badges.js";

/** Template picker + per-variable inputs, prefilled from the device's
 * scenario defaults. The push flow posts these values verbatim. */
export function renderPushForm(
  templates: TemplateInfo[],
  devices: DeviceView[],
  selectedTemplate: string | null,
  selectedSerial: string | null,
  errorVariable: string | null,
): string {
  if (templates.length === 0) {
    return `<p class="empty-state">No templates registered.</p>`;
  }
  const template =
    templates.find((t) => t.id === selectedTemplate) ?? templates[0];
  const pushTargets = devices.filter((d) => d.role === "edge");
  const device =
    pushTargets.find((d) => d.serial === selectedSerial) ?? pushTargets[0];

  const templateOptions = templates
    .map(
      (t) =>
        `<option value="${escapeHtml(t.id)}"${t.id === template.id ? " selected" : ""}>
      ${escapeHtml(t.name)}</option>`,
    )
    .join("");
  const deviceOptions = pushTargets
    .map(
      (d) =>
        `<option value="${escapeHtml(d.serial)}"${
          device && d.serial === device.serial ? " selected" : ""
        }>${escapeHtml(d.serial)}</option>`,
    )
    .join("");

  const defaults: Record<string, string | number> = device
    ? device.default_variables
    : {};
  const fields = Object.entries(template.variables)
    .map(([name, vtype]) => {
      const value = defaults[name] !== undefined ? String(defaults[name]) : "";
      const invalid = name === errorVariable ? " field-error" : "";
      return `<label class="var-field${invalid}">
      <span>${escapeHtml(name)} <em>(${escapeHtml(vtype)})</em></span>
      <input name="var-${escapeHtml(name)}" value="${escapeHtml(value)}" />
    </label>`;
    })
    .join("\n");

  return `<form id="push-form">
  <label>Template <select name="template">${templateOptions}</select></label>
  <label>Device <select name="serial">${deviceOptions}</select></label>
  <fieldset><legend>Variables</legend>${fields}</fieldset>
  <button type="submit" data-action="push">compile &amp; push</button>
</form>`;
}
