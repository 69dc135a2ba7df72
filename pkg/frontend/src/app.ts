import { ApiClient, ApiError } from "./api.js";
import { renderPingForm, renderPingResult } from "./render/experiments.js";
import { renderComparison } from "./render/comparison.js";
import { renderHardware } from "./render/hardware.js";
import { renderInventory } from "./render/inventory.js";
import { renderPushForm } from "./render/templates.js";
import type {
  ComparisonReportData,
  DeviceView,
  HardwareSample,
  PingReportData,
  TemplateInfo,
} from "./types.js";

const POLL_INTERVAL_MS = 2000;

const api = new ApiClient("");

interface UiState {
  devices: DeviceView[];
  hardware: HardwareSample[];
  templates: TemplateInfo[];
  selectedTemplate: string | null;
  selectedSerial: string | null;
  errorVariable: string | null;
  pingResult: PingReportData | null;
  comparison: ComparisonReportData | null;
  connected: boolean;
}

const state: UiState = {
  devices: [],
  hardware: [],
  templates: [],
  selectedTemplate: null,
  selectedSerial: null,
  errorVariable: null,
  pingResult: null,
  comparison: null,
  connected: true,
};

function element(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found;
}

function toast(message: string, kind: "ok" | "error" = "ok"): void {
  const area = element("toasts");
  const node = document.createElement("div");
  node.className = `toast toast-${kind}`;
  node.textContent = message;
  area.appendChild(node);
  setTimeout(() => node.remove(), 5000);
}

function render(): void {
  element("connection-banner").hidden = state.connected;
  element("inventory").innerHTML = renderInventory(state.devices);
  element("hardware").innerHTML = renderHardware(state.hardware);
  element("push-panel").innerHTML = renderPushForm(
    state.templates,
    state.devices,
    state.selectedTemplate,
    state.selectedSerial,
    state.errorVariable,
  );
  element("ping-panel").innerHTML =
    renderPingForm(state.devices) + renderPingResult(state.pingResult);
  element("comparison").innerHTML = renderComparison(state.comparison);
  bindForms();
}

async function refresh(): Promise<void> {
  try {
    const devices = await api.getDevices();
    const hardware = await Promise.all(
      devices.map((d) => api.getHardware(d.serial)),
    );
    state.devices = devices;
    state.hardware = hardware;
    state.templates = await api.getTemplates();
    state.connected = true;
  } catch {
    state.connected = false;
  }
  render();
}

function formValue(form: HTMLFormElement, name: string): string {
  const field = form.elements.namedItem(name) as
    | HTMLInputElement
    | HTMLSelectElement
    | null;
  return field ? field.value : "";
}

function bindForms(): void {
  document.querySelectorAll<HTMLButtonElement>("[data-action=onboard]").forEach(
    (button) => {
      button.onclick = async () => {
        button.disabled = true;
        try {
          const record = await api.onboard(button.dataset.serial ?? "");
          toast(`${record.serial} is now ${record.state}`);
        } catch (err) {
          toast(describe(err), "error");
        }
        await refresh();
      };
    },
  );

  const pushForm = document.getElementById("push-form") as HTMLFormElement | null;
  if (pushForm) {
    pushForm.onsubmit = async (event) => {
      event.preventDefault();
      const templateId = formValue(pushForm, "template");
      const serial = formValue(pushForm, "serial");
      const template = state.templates.find((t) => t.id === templateId);
      const variables: Record<string, string> = {};
      for (const name of Object.keys(template?.variables ?? {})) {
        variables[name] = formValue(pushForm, `var-${name}`);
      }
      state.selectedTemplate = templateId;
      state.selectedSerial = serial;
      try {
        const result = await api.pushTemplate(templateId, serial, variables);
        state.errorVariable = null;
        toast(`${serial} is now ${result.device.state}`);
      } catch (err) {
        state.errorVariable = failingVariable(err, Object.keys(template?.variables ?? {}));
        toast(describe(err), "error");
      }
      await refresh();
    };
    pushForm.querySelectorAll("select").forEach((select) => {
      select.onchange = () => {
        state.selectedTemplate = formValue(pushForm, "template");
        state.selectedSerial = formValue(pushForm, "serial");
        state.errorVariable = null;
        render();
      };
    });
  }

  const pingForm = document.getElementById("ping-form") as HTMLFormElement | null;
  if (pingForm) {
    pingForm.onsubmit = async (event) => {
      event.preventDefault();
      try {
        const result = await api.runPing({
          src: formValue(pingForm, "src"),
          dst: formValue(pingForm, "dst"),
          count: Number(formValue(pingForm, "count")),
          size: Number(formValue(pingForm, "size")),
          seed: Number(formValue(pingForm, "seed")),
        });
        state.pingResult = result.report;
      } catch (err) {
        toast(describe(err), "error");
      }
      await refresh();
    };
  }

  const compareButton = document.getElementById("run-compare");
  if (compareButton) {
    (compareButton as HTMLButtonElement).onclick = async () => {
      toast("running comparison…");
      try {
        const result = await api.runCompare({ count: 100, seed: 1 });
        state.comparison = result.report;
      } catch (err) {
        toast(describe(err), "error");
      }
      await refresh();
    };
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.kind}: ${err.message}`;
  return String(err);
}

/** On a compile error, pick out which declared variable the message names. */
export function failingVariable(err: unknown, names: string[]): string | null {
  if (!(err instanceof ApiError) || err.kind !== "CompileError") return null;
  for (const name of names) {
    if (err.message.includes(name)) return name;
  }
  return null;
}

async function boot(): Promise<void> {
  await refresh();
  setInterval(refresh, POLL_INTERVAL_MS);
}

if (typeof document !== "undefined" && document.getElementById("inventory")) {
  void boot();
}
