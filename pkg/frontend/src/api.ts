import type {
  ComparisonReportData,
  DeviceView,
  HardwareSample,
  PingReportData,
  ReportEnvelope,
  TemplateInfo,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public kind: string,
    detail: string,
  ) {
    super(detail);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let kind = "HttpError";
    let detail = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      kind = body.error ?? kind;
      detail = body.detail ?? detail;
    } catch {
      // body was not JSON; keep the status line
    }
    throw new ApiError(response.status, kind, detail);
  }
  return response.json() as Promise<T>;
}

function post<T>(path: string, body: unknown): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

export class ApiClient {
  constructor(private base: string = "") {}

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  getScenario(): Promise<{ name: string; sdwan: boolean }> {
    return request(this.url("/scenario"));
  }

  getDevices(): Promise<DeviceView[]> {
    return request(this.url("/devices"));
  }

  getHardware(deviceId: string): Promise<HardwareSample> {
    return request(this.url(`/devices/${deviceId}/hardware`));
  }

  getTemplates(): Promise<TemplateInfo[]> {
    return request(this.url("/templates"));
  }

  getTemplate(templateId: string): Promise<Record<string, unknown>> {
    return request(this.url(`/templates/${templateId}`));
  }

  onboard(serial: string): Promise<DeviceView> {
    return post(this.url("/onboard"), { serial });
  }

  pushTemplate(
    templateId: string,
    serial: string,
    variables: Record<string, string | number>,
  ): Promise<{ device: DeviceView }> {
    return post(this.url(`/templates/${templateId}/push`), {
      serial,
      variables,
    });
  }

  runPing(params: {
    src: string;
    dst: string;
    count?: number;
    size?: number;
    seed?: number;
  }): Promise<{ id: string; report: PingReportData }> {
    return post(this.url("/experiments/ping"), params);
  }

  runCompare(params: {
    count?: number;
    seed?: number;
    name?: string;
  }): Promise<{ id: string; report: ComparisonReportData }> {
    return post(this.url("/experiments/compare"), params);
  }

  getReports(): Promise<string[]> {
    return request(this.url("/reports"));
  }

  getReport(reportId: string): Promise<ReportEnvelope> {
    return request(this.url(`/reports/${reportId}`));
  }
}
