export interface DeviceView {
  serial: string;
  role: string;
  state: string;
  site: string;
  node_id: string;
  reachability: string;
  certified: boolean;
  management_mode: string;
  allowlisted: boolean;
  last_sync: number | null;
  failure_reason: string | null;
  template: string | null;
  default_variables: Record<string, string | number>;
}

export interface HardwareSample {
  device: string;
  num_cpus: number;
  memory_total_mb: number;
  cpu_pct: number;
  mem_pct: number;
  at: number;
}

export interface PingReportData {
  src: string;
  dst: string;
  size_bytes: number;
  sent: number;
  received: number;
  observed_ttl: number | null;
  min_rtt_ms: number;
  max_rtt_ms: number;
  avg_rtt_ms: number;
}

export interface PathComparisonData {
  src_area: string;
  dst_area: string;
  traditional: PingReportData;
  sdwan: PingReportData;
  avg_rtt_ratio: number;
  ttl_delta: number;
}

export interface ComparisonReportData {
  traditional: string;
  sdwan: string;
  paths: PathComparisonData[];
  hardware: HardwareSample[];
}

export interface TemplateInfo {
  id: string;
  name: string;
  variables: Record<string, string>;
  features: string[];
}

export interface ReportEnvelope {
  id: string;
  kind: "ping" | "comparison";
  report: PingReportData | ComparisonReportData;
}
