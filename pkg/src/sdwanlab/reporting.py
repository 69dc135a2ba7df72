"""Report serialization: fixed-column text, CSV, and chart figures.

A comparison report directory contains:

    summary.txt    human-readable tables (transmission + hardware)
    pings.csv      scenario,src,dst,sent,received,ttl,min_ms,max_ms,avg_ms
    hardware.csv   device,num_cpus,mem_total_mb,cpu_pct,mem_pct
    rtt_comparison.png   grouped bars of average RTT per path
    ttl_comparison.png   grouped bars of observed TTL per path

CSV output is byte-stable for identical inputs (fixed float formatting).
"""

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .measurement import ComparisonReport, PingReport  # noqa: E402


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def write_pings_csv(report: ComparisonReport, path: Path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scenario", "src", "dst", "sent", "received", "ttl",
                         "min_ms", "max_ms", "avg_ms"])
        for pair in report.paths:
            for label, ping in (("traditional", pair.traditional),
                                ("sdwan", pair.sdwan)):
                writer.writerow([
                    label, ping.src, ping.dst, ping.sent, ping.received,
                    ping.observed_ttl if ping.observed_ttl is not None else "",
                    _fmt(ping.min_rtt_ms), _fmt(ping.max_rtt_ms),
                    _fmt(ping.avg_rtt_ms)])


def write_hardware_csv(report: ComparisonReport, path: Path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["device", "num_cpus", "mem_total_mb", "cpu_pct", "mem_pct"])
        for sample in report.hardware:
            writer.writerow([sample.device, sample.num_cpus, sample.memory_total_mb,
                             f"{sample.cpu_pct:.2f}", f"{sample.mem_pct:.2f}"])


def _ping_row(ping: PingReport) -> str:
    ttl = str(ping.observed_ttl) if ping.observed_ttl is not None else "-"
    return (f"{ping.src:<14} {ping.dst:<14} {ping.size_bytes:>5}B "
            f"{ping.received:>4}/{ping.sent:<4} {ttl:>4} "
            f"{ping.max_rtt_ms:>9.3f} {ping.min_rtt_ms:>9.3f} {ping.avg_rtt_ms:>9.3f}")


def write_summary(report: ComparisonReport, path: Path):
    lines = []
    header = (f"{'Source':<14} {'Destination':<14} {'Size':>6} "
              f"{'Rx/Tx':>9} {'TTL':>4} {'Max RTT':>9} {'Min RTT':>9} {'Avg RTT':>9}")
    for label, picker in (("traditional", lambda p: p.traditional),
                          ("sdwan", lambda p: p.sdwan)):
        lines.append(f"Transmission performance ({label})")
        lines.append(header)
        for pair in report.paths:
            lines.append(_ping_row(picker(pair)))
        lines.append("")
    lines.append("Per-path deltas")
    for pair in report.paths:
        lines.append(f"{pair.src_area} -> {pair.dst_area}: "
                     f"avg RTT ratio {pair.avg_rtt_ratio:.3f}, "
                     f"TTL delta {pair.ttl_delta:+d}")
    lines.append("")
    if report.hardware:
        lines.append("Device hardware status (sdwan)")
        lines.append(f"{'Device':<12} {'CPUs':>4} {'Memory':>9} "
                     f"{'CPU %':>7} {'Mem %':>7}")
        for s in report.hardware:
            lines.append(f"{s.device:<12} {s.num_cpus:>4} {s.memory_total_mb:>7}MB "
                         f"{s.cpu_pct:>7.2f} {s.mem_pct:>7.2f}")
        lines.append("")
    path.write_text("\n".join(lines))


def _grouped_bars(report: ComparisonReport, values, ylabel: str, title: str,
                  path: Path):
    labels = [f"{p.src_area}→{p.dst_area}" for p in report.paths]
    trad = [values(p.traditional) for p in report.paths]
    sdw = [values(p.sdwan) for p in report.paths]
    x = range(len(labels))
    width = 0.38
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar([i - width / 2 for i in x], trad, width, label="traditional",
           color="#4878a8")
    ax.bar([i + width / 2 for i in x], sdw, width, label="sdwan",
           color="#d1604d")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend()
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_figures(report: ComparisonReport, out_dir: Path):
    _grouped_bars(report, lambda p: p.avg_rtt_ms, "average RTT (ms)",
                  "Average RTT per path", out_dir / "rtt_comparison.png")
    _grouped_bars(report, lambda p: p.observed_ttl or 0, "observed TTL",
                  "Observed reply TTL per path", out_dir / "ttl_comparison.png")


def write_comparison_report(report: ComparisonReport, out_dir) -> Path:
    """Write all report artifacts; returns the directory path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_pings_csv(report, out / "pings.csv")
    write_hardware_csv(report, out / "hardware.csv")
    write_summary(report, out / "summary.txt")
    write_figures(report, out)
    return out
