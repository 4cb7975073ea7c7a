"""Metrics report serialization and run-to-run comparison.

Reports are plain dictionaries written as canonical JSON (sorted keys,
fixed separators), so two runs of the same scenario with the same seed
produce byte-identical files.  ``compare`` only accepts reports whose
scenario hashes match: ratios across different topologies are meaningless.
"""

from __future__ import annotations

import json
from typing import Any


class TopologyMismatch(ValueError):
    """The two reports come from different scenarios."""


def canonical_json(report: dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"


def write_report(report: dict[str, Any], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(report))


def load_report(path: str) -> dict[str, Any]:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def summary_line(report: dict[str, Any]) -> str:
    s = report["summary"]
    fraction = s["headline_fraction"]
    fraction_text = f"{fraction:.4f}" if fraction is not None else "n/a"
    return (
        f"{report['scenario']} [{report['mode']}] seed={report['seed']}: "
        f"throughput {s['throughput_mbps']:.2f} Mbps, potential fraction {fraction_text}"
    )


def _crossings(report: dict[str, Any]) -> dict[str, int]:
    return {
        lid: entry["data_original"] for lid, entry in sorted(report["links"].items())
    }


def compare(report_a: dict[str, Any], report_b: dict[str, Any]) -> dict[str, Any]:
    """Ratios of run B relative to run A over one shared topology.

    ``throughput_ratio`` compares headline potential fractions;
    ``crossing_ratio`` compares original data crossings per link;
    per-tag shares are reported side by side.
    """
    if report_a["scenario_hash"] != report_b["scenario_hash"]:
        raise TopologyMismatch(
            f"{report_a['scenario']!r} vs {report_b['scenario']!r}: different scenario topologies"
        )
    fraction_a = report_a["summary"]["headline_fraction"]
    fraction_b = report_b["summary"]["headline_fraction"]
    throughput_ratio = (
        fraction_b / fraction_a if fraction_a and fraction_b is not None else None
    )
    raw_ratio = None
    if report_a["summary"]["throughput_mbps"]:
        raw_ratio = (
            report_b["summary"]["throughput_mbps"] / report_a["summary"]["throughput_mbps"]
        )
    crossings_a = _crossings(report_a)
    crossings_b = _crossings(report_b)
    crossing_ratio: dict[str, Any] = {}
    for lid in crossings_a:
        a, b = crossings_a[lid], crossings_b.get(lid, 0)
        crossing_ratio[lid] = (b / a) if a else None
    shares = {
        "a": report_a["allocation"]["domain_shares_mbps"],
        "b": report_b["allocation"]["domain_shares_mbps"],
    }
    return {
        "scenario": report_a["scenario"],
        "scenario_hash": report_a["scenario_hash"],
        "a": {"mode": report_a["mode"], "seed": report_a["seed"], "headline_fraction": fraction_a},
        "b": {"mode": report_b["mode"], "seed": report_b["seed"], "headline_fraction": fraction_b},
        "throughput_ratio": throughput_ratio,
        "raw_throughput_ratio": raw_ratio,
        "crossing_ratio": crossing_ratio,
        "domain_shares_mbps": shares,
    }


def render_compare_table(cmp: dict[str, Any]) -> str:
    """Human-readable comparison table."""

    def fmt(value: Any) -> str:
        if value is None:
            return "n/a"
        if isinstance(value, float):
            return f"{value:.4f}"
        return str(value)

    rows = [
        ("scenario", cmp["scenario"], ""),
        ("run a", f"{cmp['a']['mode']} seed={cmp['a']['seed']}", fmt(cmp["a"]["headline_fraction"])),
        ("run b", f"{cmp['b']['mode']} seed={cmp['b']['seed']}", fmt(cmp["b"]["headline_fraction"])),
        ("throughput ratio (b/a)", fmt(cmp["throughput_ratio"]), ""),
        ("raw throughput ratio (b/a)", fmt(cmp["raw_throughput_ratio"]), ""),
    ]
    for lid, ratio in sorted(cmp["crossing_ratio"].items()):
        if ratio is not None and ratio != 1.0:
            rows.append((f"crossings ratio {lid} (b/a)", fmt(ratio), ""))
    for tag in sorted(cmp["domain_shares_mbps"]["a"]):
        a = cmp["domain_shares_mbps"]["a"][tag]
        b = cmp["domain_shares_mbps"]["b"].get(tag)
        rows.append((f"share[{tag}] Mbps", fmt(a), fmt(b)))
    width = max(len(r[0]) for r in rows)
    lines = [f"{label:<{width}}  {col1:>18}  {col2:>12}".rstrip() for label, col1, col2 in rows]
    return "\n".join(lines)
