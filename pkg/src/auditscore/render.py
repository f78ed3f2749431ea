"""Presentation of assessments, comparisons and trend reports.

All rendering is deterministic: identical inputs yield byte-identical
output, and timestamps appear only when explicitly requested. Scores are
shown to two decimals and percentages to one; stored values keep full
precision.
"""

from __future__ import annotations

import json
from typing import Mapping, Sequence

from .analysis import TrendTable
from .model import (
    AideReport,
    CompositeAssessment,
    DeltaDecomposition,
    LynisReport,
    RawToolReport,
    ScapReport,
    ToolKind,
    TripwireReport,
    VulnReport,
)
from .store import HistoryRecord, record_to_json

DISPLAY_NAMES: Mapping[ToolKind, str] = {
    ToolKind.LYNIS: "Lynis",
    ToolKind.OPENSCAP_STANDARD: "OpenSCAP Standard",
    ToolKind.AIDE: "AIDE",
    ToolKind.TRIPWIRE: "Tripwire",
    ToolKind.OPENSCAP_CIS: "OpenSCAP CIS",
    ToolKind.VULN_SCAN: "Vulnerability",
}


def raw_summary(raw: RawToolReport | None) -> str:
    if raw is None:
        return "(score supplied directly)"
    if isinstance(raw, LynisReport):
        return f"hardening_index={raw.hardening_index}"
    if isinstance(raw, ScapReport):
        return f"pass={raw.pass_count} fail={raw.fail_count}"
    if isinstance(raw, AideReport):
        return (
            f"added={raw.added} removed={raw.removed} changed={raw.changed} "
            f"total={raw.total_changes}"
        )
    if isinstance(raw, TripwireReport):
        return f"objects={raw.objects_scanned} violations={raw.violations}"
    assert isinstance(raw, VulnReport)
    return (
        f"open={raw.open_ports} filtered={raw.filtered_ports} "
        f"confirmed={raw.confirmed_count} findings={len(raw.findings)} "
        f"firewall={'yes' if raw.firewall_active else 'no'}"
    )


def change_cell(first: float, last: float) -> str:
    """Relative percent for upward moves from a nonzero base, else points."""
    delta = last - first
    if first > 0 and delta > 0:
        return f"+{delta / first * 100.0:.1f}%"
    return f"{delta:+.1f} pts"


def format_assessment_text(assessment: CompositeAssessment, host_label: str | None = None) -> str:
    lines = [f"label: {assessment.label}"]
    if host_label:
        lines.append(f"host: {host_label}")
    lines.append(
        f"{'tool':<20} {'score':>8} {'weight':>7} {'contribution':>13}  raw"
    )
    for tool in ToolKind:
        score = assessment.scores[tool]
        lines.append(
            f"{tool.value:<20} {score.value:>8.2f} "
            f"{assessment.weights.tool_weights[tool]:>7.2f} "
            f"{assessment.contributions[tool]:>13.2f}  {raw_summary(score.raw)}"
        )
    lines.append(f"composite: {assessment.composite:.2f}")
    return "\n".join(lines)


def format_parse_text(score_tool: ToolKind, source: str, raw: RawToolReport, value: float) -> str:
    lines = [f"tool: {score_tool.value}", f"source: {source}"]
    if isinstance(raw, LynisReport):
        lines.append(f"hardening_index: {raw.hardening_index}")
    elif isinstance(raw, ScapReport):
        lines.append(f"profile: {raw.profile.value}")
        lines.append(f"pass: {raw.pass_count}")
        lines.append(f"fail: {raw.fail_count}")
    elif isinstance(raw, AideReport):
        lines.append(f"added: {raw.added}")
        lines.append(f"removed: {raw.removed}")
        lines.append(f"changed: {raw.changed}")
        lines.append(f"total_changes: {raw.total_changes}")
    elif isinstance(raw, TripwireReport):
        lines.append(f"objects_scanned: {raw.objects_scanned}")
        lines.append(f"violations: {raw.violations}")
    elif isinstance(raw, VulnReport):
        lines.append(f"open_ports: {raw.open_ports}")
        lines.append(f"filtered_ports: {raw.filtered_ports}")
        lines.append(f"firewall_active: {'yes' if raw.firewall_active else 'no'}")
        lines.append(f"findings: {len(raw.findings)}")
        lines.append(f"confirmed: {raw.confirmed_count}")
    lines.append(f"score: {value:.2f}")
    return "\n".join(lines)


def format_compare_text(
    decomposition: DeltaDecomposition,
    ranked: Sequence[tuple[ToolKind, float, float | None]],
) -> str:
    lines = [f"delta decomposition: {decomposition.from_label} -> {decomposition.to_label}"]
    lines.append(f"{'rank':<5} {'tool':<20} {'weighted delta':>14} {'share':>8}")
    for position, (tool, delta, share) in enumerate(ranked, start=1):
        share_text = "-" if share is None else f"{share * 100.0:.1f}%"
        lines.append(f"{position:<5} {tool.value:<20} {delta:>+14.2f} {share_text:>8}")
    lines.append(f"total delta: {decomposition.total_delta:+.2f}")
    if decomposition.dominant_share is None:
        lines.append("dominant: none (total delta is zero)")
    else:
        lines.append(
            f"dominant: {decomposition.dominant_tool.value} "
            f"{decomposition.per_tool_delta[decomposition.dominant_tool]:+.2f} "
            f"({decomposition.dominant_share * 100.0:.1f}%)"
        )
    return "\n".join(lines)


def compare_to_dict(
    decomposition: DeltaDecomposition,
    ranked: Sequence[tuple[ToolKind, float, float | None]],
) -> dict:
    return {
        "from": decomposition.from_label,
        "to": decomposition.to_label,
        "per_tool_delta": {
            tool.value: decomposition.per_tool_delta[tool] for tool in ToolKind
        },
        "total_delta": decomposition.total_delta,
        "dominant_tool": decomposition.dominant_tool.value,
        "dominant_share": decomposition.dominant_share,
        "ranked": [
            {"tool": tool.value, "delta": delta, "share": share}
            for tool, delta, share in ranked
        ],
    }


def _score_matrix(records: Sequence[HistoryRecord]) -> list[list[str]]:
    assessments = [record.assessment for record in records]
    multi = len(assessments) > 1
    header = ["Tool"] + [a.label for a in assessments] + (["Change"] if multi else [])
    rows = [header]
    for tool in ToolKind:
        values = [a.scores[tool].value for a in assessments]
        row = [DISPLAY_NAMES[tool]] + [f"{v:.2f}" for v in values]
        if multi:
            row.append(change_cell(values[0], values[-1]))
        rows.append(row)
    composites = [a.composite for a in assessments]
    total_row = ["**Composite**"] + [f"**{c:.2f}**" for c in composites]
    if multi:
        total_row.append(f"**{change_cell(composites[0], composites[-1])}**")
    rows.append(total_row)
    return rows


def _markdown_table(rows: list[list[str]]) -> str:
    header, *body = rows
    lines = ["| " + " | ".join(header) + " |"]
    lines.append("| " + " | ".join([":--"] + ["--:"] * (len(header) - 1)) + " |")
    for row in body:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines)


def _text_table(rows: list[list[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])] + [
            cell.rjust(widths[i]) for i, cell in enumerate(row[1:], start=1)
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def render_report_markdown(
    records: Sequence[HistoryRecord],
    trends: TrendTable | None,
    decomposition: DeltaDecomposition | None,
    ranked: Sequence[tuple[ToolKind, float, float | None]] | None,
    with_timestamps: bool = False,
) -> str:
    sections = ["# Security posture report", ""]
    if with_timestamps:
        for record in records:
            sections.append(
                f"- {record.assessment.label}: {record.assessment.timestamp.isoformat()} "
                f"(host {record.host_label})"
            )
        sections.append("")
    sections.append("## Scores")
    sections.append("")
    sections.append(_markdown_table(_score_matrix(records)))
    sections.append("")
    if trends is not None:
        sections.append("## Trends")
        sections.append("")
        trend_rows = [["Tool", "Direction"]]
        for tool in ToolKind:
            trend_rows.append([DISPLAY_NAMES[tool], trends.directions[tool].value])
        trend_rows.append(["**Composite**", trends.composite_direction.value])
        sections.append(_markdown_table(trend_rows))
        sections.append("")
    if decomposition is not None and ranked is not None:
        sections.append(
            f"## Change drivers: {decomposition.from_label} to {decomposition.to_label}"
        )
        sections.append("")
        driver_rows = [["Rank", "Tool", "Weighted delta", "Share"]]
        for position, (tool, delta, share) in enumerate(ranked, start=1):
            share_text = "-" if share is None else f"{share * 100.0:.1f}%"
            driver_rows.append([str(position), DISPLAY_NAMES[tool], f"{delta:+.2f}", share_text])
        sections.append(_markdown_table(driver_rows))
        sections.append("")
        if decomposition.dominant_share is None:
            sections.append("No dominant driver: the composite did not change.")
        else:
            sections.append(
                f"Total delta {decomposition.total_delta:+.2f}; dominant driver "
                f"{DISPLAY_NAMES[decomposition.dominant_tool]} "
                f"({decomposition.per_tool_delta[decomposition.dominant_tool]:+.2f}, "
                f"{decomposition.dominant_share * 100.0:.1f}% of total)."
            )
        sections.append("")
    return "\n".join(sections)


def render_report_text(
    records: Sequence[HistoryRecord],
    trends: TrendTable | None,
    decomposition: DeltaDecomposition | None,
    ranked: Sequence[tuple[ToolKind, float, float | None]] | None,
    with_timestamps: bool = False,
) -> str:
    sections = ["security posture report", ""]
    if with_timestamps:
        for record in records:
            sections.append(
                f"{record.assessment.label}: {record.assessment.timestamp.isoformat()} "
                f"(host {record.host_label})"
            )
        sections.append("")
    rows = [
        [cell.replace("**", "") for cell in row] for row in _score_matrix(records)
    ]
    sections.append(_text_table(rows))
    if trends is not None:
        sections.append("")
        sections.append("trends:")
        for tool in ToolKind:
            sections.append(f"  {tool.value:<20} {trends.directions[tool].value}")
        sections.append(f"  {'composite':<20} {trends.composite_direction.value}")
    if decomposition is not None and ranked is not None:
        sections.append("")
        sections.append(format_compare_text(decomposition, ranked))
    sections.append("")
    return "\n".join(sections)


def render_report_json(
    records: Sequence[HistoryRecord],
    trends: TrendTable | None,
    decomposition: DeltaDecomposition | None,
    ranked: Sequence[tuple[ToolKind, float, float | None]] | None,
) -> str:
    document = {
        "labels": [record.assessment.label for record in records],
        "records": [json.loads(record_to_json(record)) for record in records],
        "trends": None
        if trends is None
        else {
            "per_tool": {
                tool.value: list(trends.per_tool[tool]) for tool in ToolKind
            },
            "directions": {
                tool.value: trends.directions[tool].value for tool in ToolKind
            },
            "composite": list(trends.composite),
            "composite_direction": trends.composite_direction.value,
        },
        "decomposition": None
        if decomposition is None or ranked is None
        else compare_to_dict(decomposition, ranked),
    }
    return json.dumps(document, indent=2, sort_keys=False)
