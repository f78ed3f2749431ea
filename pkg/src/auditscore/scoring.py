"""Normalization formulas and weighted aggregation.

Each scanner's raw metrics map onto a common 0-100 scale:

* system audit: the report's own hardening index, taken as-is
* SCAP profiles: 100 * passed / (passed + failed)
* change-count file integrity: 100 - 10 * log10(total changes), floored
  at 0; a clean system scores 100 (the formula already yields 100 at one
  change, so the extension is continuous)
* object-scan file integrity: 100 * (objects - violations) / objects
* vulnerability scan: 100 minus severity-weighted finding counts, a flat
  per-open-port penalty and a per-confirmed-finding penalty; an active
  firewall discounts the total penalty, which never drops below zero

The composite is the convex combination of the six scores under a
validated weight profile. Intermediate arithmetic stays in full double
precision; rounding for display happens only in the reporting layer.
"""

from __future__ import annotations

import math
from collections import Counter
from datetime import datetime, timezone
from typing import Mapping

from .errors import ScoringError
from .model import (
    AideReport,
    CompositeAssessment,
    LynisReport,
    NormalizedScore,
    RawToolReport,
    ScapReport,
    Severity,
    ToolKind,
    TripwireReport,
    VulnReport,
    WeightProfile,
    validate_weights,
)


def normalize_lynis(report: LynisReport) -> NormalizedScore:
    """The hardening index is already a 0-100 score; pass it through."""
    return NormalizedScore(ToolKind.LYNIS, float(report.hardening_index), report)


def normalize_scap(report: ScapReport) -> NormalizedScore:
    """Percentage of evaluated rules that pass.

    A report with zero evaluated rules has no defined score and raises
    ``EMPTY_RESULT``; silently scoring it 0 or 100 would corrupt
    composites, so the caller must exclude it or supply an override.
    """
    evaluated = report.pass_count + report.fail_count
    if evaluated == 0:
        raise ScoringError(
            "EMPTY_RESULT", f"{report.profile.value} report has no pass or fail results"
        )
    value = 100.0 * report.pass_count / evaluated
    return NormalizedScore(report.profile.tool, value, report)


def normalize_aide(report: AideReport) -> NormalizedScore:
    """Logarithmic change scoring: stays sensitive across hundreds of changes."""
    total = report.total_changes
    if total == 0:
        value = 100.0
    else:
        value = max(0.0, 100.0 - 10.0 * math.log10(total))
    return NormalizedScore(ToolKind.AIDE, value, report)


def normalize_tripwire(report: TripwireReport) -> NormalizedScore:
    """Fraction of scanned objects without violations, scaled to 0-100."""
    if report.objects_scanned == 0:
        raise ScoringError("EMPTY_DATABASE", "tripwire report scanned zero objects")
    value = 100.0 * (report.objects_scanned - report.violations) / report.objects_scanned
    return NormalizedScore(ToolKind.TRIPWIRE, value, report)


def classify_severity(cvss: float) -> Severity:
    """Map a CVSS 0-10 value onto the standard v3 rating bands."""
    if not 0.0 <= cvss <= 10.0:
        raise ScoringError("CVSS_OUT_OF_RANGE", f"cvss must be in [0.0, 10.0], got {cvss}")
    if cvss >= 9.0:
        return Severity.CRITICAL
    if cvss >= 7.0:
        return Severity.HIGH
    if cvss >= 4.0:
        return Severity.MEDIUM
    return Severity.LOW


def vuln_penalty(report: VulnReport, profile: WeightProfile) -> float:
    """Total penalty before the firewall discount.

    Confirmed findings carry only the flat confirmed penalty; counting
    their severities as well would penalize them twice, since the
    severity term and the confirmed term are separate additive penalties.
    """
    severity_counts = Counter(f.severity for f in report.findings if not f.confirmed)
    penalty = sum(
        profile.severity_weights[severity] * severity_counts[severity]
        for severity in Severity
    )
    penalty += profile.port_penalty * report.open_ports
    penalty += profile.confirmed_penalty * report.confirmed_count
    return penalty


def normalize_vuln(report: VulnReport, profile: WeightProfile) -> NormalizedScore:
    """Penalty-based vulnerability score under the supplied profile.

    An active firewall reduces the total penalty by the profile's
    discount; the penalty is floored at zero first, so a firewall can
    never push a score above 100.
    """
    validate_weights(profile)
    raw_penalty = vuln_penalty(report, profile)
    if report.firewall_active:
        effective = max(0.0, raw_penalty - profile.firewall_discount)
    else:
        effective = raw_penalty
    value = min(100.0, max(0.0, 100.0 - effective))
    return NormalizedScore(ToolKind.VULN_SCAN, value, report)


def normalize_report(
    report: RawToolReport, profile: WeightProfile | None = None
) -> NormalizedScore:
    """Dispatch a raw report to its normalizer (profile only matters for vuln)."""
    if isinstance(report, LynisReport):
        return normalize_lynis(report)
    if isinstance(report, ScapReport):
        return normalize_scap(report)
    if isinstance(report, AideReport):
        return normalize_aide(report)
    if isinstance(report, TripwireReport):
        return normalize_tripwire(report)
    return normalize_vuln(report, profile if profile is not None else WeightProfile())


def aggregate(
    scores: Mapping[ToolKind, NormalizedScore],
    profile: WeightProfile,
    label: str,
    timestamp: datetime | None = None,
) -> CompositeAssessment:
    """Combine six normalized scores into a composite assessment.

    Raises ``TOOL_MISSING`` naming every absent tool. The stored
    composite equals the sum of the per-tool weighted contributions.
    """
    validate_weights(profile)
    missing = [tool.value for tool in ToolKind if tool not in scores]
    if missing:
        raise ScoringError("TOOL_MISSING", "no score for: " + ", ".join(missing))
    contributions = {
        tool: profile.tool_weights[tool] * scores[tool].value for tool in ToolKind
    }
    composite = min(100.0, max(0.0, sum(contributions.values())))
    return CompositeAssessment(
        label=label,
        timestamp=timestamp if timestamp is not None else datetime.now(timezone.utc),
        scores={tool: scores[tool] for tool in ToolKind},
        weights=profile,
        composite=composite,
        contributions=contributions,
    )
