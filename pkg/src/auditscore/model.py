"""Domain types for multi-tool security posture scoring.

Six scanner families feed the composite: a system auditor that reports its
own 0-100 hardening index, two SCAP profile evaluations, two file
integrity checkers, and a network vulnerability scan. Each scan is reduced
to a small raw-metrics record, normalized to a 0-100 score, and combined
into a weighted composite assessment.

All types are immutable after construction and safe to share across
threads. Serialization helpers at the bottom of the module round-trip
every type through plain JSON-compatible dicts at full float precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Mapping, Union

from .errors import ValidationError

# Absolute tolerance for weight-sum and composite/contribution equality.
# Weights come from decimal config files, so exact float equality is too
# strict; anything beyond this is a real configuration error.
WEIGHT_SUM_TOLERANCE = 1e-9
COMPOSITE_TOLERANCE = 1e-9


class ToolKind(Enum):
    """The six supported scanners, in canonical (tie-breaking) order."""

    LYNIS = "lynis"
    OPENSCAP_STANDARD = "openscap_standard"
    AIDE = "aide"
    TRIPWIRE = "tripwire"
    OPENSCAP_CIS = "openscap_cis"
    VULN_SCAN = "vuln_scan"


class ScapProfile(Enum):
    STANDARD = "standard"
    CIS = "cis"

    @property
    def tool(self) -> ToolKind:
        if self is ScapProfile.STANDARD:
            return ToolKind.OPENSCAP_STANDARD
        return ToolKind.OPENSCAP_CIS


class Severity(Enum):
    CRITICAL = "critical"
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


def _require_non_negative(name: str, value: int) -> None:
    if value < 0:
        raise ValidationError("VALUE_OUT_OF_RANGE", f"{name} must be non-negative, got {value}")


@dataclass(frozen=True)
class LynisReport:
    """Raw metrics from a system audit: the tool's own 0-100 index."""

    hardening_index: int

    def __post_init__(self):
        if not 0 <= self.hardening_index <= 100:
            raise ValidationError(
                "VALUE_OUT_OF_RANGE",
                f"hardening_index must be in [0, 100], got {self.hardening_index}",
            )


@dataclass(frozen=True)
class ScapReport:
    """Raw pass/fail rule counts from one SCAP profile evaluation."""

    profile: ScapProfile
    pass_count: int
    fail_count: int

    def __post_init__(self):
        _require_non_negative("pass_count", self.pass_count)
        _require_non_negative("fail_count", self.fail_count)


@dataclass(frozen=True)
class AideReport:
    """File integrity change counts from a summary-style check report."""

    added: int
    removed: int
    changed: int

    def __post_init__(self):
        _require_non_negative("added", self.added)
        _require_non_negative("removed", self.removed)
        _require_non_negative("changed", self.changed)

    @property
    def total_changes(self) -> int:
        return self.added + self.removed + self.changed


@dataclass(frozen=True)
class TripwireReport:
    """File integrity object/violation counts from an object-scan report."""

    objects_scanned: int
    violations: int

    def __post_init__(self):
        _require_non_negative("objects_scanned", self.objects_scanned)
        _require_non_negative("violations", self.violations)
        if self.violations > self.objects_scanned:
            raise ValidationError(
                "VIOLATIONS_EXCEED_OBJECTS",
                f"violations ({self.violations}) exceed objects scanned ({self.objects_scanned})",
            )


@dataclass(frozen=True)
class VulnFinding:
    """One vulnerability finding from the network scan.

    When a CVSS value is present the severity must be the band that
    :func:`auditscore.scoring.classify_severity` assigns to it; findings
    are stored self-describing so scoring never re-derives severities.
    """

    identifier: str
    severity: Severity
    confirmed: bool = False
    cvss: float | None = None
    port: int | None = None
    description: str = ""

    def __post_init__(self):
        if self.cvss is not None:
            from .scoring import classify_severity

            expected = classify_severity(self.cvss)
            if expected is not self.severity:
                raise ValidationError(
                    "SEVERITY_MISMATCH",
                    f"finding {self.identifier}: cvss {self.cvss} maps to "
                    f"{expected.value}, not {self.severity.value}",
                )
        if self.port is not None and not 1 <= self.port <= 65535:
            raise ValidationError(
                "VALUE_OUT_OF_RANGE", f"port must be in [1, 65535], got {self.port}"
            )


@dataclass(frozen=True)
class VulnReport:
    """Raw metrics from a network vulnerability scan."""

    open_ports: int
    filtered_ports: int
    firewall_active: bool
    findings: tuple[VulnFinding, ...] = ()
    confirmed_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "findings", tuple(self.findings))
        _require_non_negative("open_ports", self.open_ports)
        _require_non_negative("filtered_ports", self.filtered_ports)
        _require_non_negative("confirmed_count", self.confirmed_count)
        flagged = sum(1 for f in self.findings if f.confirmed)
        if self.confirmed_count > flagged:
            raise ValidationError(
                "VALUE_OUT_OF_RANGE",
                f"confirmed_count ({self.confirmed_count}) exceeds findings "
                f"flagged confirmed ({flagged})",
            )


RawToolReport = Union[LynisReport, ScapReport, AideReport, TripwireReport, VulnReport]


DEFAULT_TOOL_WEIGHTS: Mapping[ToolKind, float] = {
    ToolKind.LYNIS: 0.20,
    ToolKind.OPENSCAP_STANDARD: 0.15,
    ToolKind.AIDE: 0.15,
    ToolKind.TRIPWIRE: 0.15,
    ToolKind.OPENSCAP_CIS: 0.20,
    ToolKind.VULN_SCAN: 0.15,
}

DEFAULT_SEVERITY_WEIGHTS: Mapping[Severity, float] = {
    Severity.CRITICAL: 15.0,
    Severity.HIGH: 8.0,
    Severity.MEDIUM: 4.0,
    Severity.LOW: 1.0,
}


@dataclass(frozen=True)
class WeightProfile:
    """Per-tool weights plus the penalty constants of the vulnerability model.

    Multi-domain tools carry 0.20, single-domain tools 0.15 by default;
    the six tool weights must sum to 1.0 (checked by
    :func:`validate_weights`, not at construction, so profiles can be
    built up before validation).
    """

    tool_weights: Mapping[ToolKind, float] = field(
        default_factory=lambda: dict(DEFAULT_TOOL_WEIGHTS)
    )
    severity_weights: Mapping[Severity, float] = field(
        default_factory=lambda: dict(DEFAULT_SEVERITY_WEIGHTS)
    )
    port_penalty: float = 3.0
    confirmed_penalty: float = 10.0
    firewall_discount: float = 10.0


def validate_weights(profile: WeightProfile) -> WeightProfile:
    """Check a weight profile and return it unchanged when acceptable.

    Raises :class:`ValidationError` naming the offending entry with code
    ``TOOL_MISSING``, ``SEVERITY_MISSING``, ``WEIGHT_NEGATIVE`` or
    ``WEIGHT_SUM_INVALID``. Validation iterates tools in canonical order,
    so the outcome is independent of map insertion order.
    """
    for tool in ToolKind:
        if tool not in profile.tool_weights:
            raise ValidationError("TOOL_MISSING", f"tool_weights has no entry for {tool.value}")
    for tool in ToolKind:
        weight = profile.tool_weights[tool]
        if weight < 0:
            raise ValidationError(
                "WEIGHT_NEGATIVE", f"tool_weights[{tool.value}] is negative ({weight})"
            )
    for severity in Severity:
        if severity not in profile.severity_weights:
            raise ValidationError(
                "SEVERITY_MISSING", f"severity_weights has no entry for {severity.value}"
            )
        weight = profile.severity_weights[severity]
        if weight < 0:
            raise ValidationError(
                "WEIGHT_NEGATIVE", f"severity_weights[{severity.value}] is negative ({weight})"
            )
    for name in ("port_penalty", "confirmed_penalty", "firewall_discount"):
        value = getattr(profile, name)
        if value < 0:
            raise ValidationError("WEIGHT_NEGATIVE", f"{name} is negative ({value})")
    total = sum(profile.tool_weights[tool] for tool in ToolKind)
    if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise ValidationError(
            "WEIGHT_SUM_INVALID", f"tool weights sum to {total:.9f}, expected 1.0"
        )
    return profile


def tool_weights_match(a: WeightProfile, b: WeightProfile, tolerance: float = WEIGHT_SUM_TOLERANCE) -> bool:
    """True when both profiles carry the same six tool weights within tolerance."""
    for tool in ToolKind:
        if tool not in a.tool_weights or tool not in b.tool_weights:
            return False
        if abs(a.tool_weights[tool] - b.tool_weights[tool]) > tolerance:
            return False
    return True


@dataclass(frozen=True)
class NormalizedScore:
    """A tool identity plus its 0-100 score and the raw metrics behind it.

    ``raw`` is ``None`` for scores supplied out-of-band (manifest entries
    that carry a literal score instead of a report file).
    """

    tool: ToolKind
    value: float
    raw: RawToolReport | None = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 100.0:
            raise ValidationError(
                "VALUE_OUT_OF_RANGE",
                f"{self.tool.value} score must be in [0, 100], got {self.value}",
            )


@dataclass(frozen=True)
class CompositeAssessment:
    """A timestamped composite record: six scores, weights, contributions.

    The composite is stored redundantly with the per-tool contributions
    for audit-trail readability; construction enforces that they agree.
    """

    label: str
    timestamp: datetime
    scores: Mapping[ToolKind, NormalizedScore]
    weights: WeightProfile
    composite: float
    contributions: Mapping[ToolKind, float]

    def __post_init__(self):
        missing = [tool.value for tool in ToolKind if tool not in self.scores]
        if missing:
            raise ValidationError("TOOL_MISSING", "no score for: " + ", ".join(missing))
        for tool, score in self.scores.items():
            if score.tool is not tool:
                raise ValidationError(
                    "TOOL_MISMATCH",
                    f"scores[{tool.value}] carries a {score.tool.value} score",
                )
        absent = [tool.value for tool in ToolKind if tool not in self.contributions]
        if absent:
            raise ValidationError("TOOL_MISSING", "no contribution for: " + ", ".join(absent))
        total = sum(self.contributions[tool] for tool in ToolKind)
        if abs(self.composite - total) > COMPOSITE_TOLERANCE:
            raise ValidationError(
                "COMPOSITE_MISMATCH",
                f"composite {self.composite!r} != sum of contributions {total!r}",
            )
        if not 0.0 <= self.composite <= 100.0:
            raise ValidationError(
                "VALUE_OUT_OF_RANGE", f"composite must be in [0, 100], got {self.composite}"
            )


@dataclass(frozen=True)
class DeltaDecomposition:
    """Per-tool weighted score change between two assessments.

    ``dominant_share`` is the dominant tool's fraction of the total delta
    and is ``None`` when the total delta is exactly zero.
    """

    from_label: str
    to_label: str
    per_tool_delta: Mapping[ToolKind, float]
    total_delta: float
    dominant_tool: ToolKind
    dominant_share: float | None

    def __post_init__(self):
        total = sum(self.per_tool_delta[tool] for tool in ToolKind)
        if abs(self.total_delta - total) > COMPOSITE_TOLERANCE:
            raise ValidationError(
                "COMPOSITE_MISMATCH",
                f"total_delta {self.total_delta!r} != sum of per-tool deltas {total!r}",
            )


# ---------------------------------------------------------------------------
# Serialization (plain dicts, JSON-compatible, full float precision)
# ---------------------------------------------------------------------------

_RAW_KINDS = {
    LynisReport: "lynis",
    ScapReport: "scap",
    AideReport: "aide",
    TripwireReport: "tripwire",
    VulnReport: "vuln",
}


def finding_to_dict(finding: VulnFinding) -> dict:
    return {
        "identifier": finding.identifier,
        "severity": finding.severity.value,
        "confirmed": finding.confirmed,
        "cvss": finding.cvss,
        "port": finding.port,
        "description": finding.description,
    }


def finding_from_dict(data: Mapping) -> VulnFinding:
    return VulnFinding(
        identifier=data["identifier"],
        severity=Severity(data["severity"]),
        confirmed=bool(data["confirmed"]),
        cvss=data.get("cvss"),
        port=data.get("port"),
        description=data.get("description", ""),
    )


def raw_report_to_dict(report: RawToolReport) -> dict:
    kind = _RAW_KINDS[type(report)]
    if isinstance(report, LynisReport):
        return {"kind": kind, "hardening_index": report.hardening_index}
    if isinstance(report, ScapReport):
        return {
            "kind": kind,
            "profile": report.profile.value,
            "pass_count": report.pass_count,
            "fail_count": report.fail_count,
        }
    if isinstance(report, AideReport):
        return {
            "kind": kind,
            "added": report.added,
            "removed": report.removed,
            "changed": report.changed,
        }
    if isinstance(report, TripwireReport):
        return {
            "kind": kind,
            "objects_scanned": report.objects_scanned,
            "violations": report.violations,
        }
    return {
        "kind": kind,
        "open_ports": report.open_ports,
        "filtered_ports": report.filtered_ports,
        "firewall_active": report.firewall_active,
        "confirmed_count": report.confirmed_count,
        "findings": [finding_to_dict(f) for f in report.findings],
    }


def raw_report_from_dict(data: Mapping) -> RawToolReport:
    kind = data["kind"]
    if kind == "lynis":
        return LynisReport(hardening_index=data["hardening_index"])
    if kind == "scap":
        return ScapReport(
            profile=ScapProfile(data["profile"]),
            pass_count=data["pass_count"],
            fail_count=data["fail_count"],
        )
    if kind == "aide":
        return AideReport(added=data["added"], removed=data["removed"], changed=data["changed"])
    if kind == "tripwire":
        return TripwireReport(
            objects_scanned=data["objects_scanned"], violations=data["violations"]
        )
    if kind == "vuln":
        return VulnReport(
            open_ports=data["open_ports"],
            filtered_ports=data["filtered_ports"],
            firewall_active=data["firewall_active"],
            findings=tuple(finding_from_dict(f) for f in data["findings"]),
            confirmed_count=data["confirmed_count"],
        )
    raise ValidationError("UNKNOWN_REPORT_KIND", f"unknown raw report kind {kind!r}")


def score_to_dict(score: NormalizedScore) -> dict:
    return {
        "tool": score.tool.value,
        "value": score.value,
        "raw": None if score.raw is None else raw_report_to_dict(score.raw),
    }


def score_from_dict(data: Mapping) -> NormalizedScore:
    raw = data.get("raw")
    return NormalizedScore(
        tool=ToolKind(data["tool"]),
        value=data["value"],
        raw=None if raw is None else raw_report_from_dict(raw),
    )


def profile_to_dict(profile: WeightProfile) -> dict:
    return {
        "tool_weights": {tool.value: profile.tool_weights[tool] for tool in ToolKind},
        "severity_weights": {
            sev.value: profile.severity_weights[sev] for sev in Severity
        },
        "port_penalty": profile.port_penalty,
        "confirmed_penalty": profile.confirmed_penalty,
        "firewall_discount": profile.firewall_discount,
    }


def profile_from_dict(data: Mapping) -> WeightProfile:
    return WeightProfile(
        tool_weights={ToolKind(name): value for name, value in data["tool_weights"].items()},
        severity_weights={
            Severity(name): value for name, value in data["severity_weights"].items()
        },
        port_penalty=data["port_penalty"],
        confirmed_penalty=data["confirmed_penalty"],
        firewall_discount=data["firewall_discount"],
    )


def assessment_to_dict(assessment: CompositeAssessment) -> dict:
    return {
        "label": assessment.label,
        "timestamp": assessment.timestamp.isoformat(),
        "composite": assessment.composite,
        "scores": {
            tool.value: score_to_dict(assessment.scores[tool]) for tool in ToolKind
        },
        "contributions": {
            tool.value: assessment.contributions[tool] for tool in ToolKind
        },
        "weights": profile_to_dict(assessment.weights),
    }


def assessment_from_dict(data: Mapping) -> CompositeAssessment:
    return CompositeAssessment(
        label=data["label"],
        timestamp=datetime.fromisoformat(data["timestamp"]),
        scores={
            ToolKind(name): score_from_dict(entry) for name, entry in data["scores"].items()
        },
        weights=profile_from_dict(data["weights"]),
        composite=data["composite"],
        contributions={
            ToolKind(name): value for name, value in data["contributions"].items()
        },
    )
