"""Comparison of assessments across hardening levels.

Hardening moves tool scores in opposite directions (compliance scores
rise while file integrity scores fall as legitimate changes accumulate),
so a composite delta is only interpretable through its per-tool weighted
decomposition and per-tool trend directions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import AnalysisError
from .model import (
    CompositeAssessment,
    DeltaDecomposition,
    ToolKind,
    tool_weights_match,
)

# Scores are conventionally reported to one decimal; endpoint moves
# inside this band are noise, not a trend.
FLAT_TOLERANCE = 0.05


class Trend(Enum):
    UP = "up"
    DOWN = "down"
    FLAT = "flat"


@dataclass(frozen=True)
class TrendTable:
    """Per-tool score sequences with endpoint direction classification."""

    labels: tuple[str, ...]
    per_tool: dict[ToolKind, tuple[float, ...]]
    directions: dict[ToolKind, Trend]
    composite: tuple[float, ...]
    composite_direction: Trend


def _require_same_weights(reference: CompositeAssessment, other: CompositeAssessment) -> None:
    if not tool_weights_match(reference.weights, other.weights):
        raise AnalysisError(
            "WEIGHT_MISMATCH",
            f"assessments {reference.label!r} and {other.label!r} use different "
            "tool weights; deltas would not decompose",
        )


def decompose_delta(
    from_assessment: CompositeAssessment, to_assessment: CompositeAssessment
) -> DeltaDecomposition:
    """Per-tool weighted score change between two assessments.

    The dominant tool is the one with the largest absolute weighted
    delta, ties broken by canonical tool order; its share of the total
    delta is undefined (``None``) when the total is exactly zero.
    """
    _require_same_weights(from_assessment, to_assessment)
    weights = to_assessment.weights.tool_weights
    per_tool = {
        tool: weights[tool]
        * (to_assessment.scores[tool].value - from_assessment.scores[tool].value)
        for tool in ToolKind
    }
    total = sum(per_tool.values())
    dominant = max(ToolKind, key=lambda tool: abs(per_tool[tool]))
    share = per_tool[dominant] / total if total != 0.0 else None
    return DeltaDecomposition(
        from_label=from_assessment.label,
        to_label=to_assessment.label,
        per_tool_delta=per_tool,
        total_delta=total,
        dominant_tool=dominant,
        dominant_share=share,
    )


def _direction(first: float, last: float) -> Trend:
    if abs(last - first) <= FLAT_TOLERANCE:
        return Trend.FLAT
    return Trend.UP if last > first else Trend.DOWN


def trend_series(assessments: Sequence[CompositeAssessment]) -> TrendTable:
    """Ordered per-tool score sequences with endpoint trend directions.

    Directions compare last against first: with a handful of hardening
    levels an endpoint rule reads the same way the change column of a
    results table does, and appending a copy of the current last
    assessment never changes a classification.
    """
    if len(assessments) < 2:
        raise AnalysisError(
            "TOO_FEW_ASSESSMENTS", f"need at least 2 assessments, got {len(assessments)}"
        )
    first = assessments[0]
    for other in assessments[1:]:
        _require_same_weights(first, other)
    per_tool = {
        tool: tuple(a.scores[tool].value for a in assessments) for tool in ToolKind
    }
    directions = {
        tool: _direction(series[0], series[-1]) for tool, series in per_tool.items()
    }
    composite = tuple(a.composite for a in assessments)
    return TrendTable(
        labels=tuple(a.label for a in assessments),
        per_tool=per_tool,
        directions=directions,
        composite=composite,
        composite_direction=_direction(composite[0], composite[-1]),
    )


def rank_contributions(
    decomposition: DeltaDecomposition,
) -> list[tuple[ToolKind, float, float | None]]:
    """Deltas sorted by descending signed value, ties in canonical order.

    Shares are fractions of the total delta, or ``None`` when the total
    is zero.
    """
    ordered = sorted(ToolKind, key=lambda tool: -decomposition.per_tool_delta[tool])
    total = decomposition.total_delta
    return [
        (
            tool,
            decomposition.per_tool_delta[tool],
            decomposition.per_tool_delta[tool] / total if total != 0.0 else None,
        )
        for tool in ordered
    ]
