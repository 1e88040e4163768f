"""Coincidence assignment, correlations, and CHSH values.

Multi-click events must be folded into binary outcomes before correlations
can be formed. Two conventions are implemented:

* Squash: a double click on one side contributes 1/2 to each of that
  side's outcomes, the four-fold click 1/4 to every cell; this is the
  probability-level equivalent of assigning a uniformly random bit, so no
  RNG is involved and results are exact.
* Discard: only exact two-fold coincidences are kept; every multi-click
  event is dropped. Post-selecting this way biases the reconstructed
  correlations and can push the CHSH value past the quantum bound.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .analytic import outcome_probabilities
from .params import ChannelParams, MeasurementAngles, SourceParams
from .patterns import ClickPattern, ProbabilityTable

TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)

#: Analyzer settings (radians) of the standard CHSH measurement set.
ALICE_CHSH_ANGLES = (0.0, math.radians(45.0))
BOB_CHSH_ANGLES = (math.radians(22.5), math.radians(67.5))


class PostprocessingModel(enum.Enum):
    SQUASH = "squash"
    DISCARD = "discard"


@dataclass(frozen=True, slots=True)
class CoincidenceCounts:
    """Per-temporal-mode rates of the four binary outcome pairs."""

    n_pp: float
    n_pm: float
    n_mp: float
    n_mm: float

    def total(self) -> float:
        return self.n_pp + self.n_pm + self.n_mp + self.n_mm


def _pat(a_plus: int, a_minus: int, b_plus: int, b_minus: int) -> ClickPattern:
    return ClickPattern(bool(a_plus), bool(a_minus), bool(b_plus), bool(b_minus))


def squash_coincidences(table: ProbabilityTable) -> CoincidenceCounts:
    """Fold double clicks in with equal weight on both outcomes."""
    cells = {}
    for sa in (1, -1):
        for sb in (1, -1):
            a = (1, 0) if sa > 0 else (0, 1)
            b = (1, 0) if sb > 0 else (0, 1)
            cells[sa, sb] = (
                table[_pat(*a, *b)]
                + 0.5 * table[_pat(1, 1, *b)]
                + 0.5 * table[_pat(*a, 1, 1)]
                + 0.25 * table[_pat(1, 1, 1, 1)]
            )
    return CoincidenceCounts(
        n_pp=cells[1, 1], n_pm=cells[1, -1], n_mp=cells[-1, 1], n_mm=cells[-1, -1]
    )


def discard_coincidences(table: ProbabilityTable) -> CoincidenceCounts:
    """Keep only exact two-fold coincidences; drop all multi-click events."""
    return CoincidenceCounts(
        n_pp=table[_pat(1, 0, 1, 0)],
        n_pm=table[_pat(1, 0, 0, 1)],
        n_mp=table[_pat(0, 1, 1, 0)],
        n_mm=table[_pat(0, 1, 0, 1)],
    )


def coincidences(
    table: ProbabilityTable, model: PostprocessingModel
) -> CoincidenceCounts:
    if model is PostprocessingModel.SQUASH:
        return squash_coincidences(table)
    return discard_coincidences(table)


def correlation(counts: CoincidenceCounts) -> float:
    """Outcome correlation E in [-1, 1]; 0 when no coincidences occur."""
    total = counts.total()
    if total == 0.0:
        return 0.0
    return (counts.n_pp - counts.n_pm - counts.n_mp + counts.n_mm) / total


def chsh(
    source: SourceParams,
    channel: ChannelParams,
    model: PostprocessingModel,
) -> float:
    """CHSH value S at the standard settings (0, 45; 22.5, 67.5 degrees).

    Each correlation depends only on the relative analyzer angle, so the
    four terms are evaluated at their angle differences.
    """
    a1, a2 = ALICE_CHSH_ANGLES
    b1, b2 = BOB_CHSH_ANGLES

    def corr(theta_a: float, theta_b: float) -> float:
        table = outcome_probabilities(
            source, channel, MeasurementAngles(theta_a, theta_b)
        )
        return correlation(coincidences(table, model))

    return abs(
        corr(a1, b1) - corr(a1, b2) + corr(a2, b1) + corr(a2, b2)
    )
