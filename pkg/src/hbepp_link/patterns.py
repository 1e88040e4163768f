"""Click patterns of the four threshold detectors and their probability table.

Each party analyzes its arm with a polarizing splitter feeding two threshold
detectors, so one temporal mode yields a 4-bit record: Alice's ``+``/``-``
detectors and Bob's ``+``/``-`` detectors. There are exactly 16 outcomes; the
canonical ordering below (vacuum, then single clicks, then two-fold
coincidences, then one-sided double clicks, then triples, then the quad) is
fixed so that serialized tables are stable and diff-able.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, NamedTuple

#: Tolerance separating floating-point rounding from genuine bugs.
NEGATIVE_TOLERANCE = 1e-12


class ProbabilityConsistencyError(ValueError):
    """A probability fell outside [0, 1] by more than rounding allows."""


class ClickPattern(NamedTuple):
    """Which of the four detectors fired (True = click)."""

    a_plus: bool
    a_minus: bool
    b_plus: bool
    b_minus: bool

    def bits(self) -> str:
        """4-character bit string in (a+, a-, b+, b-) order."""
        return "".join("1" if b else "0" for b in self)

    def label(self) -> str:
        """Short human-readable label, e.g. ``A+B-`` or ``vac``."""
        names = ("A+", "A-", "B+", "B-")
        fired = [n for n, b in zip(names, self) if b]
        return "".join(fired) if fired else "vac"


def _pattern(bits: str) -> ClickPattern:
    return ClickPattern(*(c == "1" for c in bits))


#: The 16 outcomes in canonical order.
CANONICAL_PATTERNS: tuple[ClickPattern, ...] = tuple(
    _pattern(b)
    for b in (
        "0000",
        "1000", "0100", "0010", "0001",
        "1010", "1001", "0110", "0101",
        "1100", "0011",
        "1110", "1101", "1011", "0111",
        "1111",
    )
)

_PATTERN_INDEX = {p: i for i, p in enumerate(CANONICAL_PATTERNS)}


def pattern_index(pattern: ClickPattern) -> int:
    """Position of ``pattern`` in the canonical ordering."""
    return _PATTERN_INDEX[pattern]


@dataclass(frozen=True, slots=True)
class ProbabilityTable:
    """Probabilities of the 16 click patterns, in canonical order.

    Raw values are kept as computed; the constructor rejects entries outside
    [-NEGATIVE_TOLERANCE, 1 + NEGATIVE_TOLERANCE]. Values are clamped to
    [0, 1] only at output boundaries (``as_dict``/``clamped``), so tests can
    still inspect sub-rounding negatives.
    """

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != 16:
            raise ValueError(f"expected 16 entries, got {len(self.values)}")
        for p, v in zip(CANONICAL_PATTERNS, self.values):
            if v < -NEGATIVE_TOLERANCE or v > 1.0 + NEGATIVE_TOLERANCE:
                raise ProbabilityConsistencyError(
                    f"P[{p.label()}] = {v!r} outside [0, 1] beyond rounding"
                )

    @classmethod
    def from_mapping(cls, mapping: Mapping[ClickPattern, float]) -> "ProbabilityTable":
        return cls(tuple(mapping[p] for p in CANONICAL_PATTERNS))

    def __getitem__(self, pattern: ClickPattern) -> float:
        return self.values[_PATTERN_INDEX[pattern]]

    def __iter__(self) -> Iterator[tuple[ClickPattern, float]]:
        return iter(zip(CANONICAL_PATTERNS, self.values))

    def total(self) -> float:
        return sum(self.values)

    def clamped(self) -> "ProbabilityTable":
        """Copy with every entry clamped into [0, 1]."""
        return ProbabilityTable(
            tuple(min(1.0, max(0.0, v)) for v in self.values)
        )

    def as_dict(self) -> dict[ClickPattern, float]:
        """Clamped mapping view, for serialization."""
        return {
            p: min(1.0, max(0.0, v))
            for p, v in zip(CANONICAL_PATTERNS, self.values)
        }
