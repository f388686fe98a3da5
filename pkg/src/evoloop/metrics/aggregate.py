"""Per-direction score rows and their report-level aggregation."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Sequence

from ..corpus import SPACELESS_SCRIPTS, ResourceLevel, resource_level
from ..errors import EmptyInput
from .tokenizer import tokenize_13a

# target scripts with no inter-word spaces: 13a token counts are meaningless,
# so length heuristics use Unicode scalar counts instead
SPACELESS_TARGETS = SPACELESS_SCRIPTS

DEFAULT_RATIO_THRESHOLD = 0.6


@dataclass(frozen=True)
class DirectionScore:
    """Aggregated metrics for one translation direction.

    comet is on the 0-100 report scale (raw scorer output times 100).
    """

    direction: tuple[str, str]
    spbleu: float
    comet: float
    n_samples: int

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if not 0.0 <= self.spbleu <= 100.0:
            raise ValueError(f"spbleu out of range: {self.spbleu}")
        if not 0.0 <= self.comet <= 100.0:
            raise ValueError(f"comet out of range: {self.comet}")


def round1(value: float) -> float:
    """Report rounding: one decimal, halves away from zero."""
    return float(Decimal(str(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def average_directions(rows: Sequence[DirectionScore]) -> tuple[float, float]:
    """Unweighted mean over directions, rounded to the 1-decimal report scale."""
    if not rows:
        raise EmptyInput("no direction rows to average")
    avg_spbleu = sum(r.spbleu for r in rows) / len(rows)
    avg_comet = sum(r.comet for r in rows) / len(rows)
    return round1(avg_spbleu), round1(avg_comet)


def aggregate_by_resource(
    rows: Sequence[DirectionScore],
    taxonomy: Mapping[str, ResourceLevel] | None = None,
) -> dict[ResourceLevel, tuple[float, float]]:
    """Group rows by the target language's resource level; mean per group.

    Groups nothing maps to are omitted. A custom taxonomy (code -> level)
    overrides the built-in one.
    """
    groups: dict[ResourceLevel, list[DirectionScore]] = {}
    for row in rows:
        tgt = row.direction[1]
        level = taxonomy[tgt] if taxonomy is not None else resource_level(tgt)
        groups.setdefault(level, []).append(row)
    return {level: average_directions(members) for level, members in groups.items()}


def _length_tokens(text: str, tgt_lang: str) -> int:
    if tgt_lang in SPACELESS_TARGETS:
        return len(text.strip())
    return len(tokenize_13a(text))


def under_translation_rate(
    pairs: Sequence[tuple[str, str]],
    tgt_lang: str,
    ratio_threshold: float = DEFAULT_RATIO_THRESHOLD,
) -> float:
    """Fraction of (hypothesis, reference) pairs that look truncated.

    A pair is flagged when the hypothesis-to-reference length ratio falls
    below ratio_threshold. Lengths are 13a token counts, or scalar counts for
    the fixed space-less target scripts. Pairs with an empty reference are
    never flagged (there is nothing to under-translate). This is a heuristic
    screen, not a claim about adequacy.
    """
    if not pairs:
        raise EmptyInput("no hypothesis/reference pairs")
    if not 0.0 < ratio_threshold < 1.0:
        raise ValueError(f"ratio_threshold must be in (0,1), got {ratio_threshold}")
    flagged = 0
    for hyp, ref in pairs:
        ref_len = _length_tokens(ref, tgt_lang)
        if ref_len == 0:
            continue
        if _length_tokens(hyp, tgt_lang) / ref_len < ratio_threshold:
            flagged += 1
    return flagged / len(pairs)
