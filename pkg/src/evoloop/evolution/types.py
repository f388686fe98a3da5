"""Domain types for the self-evolution loop."""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

from ..corpus import Sample

__all__ = [
    "Label",
    "SpeechUsed",
    "SpeechSource",
    "RoundStatus",
    "label_for",
    "ScoredSample",
    "RoundState",
    "EvolutionConfig",
    "Backends",
    "ModelVersion",
]


class Label(str, enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"


class SpeechUsed(str, enum.Enum):
    AUTHENTIC = "Authentic"
    SYNTHETIC = "Synthetic"


class SpeechSource(str, enum.Enum):
    PREFER_SYNTHETIC = "PreferSynthetic"
    PREFER_AUTHENTIC = "PreferAuthentic"


class RoundStatus(str, enum.Enum):
    IMPROVED = "Improved"
    PLATEAU = "Plateau"
    CONVERGED = "Converged"
    MAX_ROUNDS = "MaxRounds"


def label_for(s1: float, s2: float) -> Label:
    """Positive only when speech strictly helps; ties are Negative."""
    return Label.POSITIVE if s2 > s1 else Label.NEGATIVE


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0,1], got {value}")
    return value


@dataclass(frozen=True)
class ScoredSample:
    """Labeled outcome of one refinement comparison.

    s1 scores the text-only translation, s2 the speech-guided one. The
    full Sample rides along (excluded from equality) so manifests can be
    written without a second lookup.
    """

    sample_id: str
    speech_used: SpeechUsed
    s1: float
    s2: float
    label: Label
    sample: Optional[Sample] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "speech_used", SpeechUsed(self.speech_used))
        object.__setattr__(self, "s1", _check_unit("s1", self.s1))
        object.__setattr__(self, "s2", _check_unit("s2", self.s2))
        object.__setattr__(self, "label", Label(self.label))
        if self.label is not label_for(self.s1, self.s2):
            raise ValueError(
                f"label {self.label.value} contradicts s1={self.s1}, s2={self.s2}"
            )

    @classmethod
    def from_scores(
        cls,
        sample: Sample,
        speech_used: SpeechUsed,
        s1: float,
        s2: float,
    ) -> "ScoredSample":
        return cls(
            sample_id=sample.id,
            speech_used=speech_used,
            s1=float(s1),
            s2=float(s2),
            label=label_for(s1, s2),
            sample=sample,
        )

    def to_json(self) -> Dict[str, object]:
        return {
            "sample_id": self.sample_id,
            "speech_used": self.speech_used.value,
            "s1": self.s1,
            "s2": self.s2,
            "label": self.label.value,
        }


@dataclass(frozen=True)
class RoundState:
    """Summary of one completed round, as journaled in state.json."""

    round_index: int
    acquisition_manifest: str
    positives_manifest: str
    negatives_manifest: str
    n_positive: int
    n_negative: int
    eval_score: float
    delta_vs_best: float
    status: RoundStatus

    def __post_init__(self) -> None:
        if self.round_index < 1:
            raise ValueError(f"round_index must be >= 1, got {self.round_index}")
        if self.n_positive < 0 or self.n_negative < 0:
            raise ValueError("sample counts must be non-negative")
        object.__setattr__(self, "eval_score", _check_unit("eval_score", self.eval_score))
        object.__setattr__(self, "delta_vs_best", float(self.delta_vs_best))
        object.__setattr__(self, "status", RoundStatus(self.status))

    def to_json(self) -> Dict[str, object]:
        return {
            "round_index": self.round_index,
            "acquisition_manifest": self.acquisition_manifest,
            "positives_manifest": self.positives_manifest,
            "negatives_manifest": self.negatives_manifest,
            "n_positive": self.n_positive,
            "n_negative": self.n_negative,
            "eval_score": self.eval_score,
            "delta_vs_best": self.delta_vs_best,
            "status": self.status.value,
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, object]) -> "RoundState":
        return cls(
            round_index=int(obj["round_index"]),  # type: ignore[arg-type]
            acquisition_manifest=str(obj["acquisition_manifest"]),
            positives_manifest=str(obj["positives_manifest"]),
            negatives_manifest=str(obj["negatives_manifest"]),
            n_positive=int(obj["n_positive"]),  # type: ignore[arg-type]
            n_negative=int(obj["n_negative"]),  # type: ignore[arg-type]
            eval_score=float(obj["eval_score"]),  # type: ignore[arg-type]
            delta_vs_best=float(obj["delta_vs_best"]),  # type: ignore[arg-type]
            status=RoundStatus(str(obj["status"])),
        )


@dataclass(frozen=True)
class EvolutionConfig:
    """Loop parameters. epsilon and eval_score share the [0,1] scale."""

    epsilon: float = 0.001
    patience: int = 1
    max_rounds: int = 5
    seed: int = 0
    speech_source: SpeechSource = SpeechSource.PREFER_SYNTHETIC
    fixed_eval_voice: str = ""

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be >= 1, got {self.max_rounds}")
        object.__setattr__(self, "speech_source", SpeechSource(self.speech_source))

    def to_json(self) -> Dict[str, object]:
        return {
            "epsilon": self.epsilon,
            "patience": self.patience,
            "max_rounds": self.max_rounds,
            "seed": self.seed,
            "speech_source": self.speech_source.value,
            "fixed_eval_voice": self.fixed_eval_voice,
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, object]) -> "EvolutionConfig":
        kwargs = dict(obj)
        return cls(
            epsilon=float(kwargs.get("epsilon", 0.001)),
            patience=int(kwargs.get("patience", 1)),
            max_rounds=int(kwargs.get("max_rounds", 5)),
            seed=int(kwargs.get("seed", 0)),
            speech_source=SpeechSource(kwargs.get("speech_source", "PreferSynthetic")),
            fixed_eval_voice=str(kwargs.get("fixed_eval_voice", "")),
        )


@dataclass
class Backends:
    """The three clients a loop run needs. Any objects with the same
    method shapes (synthesize/translate/score) are accepted."""

    tts: object
    translate: object
    score: object


class ModelVersion:
    """Mutable, thread-safe version counter shared with backend wrappers.

    The loop sets it from the journal; cache namespaces and mock scorers
    read it through closures, so post-update responses never collide with
    pre-update cache entries.
    """

    def __init__(self, value: int = 0):
        self._lock = threading.Lock()
        self._value = int(value)

    @property
    def value(self) -> int:
        with self._lock:
            return self._value

    def set(self, value: int) -> None:
        with self._lock:
            self._value = int(value)

    def namespace(self) -> str:
        return f"v{self.value}"

    def __repr__(self) -> str:
        return f"ModelVersion({self.value})"
