"""The four loop phases: acquisition, refinement, partition, evaluation.

Each phase is a pure function of its inputs plus the backend clients;
all randomness is derived per sample from (seed, sample_id) so results
never depend on batch order or thread scheduling.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

from .. import curriculum
from ..backends.batch import DEFAULT_FAILURE_BUDGET, run_batch
from ..corpus import AudioRef, Sample, save_manifest
from ..errors import (
    DurationOverrun,
    EmptyEvalSet,
    EmptyInput,
    FailureBudgetExceeded,
    MissingAudio,
)
from .types import (
    EvolutionConfig,
    Label,
    ScoredSample,
    SpeechSource,
    SpeechUsed,
)

log = logging.getLogger(__name__)

__all__ = [
    "choose_voice",
    "run_acquisition",
    "run_refinement",
    "partition_and_emit",
    "run_evaluation",
    "PartitionResult",
    "scored_line",
    "empty_positives_warning",
]


def empty_positives_warning(round_index: int) -> str:
    return f"round {round_index}: no positive samples, update skipped"


def choose_voice(seed: int, sample_id: str, voice_pool: Sequence[str]) -> str:
    """Deterministic, order-independent voice pick.

    The RNG stream is keyed by sha256("{seed}|{sample_id}|voice"), so a
    sample keeps its voice no matter which other samples are present.
    Reproduce externally as:

        key = sha256(f"{seed}|{sample_id}|voice".encode()).digest()
        random.Random(int.from_bytes(key, "big")).randrange(len(pool))
    """
    if not voice_pool:
        raise ValueError("voice_pool must be non-empty")
    key = hashlib.sha256(f"{seed}|{sample_id}|voice".encode("utf-8")).digest()
    rng = random.Random(int.from_bytes(key, "big"))
    return voice_pool[rng.randrange(len(voice_pool))]


def _check_budget(failures: int, total: int, budget: float) -> None:
    if total and failures / total > budget:
        raise FailureBudgetExceeded(failures, total, budget)


def run_acquisition(
    samples: Sequence[Sample],
    voice_pool: Sequence[str],
    config: EvolutionConfig,
    tts,
    failure_budget: float = DEFAULT_FAILURE_BUDGET,
    max_in_flight: int = 8,
) -> List[Sample]:
    """Synthesize speech for every sample; returns enriched samples.

    When authentic audio exists its duration is passed as the synthesis
    target so the clip stays aligned with the original. Clips over the
    duration ceiling come back flagged degraded rather than dropped;
    hard synthesis failures are dropped, subject to the failure budget.
    """
    if not voice_pool:
        raise ValueError("voice_pool must be non-empty")
    samples = list(samples)
    if not samples:
        return []

    def make_task(sample: Sample) -> Callable[[], AudioRef]:
        voice = choose_voice(config.seed, sample.id, voice_pool)
        target = (
            sample.authentic_audio.duration_s
            if sample.authentic_audio is not None
            else None
        )

        def work() -> AudioRef:
            return tts.synthesize(sample.text, voice, target_duration_s=target)

        return work

    # retries live inside the client; the batch layer only fans out
    results = run_batch(
        [make_task(s) for s in samples],
        endpoint="tts",
        max_in_flight=max_in_flight,
        max_attempts=1,
    )

    out: List[Sample] = []
    failures = 0
    for sample, result in zip(samples, results):
        if result.ok:
            out.append(sample.with_synthetic_audio(result.value))
        elif isinstance(result.error, DurationOverrun):
            out.append(sample.with_synthetic_audio(result.error.audio, degraded=True))
        else:
            failures += 1
            log.warning("synthesis failed for %s: %s", sample.id, result.error)
    _check_budget(failures, len(samples), failure_budget)
    return out


def _pick_audio(sample: Sample, source: SpeechSource) -> Tuple[AudioRef, SpeechUsed]:
    if source is SpeechSource.PREFER_AUTHENTIC:
        order = (
            (sample.authentic_audio, SpeechUsed.AUTHENTIC),
            (sample.synthetic_audio, SpeechUsed.SYNTHETIC),
        )
    else:
        order = (
            (sample.synthetic_audio, SpeechUsed.SYNTHETIC),
            (sample.authentic_audio, SpeechUsed.AUTHENTIC),
        )
    for audio, used in order:
        if audio is not None:
            return audio, used
    raise MissingAudio(f"sample {sample.id} has no usable audio")


def run_refinement(
    samples: Sequence[Sample],
    config: EvolutionConfig,
    translate,
    score,
    failure_budget: float = DEFAULT_FAILURE_BUDGET,
    max_in_flight: int = 8,
) -> List[ScoredSample]:
    """Score text-only vs speech-guided translation for each sample.

    Degraded samples are skipped (their audio is unusable by contract)
    and logged. Everything else must carry audio per config.speech_source.
    """
    active: List[Tuple[Sample, AudioRef, SpeechUsed]] = []
    skipped = 0
    for sample in samples:
        if sample.degraded:
            skipped += 1
            log.info("skipping degraded sample %s", sample.id)
            continue
        audio, used = _pick_audio(sample, config.speech_source)
        active.append((sample, audio, used))
    if skipped:
        log.warning("refinement skipped %d degraded sample(s)", skipped)
    if not active:
        return []

    def make_task(sample: Sample, audio: AudioRef) -> Callable[[], Tuple[float, float]]:
        def work() -> Tuple[float, float]:
            text_only = translate.translate("mt", sample.text, None, sample.direction)
            s1 = score.score(sample.text, text_only.text, sample.reference)
            guided = translate.translate("smt", sample.text, audio, sample.direction)
            s2 = score.score(sample.text, guided.text, sample.reference)
            return s1, s2

        return work

    results = run_batch(
        [make_task(s, a) for s, a, _ in active],
        endpoint="refine",
        max_in_flight=max_in_flight,
        max_attempts=1,
    )

    scored: List[ScoredSample] = []
    failures = 0
    for (sample, _, used), result in zip(active, results):
        if not result.ok:
            failures += 1
            log.warning("refinement failed for %s: %s", sample.id, result.error)
            continue
        s1, s2 = result.value
        scored.append(ScoredSample.from_scores(sample, used, s1, s2))
    _check_budget(failures, len(active), failure_budget)
    return scored


def scored_line(item: ScoredSample) -> dict:
    """Manifest row: the full sample record plus the refinement verdict."""
    if item.sample is None:
        raise ValueError(f"scored sample {item.sample_id} lacks its sample record")
    row = item.sample.to_json()
    row.update(
        s1=item.s1,
        s2=item.s2,
        label=item.label.value,
        speech_used=item.speech_used.value,
    )
    return row


def _write_scored_manifest(items: Sequence[ScoredSample], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(scored_line(item), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


@dataclass(frozen=True)
class PartitionResult:
    positives_path: str
    negatives_path: str
    jobspec: Optional[curriculum.JobSpec]
    n_positive: int
    n_negative: int
    warning: Optional[str] = None


def partition_and_emit(
    scored: Sequence[ScoredSample],
    round_index: int,
    out_dir: str,
    workspace: Optional[str] = None,
) -> PartitionResult:
    """Split scored samples by label and emit the continual-training spec.

    Both manifests are always written (possibly empty) so the journal
    layout is uniform. Only positives feed the JobSpec; with zero
    positives there is nothing to train on, so the spec is null and the
    result carries a warning instead of failing the round.

    When `workspace` is given, the JobSpec stores the positives path
    relative to it, keeping journals relocatable.
    """
    scored = list(scored)
    if not scored:
        raise EmptyInput("cannot partition an empty scored list")
    out = Path(out_dir)
    positives = [s for s in scored if s.label is Label.POSITIVE]
    negatives = [s for s in scored if s.label is Label.NEGATIVE]

    pos_path = out / "positives.jsonl"
    neg_path = out / "negatives.jsonl"
    _write_scored_manifest(positives, pos_path)
    _write_scored_manifest(negatives, neg_path)

    if workspace is not None:
        dataset_ref = os.path.relpath(pos_path, workspace).replace(os.sep, "/")
        root: Optional[str] = str(workspace)
    else:
        dataset_ref = str(pos_path)
        root = None

    if positives:
        jobspec = curriculum.continual_spec(dataset_ref, round_index, root=root)
        warning = None
    else:
        jobspec = None
        warning = empty_positives_warning(round_index)
        log.warning("%s", warning)

    return PartitionResult(
        positives_path=str(pos_path),
        negatives_path=str(neg_path),
        jobspec=jobspec,
        n_positive=len(positives),
        n_negative=len(negatives),
        warning=warning,
    )


def run_evaluation(
    eval_samples: Sequence[Sample],
    config: EvolutionConfig,
    tts,
    translate,
    score,
    failure_budget: float = DEFAULT_FAILURE_BUDGET,
    max_in_flight: int = 8,
    by_direction: bool = False,
):
    """Mean speech-guided translation score over the eval set.

    All eval speech uses the single fixed voice so that round-over-round
    deltas measure the model, not voice variation. With by_direction the
    return value is (mean, {"src-tgt": per-direction mean, ...}).
    """
    eval_samples = list(eval_samples)
    if not eval_samples:
        raise EmptyEvalSet("evaluation requires a non-empty eval set")
    if not config.fixed_eval_voice:
        raise ValueError("config.fixed_eval_voice must be set for evaluation")
    voice = config.fixed_eval_voice

    def make_task(sample: Sample) -> Callable[[], float]:
        def work() -> float:
            audio = tts.synthesize(sample.text, voice)
            guided = translate.translate("smt", sample.text, audio, sample.direction)
            return score.score(sample.text, guided.text, sample.reference)

        return work

    results = run_batch(
        [make_task(s) for s in eval_samples],
        endpoint="eval",
        max_in_flight=max_in_flight,
        max_attempts=1,
    )
    values = []
    per_direction: dict = {}
    failures = 0
    for sample, result in zip(eval_samples, results):
        if not result.ok:
            failures += 1
            log.warning("evaluation failed for %s: %s", sample.id, result.error)
            continue
        values.append(result.value)
        per_direction.setdefault(sample.direction, []).append(result.value)
    _check_budget(failures, len(eval_samples), failure_budget)
    if not values:
        raise EmptyEvalSet("no eval sample produced a score")
    mean = sum(values) / len(values)
    if by_direction:
        breakdown = {
            f"{src}-{tgt}": sum(vals) / len(vals)
            for (src, tgt), vals in sorted(per_direction.items())
        }
        return mean, breakdown
    return mean
