"""Round controller: runs phases, journals them, detects convergence.

The loop is resumable at phase granularity. A phase whose output is
journaled (file present, digest matching the ledger) is loaded instead
of re-executed, so a killed run finishes without re-invoking backends
for completed work; an interrupted phase re-runs through the content
cache and converges to the same bytes.
"""

from __future__ import annotations

import json
import logging
import shlex
import subprocess
from pathlib import Path
from typing import Callable, List, Optional, Sequence

from ..backends.batch import DEFAULT_FAILURE_BUDGET
from ..corpus import Sample, load_manifest, save_manifest
from ..errors import EmptyInput, ResumeStateCorrupt, UpdateHookFailed
from . import journal as journal_mod
from .journal import Journal, fingerprint_inputs, write_atomic
from .phases import (
    empty_positives_warning,
    partition_and_emit,
    run_acquisition,
    run_evaluation,
    run_refinement,
    scored_line,
)
from .types import (
    Backends,
    EvolutionConfig,
    Label,
    ModelVersion,
    RoundState,
    RoundStatus,
    ScoredSample,
    SpeechUsed,
)

log = logging.getLogger(__name__)

__all__ = [
    "check_convergence",
    "run_loop",
    "run_update_hook",
    "scored_from_sample",
]


def _status_for(
    deltas: Sequence[float], round_index: int, config: EvolutionConfig
) -> RoundStatus:
    # precedence: Converged, then MaxRounds, then Improved, then Plateau
    tail = deltas[-config.patience:]
    if len(deltas) >= config.patience and all(d < config.epsilon for d in tail):
        return RoundStatus.CONVERGED
    if round_index >= config.max_rounds:
        return RoundStatus.MAX_ROUNDS
    if deltas[-1] >= config.epsilon:
        return RoundStatus.IMPROVED
    return RoundStatus.PLATEAU


def check_convergence(
    history: Sequence[RoundState], config: EvolutionConfig
) -> RoundStatus:
    """Status implied by the delta sequence ending at the latest round."""
    if not history:
        raise EmptyInput("check_convergence requires at least one round")
    deltas = [r.delta_vs_best for r in history]
    return _status_for(deltas, history[-1].round_index, config)


def run_update_hook(hook, jobspec_path: str) -> None:
    """Invoke the external training hook for one emitted JobSpec.

    String hooks are command templates with a {jobspec} placeholder, run
    without a shell; a non-zero exit fails the round. Callables are
    invoked with the path and fail by raising.
    """
    if callable(hook):
        hook(str(jobspec_path))
        return
    command = str(hook).format(jobspec=shlex.quote(str(jobspec_path)))
    proc = subprocess.run(shlex.split(command))
    if proc.returncode != 0:
        raise UpdateHookFailed(command, proc.returncode)


def scored_from_sample(sample: Sample) -> ScoredSample:
    """Rebuild the scored record from a journaled manifest row."""
    ann = sample.annotations
    try:
        return ScoredSample(
            sample_id=sample.id,
            speech_used=SpeechUsed(ann["speech_used"]),
            s1=float(ann["s1"]),
            s2=float(ann["s2"]),
            label=Label(ann["label"]),
            sample=sample,
        )
    except (KeyError, ValueError) as exc:
        raise ResumeStateCorrupt(
            f"scored manifest row for {sample.id} is inconsistent: {exc}"
        ) from exc


def _emit(events, round_index: int, phase: str, source: str) -> None:
    if source == "journal":
        log.info("round %d %s: replayed from journal (100%% cache hits)", round_index, phase)
    else:
        log.info("round %d %s: executed", round_index, phase)
    if events is not None:
        events.append({"round": round_index, "phase": phase, "source": source})


def _dump_json(path: Path, obj) -> None:
    write_atomic(path, json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2) + "\n")


def run_loop(
    train_samples: Sequence[Sample],
    eval_samples: Sequence[Sample],
    voice_pool: Sequence[str],
    config: EvolutionConfig,
    backends: Backends,
    workspace: str,
    update_hook=None,
    version: Optional[ModelVersion] = None,
    failure_budget: float = DEFAULT_FAILURE_BUDGET,
    max_in_flight: int = 8,
    events: Optional[list] = None,
    after_phase: Optional[Callable[[int, str], None]] = None,
) -> List[RoundState]:
    """Drive rounds until convergence or the round cap.

    `version` is the shared model-version cell; it is restored from the
    journal on resume and advanced whenever a round emits a JobSpec (the
    update hook, if any, runs first). `events` collects one provenance
    record per phase; `after_phase` fires after each freshly executed
    phase commits, which tests use to kill the loop at exact points.
    """
    train_samples = list(train_samples)
    eval_samples = list(eval_samples)
    if not train_samples:
        raise EmptyInput("run_loop requires train samples")

    jrnl = Journal(workspace)
    fingerprint = fingerprint_inputs(
        config.to_json(),
        [s.id for s in train_samples],
        [s.id for s in eval_samples],
        voice_pool,
    )
    resumed = jrnl.open(fingerprint)
    if resumed:
        log.info("resuming journaled run in %s", workspace)
    if version is not None:
        version.set(jrnl.model_version())

    kwargs = dict(failure_budget=failure_budget, max_in_flight=max_in_flight)

    # baseline evaluation of the unmodified model anchors round-1 delta
    if jrnl.has_baseline():
        baseline = jrnl.baseline()
        _emit(events, 0, "baseline", "journal")
    else:
        baseline = run_evaluation(
            eval_samples, config, backends.tts, backends.translate, backends.score, **kwargs
        )
        jrnl.set_baseline(baseline)
        _emit(events, 0, "baseline", "fresh")
        if after_phase is not None:
            after_phase(0, "baseline")

    history: List[RoundState] = []
    for k in range(1, config.max_rounds + 1):
        rdir = jrnl.round_dir(k)

        # --- acquisition ------------------------------------------------
        acq_path = rdir / "acquisition.jsonl"
        if jrnl.phase_done(k, journal_mod.ACQUISITION):
            acquired = load_manifest(acq_path, strict=True)
            _emit(events, k, journal_mod.ACQUISITION, "journal")
        else:
            acquired = run_acquisition(
                train_samples, voice_pool, config, backends.tts, **kwargs
            )
            save_manifest(acquired, acq_path)
            jrnl.record_phase(k, journal_mod.ACQUISITION)
            _emit(events, k, journal_mod.ACQUISITION, "fresh")
            if after_phase is not None:
                after_phase(k, journal_mod.ACQUISITION)

        # --- refinement ---------------------------------------------------
        scored_path = rdir / "scored.jsonl"
        if jrnl.phase_done(k, journal_mod.REFINEMENT):
            scored = [
                scored_from_sample(s) for s in load_manifest(scored_path, strict=True)
            ]
            _emit(events, k, journal_mod.REFINEMENT, "journal")
        else:
            scored = run_refinement(
                acquired, config, backends.translate, backends.score, **kwargs
            )
            with open(scored_path, "w", encoding="utf-8") as fh:
                for item in scored:
                    fh.write(json.dumps(scored_line(item), ensure_ascii=False, sort_keys=True))
                    fh.write("\n")
            jrnl.record_phase(k, journal_mod.REFINEMENT)
            _emit(events, k, journal_mod.REFINEMENT, "fresh")
            if after_phase is not None:
                after_phase(k, journal_mod.REFINEMENT)

        # --- update (partition, jobspec, training hook) -----------------
        n_positive = sum(1 for s in scored if s.label is Label.POSITIVE)
        n_negative = len(scored) - n_positive
        warning: Optional[str] = None
        if jrnl.phase_done(k, journal_mod.UPDATE):
            if n_positive == 0:
                warning = empty_positives_warning(k)
            _emit(events, k, journal_mod.UPDATE, "journal")
        else:
            part = partition_and_emit(scored, k, str(rdir), workspace=workspace)
            warning = part.warning
            jobspec_path = rdir / "jobspec.json"
            _dump_json(
                jobspec_path,
                part.jobspec.to_json() if part.jobspec is not None else None,
            )
            trained = part.jobspec is not None
            if trained and update_hook is not None:
                run_update_hook(update_hook, str(jobspec_path))
            jrnl.record_phase(k, journal_mod.UPDATE, trained=trained)
            _emit(events, k, journal_mod.UPDATE, "fresh")
            if after_phase is not None:
                after_phase(k, journal_mod.UPDATE)
        if version is not None:
            version.set(jrnl.model_version())

        # --- evaluation --------------------------------------------------
        state_path = rdir / "state.json"
        if jrnl.phase_done(k, journal_mod.EVALUATION):
            with open(state_path, encoding="utf-8") as fh:
                obj = json.load(fh)
            obj.pop("warnings", None)
            state = RoundState.from_json(obj)
            _emit(events, k, journal_mod.EVALUATION, "journal")
        else:
            eval_score, by_direction = run_evaluation(
                eval_samples, config, backends.tts, backends.translate,
                backends.score, by_direction=True, **kwargs
            )
            best = max([baseline] + [r.eval_score for r in history])
            delta = eval_score - best
            status = _status_for(
                [r.delta_vs_best for r in history] + [delta], k, config
            )
            state = RoundState(
                round_index=k,
                acquisition_manifest=jrnl.rel(acq_path),
                positives_manifest=jrnl.rel(rdir / "positives.jsonl"),
                negatives_manifest=jrnl.rel(rdir / "negatives.jsonl"),
                n_positive=n_positive,
                n_negative=n_negative,
                eval_score=eval_score,
                delta_vs_best=delta,
                status=status,
            )
            obj = state.to_json()
            obj["eval_by_direction"] = by_direction
            if warning:
                obj["warnings"] = [warning]
            _dump_json(state_path, obj)
            jrnl.record_phase(k, journal_mod.EVALUATION)
            _emit(events, k, journal_mod.EVALUATION, "fresh")
            if after_phase is not None:
                after_phase(k, journal_mod.EVALUATION)

        history.append(state)
        log.info(
            "round %d: n_pos=%d n_neg=%d eval=%.4f delta=%+.4f %s",
            k, state.n_positive, state.n_negative,
            state.eval_score, state.delta_vs_best, state.status.value,
        )
        if state.status in (RoundStatus.CONVERGED, RoundStatus.MAX_ROUNDS):
            break

    return history
