"""One-call wiring of the in-process mock backends for offline runs.

Used by the CLI's --mock flag and by tests that drive the full loop
without a network. The stack shares a single content cache and a single
model-version cell: the translation and scoring clients namespace their
cache entries by version, so post-update responses never read stale
pre-update cache entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .backends.cache import ContentCache
from .backends.clients import ScoreClient, TranslateClient, TtsClient
from .backends.mock import ContrastTranslator, MockScorer, MockTts, ScheduledScorer
from .evolution.types import Backends, ModelVersion

__all__ = ["MockStack", "build_mock_stack", "DEFAULT_VOICE_POOL"]

DEFAULT_VOICE_POOL = ("voice-a", "voice-b", "voice-c", "voice-d", "voice-e")


@dataclass
class MockStack:
    backends: Backends
    version: ModelVersion
    cache: ContentCache
    tts_backend: MockTts
    translate_backend: object
    score_backend: object


def build_mock_stack(
    workspace: str,
    translator=None,
    scorer=None,
    eval_schedule: Optional[Sequence[float]] = None,
    miss_penalty: float = 0.05,
    known_voices: Optional[frozenset] = None,
) -> MockStack:
    """Build cached clients over deterministic in-process backends.

    By default the translator drops the final token in text-only mode and
    echoes in speech-guided mode, and the scorer is token F1, so speech
    strictly helps on multi-token inputs. Passing `eval_schedule` swaps in
    the version-stepped scorer, which makes eval scores follow the
    schedule as the loop's update phase advances the model version.
    """
    workspace = str(workspace)
    cache = ContentCache(Path(workspace) / "cache")
    version = ModelVersion(0)

    tts_backend = MockTts(workspace, known_voices=known_voices)
    translate_backend = translator if translator is not None else ContrastTranslator()
    if scorer is not None:
        score_backend = scorer
    elif eval_schedule is not None:
        score_backend = ScheduledScorer(
            list(eval_schedule), version_provider=lambda: version.value,
            miss_penalty=miss_penalty,
        )
    else:
        score_backend = MockScorer()

    backends = Backends(
        tts=TtsClient(tts_backend, cache),
        translate=TranslateClient(translate_backend, cache, namespace=version.namespace),
        score=ScoreClient(score_backend, cache, namespace=version.namespace),
    )
    return MockStack(
        backends=backends,
        version=version,
        cache=cache,
        tts_backend=tts_backend,
        translate_backend=translate_backend,
        score_backend=score_backend,
    )
