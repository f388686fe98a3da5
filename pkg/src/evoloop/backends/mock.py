"""In-process mock backends.

Each mock accepts and returns the same JSON dicts as the wire protocol, so
clients cannot tell them from an HTTP transport. All are pure functions of
(request, construction arguments); nothing reads clocks or global RNG state,
which is what makes whole-pipeline runs reproducible byte for byte.

Documented behaviors relied on by fixtures:
- MockTts duration: target_duration_s when the request carries one, else
  char_len(text)/15.0 seconds (a 15-chars-per-second speaking rate).
- EchoTranslator returns the input text in both modes.
- ContrastTranslator drops the final whitespace-separated token in MT mode
  and echoes in SMT mode (speech keeps the tail intact).
- MockScorer is the harmonic F1 over whitespace token multisets of
  hypothesis vs reference; the source string is ignored.
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile
import threading
import wave
from collections import Counter
from pathlib import Path
from typing import Callable, Mapping

from ..errors import PermanentBackendError, TransientBackendError

CHARS_PER_SECOND = 15.0
SAMPLE_RATE_HZ = 16000
_STUB_FRAMES = 160  # 10 ms of audio; metadata carries the logical duration


class CallCounter:
    """Thread-safe request counter shared by the mocks."""

    def __init__(self):
        self._lock = threading.Lock()
        self.count = 0

    def bump(self):
        with self._lock:
            self.count += 1


class MockTts:
    """Writes tiny 16 kHz mono PCM16 WAV stubs under the workspace."""

    def __init__(
        self,
        workspace: str | Path,
        duration_override: Callable[[str], float] | None = None,
        known_voices: frozenset[str] | None = None,
    ):
        self.workspace = Path(workspace)
        self.duration_override = duration_override
        self.known_voices = known_voices
        self.calls = CallCounter()

    def tts(self, payload: dict) -> dict:
        self.calls.bump()
        text = payload["text"]
        voice_id = payload["voice_id"]
        if not text:
            raise PermanentBackendError(400, "empty-text", "nothing to synthesize")
        if self.known_voices is not None and voice_id not in self.known_voices:
            raise PermanentBackendError(400, "unknown-voice", voice_id)
        if self.duration_override is not None:
            duration_s = self.duration_override(text)
        elif payload.get("target_duration_s") is not None:
            duration_s = float(payload["target_duration_s"])
        else:
            duration_s = len(text) / CHARS_PER_SECOND
        key = hashlib.sha256(
            f"{text}\x00{voice_id}\x00{payload.get('target_duration_s')}".encode()
        ).hexdigest()[:16]
        uri = f"audio/{key}.wav"
        self._write_stub(self.workspace / uri)
        return {
            "uri": uri,
            "duration_s": duration_s,
            "sample_rate_hz": SAMPLE_RATE_HZ,
        }

    @staticmethod
    def _write_stub(path: Path) -> None:
        if path.exists():
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        os.close(fd)
        try:
            with wave.open(tmp, "wb") as wav:
                wav.setnchannels(1)
                wav.setsampwidth(2)
                wav.setframerate(SAMPLE_RATE_HZ)
                wav.writeframes(struct.pack(f"<{_STUB_FRAMES}h", *([0] * _STUB_FRAMES)))
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


class EchoTranslator:
    """Returns the source text unchanged in both modes."""

    def __init__(self):
        self.calls = CallCounter()

    def translate(self, payload: dict) -> dict:
        self.calls.bump()
        return {"text": payload["text"]}


class ContrastTranslator:
    """Text-only mode loses the final token; speech-guided mode does not.

    The asymmetry makes speech-guided hypotheses strictly closer to the
    reference whenever the reference equals the source text, which is how
    fixture corpora arrange a clean positive partition.
    """

    def __init__(self):
        self.calls = CallCounter()

    def translate(self, payload: dict) -> dict:
        self.calls.bump()
        text = payload["text"]
        if payload["mode"] == "mt":
            tokens = text.split()
            text = " ".join(tokens[:-1])
        return {"text": text}


class LookupTranslator:
    """Scripted outputs keyed by (mode, text); falls back to echo."""

    def __init__(self, outputs: Mapping[tuple[str, str], str]):
        self.outputs = dict(outputs)
        self.calls = CallCounter()

    def translate(self, payload: dict) -> dict:
        self.calls.bump()
        return {"text": self.outputs.get((payload["mode"], payload["text"]),
                                         payload["text"])}


def token_f1(hypothesis: str, reference: str) -> float:
    """Harmonic mean of token precision and recall over multisets."""
    hyp = hypothesis.split()
    ref = reference.split()
    if not hyp and not ref:
        return 1.0
    if not hyp or not ref:
        return 0.0
    overlap = sum((Counter(hyp) & Counter(ref)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(hyp)
    recall = overlap / len(ref)
    return 2 * precision * recall / (precision + recall)


class MockScorer:
    """Token-F1 quality estimate; hand-checkable on any fixture pair."""

    def __init__(self):
        self.calls = CallCounter()

    def score(self, payload: dict) -> dict:
        self.calls.bump()
        return {"score": token_f1(payload["hypothesis"], payload["reference"])}


class ScheduledScorer:
    """Quality that follows a per-version schedule.

    Exact-match hypotheses score schedule[version]; anything else scores
    miss_penalty below that (floored at 0). version_provider is read per
    request, so the same instance tracks a model as update rounds bump it.
    """

    def __init__(
        self,
        schedule: list[float],
        version_provider: Callable[[], int],
        miss_penalty: float = 0.05,
    ):
        self.schedule = list(schedule)
        self.version_provider = version_provider
        self.miss_penalty = miss_penalty
        self.calls = CallCounter()

    def score(self, payload: dict) -> dict:
        self.calls.bump()
        version = self.version_provider()
        base = self.schedule[min(version, len(self.schedule) - 1)]
        if payload["hypothesis"] == payload["reference"]:
            return {"score": base}
        return {"score": max(0.0, base - self.miss_penalty)}


class FlakyWrapper:
    """Fails the first n calls per distinct payload with a transient error."""

    def __init__(self, inner, fail_first: int = 2):
        self.inner = inner
        self.fail_first = fail_first
        self._seen: dict[str, int] = {}
        self._lock = threading.Lock()

    def _maybe_fail(self, payload: dict) -> None:
        key = repr(sorted(payload.items()))
        with self._lock:
            seen = self._seen.get(key, 0)
            self._seen[key] = seen + 1
        if seen < self.fail_first:
            raise TransientBackendError(f"scripted failure {seen + 1}/{self.fail_first}")

    def __getattr__(self, name):
        inner_method = getattr(self.inner, name)

        def call(payload: dict) -> dict:
            self._maybe_fail(payload)
            return inner_method(payload)

        return call


def duration_overrun_tts(workspace: str | Path, duration_s: float = 31.0) -> MockTts:
    """TTS that always reports the given duration; for ceiling tests."""
    return MockTts(workspace, duration_override=lambda text: duration_s)
