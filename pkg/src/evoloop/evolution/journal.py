"""Write-ahead journal for loop runs.

Every phase output lands in `rounds/<k>/` and is fingerprinted in a
single ledger file (`journal.json`) at the workspace root. A resumed run
trusts a phase only when the ledger entry exists and the file bytes
still hash to the recorded digest; anything else inside a recorded entry
is treated as corruption rather than silently recomputed.

All writes are temp-file-plus-rename so a kill can never leave a half
written journal, and all recorded paths are workspace-relative so two
runs in different directories produce byte-identical trees.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Optional

from ..errors import ResumeStateCorrupt

__all__ = ["Journal", "PHASE_FILES", "PHASES"]

LEDGER_NAME = "journal.json"
ROUNDS_DIR = "rounds"

ACQUISITION = "acquisition"
REFINEMENT = "refinement"
UPDATE = "update"
EVALUATION = "evaluation"

PHASES = (ACQUISITION, REFINEMENT, UPDATE, EVALUATION)

PHASE_FILES: Dict[str, tuple] = {
    ACQUISITION: ("acquisition.jsonl",),
    REFINEMENT: ("scored.jsonl",),
    UPDATE: ("positives.jsonl", "negatives.jsonl", "jobspec.json"),
    EVALUATION: ("state.json",),
}


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Journal:
    def __init__(self, workspace: str):
        self.workspace = Path(workspace)
        self.ledger_path = self.workspace / LEDGER_NAME
        self._ledger: dict = {}

    # --- ledger lifecycle ---------------------------------------------

    def open(self, fingerprint: Dict[str, str]) -> bool:
        """Load or create the ledger. Returns True when resuming.

        A ledger recorded under a different config or input set cannot be
        resumed; that is corruption from the loop's point of view, not a
        fresh start, because silently recomputing would mix artifacts
        from two different runs in one workspace.
        """
        self.workspace.mkdir(parents=True, exist_ok=True)
        if self.ledger_path.exists():
            try:
                with open(self.ledger_path, encoding="utf-8") as fh:
                    self._ledger = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ResumeStateCorrupt(f"unreadable ledger: {exc}") from exc
            if not isinstance(self._ledger, dict) or "fingerprint" not in self._ledger:
                raise ResumeStateCorrupt("ledger missing fingerprint")
            if self._ledger["fingerprint"] != fingerprint:
                raise ResumeStateCorrupt(
                    "workspace was journaled under a different config or input set"
                )
            self._ledger.setdefault("rounds", {})
            self._ledger.setdefault("model_version", 0)
            return True
        self._ledger = {
            "fingerprint": dict(fingerprint),
            "model_version": 0,
            "rounds": {},
        }
        self._flush()
        return False

    def _flush(self) -> None:
        text = json.dumps(self._ledger, sort_keys=True, ensure_ascii=False, indent=2)
        write_atomic(self.ledger_path, text + "\n")

    # --- paths ----------------------------------------------------------

    def round_dir(self, round_index: int) -> Path:
        return self.workspace / ROUNDS_DIR / str(round_index)

    def phase_paths(self, round_index: int, phase: str) -> List[Path]:
        rdir = self.round_dir(round_index)
        return [rdir / name for name in PHASE_FILES[phase]]

    def rel(self, path: Path) -> str:
        return os.path.relpath(path, self.workspace).replace(os.sep, "/")

    # --- baseline and version -------------------------------------------

    def has_baseline(self) -> bool:
        return "baseline" in self._ledger

    def baseline(self) -> float:
        return float(self._ledger["baseline"])

    def set_baseline(self, eval_score: float) -> None:
        self._ledger["baseline"] = float(eval_score)
        self._flush()

    def model_version(self) -> int:
        return int(self._ledger.get("model_version", 0))

    # --- phases -----------------------------------------------------------

    def phase_done(self, round_index: int, phase: str) -> bool:
        entry = self._ledger.get("rounds", {}).get(str(round_index), {}).get(phase)
        if entry is None:
            return False
        files = entry.get("files", {})
        expected = {self.rel(p) for p in self.phase_paths(round_index, phase)}
        if set(files) != expected:
            raise ResumeStateCorrupt(
                f"round {round_index} {phase}: ledger file set does not match layout"
            )
        for rel_path, digest in files.items():
            path = self.workspace / rel_path
            if not path.is_file():
                raise ResumeStateCorrupt(f"journaled file missing: {rel_path}")
            if _sha256_file(path) != digest:
                raise ResumeStateCorrupt(f"journaled file modified: {rel_path}")
        return True

    def record_phase(
        self,
        round_index: int,
        phase: str,
        trained: Optional[bool] = None,
    ) -> None:
        """Fingerprint the phase's on-disk outputs and commit the ledger.

        For the update phase, trained=True also advances the model
        version; the bump and the phase record land in one atomic write,
        so a kill cannot record one without the other.
        """
        if phase not in PHASE_FILES:
            raise ValueError(f"unknown phase: {phase}")
        files = {}
        for path in self.phase_paths(round_index, phase):
            if not path.is_file():
                raise FileNotFoundError(f"phase output not written: {path}")
            files[self.rel(path)] = _sha256_file(path)
        entry: dict = {"files": files}
        if trained is not None:
            entry["trained"] = bool(trained)
            if trained:
                self._ledger["model_version"] = self.model_version() + 1
        rounds = self._ledger.setdefault("rounds", {})
        rounds.setdefault(str(round_index), {})[phase] = entry
        self._flush()

    def completed_rounds(self) -> List[int]:
        done = []
        for key, phases in self._ledger.get("rounds", {}).items():
            if EVALUATION in phases:
                done.append(int(key))
        return sorted(done)


def fingerprint_inputs(
    config_json: dict,
    train_ids: Iterable[str],
    eval_ids: Iterable[str],
    voice_pool: Iterable[str],
) -> Dict[str, str]:
    """Stable digests identifying a run, used to refuse foreign resumes."""

    def digest(obj) -> str:
        blob = json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    return {
        "config": digest(config_json),
        "train": digest(list(train_ids)),
        "eval": digest(list(eval_ids)),
        "voices": digest(list(voice_pool)),
    }
