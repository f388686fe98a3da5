"""Unigram segmentation over a piece table.

The table is ingested from a TSV export (piece<TAB>logprob, UTF-8,
#-prefixed comment lines ignored); producing that TSV from a binary
SentencePiece model is a documented offline step, which keeps this module
dependency-free and testable in isolation. Only unigram inference is
implemented; BPE merge inference is out of scope.

Input text is marker-normalized before decoding: every U+0020 becomes the
marker U+2581 and one marker is prepended. Codepoints no piece covers are
emitted as the table's unk piece, one codepoint per emission, so
segmentation is total for any input.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Mapping

from ..errors import PieceTableError
from ._kernels import viterbi_decode

SPACE_MARKER = "▁"

_CONTROL_PIECES = ("<unk>", "<s>", "</s>")


class PieceTable:
    """Unigram vocabulary: piece strings with log-probabilities.

    Log-probabilities must be finite and non-positive. When no unknown-piece
    score is supplied, a penalty 10 below the worst real piece is derived, so
    the decoder prefers any dictionary segmentation over an unknown step.
    """

    __slots__ = ("pieces", "unk_piece", "unk_logprob", "space_marker", "max_piece_len")

    def __init__(
        self,
        pieces: Mapping[str, float],
        unk_logprob: float | None = None,
        unk_piece: str = "<unk>",
    ):
        if not pieces:
            raise PieceTableError("piece table is empty")
        clean: dict[str, float] = {}
        for piece, logprob in pieces.items():
            _check_piece(piece, logprob)
            clean[piece] = float(logprob)
        if unk_logprob is None:
            unk_logprob = min(clean.values()) - 10.0
        if not math.isfinite(unk_logprob) or unk_logprob > 0.0:
            raise PieceTableError(f"unk logprob must be finite and <= 0, got {unk_logprob}")
        self.pieces = clean
        self.unk_piece = unk_piece
        self.unk_logprob = float(unk_logprob)
        self.space_marker = SPACE_MARKER
        self.max_piece_len = max(len(p) for p in clean)

    def __len__(self) -> int:
        return len(self.pieces)

    def __contains__(self, piece: str) -> bool:
        return piece in self.pieces


def _check_piece(piece: str, logprob: float) -> None:
    if not isinstance(piece, str) or not piece:
        raise PieceTableError(f"invalid piece {piece!r}")
    if " " in piece or "\t" in piece or "\n" in piece:
        raise PieceTableError(
            f"piece {piece!r} contains raw whitespace; use {SPACE_MARKER} for word boundaries"
        )
    try:
        value = float(logprob)
    except (TypeError, ValueError):
        raise PieceTableError(f"piece {piece!r}: logprob {logprob!r} is not a number") from None
    if not math.isfinite(value) or value > 0.0:
        raise PieceTableError(f"piece {piece!r}: logprob must be finite and <= 0, got {value}")


def load_piece_table(path: str | Path) -> PieceTable:
    """Read a TSV vocabulary export.

    Control rows (<unk>, <s>, </s>) are kept out of the matching lattice.
    An <unk> row with a non-zero score sets the unknown-step penalty; a 0.0
    score (the usual export placeholder) means "derive it".
    """
    pieces: dict[str, float] = {}
    seen_controls: set[str] = set()
    unk_logprob: float | None = None
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise PieceTableError(
                    f"{path}:{line_no}: expected piece<TAB>logprob, got {len(parts)} fields"
                )
            piece, score_text = parts
            try:
                score = float(score_text)
            except ValueError:
                raise PieceTableError(
                    f"{path}:{line_no}: bad logprob {score_text!r}"
                ) from None
            if piece in _CONTROL_PIECES:
                if piece in seen_controls:
                    raise PieceTableError(f"{path}:{line_no}: duplicate piece {piece!r}")
                seen_controls.add(piece)
                if piece == "<unk>" and score != 0.0:
                    unk_logprob = score
                continue
            if piece in pieces:
                raise PieceTableError(f"{path}:{line_no}: duplicate piece {piece!r}")
            _check_piece(piece, score)
            pieces[piece] = score
    if not pieces:
        raise PieceTableError(f"{path}: no usable pieces")
    return PieceTable(pieces, unk_logprob=unk_logprob)


def normalize_for_pieces(text: str) -> str:
    """Replace spaces with the word-boundary marker and prepend one."""
    return SPACE_MARKER + text.replace(" ", SPACE_MARKER)


def sp_segment_spans(
    text: str, table: PieceTable
) -> tuple[str, list[tuple[int, int, bool]], float]:
    """Decode; returns (normalized_text, spans, total_logprob).

    Each span is (start, end, is_unk) over the normalized text; spans tile it
    contiguously. Exposed separately from sp_segment so optimality and
    reconstruction can be checked span by span.
    """
    norm = normalize_for_pieces(text)
    spans, score = viterbi_decode(norm, table.pieces, table.max_piece_len, table.unk_logprob)
    return norm, spans, score


def sp_segment(text: str, table: PieceTable) -> list[str]:
    """Segment text into pieces, maximizing total log-probability.

    Unknown codepoints appear as table.unk_piece. Concatenating the output,
    with each unk occurrence replaced by the codepoint it consumed, rebuilds
    the marker-normalized input exactly.
    """
    norm, spans, _ = sp_segment_spans(text, table)
    return [table.unk_piece if is_unk else norm[a:b] for a, b, is_unk in spans]


def make_table(entries: Iterable[tuple[str, float]], **kwargs) -> PieceTable:
    """Convenience constructor from (piece, logprob) pairs; duplicates error."""
    pieces: dict[str, float] = {}
    for piece, logprob in entries:
        if piece in pieces:
            raise PieceTableError(f"duplicate piece {piece!r}")
        pieces[piece] = logprob
    return PieceTable(pieces, **kwargs)
