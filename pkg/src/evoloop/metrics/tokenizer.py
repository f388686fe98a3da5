"""International tokenization compatible with mteval-v13a.

The normalization pipeline and regex classes reproduce the WMT reference
behavior exactly, including its quirks (entity unescaping, digit-adjacent
period/comma retention, digit-dash splitting). Do not "fix" the character
classes; score parity depends on them.
"""

from __future__ import annotations

import re

# order matters: symbols first, then period/comma context rules, then dashes
_SYMBOL_RE = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_PRE_PUNCT_RE = re.compile(r"([^0-9])([\.,])")
_POST_PUNCT_RE = re.compile(r"([\.,])([^0-9])")
_DIGIT_DASH_RE = re.compile(r"([0-9])(-)")
_SQUEEZE_RE = re.compile(r"\s+")


def normalize_13a(line: str) -> str:
    """Return the normalized, space-separated form of one segment."""
    norm = line
    norm = norm.replace("<skipped>", "")
    norm = norm.replace("-\n", "")
    norm = norm.replace("\n", " ")
    norm = norm.replace("&quot;", '"')
    norm = norm.replace("&amp;", "&")
    norm = norm.replace("&lt;", "<")
    norm = norm.replace("&gt;", ">")

    norm = f" {norm} "
    norm = _SYMBOL_RE.sub(" \\1 ", norm)
    norm = _PRE_PUNCT_RE.sub("\\1 \\2 ", norm)   # split . , unless a digit precedes
    norm = _POST_PUNCT_RE.sub(" \\1 \\2", norm)  # split . , unless a digit follows
    norm = _DIGIT_DASH_RE.sub("\\1 \\2 ", norm)  # split - when a digit precedes
    norm = _SQUEEZE_RE.sub(" ", norm)
    return norm.strip()


def tokenize_13a(text: str) -> list[str]:
    """Tokenize one segment; deterministic, no state."""
    return normalize_13a(text).split()
