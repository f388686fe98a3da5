"""Kernel selection: compiled extension when available, pure Python otherwise.

EVOLOOP_PURE=1 forces the pure implementation regardless of what is
installed; the active choice is exposed as BACKEND ("cython" or "pure").
"""

import os

if os.environ.get("EVOLOOP_PURE") == "1":
    from . import _purepy as _impl
    BACKEND = "pure"
else:
    try:
        from . import _speed as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from . import _purepy as _impl
        BACKEND = "pure"

ngram_stats = _impl.ngram_stats
viterbi_decode = _impl.viterbi_decode

__all__ = ["BACKEND", "ngram_stats", "viterbi_decode"]
