"""The compiled kernels must be indistinguishable from the pure ones."""

import random

import pytest

from evoloop.metrics._kernels import BACKEND, _purepy

try:
    from evoloop.metrics._kernels import _speed
except ImportError:
    _speed = None

needs_ext = pytest.mark.skipif(_speed is None, reason="compiled extension not built")

MARKER = "▁"


def random_tokens(rng, max_len=12):
    vocab = ["a", "bb", "c", "dd", "e"]
    return [rng.choice(vocab) for _ in range(rng.randint(0, max_len))]


def random_piece_env(rng):
    alphabet = "abc" + MARKER
    pieces = {}
    for _ in range(rng.randint(1, 20)):
        piece = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 4)))
        pieces.setdefault(piece, round(rng.uniform(-6.0, -0.05), 4))
    max_len = max(len(p) for p in pieces)
    text = MARKER + "".join(rng.choice(alphabet + "xy") for _ in range(rng.randint(0, 25)))
    unk = round(rng.uniform(-20.0, -0.5), 4)
    return text, pieces, max_len, unk


@needs_ext
class TestTwinEquality:
    def test_ngram_stats_identical(self):
        rng = random.Random(31337)
        for _ in range(500):
            hyp = random_tokens(rng)
            ref = random_tokens(rng)
            assert _speed.ngram_stats(hyp, ref, 4) == _purepy.ngram_stats(hyp, ref, 4)

    def test_ngram_stats_empty_inputs(self):
        for hyp, ref in [([], []), (["a"], []), ([], ["a"]), (["a"], ["a"])]:
            assert _speed.ngram_stats(hyp, ref, 4) == _purepy.ngram_stats(hyp, ref, 4)

    def test_viterbi_identical_including_ties(self):
        rng = random.Random(90210)
        for _ in range(400):
            text, pieces, max_len, unk = random_piece_env(rng)
            fast = _speed.viterbi_decode(text, pieces, max_len, unk)
            slow = _purepy.viterbi_decode(text, pieces, max_len, unk)
            # spans must match exactly (same tie-break), scores bit-for-bit
            assert fast == slow

    def test_viterbi_tie_break_is_first_candidate(self):
        # "aa" coverable as a+a or aa, same total score -2.0. Positions scan
        # left to right, so i=0 writes the length-2 candidate into the final
        # slot before the path through i=1 ties against it; strict > keeps
        # the earlier writer. Both implementations must agree on this.
        pieces = {"a": -1.0, "aa": -2.0}
        for impl in (_purepy, _speed):
            spans, score = impl.viterbi_decode("aa", pieces, 2, -10.0)
            assert score == -2.0
            assert spans == [(0, 2, False)]

    def test_viterbi_empty_string(self):
        assert _speed.viterbi_decode("", {"a": -1.0}, 1, -5.0) == ([], 0.0)
        assert _purepy.viterbi_decode("", {"a": -1.0}, 1, -5.0) == ([], 0.0)


class TestSelector:
    def test_backend_is_reported(self):
        assert BACKEND in ("cython", "pure")

    def test_active_functions_are_importable(self):
        from evoloop.metrics._kernels import ngram_stats, viterbi_decode
        assert callable(ngram_stats) and callable(viterbi_decode)
