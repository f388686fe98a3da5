"""Pure-Python kernels.

These are the reference implementations of the two inner loops the metrics
stack spends its time in. A compiled twin (_speed) implements the identical
algorithms; the selector in __init__ picks whichever is importable. Keep both
in lockstep: same candidate evaluation order, same tie policy, same float
comparisons.
"""

from __future__ import annotations

_NEG_INF = float("-inf")


def ngram_stats(hyp_tokens, ref_tokens, max_order):
    """Clipped n-gram statistics for one sentence pair.

    Returns (correct, total), each a list of length max_order where slot
    n-1 holds the clipped match count / hypothesis n-gram count for order n.
    """
    h_len = len(hyp_tokens)
    r_len = len(ref_tokens)
    correct = [0] * max_order
    total = [0] * max_order
    for n in range(1, max_order + 1):
        h_count = h_len - n + 1
        if h_count <= 0:
            break
        total[n - 1] = h_count
        ref_counts = {}
        for i in range(r_len - n + 1):
            key = tuple(ref_tokens[i:i + n])
            ref_counts[key] = ref_counts.get(key, 0) + 1
        if not ref_counts:
            continue
        hyp_counts = {}
        for i in range(h_count):
            key = tuple(hyp_tokens[i:i + n])
            hyp_counts[key] = hyp_counts.get(key, 0) + 1
        c = 0
        for key, count in hyp_counts.items():
            r = ref_counts.get(key, 0)
            if r:
                c += count if count < r else r
        correct[n - 1] = c
    return correct, total


def viterbi_decode(norm, pieces, max_piece_len, unk_logprob):
    """Maximum-log-probability segmentation of an already-normalized string.

    pieces maps piece -> logprob. A one-codepoint unknown step with
    unk_logprob is available only at positions whose codepoint is not itself
    a piece. Ties keep the earliest candidate: positions scan left to right,
    the unknown step is tried before dictionary pieces, and piece lengths go
    short to long; replacement requires a strictly better score.

    Returns (spans, score): spans is a list of (start, end, is_unk) covering
    [0, len(norm)) contiguously; score is the summed logprob.
    """
    n = len(norm)
    if n == 0:
        return [], 0.0
    best = [_NEG_INF] * (n + 1)
    best[0] = 0.0
    back = [None] * (n + 1)
    for i in range(n):
        base = best[i]
        if base == _NEG_INF:
            continue
        if norm[i] not in pieces:
            cand = base + unk_logprob
            if cand > best[i + 1]:
                best[i + 1] = cand
                back[i + 1] = (i, True)
        limit = max_piece_len if max_piece_len < n - i else n - i
        for length in range(1, limit + 1):
            logprob = pieces.get(norm[i:i + length])
            if logprob is None:
                continue
            j = i + length
            cand = base + logprob
            if cand > best[j]:
                best[j] = cand
                back[j] = (i, False)
    spans = []
    j = n
    while j > 0:
        i, is_unk = back[j]
        spans.append((i, j, is_unk))
        j = i
    spans.reverse()
    return spans, best[n]
