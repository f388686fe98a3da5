# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; algorithmic twin of _purepy.

Candidate evaluation order, tie policy, and float comparisons must match the
pure implementation exactly: the test suite asserts output equality on fuzzed
inputs, and journal determinism depends on it.
"""

from libc.stdlib cimport free, malloc


def ngram_stats(hyp_tokens, ref_tokens, int max_order):
    """Clipped n-gram statistics for one sentence pair; see _purepy."""
    cdef Py_ssize_t h_len = len(hyp_tokens)
    cdef Py_ssize_t r_len = len(ref_tokens)
    cdef Py_ssize_t n, i, h_count
    cdef long c, count, r
    correct = [0] * max_order
    total = [0] * max_order
    cdef dict ref_counts, hyp_counts
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
        for key, count_obj in hyp_counts.items():
            count = count_obj
            r = ref_counts.get(key, 0)
            if r:
                c += count if count < r else r
        correct[n - 1] = c
    return correct, total


def viterbi_decode(unicode norm, dict pieces, int max_piece_len, double unk_logprob):
    """Maximum-log-probability segmentation; see _purepy for the contract."""
    cdef Py_ssize_t n = len(norm)
    if n == 0:
        return [], 0.0
    cdef double NEG_INF = float("-inf")
    cdef double *best = <double *> malloc((n + 1) * sizeof(double))
    cdef Py_ssize_t *back_start = <Py_ssize_t *> malloc((n + 1) * sizeof(Py_ssize_t))
    cdef char *back_unk = <char *> malloc(n + 1)
    if best is NULL or back_start is NULL or back_unk is NULL:
        free(best); free(back_start); free(back_unk)
        raise MemoryError()
    cdef Py_ssize_t i, j, length, limit
    cdef double base, cand
    try:
        for j in range(n + 1):
            best[j] = NEG_INF
            back_start[j] = -1
        best[0] = 0.0
        for i in range(n):
            base = best[i]
            if base == NEG_INF:
                continue
            if norm[i] not in pieces:
                cand = base + unk_logprob
                if cand > best[i + 1]:
                    best[i + 1] = cand
                    back_start[i + 1] = i
                    back_unk[i + 1] = 1
            limit = max_piece_len if max_piece_len < n - i else n - i
            for length in range(1, limit + 1):
                logprob_obj = pieces.get(norm[i:i + length])
                if logprob_obj is None:
                    continue
                j = i + length
                cand = base + <double> logprob_obj
                if cand > best[j]:
                    best[j] = cand
                    back_start[j] = i
                    back_unk[j] = 0
        spans = []
        j = n
        while j > 0:
            i = back_start[j]
            spans.append((i, j, back_unk[j] != 0))
            j = i
        spans.reverse()
        return spans, best[n]
    finally:
        free(best)
        free(back_start)
        free(back_unk)
