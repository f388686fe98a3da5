"""Benchmark the compiled metric kernels against the pure-Python twins.

Runs both implementations on identical workloads, checks they agree
exactly, and reports per-kernel throughput and speedup. Usage:

    python3 benchmarks/bench_kernels.py [--pairs N] [--texts N] [--repeats K]
"""

import argparse
import random
import sys
import time

from evoloop.metrics._kernels import _purepy

try:
    from evoloop.metrics._kernels import _speed
except ImportError:
    _speed = None


def make_token_pairs(rng, n_pairs):
    vocab = [f"tok{i}" for i in range(800)]
    pairs = []
    for _ in range(n_pairs):
        h_len = rng.randint(5, 40)
        r_len = max(1, h_len + rng.randint(-4, 4))
        hyp = [rng.choice(vocab) for _ in range(h_len)]
        # overlap with the hypothesis so clipping has real work to do
        ref = [rng.choice(hyp) if rng.random() < 0.6 else rng.choice(vocab)
               for _ in range(r_len)]
        pairs.append((hyp, ref))
    return pairs


def make_piece_workload(rng, n_texts):
    alphabet = "abcdefgh ▁"
    pieces = {}
    while len(pieces) < 2000:
        length = rng.randint(1, 6)
        piece = "".join(rng.choice(alphabet) for _ in range(length))
        pieces[piece] = rng.uniform(-9.0, -0.5)
    for ch in alphabet:
        pieces.setdefault(ch, rng.uniform(-9.0, -2.0))
    max_len = max(len(p) for p in pieces)
    texts = []
    for _ in range(n_texts):
        n = rng.randint(40, 200)
        texts.append("▁" + "".join(rng.choice(alphabet) for _ in range(n)))
    return pieces, max_len, texts


def best_of(repeats, fn):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_ngrams(pairs, repeats):
    def run(impl):
        return [impl.ngram_stats(h, r, 4) for h, r in pairs]

    assert run(_purepy) == run(_speed), "kernel outputs disagree"
    slow = best_of(repeats, lambda: run(_purepy))
    fast = best_of(repeats, lambda: run(_speed))
    return slow, fast


def bench_viterbi(pieces, max_len, texts, unk_logprob, repeats):
    def run(impl):
        return [impl.viterbi_decode(t, pieces, max_len, unk_logprob) for t in texts]

    assert run(_purepy) == run(_speed), "kernel outputs disagree"
    slow = best_of(repeats, lambda: run(_purepy))
    fast = best_of(repeats, lambda: run(_speed))
    return slow, fast


def report(name, unit_count, unit_name, slow, fast):
    speedup = slow / fast if fast > 0 else float("inf")
    print(f"{name}")
    print(f"  pure     {slow * 1000:8.1f} ms   {unit_count / slow:10.0f} {unit_name}/s")
    print(f"  compiled {fast * 1000:8.1f} ms   {unit_count / fast:10.0f} {unit_name}/s")
    print(f"  speedup  {speedup:8.1f}x")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=4000,
                        help="sentence pairs for the n-gram kernel")
    parser.add_argument("--texts", type=int, default=1500,
                        help="texts for the segmentation kernel")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats; best run is reported")
    parser.add_argument("--seed", type=int, default=99)
    args = parser.parse_args(argv)

    if _speed is None:
        print("compiled kernels are not installed; nothing to compare "
              "(build without EVOLOOP_PURE to enable them)", file=sys.stderr)
        return 1

    rng = random.Random(args.seed)
    pairs = make_token_pairs(rng, args.pairs)
    pieces, max_len, texts = make_piece_workload(rng, args.texts)

    slow, fast = bench_ngrams(pairs, args.repeats)
    report(f"ngram_stats ({args.pairs} pairs, order 4)", args.pairs, "pairs",
           slow, fast)
    print()
    slow, fast = bench_viterbi(pieces, max_len, texts, -12.0, args.repeats)
    report(f"viterbi_decode ({args.texts} texts, {len(pieces)} pieces)",
           args.texts, "texts", slow, fast)
    return 0


if __name__ == "__main__":
    sys.exit(main())
