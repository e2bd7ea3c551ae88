#!/usr/bin/env python3
"""Benchmark the EM alignment sweep: numba kernel vs pure-numpy fallback.

The implementation is selected by the SIMTRANS_NUMBA environment variable,
which this script flips between timed runs. Run from the repo root:

    python3 benchmarks/em_benchmark.py [--pairs 4000] [--iterations 15]
"""

import argparse
import os
import time

import numpy as np

from simtrans import _kernels
from simtrans.aligner import train_table
from simtrans.rng import make_rng


def synthetic_corpus(n_pairs, vocab_size, max_len, seed=1234):
    rng = make_rng(seed)
    vocab = [f"w{i:04d}" for i in range(vocab_size)]
    cipher = {w: f"c{i:04d}" for i, w in enumerate(vocab)}
    pairs = []
    for _ in range(n_pairs):
        n = int(rng.integers(1, max_len + 1))
        words = [vocab[int(rng.integers(0, vocab_size))] for _ in range(n)]
        pairs.append((words, [cipher[w] for w in words]))
    return pairs


def timed_train(pairs, iterations, impl):
    os.environ["SIMTRANS_NUMBA"] = "1" if impl == "numba" else "0"
    started = time.perf_counter()
    table = train_table(pairs, iterations=iterations)
    elapsed = time.perf_counter() - started
    return elapsed, table


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=4000)
    parser.add_argument("--vocab", type=int, default=2000)
    parser.add_argument("--max-len", type=int, default=20)
    parser.add_argument("--iterations", type=int, default=15)
    args = parser.parse_args()

    sizes = sorted({args.pairs // 4, args.pairs // 2, args.pairs})
    print(f"{'pairs':>8} {'numpy (s)':>12} {'numba (s)':>12} {'speedup':>9}")

    if _kernels.HAVE_NUMBA:
        # absorb JIT compilation before timing
        timed_train(synthetic_corpus(50, 100, 8), 2, "numba")

    for n_pairs in sizes:
        pairs = synthetic_corpus(n_pairs, args.vocab, args.max_len)
        t_np, table_np = timed_train(pairs, args.iterations, "numpy")
        if not _kernels.HAVE_NUMBA:
            print(f"{n_pairs:>8} {t_np:>12.3f} {'n/a':>12} {'n/a':>9}")
            continue
        t_nb, table_nb = timed_train(pairs, args.iterations, "numba")
        drift = float(np.abs(table_np.probs - table_nb.probs).max())
        assert drift < 1e-9, f"paths disagree by {drift}"
        print(f"{n_pairs:>8} {t_np:>12.3f} {t_nb:>12.3f} {t_np / t_nb:>8.2f}x")

    os.environ.pop("SIMTRANS_NUMBA", None)


if __name__ == "__main__":
    main()
