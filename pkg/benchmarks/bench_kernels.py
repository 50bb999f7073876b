"""Time the numba and numpy kernels on a synthetic batch.

    python benchmarks/bench_kernels.py [--messages N] [--vocab V] [--repeat R]

Both backends are imported directly, so SMISHDETECT_BACKEND does not matter
here. Outputs are checked for bit-identity before timing.
"""

import argparse
import time

import numpy as np

from smishdetect import _kernels


def synthetic(n_messages, vocab, seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for length in rng.integers(1, 30, size=n_messages):
        rows.append(list(dict.fromkeys(rng.integers(0, vocab, size=length).tolist())))
    labels = rng.integers(0, 2, size=n_messages).astype(np.int64)
    log_ham = np.log(rng.uniform(1e-6, 1, size=vocab + 1))
    log_smish = np.log(rng.uniform(1e-6, 1, size=vocab + 1))
    return rows, labels, log_ham, log_smish


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--messages", type=int, default=200_000)
    ap.add_argument("--vocab", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rows, labels, log_ham, log_smish = synthetic(args.messages, args.vocab)
    indptr, indices = _kernels.to_csr(rows)
    print(f"{args.messages} messages, {len(indices)} term slots, vocab {args.vocab}")

    if _kernels.doc_frequencies_numba is None:
        print("numba not installed; nothing to compare")
        return

    pairs = {
        "doc_frequencies": (
            lambda: _kernels.doc_frequencies_numba(indptr, indices, labels, args.vocab),
            lambda: _kernels.doc_frequencies_numpy(indptr, indices, labels, args.vocab),
        ),
        "score_rows": (
            lambda: _kernels.score_rows_numba(indptr, indices, log_ham, log_smish),
            lambda: _kernels.score_rows_numpy(indptr, indices, log_ham, log_smish),
        ),
    }
    print(f"{'kernel':<16}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for name, (jit, ref) in pairs.items():
        a, b = jit(), ref()  # first call also compiles
        assert np.array_equal(a, b), f"{name}: backends disagree"
        t_jit, t_ref = best_of(jit, args.repeat), best_of(ref, args.repeat)
        print(f"{name:<16}{t_jit:>12.4f}{t_ref:>12.4f}{t_ref / t_jit:>9.1f}x")


if __name__ == "__main__":
    main()
