"""Hot loops over CSR-encoded messages, with numba and pure-numpy variants.

A batch of messages is encoded as ``indptr``/``indices`` (int64), where
row ``r`` holds the *distinct* term ids of message ``r`` in first-seen
order. Both backends accumulate in that same order, so they agree bit for
bit.

Set ``SMISHDETECT_BACKEND=numpy`` to skip numba (or when it is missing).
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None


def doc_frequencies_numpy(indptr, indices, labels, n_terms):
    """Count, per class (0=ham, 1=smish), the rows containing each term."""
    counts = np.zeros((2, n_terms), dtype=np.int64)
    if len(indices):
        rows = np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))
        np.add.at(counts, (labels[rows], indices), 1)
    return counts


def score_rows_numpy(indptr, indices, log_ham, log_smish):
    n = len(indptr) - 1
    out = np.zeros((n, 2), dtype=np.float64)
    if len(indices):
        rows = np.repeat(np.arange(n), np.diff(indptr))
        # bincount with weights is a sequential left-to-right sum
        out[:, 0] = np.bincount(rows, weights=log_ham[indices], minlength=n)
        out[:, 1] = np.bincount(rows, weights=log_smish[indices], minlength=n)
    return out


def _doc_frequencies_py(indptr, indices, labels, n_terms):
    counts = np.zeros((2, n_terms), dtype=np.int64)
    for r in range(len(indptr) - 1):
        lab = labels[r]
        for k in range(indptr[r], indptr[r + 1]):
            counts[lab, indices[k]] += 1
    return counts


def _score_rows_py(indptr, indices, log_ham, log_smish):
    n = len(indptr) - 1
    out = np.zeros((n, 2), dtype=np.float64)
    for r in range(n):
        h = 0.0
        s = 0.0
        for k in range(indptr[r], indptr[r + 1]):
            t = indices[k]
            h += log_ham[t]
            s += log_smish[t]
        out[r, 0] = h
        out[r, 1] = s
    return out


if numba is not None:
    doc_frequencies_numba = numba.njit(cache=True, nogil=True)(_doc_frequencies_py)
    score_rows_numba = numba.njit(cache=True, nogil=True)(_score_rows_py)
else:  # pragma: no cover
    doc_frequencies_numba = None
    score_rows_numba = None


def _select_backend():
    requested = os.environ.get("SMISHDETECT_BACKEND", "").strip().lower()
    if requested not in ("", "numba", "numpy"):
        raise ValueError(f"SMISHDETECT_BACKEND must be 'numba' or 'numpy', got {requested!r}")
    if requested == "numpy" or numba is None:
        return "numpy"
    return "numba"


BACKEND = _select_backend()

if BACKEND == "numba":
    doc_frequencies = doc_frequencies_numba
    score_rows = score_rows_numba
else:
    doc_frequencies = doc_frequencies_numpy
    score_rows = score_rows_numpy


def to_csr(rows):
    """Pack lists of distinct term ids into (indptr, indices)."""
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    np.cumsum([len(r) for r in rows], out=indptr[1:])
    indices = np.fromiter(
        (t for r in rows for t in r), dtype=np.int64, count=int(indptr[-1])
    )
    return indptr, indices
