"""Dense GF(2) linear algebra on uint8 numpy arrays."""

from __future__ import annotations

import numpy as np


def row_echelon(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of `mat` over GF(2).

    Returns (rref, pivot_columns).  The input is not modified.
    """
    a = (np.asarray(mat, dtype=np.uint8) & 1).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hits = np.flatnonzero(a[r:, c])
        if hits.size == 0:
            continue
        pr = r + hits[0]
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        other = np.flatnonzero(a[:, c])
        for o in other:
            if o != r:
                a[o, :] ^= a[r, :]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(mat: np.ndarray) -> int:
    if mat.size == 0:
        return 0
    _, pivots = row_echelon(mat)
    return len(pivots)


def in_row_span(vec: np.ndarray, mat: np.ndarray) -> bool:
    """True iff `vec` is a GF(2) combination of the rows of `mat`."""
    vec = np.asarray(vec, dtype=np.uint8) & 1
    if mat.size == 0:
        return not vec.any()
    stacked = np.vstack([mat, vec[None, :]])
    return rank(stacked) == rank(mat)


def solve(mat: np.ndarray, target: np.ndarray) -> np.ndarray | None:
    """One solution x of mat @ x = target over GF(2), or None if inconsistent.

    Free variables are set to 0; the pivot pattern makes the result
    deterministic.
    """
    a = (np.asarray(mat, dtype=np.uint8) & 1).copy()
    b = (np.asarray(target, dtype=np.uint8) & 1).copy()
    rows, cols = a.shape
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hits = np.flatnonzero(a[r:, c])
        if hits.size == 0:
            continue
        pr = r + hits[0]
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
            b[[r, pr]] = b[[pr, r]]
        for o in np.flatnonzero(a[:, c]):
            if o != r:
                a[o, :] ^= a[r, :]
                b[o] ^= b[r]
        pivots.append((r, c))
        r += 1
    # Rows below the last pivot must have zero targets.
    if np.any(b[r:]):
        return None
    x = np.zeros(cols, dtype=np.uint8)
    for pr, pc in pivots:
        x[pc] = b[pr]
    return x
