"""Pure numpy implementations of the hot kernels.

Same signatures as the compiled module `_fast`; selected at import time by
`regpart._kernels` when the extension is unavailable (or forced off via the
REGPART_PURE_KERNELS environment variable).
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"


def popcount_rows(rows: np.ndarray) -> np.ndarray:
    """Per-row popcount of packed uint64 rows, shape (n, W) -> (n,) int64."""
    return np.bitwise_count(rows).sum(axis=1, dtype=np.int64)


def mask_popcount(mask: np.ndarray) -> int:
    return int(np.bitwise_count(mask).sum())


def count_edges(bits: np.ndarray, row_idx: np.ndarray, mask: np.ndarray) -> int:
    """Sum over u in row_idx of |row_u AND mask|."""
    sub = bits[row_idx] & mask[np.newaxis, :]
    return int(np.bitwise_count(sub).sum())


def block_degree_matrix(bits: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """deg[u, j] = |row_u AND masks[j]| for all vertices u and blocks j."""
    n = bits.shape[0]
    k = masks.shape[0]
    out = np.empty((n, k), dtype=np.int64)
    # Loop over blocks: each step is one vectorized AND+popcount over all rows.
    for j in range(k):
        out[:, j] = np.bitwise_count(bits & masks[j][np.newaxis, :]).sum(
            axis=1, dtype=np.int64
        )
    return out


def gf2_rank(rows: np.ndarray) -> int:
    """GF(2) rank of packed uint64 bit rows (shape (r, W))."""
    work = [int.from_bytes(row.tobytes(), "little") for row in np.ascontiguousarray(rows)]
    rank = 0
    pivots = []  # (lowest set bit, row value)
    for value in work:
        for bit, pivot_row in pivots:
            if (value >> bit) & 1:
                value ^= pivot_row
        if value:
            pivots.append(((value & -value).bit_length() - 1, value))
            rank += 1
    return rank


def jacobi_eigh(a: np.ndarray, tol: float, max_sweeps: int):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors, off_norm, sweeps); raises RuntimeError
    when the off-diagonal norm fails to reach tol within max_sweeps sweeps.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    if n < 2:
        return np.diag(a).copy(), v, 0.0, 0

    def off_norm() -> float:
        o = a - np.diag(np.diag(a))
        return math.sqrt(float((o * o).sum()))

    sweeps = 0
    off = off_norm()
    while off > tol:
        if sweeps >= max_sweeps:
            raise RuntimeError(
                f"jacobi did not converge: off-diagonal norm {off:.3e} > {tol:.3e} "
                f"after {sweeps} sweeps"
            )
        # One cyclic sweep; skip entries already far below the target.
        thresh = tol / max(1, n)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        sweeps += 1
        off = off_norm()
    return np.diag(a).copy(), v, off, sweeps
