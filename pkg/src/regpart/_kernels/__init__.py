"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set REGPART_PURE_KERNELS=1 to force the pure backend (used by the kernel
benchmark and the backend-parity tests).
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("REGPART_PURE_KERNELS"):
    _impl = _pure
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND

popcount_rows = _impl.popcount_rows
mask_popcount = _impl.mask_popcount
count_edges = _impl.count_edges
block_degree_matrix = _impl.block_degree_matrix
gf2_rank = _impl.gf2_rank
jacobi_eigh = _impl.jacobi_eigh

__all__ = [
    "BACKEND",
    "popcount_rows",
    "mask_popcount",
    "count_edges",
    "block_degree_matrix",
    "gf2_rank",
    "jacobi_eigh",
]
