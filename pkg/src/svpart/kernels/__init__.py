"""Gate kernels with import-time backend selection.

The compiled extension is used when available; SVPART_KERNEL=numpy or
SVPART_KERNEL=compiled forces one side.  Both backends mutate (ranks, 2^L)
complex128 blocks in place and must agree to float rounding.
"""

from __future__ import annotations

import os

import numpy as np

from . import numpy_backend

try:
    from . import _core
except ImportError:
    _core = None

_requested = os.environ.get("SVPART_KERNEL", "auto").lower()
if _requested == "numpy":
    _impl = None
elif _requested == "compiled":
    if _core is None:
        raise ImportError("SVPART_KERNEL=compiled but the extension is not built")
    _impl = _core
else:
    _impl = _core

BACKEND = "compiled" if _impl is not None else "numpy"


# measured crossover: the strided C loop beats tensordot up to 3-qubit
# gates, then loses to vectorized matmul on wide ones
_DENSE_MAX_COMPILED = 3


def apply_gate(blocks: np.ndarray, matrix: np.ndarray, bits) -> None:
    """Apply a dense p-qubit gate in place; bit 0 is the local MSB."""
    if _impl is None or len(bits) > _DENSE_MAX_COMPILED:
        numpy_backend.apply_gate(blocks, matrix, bits)
    else:
        _impl.apply_gate(
            blocks,
            np.ascontiguousarray(matrix, dtype=np.complex128),
            np.asarray(bits, dtype=np.int64),
        )


def apply_diagonal(blocks: np.ndarray, diag: np.ndarray, bits) -> None:
    """Apply a diagonal p-qubit gate in place; bit 0 is the local MSB."""
    if _impl is None or len(bits) > 6:
        numpy_backend.apply_diagonal(blocks, diag, bits)
    else:
        _impl.apply_diagonal(
            blocks,
            np.ascontiguousarray(diag, dtype=np.complex128),
            np.asarray(bits, dtype=np.int64),
        )
