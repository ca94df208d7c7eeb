"""Pure-numpy gate kernels over batched rank blocks.

blocks has shape (ranks, 2^L); bit position 0 is the most significant bit of
the local index, so position b carries stride 2^(L-1-b).
"""

from __future__ import annotations

import numpy as np


def apply_gate(blocks: np.ndarray, matrix: np.ndarray, bits) -> None:
    """In-place dense p-qubit update on every rank block."""
    r, n = blocks.shape
    L = n.bit_length() - 1
    p = len(bits)
    view = blocks.reshape((r,) + (2,) * L)
    axes = [1 + b for b in bits]
    mt = matrix.reshape((2,) * (2 * p))
    out = np.tensordot(view, mt, axes=(axes, list(range(p, 2 * p))))
    out = np.moveaxis(out, list(range(-p, 0)), axes)
    blocks[...] = out.reshape(r, n)


def apply_diagonal(blocks: np.ndarray, diag: np.ndarray, bits) -> None:
    """In-place diagonal p-qubit update on every rank block."""
    r, n = blocks.shape
    L = n.bit_length() - 1
    p = len(bits)
    order = sorted(range(p), key=lambda i: bits[i])
    dt = diag.reshape((2,) * p).transpose(order)
    shape = [1] * (L + 1)
    for b in bits:
        shape[1 + b] = 2
    view = blocks.reshape((r,) + (2,) * L)
    view *= dt.reshape(shape)
