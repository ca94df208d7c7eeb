"""Gate tensors and their embedding into the full-register Kronecker layout.

Qubit 0 is the leftmost (most significant) Kronecker factor throughout, so a
basis index reads as the bitstring q0 q1 ... q{d-1}.  Slot order for
controlled gates is controls first, then targets; slot i of a p-qubit gate
addresses bit i (from the top) of the 2^p matrix index.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

_DIAG_TOL = 1e-15

# kind -> (num params, num qubits, control slot indices)
GATE_SIGNATURES: dict[str, tuple[int, int, tuple[int, ...]]] = {
    "id": (0, 1, ()),
    "h": (0, 1, ()),
    "x": (0, 1, ()),
    "y": (0, 1, ()),
    "z": (0, 1, ()),
    "s": (0, 1, ()),
    "sdg": (0, 1, ()),
    "t": (0, 1, ()),
    "tdg": (0, 1, ()),
    "rx": (1, 1, ()),
    "ry": (1, 1, ()),
    "rz": (1, 1, ()),
    "p": (1, 1, ()),
    "u": (3, 1, ()),
    "cx": (0, 2, (0,)),
    "cz": (0, 2, (0,)),
    "cp": (1, 2, (0,)),
    "swap": (0, 2, ()),
    "ccx": (0, 3, (0, 1)),
}


@dataclass(frozen=True)
class GateTensor:
    """A concrete gate: its dense matrix plus structural metadata."""

    kind: str
    params: tuple[float, ...]
    matrix: np.ndarray = field(repr=False, compare=False)
    control_dims: frozenset[int]
    is_diagonal: bool

    @property
    def num_qubits(self) -> int:
        return self.matrix.shape[0].bit_length() - 1


def _u_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -cmath.exp(1j * lam) * s],
            [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
        ]
    )


def _build_matrix(kind: str, params: tuple[float, ...]) -> np.ndarray:
    if kind == "id":
        return np.eye(2, dtype=complex)
    if kind == "h":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if kind == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind == "z":
        return np.diag([1, -1]).astype(complex)
    if kind == "s":
        return np.diag([1, 1j]).astype(complex)
    if kind == "sdg":
        return np.diag([1, -1j]).astype(complex)
    if kind == "t":
        return np.diag([1, cmath.exp(1j * math.pi / 4)])
    if kind == "tdg":
        return np.diag([1, cmath.exp(-1j * math.pi / 4)])
    if kind == "rx":
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "ry":
        (theta,) = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "rz":
        (theta,) = params
        return np.diag([cmath.exp(-1j * theta / 2), cmath.exp(1j * theta / 2)])
    if kind == "p":
        # phase convention: p(a) = diag(1, e^{-ia})
        (alpha,) = params
        return np.diag([1, cmath.exp(-1j * alpha)])
    if kind == "u":
        return _u_matrix(*params)
    if kind == "cx":
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = _build_matrix("x", ())
        return m
    if kind == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if kind == "cp":
        (alpha,) = params
        return np.diag([1, 1, 1, cmath.exp(-1j * alpha)])
    if kind == "swap":
        m = np.eye(4, dtype=complex)
        m[[1, 2]] = m[[2, 1]]
        return m
    if kind == "ccx":
        m = np.eye(8, dtype=complex)
        m[6:, 6:] = _build_matrix("x", ())
        return m
    raise KeyError(kind)


def _scan_diagonal(matrix: np.ndarray) -> bool:
    off = matrix[~np.eye(matrix.shape[0], dtype=bool)]
    return bool(np.all(np.abs(off) < _DIAG_TOL))


def gate_tensor(kind: str, params: tuple[float, ...] = ()) -> GateTensor:
    """Materialize the named gate; raises KeyError for unknown kinds."""
    if kind not in GATE_SIGNATURES:
        raise KeyError(kind)
    n_params, _, controls = GATE_SIGNATURES[kind]
    if len(params) != n_params:
        raise ValueError(f"{kind} takes {n_params} parameter(s), got {len(params)}")
    matrix = np.ascontiguousarray(_build_matrix(kind, params), dtype=np.complex128)
    matrix.setflags(write=False)
    return GateTensor(
        kind=kind,
        params=tuple(float(p) for p in params),
        matrix=matrix,
        control_dims=frozenset(controls),
        is_diagonal=_scan_diagonal(matrix),
    )


def barrier_tensor() -> GateTensor:
    """Single-qubit identity used to mark partition frontiers."""
    return gate_tensor("id")


def kron_embed(gate: GateTensor, qubits: tuple[int, ...], d: int) -> np.ndarray:
    """Dense 2^d x 2^d operator applying `gate` to the given qubit lines."""
    p = gate.num_qubits
    if len(qubits) != p:
        raise ValueError(f"{gate.kind} acts on {p} qubits, got {len(qubits)}")
    if len(set(qubits)) != p or any(not 0 <= q < d for q in qubits):
        raise ValueError(f"bad qubit lines {qubits} for d={d}")
    full = np.kron(gate.matrix, np.eye(2 ** (d - p), dtype=complex))
    # kron puts gate slots on the top p axes; permute them onto `qubits`
    order = list(qubits) + [q for q in range(d) if q not in qubits]
    perm = [order.index(q) for q in range(d)]
    t = full.reshape((2,) * (2 * d))
    t = t.transpose(tuple(perm) + tuple(d + i for i in perm))
    return np.ascontiguousarray(t.reshape(2**d, 2**d))
