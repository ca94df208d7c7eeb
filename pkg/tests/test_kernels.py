import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from svpart import kernels
from svpart.gates import gate_tensor, kron_embed
from svpart.kernels import numpy_backend

try:
    from svpart.kernels import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None, reason="compiled kernels unavailable")


def _random_blocks(rng, ranks, L):
    v = rng.normal(size=(ranks, 1 << L)) + 1j * rng.normal(size=(ranks, 1 << L))
    v /= np.linalg.norm(v)
    return np.ascontiguousarray(v, dtype=np.complex128)


def _random_unitary(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(m)
    return np.ascontiguousarray(q, dtype=np.complex128)


@settings(deadline=None, max_examples=60)
@given(seed=st.integers(0, 2**32 - 1))
def test_backends_agree_on_dense_gates(seed):
    if _core is None:
        pytest.skip("compiled kernels unavailable")
    rng = np.random.default_rng(seed)
    L = int(rng.integers(1, 7))
    ranks = 1 << int(rng.integers(0, 3))
    p = int(rng.integers(1, min(L, 3) + 1))
    bits = np.sort(rng.permutation(L)[:p]).astype(np.int64)
    matrix = _random_unitary(rng, 1 << p)
    a = _random_blocks(rng, ranks, L)
    b = a.copy()
    numpy_backend.apply_gate(a, matrix, list(bits))
    _core.apply_gate(b, matrix, bits)
    np.testing.assert_allclose(a, b, atol=1e-12)


@settings(deadline=None, max_examples=60)
@given(seed=st.integers(0, 2**32 - 1))
def test_backends_agree_on_diagonals(seed):
    if _core is None:
        pytest.skip("compiled kernels unavailable")
    rng = np.random.default_rng(seed)
    L = int(rng.integers(1, 7))
    ranks = 1 << int(rng.integers(0, 3))
    p = int(rng.integers(1, min(L, 3) + 1))
    bits = np.sort(rng.permutation(L)[:p]).astype(np.int64)
    diag = np.exp(1j * rng.uniform(-3, 3, size=1 << p)).astype(np.complex128)
    a = _random_blocks(rng, ranks, L)
    b = a.copy()
    numpy_backend.apply_diagonal(a, diag, list(bits))
    _core.apply_diagonal(b, diag, bits)
    np.testing.assert_allclose(a, b, atol=1e-12)


@settings(deadline=None, max_examples=40)
@given(seed=st.integers(0, 2**32 - 1))
def test_numpy_backend_matches_full_matrix(seed):
    # single rank, compare against the explicit Kronecker embedding
    rng = np.random.default_rng(seed)
    L = int(rng.integers(2, 6))
    kind = ["h", "x", "rz", "cx", "swap"][int(rng.integers(0, 5))]
    g = gate_tensor(kind, (rng.uniform(-3, 3),) if kind == "rz" else ())
    qubits = tuple(rng.permutation(L)[: g.num_qubits].tolist())
    blocks = _random_blocks(rng, 1, L)
    expected = kron_embed(g, qubits, L) @ blocks[0]
    numpy_backend.apply_gate(blocks, np.asarray(g.matrix), list(qubits))
    np.testing.assert_allclose(blocks[0], expected, atol=1e-12)


def test_wrapper_routes_readonly_matrices():
    # the public wrapper must accept the read-only matrices gates carry
    g = gate_tensor("h")
    blocks = np.zeros((1, 4), dtype=np.complex128)
    blocks[0, 0] = 1.0
    kernels.apply_gate(blocks, g.matrix, [0])
    np.testing.assert_allclose(blocks[0], [2**-0.5, 0, 2**-0.5, 0], atol=1e-15)


def test_wrapper_diagonal_path():
    g = gate_tensor("rz", (0.7,))
    blocks = np.full((2, 2), 0.5, dtype=np.complex128)
    kernels.apply_diagonal(blocks, np.asarray(g.matrix).diagonal(), [0])
    expected = 0.5 * np.asarray(g.matrix).diagonal()
    np.testing.assert_allclose(blocks[0], expected, atol=1e-15)
    np.testing.assert_allclose(blocks[1], expected, atol=1e-15)


def test_wide_gate_falls_back_to_numpy():
    # 7 qubit slots exceed the compiled kernel's width; wrapper must not fail
    rng = np.random.default_rng(1)
    L = 8
    matrix = _random_unitary(rng, 1 << 7)
    blocks = _random_blocks(rng, 1, L)
    before = blocks.copy()
    kernels.apply_gate(blocks, matrix, list(range(7)))
    norm = np.linalg.norm(blocks)
    assert abs(norm - np.linalg.norm(before)) < 1e-10


@needs_compiled
def test_compiled_rejects_shape_mismatch():
    blocks = np.zeros((1, 4), dtype=np.complex128)
    matrix = np.eye(4, dtype=np.complex128)
    with pytest.raises(ValueError):
        _core.apply_gate(blocks, matrix, np.array([0], dtype=np.int64))


def test_backend_constant_is_sane():
    assert kernels.BACKEND in ("compiled", "numpy")


def test_env_var_forces_numpy_backend():
    code = "import svpart.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, SVPART_KERNEL="numpy")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "numpy"


@needs_compiled
def test_env_var_forces_compiled_backend():
    code = "import svpart.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, SVPART_KERNEL="compiled")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "compiled"
