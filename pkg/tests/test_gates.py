import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from svpart.gates import GATE_SIGNATURES, gate_tensor, barrier_tensor, kron_embed

SQ2 = 1.0 / math.sqrt(2.0)


def test_hadamard_matrix():
    h = gate_tensor("h")
    np.testing.assert_allclose(h.matrix, np.array([[SQ2, SQ2], [SQ2, -SQ2]]), atol=1e-15)


def test_cx_matrix_qubit0_most_significant():
    # control is the first (most significant) slot
    cx = gate_tensor("cx")
    expected = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    np.testing.assert_array_equal(cx.matrix, expected)
    assert cx.control_dims == frozenset({0})


def test_phase_sign_convention():
    a = 0.7
    p = gate_tensor("p", (a,))
    np.testing.assert_allclose(np.diag(p.matrix), [1.0, np.exp(-1j * a)], atol=1e-15)
    cp = gate_tensor("cp", (a,))
    np.testing.assert_allclose(
        np.diag(cp.matrix), [1.0, 1.0, 1.0, np.exp(-1j * a)], atol=1e-15
    )


def test_ccx_flips_only_when_both_controls_set():
    ccx = gate_tensor("ccx")
    m = ccx.matrix
    assert ccx.control_dims == frozenset({0, 1})
    np.testing.assert_array_equal(m[:6, :6], np.eye(6))
    np.testing.assert_array_equal(m[6:, 6:], np.array([[0, 1], [1, 0]]))


def test_swap():
    sw = gate_tensor("swap")
    v = np.zeros(4, dtype=complex)
    v[1] = 1.0  # |01>
    np.testing.assert_array_equal(sw.matrix @ v, np.eye(4, dtype=complex)[2])


@pytest.mark.parametrize("kind", ["z", "s", "sdg", "t", "tdg", "cz"])
def test_diagonal_flags_parameterless(kind):
    assert gate_tensor(kind).is_diagonal


@pytest.mark.parametrize("kind,params", [("rz", (0.3,)), ("p", (1.1,)), ("cp", (0.2,))])
def test_diagonal_flags_parametric(kind, params):
    assert gate_tensor(kind, params).is_diagonal


@pytest.mark.parametrize("kind", ["h", "x", "y", "cx", "swap", "ccx"])
def test_nondiagonal_flags(kind):
    assert not gate_tensor(kind).is_diagonal


def test_rx_zero_is_diagonal():
    # rotation by 0 degenerates to identity, which scans as diagonal
    assert gate_tensor("rx", (0.0,)).is_diagonal
    assert not gate_tensor("rx", (0.5,)).is_diagonal


def test_signature_table_covers_all_kinds():
    for kind, (npar, nq, controls) in GATE_SIGNATURES.items():
        params = tuple(0.3 + 0.1 * i for i in range(npar))
        g = gate_tensor(kind, params)
        assert g.num_qubits == nq
        assert g.matrix.shape == (2**nq, 2**nq)
        assert g.control_dims == frozenset(controls)


def test_param_count_enforced():
    with pytest.raises(ValueError):
        gate_tensor("rz")
    with pytest.raises(ValueError):
        gate_tensor("h", (0.1,))
    with pytest.raises(KeyError):
        gate_tensor("nope")


def test_matrix_is_readonly():
    g = gate_tensor("h")
    with pytest.raises(ValueError):
        g.matrix[0, 0] = 5.0


def test_barrier_is_identity():
    b = barrier_tensor()
    np.testing.assert_array_equal(b.matrix, np.eye(2))
    assert b.is_diagonal


@given(
    kind=st.sampled_from(sorted(GATE_SIGNATURES)),
    seed=st.integers(0, 2**32 - 1),
)
def test_all_gates_unitary(kind, seed):
    rng = np.random.default_rng(seed)
    npar = GATE_SIGNATURES[kind][0]
    params = tuple(rng.uniform(-2 * math.pi, 2 * math.pi) for _ in range(npar))
    m = gate_tensor(kind, params).matrix
    np.testing.assert_allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=1e-12)


def test_u_gate_matches_composition():
    th, ph, lam = 0.4, 1.2, -0.7
    u = gate_tensor("u", (th, ph, lam)).matrix
    # u should act like rz-ry-rz up to the usual global phase
    ry = np.array(
        [[math.cos(th / 2), -math.sin(th / 2)], [math.sin(th / 2), math.cos(th / 2)]],
        dtype=complex,
    )
    rz = lambda a: np.diag([np.exp(-1j * a / 2), np.exp(1j * a / 2)])
    ref = rz(ph) @ ry @ rz(lam)
    phase = u[0, 0] / ref[0, 0] if abs(ref[0, 0]) > 1e-12 else u[0, 1] / ref[0, 1]
    np.testing.assert_allclose(u, phase * ref, atol=1e-12)
    assert abs(abs(phase) - 1.0) < 1e-12


def test_kron_embed_hadamard_on_qubit0_of_three():
    g = gate_tensor("h")
    full = kron_embed(g, (0,), 3)
    expected = np.kron(g.matrix, np.eye(4))
    np.testing.assert_allclose(full, expected, atol=1e-15)


def test_kron_embed_gate_on_low_qubit():
    g = gate_tensor("x")
    full = kron_embed(g, (2,), 3)
    expected = np.kron(np.eye(4), g.matrix)
    np.testing.assert_allclose(full, expected, atol=1e-15)


def test_kron_embed_cx_reversed_qubits():
    # cx with control on the lower-significance line
    cx = gate_tensor("cx")
    full = kron_embed(cx, (1, 0), 2)
    # |01> (q0=0, q1=1) -> control q1 set -> flip q0 -> |11>
    v = np.zeros(4, dtype=complex)
    v[1] = 1.0
    np.testing.assert_array_equal(full @ v, np.eye(4, dtype=complex)[3])


@given(seed=st.integers(0, 2**32 - 1))
def test_kron_embed_unitary(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    kind = ["h", "rz", "cx", "swap"][int(rng.integers(0, 4))]
    npar, nq, _ = GATE_SIGNATURES[kind]
    qubits = tuple(rng.permutation(d)[:nq].tolist())
    params = tuple(rng.uniform(-3, 3) for _ in range(npar))
    full = kron_embed(gate_tensor(kind, params), qubits, d)
    np.testing.assert_allclose(full @ full.conj().T, np.eye(2**d), atol=1e-12)
