import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from svpart import qasm
from svpart.graph import (
    OUTPUT_ID,
    DimIndex,
    InvalidCut,
    NodeRole,
    NotAdjacent,
    build_graph,
    contract_dense,
    edge_weight,
    insert_barriers,
    remove_barriers,
    structurally_equal,
)
from svpart.circuits import generate, FAMILIES

GHZ3 = "OPENQASM 2.0;\nqreg q[3];\nh q[0];\ncx q[0],q[1];\ncx q[1],q[2];\n"


def _ghz3():
    return build_graph(qasm.parse(GHZ3))


def test_ghz3_critical_path_lengths():
    g = _ghz3()
    assert g.nodes[0].l == 0  # state vector
    assert g.nodes[1].l == 1  # h
    assert g.nodes[2].l == 2  # cx 0,1
    assert g.nodes[3].l == 3  # cx 1,2


def test_single_gate_circuit_shape():
    g = build_graph(qasm.parse("qreg q[1];\nh q[0];\n"))
    assert len(g.nodes) == 2
    assert len(g.edges) == 2
    assert g.edges[DimIndex(0, 0)] == (0, 1)
    assert g.edges[DimIndex(0, 1)] == (1, OUTPUT_ID)


def test_state_node_owns_all_step0_dims():
    g = _ghz3()
    psi = g.nodes[0]
    assert psi.role is NodeRole.STATE
    assert psi.out_dims == (DimIndex(0, 0), DimIndex(1, 0), DimIndex(2, 0))
    assert psi.in_dims == ()


def test_free_dims_point_at_output_sentinel():
    g = _ghz3()
    frees = [dim for dim, (_, dst) in g.edges.items() if dst == OUTPUT_ID]
    assert sorted(frees) == [DimIndex(0, 2), DimIndex(1, 2), DimIndex(2, 1)]
    assert OUTPUT_ID not in g.nodes


def test_steps_count_per_line():
    g = _ghz3()
    cx12 = g.nodes[3]
    # qubit 1 already consumed one gate, qubit 2 none
    assert cx12.in_dims == (DimIndex(1, 1), DimIndex(2, 0))
    assert cx12.out_dims == (DimIndex(1, 2), DimIndex(2, 1))


def test_topo_order_sorted_by_length_then_id():
    g = _ghz3()
    order = g.topo_order()
    assert order == [0, 1, 2, 3]
    ls = [g.nodes[i].l for i in order]
    assert ls == sorted(ls)


def test_edge_weight_is_length_gap():
    g = _ghz3()
    assert edge_weight(g.nodes[0], g.nodes[1]) == 1
    assert edge_weight(g.nodes[0], g.nodes[3]) == 3  # psi shares qubit 2 dim with cx12
    assert edge_weight(g.nodes[2], g.nodes[3]) == 1


def test_edge_weight_requires_shared_dim():
    g = _ghz3()
    with pytest.raises(NotAdjacent):
        edge_weight(g.nodes[1], g.nodes[3])  # h and cx12 share no dim


def test_downstream_of_state_node():
    g = _ghz3()
    assert g.downstream(0) == [1, 2, 3]
    assert g.downstream(3) == []


def test_insert_barriers_at_start():
    g = _ghz3()
    b = insert_barriers(g, {0: 0, 1: 0, 2: 0})
    barriers = [n for n in b.nodes.values() if n.role is NodeRole.BARRIER]
    assert len(barriers) == 3
    # barrier steals step 0, shifting every original consumer up one step
    assert all(n.l == 1 for n in barriers)
    assert b.nodes[1].l == 2 and b.nodes[2].l == 3 and b.nodes[3].l == 4


def test_insert_barriers_mid_circuit():
    g = _ghz3()
    # frontier after h and cx01: qubit 0 step 2, qubit 1 step 1, qubit 2 step 0
    b = insert_barriers(g, {0: 2, 1: 1, 2: 0})
    barriers = sorted(n.id for n in b.nodes.values() if n.role is NodeRole.BARRIER)
    assert len(barriers) == 3
    # cx12 now consumes barrier outputs
    cx12 = b.nodes[3]
    assert cx12.l > 3 or cx12.in_dims != (DimIndex(1, 1), DimIndex(2, 0))


def test_insert_barriers_rejects_missing_dim():
    g = _ghz3()
    with pytest.raises(InvalidCut):
        insert_barriers(g, {0: 9})


def test_barrier_roundtrip_restores_structure():
    g = _ghz3()
    b = insert_barriers(g, {0: 2, 1: 1, 2: 0})
    back = remove_barriers(b)
    assert structurally_equal(g, back)


def test_barrier_roundtrip_random_circuits():
    for fam in sorted(FAMILIES):
        g = build_graph(qasm.parse(generate(fam, 5, seed=3)))
        b = insert_barriers(g, {q: 0 for q in range(5)})
        assert structurally_equal(g, remove_barriers(b))
        assert not structurally_equal(g, b)


def test_contract_dense_matches_manual_ghz():
    g = _ghz3()
    state = contract_dense(g)
    expected = np.zeros(8, dtype=complex)
    expected[0] = expected[7] = 1 / np.sqrt(2)
    np.testing.assert_allclose(state, expected, atol=1e-12)


def test_contract_dense_ignores_barriers():
    g = _ghz3()
    b = insert_barriers(g, {0: 1, 1: 1, 2: 0})
    np.testing.assert_allclose(contract_dense(b), contract_dense(g), atol=1e-12)


def test_contract_dense_size_guard():
    src = "qreg q[15];\n" + "".join(f"h q[{i}];\n" for i in range(15))
    g = build_graph(qasm.parse(src))
    with pytest.raises(ValueError):
        contract_dense(g)


@settings(deadline=None, max_examples=40)
@given(seed=st.integers(0, 10**6))
def test_lengths_strictly_increase_along_edges(seed):
    rng = np.random.default_rng(seed)
    fam = sorted(FAMILIES)[int(rng.integers(0, len(FAMILIES)))]
    d = int(rng.integers(2, 7))
    g = build_graph(qasm.parse(generate(fam, d, seed=seed)))
    for dim, (src, dst) in g.edges.items():
        if dst == OUTPUT_ID:
            continue
        assert g.nodes[src].l < g.nodes[dst].l


def test_gate_ids_sorted():
    g = _ghz3()
    assert g.gate_ids() == [1, 2, 3]
