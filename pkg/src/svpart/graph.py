"""Tensor-contraction graph of a circuit with critical-path lengths.

Nodes are tensors: the initial state vector, one node per gate, and barrier
identities inserted at partition frontiers.  Edges are labeled dimensions
(qubit line, time step); the final dim of each line is consumed by a
synthetic output sentinel that is not itself a node.  Every edge points from
lower to higher critical-path length l, so the graph is a DAG and sorting by
(l, id) is a topological order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .gates import GateTensor, barrier_tensor
from .qasm import Circuit, validate

OUTPUT_ID = -1  # synthetic consumer of free dims; never a node


class GraphError(Exception):
    pass


class NotAdjacent(GraphError):
    pass


class InvalidCut(GraphError):
    pass


class NodeRole(str, Enum):
    STATE = "state"
    GATE = "gate"
    BARRIER = "barrier"


@dataclass(frozen=True, order=True)
class DimIndex:
    qubit: int
    step: int


@dataclass
class TensorNode:
    id: int
    role: NodeRole
    gate: GateTensor | None
    qubits: tuple[int, ...]
    in_dims: tuple[DimIndex, ...]
    out_dims: tuple[DimIndex, ...]
    l: int


@dataclass
class ContractionGraph:
    d: int
    nodes: dict[int, TensorNode]
    edges: dict[DimIndex, tuple[int, int]]

    def topo_order(self) -> list[int]:
        return [n.id for n in sorted(self.nodes.values(), key=lambda n: (n.l, n.id))]

    def downstream(self, node_id: int) -> list[int]:
        """Consumer ids of the node's output dims, deduped, id order."""
        node = self.nodes[node_id]
        seen = {self.edges[dim][1] for dim in node.out_dims}
        seen.discard(OUTPUT_ID)
        return sorted(seen)

    def gate_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes.values() if n.role is NodeRole.GATE)


def build_graph(circuit: Circuit) -> ContractionGraph:
    """Translate a clean circuit into its labeled contraction graph."""
    problems = validate(circuit)
    if problems:
        raise ValueError(f"circuit does not validate: {problems[0].message}")
    d = circuit.num_qubits
    nodes: dict[int, TensorNode] = {}
    edges: dict[DimIndex, tuple[int, int]] = {}
    steps = [0] * d
    producer_of: dict[DimIndex, int] = {}

    state = TensorNode(
        id=0,
        role=NodeRole.STATE,
        gate=None,
        qubits=tuple(range(d)),
        in_dims=(),
        out_dims=tuple(DimIndex(q, 0) for q in range(d)),
        l=0,
    )
    nodes[0] = state
    for dim in state.out_dims:
        producer_of[dim] = 0

    for i, op in enumerate(circuit.ops):
        nid = i + 1
        in_dims = tuple(DimIndex(q, steps[q]) for q in op.qubits)
        out_dims = tuple(DimIndex(q, steps[q] + 1) for q in op.qubits)
        l = 1 + max(nodes[producer_of[dim]].l for dim in in_dims)
        for dim in in_dims:
            edges[dim] = (producer_of[dim], nid)
        for dim in out_dims:
            producer_of[dim] = nid
        for q in op.qubits:
            steps[q] += 1
        nodes[nid] = TensorNode(nid, NodeRole.GATE, op.gate, op.qubits, in_dims, out_dims, l)

    for q in range(d):
        dim = DimIndex(q, steps[q])
        edges[dim] = (producer_of[dim], OUTPUT_ID)
    return ContractionGraph(d=d, nodes=nodes, edges=edges)


def edge_weight(u: TensorNode, v: TensorNode) -> int:
    """|l_u - l_v| for two nodes sharing a dim; NotAdjacent otherwise."""
    u_dims = set(u.in_dims) | set(u.out_dims)
    v_dims = set(v.in_dims) | set(v.out_dims)
    if not u_dims & v_dims:
        raise NotAdjacent(f"nodes {u.id} and {v.id} share no dimension")
    return abs(u.l - v.l)


def _recompute_lengths(nodes: dict[int, TensorNode], edges: dict[DimIndex, tuple[int, int]]) -> None:
    # Kahn pass; l = 0 for source nodes, else 1 + max over producers
    producer = {}
    for dim, (p, c) in edges.items():
        if c != OUTPUT_ID:
            producer.setdefault(c, []).append(p)
    pending = {nid: len(node.in_dims) for nid, node in nodes.items()}
    ready = [nid for nid, k in pending.items() if k == 0]
    consumers_of: dict[int, list[int]] = {}
    for dim, (p, c) in edges.items():
        if c != OUTPUT_ID:
            consumers_of.setdefault(p, []).append(c)
    done = 0
    while ready:
        nid = ready.pop()
        node = nodes[nid]
        node.l = 0 if not node.in_dims else 1 + max(nodes[p].l for p in producer[nid])
        done += 1
        for c in consumers_of.get(nid, ()):
            pending[c] -= 1
            if pending[c] == 0:
                ready.append(c)
    if done != len(nodes):
        raise GraphError("dependency cycle while recomputing lengths")


def insert_barriers(graph: ContractionGraph, at_frontier: dict[int, int]) -> ContractionGraph:
    """New graph with one I2 barrier on each cut line; contraction unchanged."""
    for q, t in at_frontier.items():
        dim = DimIndex(q, t)
        if dim not in graph.edges:
            raise InvalidCut(f"no dimension at qubit {q}, step {t}")

    def shift(dim: DimIndex) -> DimIndex:
        t = at_frontier.get(dim.qubit)
        if t is not None and dim.step > t:
            return DimIndex(dim.qubit, dim.step + 1)
        return dim

    nodes = {
        nid: TensorNode(
            id=nid,
            role=n.role,
            gate=n.gate,
            qubits=n.qubits,
            in_dims=tuple(shift(x) for x in n.in_dims),
            out_dims=tuple(shift(x) for x in n.out_dims),
            l=n.l,
        )
        for nid, n in graph.nodes.items()
    }
    edges = {shift(dim): pc for dim, pc in graph.edges.items()}

    next_id = max(nodes) + 1
    for q in sorted(at_frontier):
        cut_dim = DimIndex(q, at_frontier[q])
        out_dim = DimIndex(q, at_frontier[q] + 1)
        producer, consumer = edges[cut_dim]
        bid = next_id
        next_id += 1
        nodes[bid] = TensorNode(
            id=bid,
            role=NodeRole.BARRIER,
            gate=barrier_tensor(),
            qubits=(q,),
            in_dims=(cut_dim,),
            out_dims=(out_dim,),
            l=0,
        )
        edges[cut_dim] = (producer, bid)
        edges[out_dim] = (bid, consumer)

    _recompute_lengths(nodes, edges)
    return ContractionGraph(d=graph.d, nodes=nodes, edges=edges)


def remove_barriers(graph: ContractionGraph) -> ContractionGraph:
    """Splice out every barrier node, renumbering steps back down."""
    current = graph
    while True:
        barrier_ids = [n.id for n in current.nodes.values() if n.role is NodeRole.BARRIER]
        if not barrier_ids:
            return current
        b = current.nodes[min(barrier_ids)]
        (in_dim,), (out_dim,) = b.in_dims, b.out_dims
        q = in_dim.qubit
        producer = current.edges[in_dim][0]
        consumer = current.edges[out_dim][1]

        def unshift(dim: DimIndex) -> DimIndex:
            if dim.qubit == q and dim.step > in_dim.step:
                return DimIndex(q, dim.step - 1)
            return dim

        nodes = {}
        for nid, n in current.nodes.items():
            if nid == b.id:
                continue
            nodes[nid] = TensorNode(
                id=nid,
                role=n.role,
                gate=n.gate,
                qubits=n.qubits,
                in_dims=tuple(unshift(x) for x in n.in_dims),
                out_dims=tuple(unshift(x) for x in n.out_dims),
                l=n.l,
            )
        edges = {}
        for dim, (p, c) in current.edges.items():
            if dim == in_dim:
                continue
            if dim == out_dim:
                edges[in_dim] = (producer, consumer)
            else:
                edges[unshift(dim)] = (p, c)
        _recompute_lengths(nodes, edges)
        current = ContractionGraph(d=current.d, nodes=nodes, edges=edges)


def _node_signature(n: TensorNode):
    return (
        n.role.value,
        n.gate.kind if n.gate else None,
        n.gate.params if n.gate else None,
        n.qubits,
        tuple(sorted((x.qubit, x.step) for x in n.in_dims)),
        tuple(sorted((x.qubit, x.step) for x in n.out_dims)),
        n.l,
    )


def structurally_equal(a: ContractionGraph, b: ContractionGraph) -> bool:
    """Equality modulo node ids; dims pin the wiring so signatures suffice."""
    if a.d != b.d or set(a.edges) != set(b.edges):
        return False
    return sorted(map(_node_signature, a.nodes.values())) == sorted(
        map(_node_signature, b.nodes.values())
    )


def contract_dense(graph: ContractionGraph) -> np.ndarray:
    """Contract every node in topological order into the dense state (d <= 14)."""
    if graph.d > 14:
        raise ValueError(f"d={graph.d} too large for dense contraction")
    state = np.zeros((2,) * graph.d, dtype=np.complex128)
    state[(0,) * graph.d] = 1.0
    for nid in graph.topo_order():
        node = graph.nodes[nid]
        if node.gate is None:
            continue
        p = len(node.qubits)
        mt = node.gate.matrix.reshape((2,) * (2 * p))
        state = np.tensordot(mt, state, axes=(tuple(range(p, 2 * p)), node.qubits))
        state = np.moveaxis(state, tuple(range(p)), node.qubits)
    return state.reshape(-1)


def to_json(graph: ContractionGraph) -> str:
    doc = {
        "d": graph.d,
        "nodes": [
            {
                "id": n.id,
                "role": n.role.value,
                "gate": n.gate.kind if n.gate else None,
                "params": list(n.gate.params) if n.gate else None,
                "qubits": list(n.qubits),
                "l": n.l,
            }
            for n in sorted(graph.nodes.values(), key=lambda n: n.id)
        ],
        "edges": [
            {"qubit": dim.qubit, "step": dim.step, "producer": p, "consumer": c}
            for dim, (p, c) in sorted(graph.edges.items())
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def to_dot(graph: ContractionGraph) -> str:
    lines = ["digraph contraction {", "  rankdir=LR;"]
    for n in sorted(graph.nodes.values(), key=lambda n: n.id):
        label = n.gate.kind if n.gate else "psi"
        shape = {"state": "circle", "gate": "box", "barrier": "diamond"}[n.role.value]
        lines.append(f'  n{n.id} [label="{label}\\nl={n.l}" shape={shape}];')
    for dim, (p, c) in sorted(graph.edges.items()):
        if c == OUTPUT_ID:
            continue
        lines.append(f'  n{p} -> n{c} [label="i{dim.step}_{dim.qubit}"];')
    lines.append("}")
    return "\n".join(lines)
