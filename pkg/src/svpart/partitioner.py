"""Greedy centrality-guided partitioning against a declared memory hierarchy.

forward_pass advances a frontier over the gate DAG: each round picks the
budgeted number of qubit lines whose frontier gates score highest by
closeness centrality, then absorbs every dependency-ready gate that is
either fully local or passes through (diagonal, or nonlocal slots all
controls).  Rounds repeat until every gate is placed; partition() recurses
per hierarchy level inside each partition.

Scores for every round come from the table computed once on the
barrier-prefixed graph: absorbed prefixes are upstream of all pending gates,
so re-inserting barriers and recomputing changes neither reachable sets nor
pairwise critical-path distances, only the uniform 1/N factor, which cannot
reorder scores within a round.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .centrality import CentralityTable, closeness
from .gates import GateTensor
from .graph import ContractionGraph, NodeRole, build_graph, insert_barriers
from .qasm import Circuit, GateApp


class PartitionError(Exception):
    pass


class BudgetTooSmall(PartitionError):
    pass


class InvalidHierarchy(PartitionError):
    pass


@dataclass(frozen=True)
class MemoryLevel:
    name: str
    local_qubits: int


@dataclass(frozen=True)
class MemoryHierarchy:
    levels: tuple[MemoryLevel, ...]

    def budgets(self) -> tuple[int, ...]:
        return tuple(level.local_qubits for level in self.levels)


_LEVEL_NAMES = ("distributed", "shared", "local", "register")


def make_hierarchy(budgets: list[int] | tuple[int, ...]) -> MemoryHierarchy:
    """Hierarchy from local-qubit counts, outermost level first."""
    levels = tuple(
        MemoryLevel(_LEVEL_NAMES[min(i, len(_LEVEL_NAMES) - 1)], int(b))
        for i, b in enumerate(budgets)
    )
    return MemoryHierarchy(levels)


def validate_hierarchy(hierarchy: MemoryHierarchy, d: int) -> None:
    budgets = hierarchy.budgets()
    if not budgets:
        raise InvalidHierarchy("hierarchy needs at least one level")
    for k, b in enumerate(budgets):
        if not 0 < b <= d:
            raise InvalidHierarchy(f"level {k} budget {b} outside (0, {d}]")
        if k and b > budgets[k - 1]:
            raise InvalidHierarchy(f"level {k} budget {b} exceeds level {k - 1}")


@dataclass(frozen=True)
class Partition:
    level: int  # hierarchy level index; -1 for the root covering everything
    local_dims: tuple[int, ...]
    global_dims: tuple[int, ...]
    gate_ids: tuple[int, ...]  # root-graph node ids in absorption order
    passthrough: frozenset[int]  # gate ids kept despite nonlocal slots
    children: tuple["Partition", ...] = ()


@dataclass
class PartitionTree:
    d: int
    hierarchy: MemoryHierarchy
    root: Partition
    graph: ContractionGraph

    def leaves(self) -> list[Partition]:
        out: list[Partition] = []

        def walk(p: Partition) -> None:
            if p.children:
                for c in p.children:
                    walk(c)
            else:
                out.append(p)

        if self.root.children:
            walk(self.root)
        return out


def can_pass_through(gate: GateTensor, nonlocal_slots: set[int] | frozenset[int]) -> bool:
    """True iff the gate tolerates these slots being nonlocal."""
    if not nonlocal_slots:
        raise ValueError("nonlocal_slots must be nonempty")
    return gate.is_diagonal or set(nonlocal_slots) <= gate.control_dims


def _required_lines(gate: GateTensor, qubits: tuple[int, ...]) -> set[int]:
    # lines the gate cannot tolerate as nonlocal
    if gate.is_diagonal:
        return set()
    return {q for slot, q in enumerate(qubits) if slot not in gate.control_dims}


def forward_pass(
    graph: ContractionGraph,
    centrality: CentralityTable,
    L: int,
    *,
    candidate_lines: tuple[int, ...] | None = None,
    level: int = 0,
) -> list[Partition]:
    """Split the graph's gates into ordered partitions of <= L local lines."""
    lines = tuple(range(graph.d)) if candidate_lines is None else tuple(sorted(candidate_lines))
    width = min(L, len(lines))
    gate_order = graph.gate_ids()
    nodes = graph.nodes
    line_gates: dict[int, list[int]] = {q: [] for q in range(graph.d)}
    for gid in gate_order:
        for q in nodes[gid].qubits:
            line_gates[q].append(gid)

    absorbed: set[int] = set()
    cursor = {q: 0 for q in range(graph.d)}  # skip-absorbed frontier per line

    def next_pending(q: int) -> int | None:
        seq = line_gates[q]
        i = cursor[q]
        while i < len(seq) and seq[i] in absorbed:
            i += 1
        cursor[q] = i
        return seq[i] if i < len(seq) else None

    def line_score(q: int) -> float:
        seq = line_gates[q]
        i = cursor[q]
        while i < len(seq):
            gid = seq[i]
            if gid not in absorbed and not nodes[gid].gate.is_diagonal:
                return centrality.cc[gid]
            i += 1
        return -1.0

    def ready(gid: int) -> bool:
        return all(next_pending(q) == gid for q in nodes[gid].qubits)

    def absorb_round(locals_: set[int]) -> list[int]:
        taken = []
        progressed = True
        while progressed:
            progressed = False
            for gid in gate_order:
                if gid in absorbed or not ready(gid):
                    continue
                node = nodes[gid]
                nonlocal_slots = {
                    slot for slot, q in enumerate(node.qubits) if q not in locals_
                }
                if nonlocal_slots and not can_pass_through(node.gate, nonlocal_slots):
                    continue
                absorbed.add(gid)
                taken.append(gid)
                progressed = True
        return taken

    def pick_locals(forced: set[int]) -> set[int]:
        ranked = sorted(
            (q for q in lines if q not in forced),
            key=lambda q: (-line_score(q), q),
        )
        chosen = set(forced)
        for q in ranked:
            if len(chosen) >= width:
                break
            chosen.add(q)
        return chosen

    partitions: list[Partition] = []
    while len(absorbed) < len(gate_order):
        locals_ = pick_locals(set())
        taken = absorb_round(locals_)
        if not taken:
            # frontier gate needs specific lines; force them local
            first = next(gid for gid in gate_order if gid not in absorbed)
            node = nodes[first]
            required = _required_lines(node.gate, node.qubits)
            if not required <= set(lines) or len(required) > width:
                raise BudgetTooSmall(
                    f"gate {node.gate.kind} on {node.qubits} needs "
                    f"{sorted(required)} local but budget is {L}"
                )
            locals_ = pick_locals(required)
            taken = absorb_round(locals_)
            if not taken:
                raise PartitionError("frontier stalled; dependency order broken")
        passthrough = frozenset(
            gid
            for gid in taken
            if any(q not in locals_ for q in nodes[gid].qubits)
        )
        partitions.append(
            Partition(
                level=level,
                local_dims=tuple(sorted(locals_)),
                global_dims=tuple(q for q in range(graph.d) if q not in locals_),
                gate_ids=tuple(taken),
                passthrough=passthrough,
            )
        )
    return partitions


def _subdivide(part: Partition, d: int, budgets: tuple[int, ...], level: int, graph: ContractionGraph) -> Partition:
    if level >= len(budgets):
        return part
    ops = [GateApp(graph.nodes[gid].gate, graph.nodes[gid].qubits) for gid in part.gate_ids]
    sub_circuit = Circuit(num_qubits=d, ops=ops)
    sub_graph = insert_barriers(build_graph(sub_circuit), {q: 0 for q in range(d)})
    table = closeness(sub_graph)
    sub_parts = forward_pass(
        sub_graph, table, budgets[level], candidate_lines=part.local_dims, level=level
    )
    children = []
    for sp in sub_parts:
        mapped = replace(
            sp,
            gate_ids=tuple(part.gate_ids[sid - 1] for sid in sp.gate_ids),
            passthrough=frozenset(part.gate_ids[sid - 1] for sid in sp.passthrough),
        )
        children.append(_subdivide(mapped, d, budgets, level + 1, graph))
    return replace(part, children=tuple(children))


def partition(graph: ContractionGraph, hierarchy: MemoryHierarchy) -> PartitionTree:
    """Recursively partition the graph per the hierarchy; leaf order = execution order."""
    validate_hierarchy(hierarchy, graph.d)
    budgets = hierarchy.budgets()
    barriered = insert_barriers(graph, {q: 0 for q in range(graph.d)})
    table = closeness(barriered)
    level0 = forward_pass(barriered, table, budgets[0], level=0)
    children = tuple(_subdivide(p, graph.d, budgets, 1, graph) for p in level0)
    root = Partition(
        level=-1,
        local_dims=tuple(range(graph.d)),
        global_dims=(),
        gate_ids=tuple(graph.gate_ids()),
        passthrough=frozenset(),
        children=children,
    )
    return PartitionTree(d=graph.d, hierarchy=hierarchy, root=root, graph=graph)


def _part_doc(p: Partition) -> dict:
    return {
        "level": p.level,
        "local": list(p.local_dims),
        "global": list(p.global_dims),
        "gates": list(p.gate_ids),
        "passthrough": sorted(p.passthrough),
        "children": [_part_doc(c) for c in p.children],
    }


def tree_to_json(tree: PartitionTree) -> str:
    doc = {
        "d": tree.d,
        "hierarchy": list(tree.hierarchy.budgets()),
        "root": _part_doc(tree.root),
    }
    return json.dumps(doc, indent=2, sort_keys=True)
