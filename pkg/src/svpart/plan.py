"""Lowering of a PartitionTree into an executable SPMD task list.

The amplitude layout maps each qubit line to a bit position: positions
[0, g) select the rank (qubit at position 0 is the rank's most significant
bit), positions [g, d) index into the rank-local block.  A level-0 boundary
whose local set changes becomes Pack -> Exchange -> Unpack, expressed as
pairwise swaps of one global bit with one local bit; deeper levels only
shape fused-kernel tiling and never move data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graph import ContractionGraph
from .partitioner import Partition, PartitionTree


class PlanError(Exception):
    pass


@dataclass(frozen=True)
class Task:
    id: int
    kind: str  # Alloc | Pack | Exchange | Unpack | ApplyFused | Free
    deps: tuple[int, ...]
    payload: dict


@dataclass
class ExecutionPlan:
    d: int
    g: int
    layout_phases: list[list[int]]  # phase -> qubit line -> bit position
    tasks: list[Task]
    version: int = 1

    @property
    def num_ranks(self) -> int:
        return 1 << self.g

    @property
    def block_len(self) -> int:
        return 1 << (self.d - self.g)


def _initial_layout(local_dims: tuple[int, ...], d: int) -> list[int]:
    globals_ = [q for q in range(d) if q not in set(local_dims)]
    pos = [0] * d
    for i, q in enumerate(globals_):
        pos[q] = i
    for i, q in enumerate(sorted(local_dims)):
        pos[q] = len(globals_) + i
    return pos


def infer_reshape(
    prev_local: tuple[int, ...], next_local: tuple[int, ...], d: int, g: int
) -> dict:
    """Minimal set of global<->local qubit swaps turning one layout into the next."""
    prev_set, next_set = set(prev_local), set(next_local)
    if len(prev_set) != d - g or len(next_set) != d - g:
        raise PlanError("local sets must match the level-0 budget")
    incoming = sorted(next_set - prev_set)
    outgoing = sorted(prev_set - next_set)
    m = len(incoming)
    return {
        "swaps": [
            {"qubit_in": qi, "qubit_out": qo} for qi, qo in zip(incoming, outgoing)
        ],
        "m": m,
        "block_amps": 1 << (d - g - m),
    }


def fuse(
    partition: Partition,
    graph: ContractionGraph,
    rank_local: tuple[int, ...] | None = None,
) -> dict:
    """ApplyFused payload for a leaf: ordered gates with passthrough marks.

    rank_local is the enclosing level-0 local set deciding which qubits sit
    in the rank's block at run time; it defaults to the leaf's own locals.
    """
    if partition.children:
        raise PlanError("fuse takes a leaf partition")
    local = set(rank_local if rank_local is not None else partition.local_dims)
    gates = []
    for gid in partition.gate_ids:
        node = graph.nodes[gid]
        gates.append(
            {
                "kind": node.gate.kind,
                "params": list(node.gate.params),
                "qubits": list(node.qubits),
                "passthrough": any(q not in local for q in node.qubits),
            }
        )
    return {"tile": list(partition.local_dims), "gates": gates}


def lower(tree: PartitionTree) -> ExecutionPlan:
    """Pre-order walk of the tree into Alloc/compute/exchange/Free tasks."""
    d = tree.d
    budgets = tree.hierarchy.budgets()
    g = d - budgets[0]
    level0 = list(tree.root.children)

    if level0:
        layout = _initial_layout(level0[0].local_dims, d)
        prev_local = level0[0].local_dims
    else:
        layout = list(range(d))
        prev_local = tuple(range(g, d))
    layout_phases = [list(layout)]
    phase = 0

    tasks: list[Task] = []

    def emit(kind: str, payload: dict) -> None:
        tid = len(tasks)
        deps = (tid - 1,) if tasks else ()
        tasks.append(Task(id=tid, kind=kind, deps=deps, payload=payload))

    emit("Alloc", {"num_ranks": 1 << g, "block_len": 1 << (d - g)})

    def leaves_of(part: Partition) -> list[Partition]:
        if not part.children:
            return [part]
        out = []
        for c in part.children:
            out.extend(leaves_of(c))
        return out

    for part in level0:
        if set(part.local_dims) != set(prev_local):
            reshape = infer_reshape(prev_local, part.local_dims, d, g)
            swaps = [
                {
                    "qubit_in": s["qubit_in"],
                    "qubit_out": s["qubit_out"],
                    "rank_bit": layout[s["qubit_in"]],
                    "local_bit": layout[s["qubit_out"]] - g,
                }
                for s in reshape["swaps"]
            ]
            emit("Pack", {"phase": phase, "swaps": swaps})
            emit(
                "Exchange",
                {"phase": phase, "swaps": swaps, "block_amps": reshape["block_amps"]},
            )
            for s in swaps:
                qi, qo = s["qubit_in"], s["qubit_out"]
                layout[qi], layout[qo] = layout[qo], layout[qi]
            phase += 1
            layout_phases.append(list(layout))
            emit("Unpack", {"phase": phase, "swaps": swaps})
            prev_local = part.local_dims
        for leaf in leaves_of(part):
            payload = fuse(leaf, tree.graph, part.local_dims)
            payload["phase"] = phase
            emit("ApplyFused", payload)

    emit("Free", {})
    return ExecutionPlan(d=d, g=g, layout_phases=layout_phases, tasks=tasks)


def to_json(plan: ExecutionPlan) -> str:
    doc = {
        "version": plan.version,
        "d": plan.d,
        "g": plan.g,
        "layout_phases": plan.layout_phases,
        "tasks": [
            {"id": t.id, "kind": t.kind, "deps": list(t.deps), "payload": t.payload}
            for t in plan.tasks
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def from_json(text: str) -> ExecutionPlan:
    doc = json.loads(text)
    return ExecutionPlan(
        d=doc["d"],
        g=doc["g"],
        layout_phases=[list(p) for p in doc["layout_phases"]],
        tasks=[
            Task(
                id=t["id"],
                kind=t["kind"],
                deps=tuple(t["deps"]),
                payload=t["payload"],
            )
            for t in doc["tasks"]
        ],
        version=doc["version"],
    )
