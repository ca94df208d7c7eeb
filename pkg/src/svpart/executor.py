"""Plan interpreter over simulated in-process ranks, plus the dense oracle.

Ranks are rows of one (num_ranks, 2^L) array; Pack/Exchange/Unpack move
sub-blocks through a mailbox transport that stands in for a network, so the
task semantics match an SPMD program executed per rank.  Tasks run
sequentially here; within one ApplyFused the per-rank updates are
independent, and Exchange acts as the synchronization point.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .gates import GateTensor, gate_tensor
from .plan import ExecutionPlan
from .qasm import Circuit

OracleState = np.ndarray  # dense complex vector of length 2^d


class ExecutorError(Exception):
    pass


class TooLarge(ExecutorError):
    pass


class PlanInvalid(ExecutorError):
    pass


class NonUnitaryDrift(ExecutorError):
    pass


class DimensionMismatch(ExecutorError):
    pass


@dataclass
class DistState:
    blocks: np.ndarray  # (num_ranks, 2^{d-g}) complex128
    phase: int
    d: int
    g: int
    layouts: list[list[int]]  # phase -> qubit line -> bit position


@dataclass
class RunStats:
    task_counts: dict[str, int]
    compute_seconds: float
    exchange_seconds: float
    amps_moved: int
    bytes_moved: int
    exchanges: list[dict]


@dataclass
class RunResult:
    state: DistState
    histogram: dict[str, int] | None
    stats: RunStats


class LocalTransport:
    """In-process mailbox; a networked transport would share this surface."""

    def __init__(self):
        self._inboxes: dict[int, dict[tuple, np.ndarray]] = {}

    def post(self, dst_rank: int, tag: tuple, payload: np.ndarray) -> None:
        box = self._inboxes.setdefault(dst_rank, {})
        if tag in box:
            raise PlanInvalid(f"duplicate message tag {tag} for rank {dst_rank}")
        box[tag] = payload

    def collect(self, rank: int) -> dict[tuple, np.ndarray]:
        return self._inboxes.pop(rank, {})

    def idle(self) -> bool:
        return not self._inboxes


_gate_cache: dict[tuple, GateTensor] = {}


def _gate(kind: str, params: tuple[float, ...]) -> GateTensor:
    key = (kind, params)
    if key not in _gate_cache:
        _gate_cache[key] = gate_tensor(kind, params)
    return _gate_cache[key]


def _subblock_index(view: np.ndarray, local_bits: list[int], selector: int):
    # index tuple fixing the given local bit axes to the selector's bits
    idx: list = [slice(None)] * view.ndim
    for i, b in enumerate(local_bits):
        idx[1 + b] = (selector >> (len(local_bits) - 1 - i)) & 1
    return tuple(idx)


def _rank_bits(rank: int, g: int, positions: list[int]) -> int:
    out = 0
    for p in positions:
        out = (out << 1) | ((rank >> (g - 1 - p)) & 1)
    return out


def _set_rank_bits(rank: int, g: int, positions: list[int], value: int) -> int:
    for i, p in enumerate(positions):
        bit = (value >> (len(positions) - 1 - i)) & 1
        mask = 1 << (g - 1 - p)
        rank = (rank | mask) if bit else (rank & ~mask)
    return rank


def _apply_fused(blocks: np.ndarray, payload: dict, layout: list[int], g: int) -> None:
    num_ranks = blocks.shape[0]
    for entry in payload["gates"]:
        gate = _gate(entry["kind"], tuple(entry["params"]))
        qubits = entry["qubits"]
        positions = [layout[q] for q in qubits]
        global_slots = [i for i, p in enumerate(positions) if p < g]
        if bool(global_slots) != bool(entry["passthrough"]):
            raise PlanInvalid(f"stale passthrough mark on {entry}")
        local_bits = [positions[i] - g for i in range(len(qubits)) if i not in global_slots]

        if not global_slots:
            if gate.is_diagonal:
                kernels.apply_diagonal(blocks, np.ascontiguousarray(gate.matrix.diagonal()), local_bits)
            else:
                kernels.apply_gate(blocks, gate.matrix, local_bits)
            continue

        p = gate.num_qubits
        if gate.is_diagonal:
            # fix the global slots per rank; remaining slots stay a diagonal
            diag = gate.matrix.diagonal().reshape((2,) * p)
            g_positions = [positions[i] for i in global_slots]
            for rank in range(num_ranks):
                fixed = _rank_bits(rank, g, g_positions)
                idx: list = [slice(None)] * p
                for j, slot in enumerate(global_slots):
                    idx[slot] = (fixed >> (len(global_slots) - 1 - j)) & 1
                sub = np.ascontiguousarray(diag[tuple(idx)].reshape(-1))
                row = blocks[rank : rank + 1]
                if not local_bits:
                    row *= sub[0]
                else:
                    kernels.apply_diagonal(row, sub, local_bits)
            continue

        if not set(global_slots) <= gate.control_dims:
            raise PlanInvalid(
                f"{gate.kind} on {qubits} has a non-control global slot"
            )
        # controlled gate with global controls: act only on ranks whose
        # global control bits are all 1, with those slots sliced away
        mt = gate.matrix.reshape((2,) * (2 * p))
        idx: list = [slice(None)] * (2 * p)
        for slot in global_slots:
            idx[slot] = 1
            idx[p + slot] = 1
        kept = p - len(global_slots)
        restricted = np.ascontiguousarray(mt[tuple(idx)].reshape(2**kept, 2**kept))
        g_positions = [positions[i] for i in global_slots]
        for rank in range(num_ranks):
            if _rank_bits(rank, g, g_positions) != (1 << len(global_slots)) - 1:
                continue
            kernels.apply_gate(blocks[rank : rank + 1], restricted, local_bits)


def run_plan(
    plan: ExecutionPlan,
    shots: int | None = None,
    seed: int | None = None,
    initial: np.ndarray | None = None,
) -> RunResult:
    """Interpret the task list; returns the final state and optional histogram."""
    d, g = plan.d, plan.g
    L = d - g
    transport = LocalTransport()
    blocks: np.ndarray | None = None
    packed: dict | None = None
    stats = RunStats(
        task_counts={}, compute_seconds=0.0, exchange_seconds=0.0,
        amps_moved=0, bytes_moved=0, exchanges=[],
    )
    done: set[int] = set()

    for task in plan.tasks:
        if any(dep not in done for dep in task.deps):
            raise PlanInvalid(f"task {task.id} runs before its dependencies")
        t0 = time.perf_counter()
        kind = task.kind

        if kind == "Alloc":
            if blocks is not None:
                raise PlanInvalid("double Alloc")
            if task.payload["num_ranks"] != plan.num_ranks or task.payload["block_len"] != 1 << L:
                raise PlanInvalid("Alloc payload disagrees with plan shape")
            blocks = np.zeros((plan.num_ranks, 1 << L), dtype=np.complex128)
            if initial is None:
                blocks[0, 0] = 1.0
            else:
                scattered = scatter(initial, plan, phase=0)
                blocks[...] = scattered.blocks

        elif kind == "ApplyFused":
            if blocks is None:
                raise PlanInvalid("compute before Alloc")
            layout = plan.layout_phases[task.payload["phase"]]
            _apply_fused(blocks, task.payload, layout, g)
            norm = float(np.sum(np.abs(blocks) ** 2))
            if abs(norm - 1.0) > 1e-8:
                raise NonUnitaryDrift(f"norm drifted to {norm!r}")

        elif kind == "Pack":
            if blocks is None:
                raise PlanInvalid("Pack before Alloc")
            if packed is not None:
                raise PlanInvalid("Pack while a previous Pack is pending")
            swaps = task.payload["swaps"]
            local_bits = [s["local_bit"] for s in swaps]
            rank_positions = [s["rank_bit"] for s in swaps]
            m = len(swaps)
            view = blocks.reshape((plan.num_ranks,) + (2,) * L)
            buffers = {}
            for rank in range(plan.num_ranks):
                alpha = _rank_bits(rank, g, rank_positions)
                for v in range(1 << m):
                    if v == alpha:
                        continue
                    sub = view[(rank,) + _subblock_index(view, local_bits, v)[1:]]
                    # must copy: contiguous sub-blocks alias the live state and
                    # Unpack on another rank would clobber them in flight
                    buffers[(rank, v)] = sub.copy()
            packed = {
                "phase": task.payload["phase"],
                "swaps": swaps,
                "buffers": buffers,
            }

        elif kind == "Exchange":
            if packed is None or packed["swaps"] != task.payload["swaps"]:
                raise PlanInvalid("Exchange without matching Pack")
            swaps = task.payload["swaps"]
            rank_positions = [s["rank_bit"] for s in swaps]
            moved = 0
            messages = 0
            for (rank, v), buf in packed["buffers"].items():
                alpha = _rank_bits(rank, g, rank_positions)
                dst = _set_rank_bits(rank, g, rank_positions, v)
                transport.post(dst, ("xchg", packed["phase"], alpha), buf)
                moved += buf.size
                messages += 1
            packed["sent"] = True
            stats.amps_moved += moved
            stats.bytes_moved += moved * 16
            stats.exchanges.append(
                {"amps": moved, "bytes": moved * 16, "messages": messages}
            )

        elif kind == "Unpack":
            if packed is None or not packed.get("sent"):
                raise PlanInvalid("Unpack without a completed Exchange")
            swaps = task.payload["swaps"]
            local_bits = [s["local_bit"] for s in swaps]
            view = blocks.reshape((plan.num_ranks,) + (2,) * L)
            for rank in range(plan.num_ranks):
                for tag, buf in transport.collect(rank).items():
                    _, _, selector = tag
                    idx = (rank,) + _subblock_index(view, local_bits, selector)[1:]
                    view[idx] = buf.reshape(view[idx].shape)
            packed = None

        elif kind == "Free":
            if packed is not None or not transport.idle():
                raise PlanInvalid("Free with undelivered messages")

        else:
            raise PlanInvalid(f"unknown task kind {kind!r}")

        elapsed = time.perf_counter() - t0
        stats.task_counts[kind] = stats.task_counts.get(kind, 0) + 1
        if kind in ("Pack", "Exchange", "Unpack"):
            stats.exchange_seconds += elapsed
        elif kind == "ApplyFused":
            stats.compute_seconds += elapsed
        done.add(task.id)

    if blocks is None:
        raise PlanInvalid("plan never allocated state")
    state = DistState(
        blocks=blocks, phase=len(plan.layout_phases) - 1, d=d, g=g,
        layouts=[list(p) for p in plan.layout_phases],
    )
    histogram = None
    if shots is not None:
        histogram = sample(gather(state), shots, seed)
    return RunResult(state=state, histogram=histogram, stats=stats)


def _storage_to_basis(layout: list[int], d: int) -> np.ndarray:
    # basis index for each storage index under the layout
    f = np.arange(1 << d, dtype=np.int64)
    b = np.zeros_like(f)
    for q in range(d):
        val = (f >> (d - 1 - layout[q])) & 1
        b |= val << (d - 1 - q)
    return b


def gather(state: DistState) -> OracleState:
    """Dense qubit-0-most-significant vector from the distributed blocks."""
    layout = state.layouts[state.phase]
    b = _storage_to_basis(layout, state.d)
    dense = np.empty(1 << state.d, dtype=np.complex128)
    dense[b] = state.blocks.reshape(-1)
    return dense


def scatter(dense: np.ndarray, plan: ExecutionPlan, phase: int = 0) -> DistState:
    """Distribute a dense state into rank blocks at the given layout phase."""
    d, g = plan.d, plan.g
    if dense.shape != (1 << d,):
        raise DimensionMismatch(f"state length {dense.shape} != 2^{d}")
    layout = plan.layout_phases[phase]
    b = _storage_to_basis(layout, d)
    flat = np.asarray(dense, dtype=np.complex128)[b]
    return DistState(
        blocks=flat.reshape(plan.num_ranks, 1 << (d - g)),
        phase=phase,
        d=d,
        g=g,
        layouts=[list(p) for p in plan.layout_phases],
    )


def oracle_simulate(circuit: Circuit) -> OracleState:
    """Dense reference simulator: sequential per-gate tensor contraction."""
    d = circuit.num_qubits
    if d > 14:
        raise TooLarge(f"oracle capped at 14 qubits, got {d}")
    state = np.zeros((2,) * d, dtype=np.complex128)
    state[(0,) * d] = 1.0
    for op in circuit.ops:
        p = len(op.qubits)
        mt = op.gate.matrix.reshape((2,) * (2 * p))
        state = np.tensordot(mt, state, axes=(tuple(range(p, 2 * p)), op.qubits))
        state = np.moveaxis(state, tuple(range(p)), op.qubits)
    return np.ascontiguousarray(state.reshape(-1))


def compare(a: OracleState, b: OracleState) -> float:
    """Max amplitude deviation after aligning global phase at the largest amplitude."""
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    weight = np.abs(a) * np.abs(b)
    k = int(np.argmax(weight))
    if weight[k] == 0.0:
        phi = 1.0 + 0.0j
    else:
        z = a[k] * np.conj(b[k])
        phi = z / abs(z)
    return float(np.max(np.abs(a - phi * b)))


def sample(dense: OracleState, shots: int, seed: int | None) -> dict[str, int]:
    """Seeded measurement histogram {bitstring: count}, qubit 0 first."""
    probs = np.abs(dense) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(len(dense), size=shots, p=probs)
    values, counts = np.unique(outcomes, return_counts=True)
    d = len(dense).bit_length() - 1
    return {format(int(v), f"0{d}b"): int(c) for v, c in zip(values, counts)}
