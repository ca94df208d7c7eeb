"""Compare the compiled gate kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--qubits 20] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from svpart.kernels import numpy_backend

try:
    from svpart.kernels import _core
except ImportError:
    _core = None


def _random_blocks(rng, ranks: int, L: int) -> np.ndarray:
    v = rng.normal(size=(ranks, 1 << L)) + 1j * rng.normal(size=(ranks, 1 << L))
    v /= np.linalg.norm(v)
    return np.ascontiguousarray(v, dtype=np.complex128)


def _random_unitary(rng, dim: int) -> np.ndarray:
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return np.ascontiguousarray(q, dtype=np.complex128)


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(rng, L: int, p: int, diagonal: bool, repeats: int) -> dict:
    bits = np.sort(rng.permutation(L)[:p]).astype(np.int64)
    blocks = _random_blocks(rng, 1, L)
    amps = blocks.size

    if diagonal:
        payload = np.exp(1j * rng.uniform(-3, 3, size=1 << p)).astype(np.complex128)
        run_np = lambda: numpy_backend.apply_diagonal(blocks, payload, list(bits))
        run_c = (
            (lambda: _core.apply_diagonal(blocks, payload, bits)) if _core else None
        )
    else:
        payload = _random_unitary(rng, 1 << p)
        run_np = lambda: numpy_backend.apply_gate(blocks, payload, list(bits))
        run_c = (lambda: _core.apply_gate(blocks, payload, bits)) if _core else None

    t_np = _time(run_np, repeats)
    row = {
        "kind": "diag" if diagonal else "dense",
        "p": p,
        "numpy_ms": t_np * 1e3,
        "numpy_gamps": amps / t_np / 1e9,
    }
    if run_c is not None:
        t_c = _time(run_c, repeats)
        row["compiled_ms"] = t_c * 1e3
        row["compiled_gamps"] = amps / t_c / 1e9
        row["speedup"] = t_np / t_c
    return row


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--qubits", type=int, default=20, help="local qubits per block")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    L = args.qubits
    print(f"block of 2^{L} amplitudes, best of {args.repeats} runs")
    if _core is None:
        print("compiled kernels not built; numpy only")
    header = f"{'kind':6} {'p':>2} {'numpy ms':>10} {'compiled ms':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for diagonal in (False, True):
        for p in (1, 2, 3, 5):
            row = bench_case(rng, L, p, diagonal, args.repeats)
            compiled = (
                f"{row['compiled_ms']:12.3f} {row['speedup']:8.2f}"
                if "compiled_ms" in row
                else f"{'-':>12} {'-':>8}"
            )
            print(f"{row['kind']:6} {row['p']:>2} {row['numpy_ms']:10.3f} {compiled}")


if __name__ == "__main__":
    main()
