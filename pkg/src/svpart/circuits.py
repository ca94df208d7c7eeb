"""Benchmark circuit families, emitted as QASM text.

Every generator goes through the same parser as user input; nothing builds
Circuit objects directly.  Families with random angles take a seed and are
deterministic given (d, seed).
"""

from __future__ import annotations

import math

import numpy as np


def _header(d: int) -> list[str]:
    return ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{d}];"]


def ghz(d: int, seed: int = 0) -> str:
    lines = _header(d) + ["h q[0];"]
    lines += [f"cx q[{i}],q[{i + 1}];" for i in range(d - 1)]
    return "\n".join(lines) + "\n"


def dj(d: int, seed: int = 0) -> str:
    # balanced parity oracle over the first d-1 qubits, ancilla last
    lines = _header(d) + [f"x q[{d - 1}];"]
    lines += [f"h q[{i}];" for i in range(d)]
    lines += [f"cx q[{i}],q[{d - 1}];" for i in range(d - 1)]
    lines += [f"h q[{i}];" for i in range(d - 1)]
    return "\n".join(lines) + "\n"


def qft(d: int, seed: int = 0) -> str:
    lines = _header(d)
    for i in range(d):
        lines.append(f"h q[{i}];")
        for j in range(i + 1, d):
            lines.append(f"cp(pi/{1 << (j - i)}) q[{j}],q[{i}];")
    for i in range(d // 2):
        lines.append(f"swap q[{i}],q[{d - 1 - i}];")
    return "\n".join(lines) + "\n"


def qpe(d: int, seed: int = 0) -> str:
    # estimate the phase of p(pi/4) on the last qubit with d-1 counting qubits
    n = d - 1
    if n < 1:
        raise ValueError("qpe needs at least 2 qubits")
    lines = _header(d) + [f"x q[{n}];"]
    lines += [f"h q[{i}];" for i in range(n)]
    for k in range(n):
        lines.append(f"cp(pi/4*{1 << (n - 1 - k)}) q[{k}],q[{n}];")
    # inverse QFT on the counting register
    for i in range(n // 2):
        lines.append(f"swap q[{i}],q[{n - 1 - i}];")
    for i in reversed(range(n)):
        for j in reversed(range(i + 1, n)):
            lines.append(f"cp(-pi/{1 << (j - i)}) q[{j}],q[{i}];")
        lines.append(f"h q[{i}];")
    return "\n".join(lines) + "\n"


def ising(d: int, seed: int = 0) -> str:
    # two first-order Trotter steps of a transverse-field Ising chain
    theta_zz, theta_x = 0.3, 0.7
    lines = _header(d)
    for _ in range(2):
        for i in range(d - 1):
            lines.append(f"cx q[{i}],q[{i + 1}];")
            lines.append(f"rz({2 * theta_zz}) q[{i + 1}];")
            lines.append(f"cx q[{i}],q[{i + 1}];")
        for i in range(d):
            lines.append(f"rx({2 * theta_x}) q[{i}];")
    return "\n".join(lines) + "\n"


def su2random(d: int, seed: int = 0) -> str:
    # EfficientSU2-style: ry+rz sublayers with a cx chain, random angles
    rng = np.random.default_rng(seed * 977 + 11)
    lines = _header(d)
    for layer in range(3):
        for i in range(d):
            lines.append(f"ry({rng.uniform(0, 2 * math.pi)!r}) q[{i}];")
            lines.append(f"rz({rng.uniform(0, 2 * math.pi)!r}) q[{i}];")
        if layer < 2:
            lines += [f"cx q[{i}],q[{i + 1}];" for i in range(d - 1)]
    return "\n".join(lines) + "\n"


def vqc(d: int, seed: int = 0) -> str:
    # layered variational ansatz: rx/rz rotations plus a cx ladder per layer
    rng = np.random.default_rng(seed * 1409 + 7)
    lines = _header(d)
    for _ in range(3):
        for i in range(d):
            lines.append(f"rx({rng.uniform(0, 2 * math.pi)!r}) q[{i}];")
            lines.append(f"rz({rng.uniform(0, 2 * math.pi)!r}) q[{i}];")
        lines += [f"cx q[{i}],q[{i + 1}];" for i in range(d - 1)]
    return "\n".join(lines) + "\n"


FAMILIES = {
    "ghz": ghz,
    "dj": dj,
    "qft": qft,
    "qpe": qpe,
    "ising": ising,
    "su2random": su2random,
    "vqc": vqc,
}


def generate(family: str, d: int, seed: int = 0) -> str:
    """QASM text for the named family at d qubits."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    if d < 2:
        raise ValueError("families need at least 2 qubits")
    return FAMILIES[family](d, seed)
