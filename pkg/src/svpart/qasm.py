"""Hand-rolled OpenQASM 2.0 reader for the supported gate subset.

Multiple quantum registers flatten into one qubit index space in declaration
order.  `barrier` statements are accepted and dropped; `include` lines are
ignored.  Angle expressions support numbers, pi, + - * / ^ and parentheses,
evaluated without touching eval().
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .gates import GATE_SIGNATURES, GateTensor, gate_tensor


class QasmError(Exception):
    pass


class QasmSyntaxError(QasmError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class UnsupportedGateError(QasmError):
    def __init__(self, line: int, name: str):
        super().__init__(f"line {line}: unsupported gate '{name}'")
        self.line = line
        self.name = name


class IndexOutOfRangeError(QasmError):
    def __init__(self, line: int, register: str, index: int, size: int):
        super().__init__(
            f"line {line}: index {index} out of range for '{register}' of size {size}"
        )
        self.line = line
        self.register = register
        self.index = index


class DuplicateQubitError(IndexOutOfRangeError):
    def __init__(self, line: int, register: str, index: int):
        QasmError.__init__(
            self, f"line {line}: qubit {register}[{index}] repeated in one statement"
        )
        self.line = line
        self.register = register
        self.index = index


@dataclass(frozen=True)
class GateApp:
    gate: GateTensor
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class Measure:
    qubit: int
    clbit: int
    op_index: int  # ops parsed before this statement


@dataclass
class Circuit:
    num_qubits: int
    num_clbits: int = 0
    ops: list[GateApp] = field(default_factory=list)
    measures: list[Measure] = field(default_factory=list)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str


_TOKEN_RE = re.compile(
    r"(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<arrow>->)"
    r"|(?P<sym>[\[\](),;+\-*/^])"
    r"|(?P<str>\"[^\"]*\")"
    r"|(?P<ws>\s+)"
    r"|(?P<bad>.)"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    line = 1
    for raw in text.split("\n"):
        body = raw.split("//", 1)[0]
        for m in _TOKEN_RE.finditer(body):
            kind = m.lastgroup
            if kind == "ws":
                continue
            if kind == "bad":
                raise QasmSyntaxError(line, f"unexpected character {m.group()!r}")
            tokens.append((kind, m.group(), line))
        line += 1
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1][2] if self.tokens else 1
            raise QasmSyntaxError(last, "unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, value: str) -> tuple[str, str, int]:
        tok = self.next()
        if tok[1] != value:
            raise QasmSyntaxError(tok[2], f"expected {value!r}, got {tok[1]!r}")
        return tok

    # -- angle expressions ------------------------------------------------

    def expr(self) -> float:
        value = self.term()
        while self.peek() and self.peek()[1] in "+-":
            op = self.next()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> float:
        value = self.power()
        while self.peek() and self.peek()[1] in "*/":
            _, op, ln = self.next()
            rhs = self.power()
            if op == "/":
                if rhs == 0:
                    raise QasmSyntaxError(ln, "division by zero in angle")
                value /= rhs
            else:
                value *= rhs
        return value

    def power(self) -> float:
        value = self.atom()
        if self.peek() and self.peek()[1] == "^":
            self.next()
            return value ** self.power()
        return value

    def atom(self) -> float:
        kind, text, ln = self.next()
        if text == "-":
            return -self.atom()
        if text == "+":
            return self.atom()
        if text == "(":
            value = self.expr()
            self.expect(")")
            return value
        if kind == "num":
            return float(text)
        if kind == "id" and text == "pi":
            return math.pi
        raise QasmSyntaxError(ln, f"bad angle term {text!r}")


def parse(text: str) -> Circuit:
    """Parse QASM source into a flat Circuit; raises QasmError subclasses."""
    p = _Parser(_tokenize(text))
    qregs: dict[str, tuple[int, int]] = {}  # name -> (offset, size)
    cregs: dict[str, tuple[int, int]] = {}
    circuit = Circuit(num_qubits=0)

    if p.peek() and p.peek()[1] == "OPENQASM":
        p.next()
        version = p.next()
        if version[1] != "2.0":
            raise QasmSyntaxError(version[2], f"unsupported version {version[1]}")
        p.expect(";")

    def qubit_arg(ln: int) -> list[tuple[str, int]]:
        # returns (register, local index) pairs; a bare name means the
        # whole register
        name = p.next()
        if name[0] != "id":
            raise QasmSyntaxError(name[2], f"expected register name, got {name[1]!r}")
        if name[1] not in qregs:
            raise QasmSyntaxError(name[2], f"unknown quantum register '{name[1]}'")
        offset, size = qregs[name[1]]
        if p.peek() and p.peek()[1] == "[":
            p.next()
            idx_tok = p.next()
            if idx_tok[0] != "num" or "." in idx_tok[1]:
                raise QasmSyntaxError(idx_tok[2], "register index must be an integer")
            idx = int(idx_tok[1])
            p.expect("]")
            if idx >= size:
                raise IndexOutOfRangeError(ln, name[1], idx, size)
            return [(name[1], idx)]
        return [(name[1], i) for i in range(size)]

    while p.peek():
        kind, text, ln = p.next()
        if text == "include":
            p.next()  # the filename string
            p.expect(";")
            continue
        if text in ("qreg", "creg"):
            name = p.next()
            if name[0] != "id":
                raise QasmSyntaxError(name[2], "expected register name")
            regs = qregs if text == "qreg" else cregs
            if name[1] in qregs or name[1] in cregs:
                raise QasmSyntaxError(name[2], f"register '{name[1]}' redeclared")
            p.expect("[")
            size_tok = p.next()
            if size_tok[0] != "num" or "." in size_tok[1]:
                raise QasmSyntaxError(size_tok[2], "register size must be an integer")
            size = int(size_tok[1])
            if size < 1:
                raise QasmSyntaxError(size_tok[2], "register size must be positive")
            p.expect("]")
            p.expect(";")
            if text == "qreg":
                regs[name[1]] = (circuit.num_qubits, size)
                circuit.num_qubits += size
            else:
                regs[name[1]] = (circuit.num_clbits, size)
                circuit.num_clbits += size
            continue
        if text == "barrier":
            while p.peek() and p.peek()[1] != ";":
                p.next()
            p.expect(";")
            continue
        if text == "measure":
            src = qubit_arg(ln)
            p.expect("->")
            dst_name = p.next()
            if dst_name[0] != "id" or dst_name[1] not in cregs:
                raise QasmSyntaxError(ln, "measure target must be a classical register")
            c_off, c_size = cregs[dst_name[1]]
            if p.peek() and p.peek()[1] == "[":
                p.next()
                idx_tok = p.next()
                if idx_tok[0] != "num" or "." in idx_tok[1]:
                    raise QasmSyntaxError(idx_tok[2], "register index must be an integer")
                idx = int(idx_tok[1])
                p.expect("]")
                if idx >= c_size:
                    raise IndexOutOfRangeError(ln, dst_name[1], idx, c_size)
                dst = [idx]
            else:
                dst = list(range(c_size))
            p.expect(";")
            if len(src) != len(dst):
                raise QasmSyntaxError(ln, "measure register sizes differ")
            for (reg, qi), ci in zip(src, dst):
                q_off = qregs[reg][0]
                circuit.measures.append(
                    Measure(q_off + qi, c_off + ci, len(circuit.ops))
                )
            continue
        if kind != "id":
            raise QasmSyntaxError(ln, f"unexpected token {text!r}")

        # gate application
        if text not in GATE_SIGNATURES:
            raise UnsupportedGateError(ln, text)
        n_params, n_qubits, _ = GATE_SIGNATURES[text]
        params: list[float] = []
        if p.peek() and p.peek()[1] == "(":
            p.next()
            if p.peek() and p.peek()[1] != ")":
                params.append(p.expr())
                while p.peek() and p.peek()[1] == ",":
                    p.next()
                    params.append(p.expr())
            p.expect(")")
        if len(params) != n_params:
            raise QasmSyntaxError(
                ln, f"{text} takes {n_params} parameter(s), got {len(params)}"
            )
        args = [qubit_arg(ln)]
        while p.peek() and p.peek()[1] == ",":
            p.next()
            args.append(qubit_arg(ln))
        p.expect(";")

        gate = gate_tensor(text, tuple(params))
        if len(args) == 1 and n_qubits == 1 and len(args[0]) > 1:
            # single-qubit gate over a bare register broadcasts per line
            for reg, qi in args[0]:
                circuit.ops.append(GateApp(gate, (qregs[reg][0] + qi,)))
            continue
        if len(args) != n_qubits or any(len(a) != 1 for a in args):
            raise QasmSyntaxError(ln, f"{text} expects {n_qubits} qubit argument(s)")
        flat = []
        seen = set()
        for (reg, qi), in args:
            q = qregs[reg][0] + qi
            if q in seen:
                raise DuplicateQubitError(ln, reg, qi)
            seen.add(q)
            flat.append(q)
        circuit.ops.append(GateApp(gate, tuple(flat)))

    return circuit


def validate(circuit: Circuit) -> list[Diagnostic]:
    """Re-check circuit-level invariants; returns diagnostics, empty if clean."""
    out = []
    for i, op in enumerate(circuit.ops):
        for q in op.qubits:
            if not 0 <= q < circuit.num_qubits:
                out.append(
                    Diagnostic("IndexOutOfRange", f"op {i} touches qubit {q}")
                )
        if len(set(op.qubits)) != len(op.qubits):
            out.append(Diagnostic("DuplicateQubit", f"op {i} repeats a qubit"))
        if len(op.qubits) != op.gate.num_qubits:
            out.append(Diagnostic("BadArity", f"op {i} has wrong qubit count"))
    for m in circuit.measures:
        if not 0 <= m.qubit < circuit.num_qubits:
            out.append(Diagnostic("IndexOutOfRange", f"measure on qubit {m.qubit}"))
        if not 0 <= m.clbit < circuit.num_clbits:
            out.append(Diagnostic("IndexOutOfRange", f"measure into clbit {m.clbit}"))
        if m.op_index < len(circuit.ops):
            out.append(
                Diagnostic(
                    "MeasureBeforeGate",
                    f"measure of qubit {m.qubit} precedes a gate",
                )
            )
    return out


def _fmt_param(x: float) -> str:
    return repr(x)


def unparse(circuit: Circuit) -> str:
    """Emit QASM text that parses back to a structurally identical circuit."""
    lines = ["OPENQASM 2.0;", f"qreg q[{circuit.num_qubits}];"]
    if circuit.num_clbits:
        lines.append(f"creg c[{circuit.num_clbits}];")
    for op in circuit.ops:
        head = op.gate.kind
        if op.gate.params:
            head += "(" + ",".join(_fmt_param(v) for v in op.gate.params) + ")"
        lines.append(head + " " + ",".join(f"q[{q}]" for q in op.qubits) + ";")
    for m in circuit.measures:
        lines.append(f"measure q[{m.qubit}] -> c[{m.clbit}];")
    return "\n".join(lines) + "\n"
