"""Gate-list circuit IR and synthesis from decision diagrams.

Qubit layout for synthesized circuits: variable qubits ``0..n-1`` (``x_i``
on qubit ``i-1``), then one qubit per internal node in topological order
(root first), then the 1-terminal qubit when a phase oracle needs one.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .diagram import (
    DegenerateNodeError,
    Diagram,
    DiagramError,
    Kind,
    topological_order,
    validate,
)

UNITARY_TOL = 1e-12
GATE_KINDS = ("X", "H", "CH", "CU", "CCX", "PHASE")


class SynthesisError(DiagramError):
    pass


class CircuitFormatError(ValueError):
    pass


Matrix2 = tuple[complex, complex, complex, complex]


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    matrix: Matrix2 | None = None
    theta: float | None = None

    def __post_init__(self):
        arity = {"X": 1, "H": 1, "PHASE": 1, "CH": 2, "CU": 2, "CCX": 3}
        if self.kind not in arity:
            raise ValueError(f"unknown gate {self.kind!r}")
        if len(self.qubits) != arity[self.kind]:
            raise ValueError(f"{self.kind} takes {arity[self.kind]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} control and target must differ: {self.qubits}")
        if self.kind == "CU":
            if self.matrix is None:
                raise ValueError("CU needs a matrix")
            m = np.array(self.matrix, dtype=complex).reshape(2, 2)
            if np.abs(m.conj().T @ m - np.eye(2)).max() > UNITARY_TOL:
                raise ValueError(f"CU matrix is not unitary: {self.matrix}")
        if self.kind == "PHASE" and self.theta is None:
            raise ValueError("PHASE needs an angle")

    @property
    def target(self) -> int:
        return self.qubits[-1]

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[:-1]

    def unitary(self) -> np.ndarray:
        """2x2 matrix applied to the target when all controls are 1."""
        if self.kind == "X" or self.kind == "CCX":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.kind in ("H", "CH"):
            return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
        if self.kind == "PHASE":
            return np.array([[1, 0], [0, np.exp(1j * self.theta)]], dtype=complex)
        return np.array(self.matrix, dtype=complex).reshape(2, 2)

    def inverse(self) -> "Gate":
        if self.kind == "PHASE":
            return Gate("PHASE", self.qubits, theta=-self.theta)
        if self.kind == "CU":
            m = np.array(self.matrix, dtype=complex).reshape(2, 2).conj().T
            return Gate("CU", self.qubits, matrix=tuple(complex(v) for v in m.ravel()))
        return self

    def remap(self, mapping: Sequence[int]) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.matrix, self.theta)


def X(t: int) -> Gate:
    return Gate("X", (t,))


def H(t: int) -> Gate:
    return Gate("H", (t,))


def CH(c: int, t: int) -> Gate:
    return Gate("CH", (c, t))


def CU(c: int, t: int, m) -> Gate:
    m = np.asarray(m, dtype=complex).reshape(4)
    return Gate("CU", (c, t), matrix=tuple(complex(v) for v in m))


def CCX(c1: int, c2: int, t: int) -> Gate:
    return Gate("CCX", (c1, c2, t))


def PHASE(t: int, theta: float) -> Gate:
    return Gate("PHASE", (t,), theta=float(theta))


CNOT_MATRIX = ((0, 1), (1, 0))


def CNOT(c: int, t: int) -> Gate:
    return CU(c, t, CNOT_MATRIX)


@dataclass(frozen=True)
class QubitLayout:
    n_vars: int
    node_qubits: dict[int, int] = field(default_factory=dict)
    terminal_qubit: int | None = None
    extra: int = 0

    @property
    def total(self) -> int:
        return self.n_vars + len(self.node_qubits) + (self.terminal_qubit is not None) + self.extra

    def var_qubit(self, i: int) -> int:
        return i - 1

    @property
    def ancillas(self) -> list[int]:
        out = sorted(self.node_qubits.values())
        if self.terminal_qubit is not None:
            out.append(self.terminal_qubit)
        return out


@dataclass(frozen=True)
class Circuit:
    layout: QubitLayout
    prep: tuple[str, ...]
    gates: tuple[Gate, ...]
    # (section, node, start, stop) spans of ``gates``; bookkeeping only.
    blocks: tuple[tuple[str, int, int, int], ...] = field(default=(), compare=False)
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.prep) != self.layout.total:
            raise ValueError("prep must list every qubit")
        for p in self.prep:
            if p not in ("0", "1", "+"):
                raise ValueError(f"bad prep value {p!r}")
        for g in self.gates:
            if max(g.qubits) >= self.layout.total:
                raise ValueError(f"gate {g} touches a qubit outside the layout")

    @property
    def num_qubits(self) -> int:
        return self.layout.total

    @property
    def counts(self) -> dict[str, int]:
        return gate_counts(self)

    def prep_gates(self) -> list[Gate]:
        """The preparation expressed as gates acting on |0...0>."""
        out = []
        for q, p in enumerate(self.prep):
            if p == "1":
                out.append(X(q))
            elif p == "+":
                out.append(H(q))
        return out

    def lowered(self) -> "Circuit":
        """Same circuit with the preparation moved into the gate list."""
        pre = self.prep_gates()
        shift = len(pre)
        blocks = tuple((s, u, a + shift, b + shift) for s, u, a, b in self.blocks)
        return Circuit(self.layout, ("0",) * self.layout.total, tuple(pre) + self.gates, blocks, self.source)

    def section(self, name: str) -> list[tuple[int, list[Gate]]]:
        return [(u, list(self.gates[a:b])) for s, u, a, b in self.blocks if s == name]


def gate_counts(c: Circuit) -> dict[str, int]:
    tally = Counter(g.kind for g in c.gates)
    return {kind: tally.get(kind, 0) for kind in GATE_KINDS}


# -- synthesis -----------------------------------------------------------


def _rotation(w0: complex, w1: complex) -> np.ndarray:
    norm = math.sqrt(abs(w0) ** 2 + abs(w1) ** 2)
    return np.array([[w0, -np.conj(w1)], [w1, np.conj(w0)]], dtype=complex) / norm


def _check(d: Diagram, weighted: bool) -> list[int]:
    if d.weighted != weighted:
        raise SynthesisError("expected a %s diagram" % ("weighted" if weighted else "unweighted"))
    report = validate(d)
    degenerate = [v for v in report.violations if v.kind == "degenerate node"]
    if degenerate:
        raise DegenerateNodeError(str(degenerate[0]))
    if not report.sound:
        raise SynthesisError("invalid diagram: " + "; ".join(map(str, report.violations)))
    if d.nodes[d.root].is_terminal:
        return []
    return topological_order(d)


def _toffoli_block(d: Diagram, u: int, layout: QubitLayout, skip: Iterable[Kind]) -> list[Gate]:
    node = d.nodes[u]
    ctrl, x = layout.node_qubits[u], layout.var_qubit(node.var)
    skip = set(skip)
    out = []
    for b in (0, 1):
        head = d.nodes[node.edge(b).head]
        if head.kind in skip:
            continue
        target = layout.terminal_qubit if head.kind is Kind.ONE else layout.node_qubits[node.edge(b).head]
        if b == 0:
            out += [X(x), CCX(ctrl, x, target), X(x)]
        else:
            out.append(CCX(ctrl, x, target))
    return out


def synth_state(d: Diagram) -> Circuit:
    """Circuit preparing the state of a weighted FBDD.

    Output on |0...0>: ``sum_z alpha(z)|z> (x) |1>_root (x) |0...0>``.
    """
    order = _check(d, weighted=True)
    if d.nodes[d.root].kind is Kind.ZERO:
        raise SynthesisError("diagram describes the zero vector")
    layout = QubitLayout(d.n, {u: d.n + k for k, u in enumerate(order)})
    prep = ["+"] * d.n + ["0"] * len(order)
    if order:
        prep[layout.node_qubits[d.root]] = "1"

    gates: list[Gate] = []
    blocks = []
    for u in order:
        start = len(gates)
        ctrl, x = layout.node_qubits[u], layout.var_qubit(d.nodes[u].var)
        gates.append(CH(ctrl, x))
        gates.append(CU(ctrl, x, _rotation(*d.weights(u))))
        gates += _toffoli_block(d, u, layout, skip=(Kind.ZERO, Kind.ONE))
        blocks.append(("main", u, start, len(gates)))
    for u in reversed(order):
        start = len(gates)
        gates += _toffoli_block(d, u, layout, skip=(Kind.ZERO, Kind.ONE))
        blocks.append(("undo", u, start, len(gates)))
    return Circuit(layout, tuple(prep), tuple(gates), tuple(blocks))


def synth_phase(d: Diagram, theta: float) -> Circuit:
    """Phase oracle ``|x>|0..0> -> e^{i theta f(x)} |x>|0..0>``.

    The root qubit is raised and lowered by explicit X gates so that every
    ancilla enters and leaves in |0>.
    """
    order = _check(d, weighted=False)
    layout = QubitLayout(
        d.n, {u: d.n + k for k, u in enumerate(order)}, terminal_qubit=d.n + len(order)
    )
    t = layout.terminal_qubit
    prep = ("0",) * layout.total
    if not order:
        if d.nodes[d.root].kind is Kind.ONE:
            gates = (X(t), PHASE(t, theta), X(t))
        else:
            gates = ()
        return Circuit(layout, prep, gates)

    root_q = layout.node_qubits[d.root]
    gates: list[Gate] = [X(root_q)]
    blocks = []
    for u in order:
        start = len(gates)
        gates += _toffoli_block(d, u, layout, skip=(Kind.ZERO,))
        blocks.append(("main", u, start, len(gates)))
    gates.append(PHASE(t, theta))
    for u in reversed(order):
        start = len(gates)
        gates += _toffoli_block(d, u, layout, skip=(Kind.ZERO,))
        blocks.append(("undo", u, start, len(gates)))
    gates.append(X(root_q))
    return Circuit(layout, prep, tuple(gates), tuple(blocks))


def inverse(gates: Sequence[Gate]) -> list[Gate]:
    return [g.inverse() for g in reversed(gates)]


# -- text format ------------------------------------------------------------


def _num(x: float) -> str:
    return format(float(x), ".17g")


def format_gate(g: Gate) -> str:
    qs = " ".join(f"q{q}" for q in g.qubits)
    if g.kind == "CU":
        vals = " ".join(f"{_num(v.real)} {_num(v.imag)}" for v in g.matrix)
        return f"CU {qs} {vals}"
    if g.kind == "PHASE":
        return f"PHASE {qs} {_num(g.theta)}"
    return f"{g.kind} {qs}"


def dumps(c: Circuit) -> str:
    lay = c.layout
    lines = [f"qubits {lay.total}", f"vars {lay.n_vars}"]
    for u, q in sorted(lay.node_qubits.items(), key=lambda kv: kv[1]):
        lines.append(f"node {u} q{q}")
    if lay.terminal_qubit is not None:
        lines.append(f"terminal q{lay.terminal_qubit}")
    if lay.extra:
        lines.append(f"extra {lay.extra}")
    for q, p in enumerate(c.prep):
        lines.append(f"prep q{q} {p}")
    lines += [format_gate(g) for g in c.gates]
    if c.source:
        lines += [f"source {line}" for line in c.source.splitlines()]
    return "\n".join(lines) + "\n"


def _qubit(tok: str) -> int:
    if not tok.startswith("q"):
        raise ValueError(f"expected a qubit like q3, got {tok!r}")
    return int(tok[1:])


def loads(text: str) -> Circuit:
    total = None
    n_vars = 0
    nodes: dict[int, int] = {}
    terminal = None
    extra = 0
    prep: dict[int, str] = {}
    gates: list[Gate] = []
    source: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("source "):
            source.append(raw[len("source "):])
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            head = tok[0]
            if head == "qubits":
                total = int(tok[1])
            elif head == "vars":
                n_vars = int(tok[1])
            elif head == "node":
                nodes[int(tok[1])] = _qubit(tok[2])
            elif head == "terminal":
                terminal = _qubit(tok[1])
            elif head == "extra":
                extra = int(tok[1])
            elif head == "prep":
                prep[_qubit(tok[1])] = tok[2]
            elif head in ("X", "H") and len(tok) == 2:
                gates.append(Gate(head, (_qubit(tok[1]),)))
            elif head == "CH" and len(tok) == 3:
                gates.append(CH(_qubit(tok[1]), _qubit(tok[2])))
            elif head == "CCX" and len(tok) == 4:
                gates.append(CCX(*(_qubit(t) for t in tok[1:])))
            elif head == "PHASE" and len(tok) == 3:
                gates.append(PHASE(_qubit(tok[1]), float(tok[2])))
            elif head == "CU" and len(tok) == 11:
                vals = [float(t) for t in tok[3:]]
                m = [complex(vals[2 * k], vals[2 * k + 1]) for k in range(4)]
                gates.append(CU(_qubit(tok[1]), _qubit(tok[2]), m))
            else:
                raise ValueError(f"unrecognised line {line!r}")
        except (ValueError, IndexError) as exc:
            raise CircuitFormatError(f"line {lineno}: {exc}") from None
    if total is None:
        raise CircuitFormatError("missing 'qubits' line")
    if not n_vars and not nodes and terminal is None:
        # Bare gate list: treat the whole register as open inputs.
        extra = total
    layout = QubitLayout(n_vars, nodes, terminal, extra)
    if layout.total != total:
        raise CircuitFormatError(f"layout declares {layout.total} qubits, header says {total}")
    prep_t = tuple(prep.get(q, "0") for q in range(total))
    try:
        return Circuit(layout, prep_t, tuple(gates), source="\n".join(source) + "\n" if source else None)
    except ValueError as exc:
        raise CircuitFormatError(str(exc)) from None
