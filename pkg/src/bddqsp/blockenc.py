"""Block encodings built from the state-preparation circuit.

Register order is ``[variables | node ancillas | system]``.  The variable
and node registers together form the block-encoding ancilla (``a = n +
#internal nodes``) and the system register holds the encoded operator.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce as _fold
from typing import Sequence

import numpy as np

from .circuit import CNOT, CU, Circuit, Gate, QubitLayout, X, inverse, synth_state
from .diagram import Diagram, index_to_bits
from .simulator import UNITARY_MAX_QUBITS, brute_force_state, simulate

I2 = np.eye(2, dtype=complex)
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class ControlledFamily:
    """V_z = G[0][z_1] (x) G[1][z_2] (x) ... with one gate pair per bit."""

    gates: tuple[tuple[np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        for pair in self.gates:
            for g in pair:
                g = np.asarray(g, dtype=complex)
                if g.shape != (2, 2) or np.abs(g.conj().T @ g - I2).max() > 1e-12:
                    raise ValueError("family gates must be 2x2 unitaries")

    @property
    def n(self) -> int:
        return len(self.gates)

    def matrix(self, z: Sequence[int]) -> np.ndarray:
        return _fold(np.kron, [np.asarray(self.gates[i][b], dtype=complex) for i, b in enumerate(z)])

    @classmethod
    def uniform(cls, n: int, g0, g1) -> "ControlledFamily":
        return cls(tuple((np.asarray(g0, dtype=complex), np.asarray(g1, dtype=complex)) for _ in range(n)))

    @classmethod
    def identity(cls, n: int) -> "ControlledFamily":
        return cls.uniform(n, I2, I2)

    @classmethod
    def pauli_z(cls, n: int) -> "ControlledFamily":
        return cls.uniform(n, I2, PAULI_Z)


@dataclass(frozen=True)
class BlockEncodingSpec:
    circuit: Circuit
    alpha: float
    ancilla_qubits: tuple[int, ...]
    system_qubits: tuple[int, ...]
    block: np.ndarray | None
    target: np.ndarray | None
    epsilon: float | None

    @property
    def num_ancillas(self) -> int:
        return len(self.ancilla_qubits)


def _prepare(d: Diagram) -> tuple[list[Gate], int, QubitLayout]:
    """U_f on [vars | nodes] as explicit gates from |0...0>, ancillas back to |0>."""
    c = synth_state(d)
    gates = c.prep_gates() + list(c.gates)
    if c.layout.node_qubits:
        gates.append(X(c.layout.node_qubits[d.root]))
    return gates, c.layout.total, c.layout


def _swap(a: int, b: int) -> list[Gate]:
    return [CNOT(a, b), CNOT(b, a), CNOT(a, b)]


def _finish(d: Diagram, gates: list[Gate], width: int, layout: QubitLayout, target: np.ndarray, verify: bool):
    n = d.n
    total = width + n
    lay = QubitLayout(n, dict(layout.node_qubits), None, extra=n)
    circuit = Circuit(lay, ("0",) * total, tuple(gates))
    system = tuple(range(width, total))
    block = eps = None
    if verify:
        if total > UNITARY_MAX_QUBITS:
            warnings.warn(
                f"{total} qubits exceeds the {UNITARY_MAX_QUBITS}-qubit verification cap; "
                "block encoding emitted without verification",
                stacklevel=3,
            )
        else:
            block = extract_block(circuit, width, n)
            eps = float(np.linalg.norm(block - target, ord=2))
    return BlockEncodingSpec(circuit, 1.0, tuple(range(width)), system, block, target, eps)


def extract_block(c: Circuit, num_ancillas: int, num_system: int) -> np.ndarray:
    """(<0|^a (x) I) U (|0>^a (x) I) for ancillas on the leading qubits."""
    dim = 2**num_system
    block = np.zeros((dim, dim), dtype=complex)
    for y in range(dim):
        st = simulate(c, y)
        for row, amp in st.amps.items():
            if row < dim:  # leading ancilla bits all zero
                block[row, y] = amp
    return block


def state_vector(d: Diagram) -> np.ndarray:
    return brute_force_state(d).to_dense()


def projector_encoding(d: Diagram, verify: bool = True) -> BlockEncodingSpec:
    """(U_f^dag (x) I) SWAP (U_f (x) I), encoding |psi_f><psi_f|."""
    prep, width, layout = _prepare(d)
    n = d.n
    swaps = [g for i in range(n) for g in _swap(i, width + i)]
    gates = prep + swaps + inverse(prep)
    psi = state_vector(d)
    return _finish(d, gates, width, layout, np.outer(psi, psi.conj()), verify)


def gram_target(d: Diagram, fam: ControlledFamily) -> np.ndarray:
    """A = sum_z |c_z|^2 f(z) V_z, summed directly."""
    dim = 2**d.n
    psi = state_vector(d)
    A = np.zeros((dim, dim), dtype=complex)
    for k in range(dim):
        if abs(psi[k]) > 0:
            A += abs(psi[k]) ** 2 * fam.matrix(index_to_bits(k, d.n))
    return A


def gram_encoding(d: Diagram, fam: ControlledFamily, verify: bool = True) -> BlockEncodingSpec:
    """U_R^dag U_L with U_L = controlled-V after U_f and U_R = U_f."""
    if fam.n != d.n:
        raise ValueError(f"family acts on {fam.n} qubits, diagram has {d.n} variables")
    prep, width, layout = _prepare(d)
    controlled: list[Gate] = []
    for i, (g0, g1) in enumerate(fam.gates):
        controlled += [X(i), CU(i, width + i, g0), X(i), CU(i, width + i, g1)]
    gates = prep + controlled + inverse(prep)
    return _finish(d, gates, width, layout, gram_target(d, fam), verify)
