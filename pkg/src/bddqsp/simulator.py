"""Sparse state-vector simulation and the amplitude oracles it is checked against.

Basis states are integers with qubit 0 as the most significant bit, so the
bit string of a state reads ``q0 q1 ... q_{N-1}`` left to right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, Gate
from .diagram import Diagram, amplitude, index_to_bits

PRUNE = 1e-14
NORM_TOL = 1e-9
COMPARE_TOL = 1e-10
MAX_QUBITS = 64
MAX_SUPPORT = 2**20
DENSE_MAX_QUBITS = 16
UNITARY_MAX_QUBITS = 14


class SimulationError(RuntimeError):
    pass


class ResourceError(SimulationError):
    pass


@dataclass
class SparseState:
    num_qubits: int
    amps: dict[int, complex]
    peak_support: int = field(default=0, compare=False)

    def __getitem__(self, key: int | str) -> complex:
        if isinstance(key, str):
            key = int(key, 2)
        return self.amps.get(key, 0j)

    def __len__(self) -> int:
        return len(self.amps)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.amps.values()))

    def to_dense(self) -> np.ndarray:
        vec = np.zeros(2**self.num_qubits, dtype=complex)
        for k, a in self.amps.items():
            vec[k] = a
        return vec

    def bitstring(self, k: int) -> str:
        return format(k, f"0{self.num_qubits}b") if self.num_qubits else ""

    def dumps(self) -> str:
        rows = sorted((self.bitstring(k), a) for k, a in self.amps.items())
        return "".join(f"{b} {a.real:.17g} {a.imag:.17g}\n" for b, a in rows)


def _initial(num_qubits: int, initial: int | str | None) -> int:
    if initial is None:
        return 0
    if isinstance(initial, str):
        if len(initial) != num_qubits:
            raise ValueError(f"initial state needs {num_qubits} bits, got {initial!r}")
        return int(initial, 2) if initial else 0
    return int(initial)


def apply_gate(amps: Mapping[int, complex], gate: Gate, num_qubits: int) -> dict[int, complex]:
    mask = 1 << (num_qubits - 1 - gate.target)
    cmask = 0
    for c in gate.controls:
        cmask |= 1 << (num_qubits - 1 - c)
    m = gate.unitary()
    out: dict[int, complex] = {}
    for k, a in amps.items():
        if k & cmask != cmask:
            out[k] = out.get(k, 0j) + a
            continue
        b = 1 if k & mask else 0
        k0, k1 = k & ~mask, k | mask
        c0, c1 = m[0, b] * a, m[1, b] * a
        if c0 != 0:
            out[k0] = out.get(k0, 0j) + c0
        if c1 != 0:
            out[k1] = out.get(k1, 0j) + c1
    return {k: a for k, a in out.items() if abs(a) >= PRUNE}


def simulate(
    c: Circuit,
    initial: int | str | None = None,
    *,
    check_norm: bool = True,
    max_qubits: int = MAX_QUBITS,
    max_support: int = MAX_SUPPORT,
) -> SparseState:
    """Run the preparation and every gate of ``c`` on a basis state.

    ``initial`` defaults to |0...0>; the prep column of the circuit is applied
    on top of it (|1> as X, |+> as H).
    """
    nq = c.num_qubits
    if nq > max_qubits:
        raise ResourceError(f"{nq} qubits exceeds the cap of {max_qubits}")
    amps: dict[int, complex] = {_initial(nq, initial): 1 + 0j}
    peak = 1
    for gate in c.prep_gates() + list(c.gates):
        amps = apply_gate(amps, gate, nq)
        peak = max(peak, len(amps))
        if peak > max_support:
            raise ResourceError(f"support grew past {max_support} entries")
        if check_norm:
            norm2 = sum(abs(a) ** 2 for a in amps.values())
            if abs(norm2 - 1) > NORM_TOL:
                raise SimulationError(f"norm drifted to {norm2} after {gate}")
    return SparseState(nq, amps, peak)


# -- dense reference --------------------------------------------------------


def _apply_dense(state: np.ndarray, gate: Gate, nq: int) -> np.ndarray:
    """Apply ``gate`` to a (2,)*nq [+ batch] tensor."""
    m = gate.unitary()
    idx_ctrl = [slice(None)] * state.ndim
    for c in gate.controls:
        idx_ctrl[c] = 1
    sub = state[tuple(idx_ctrl)]
    # Target axis shifts left by the number of controls preceding it.
    t_axis = gate.target - sum(1 for c in gate.controls if c < gate.target)
    moved = np.moveaxis(sub, t_axis, 0)
    new = np.tensordot(m, moved, axes=([1], [0]))
    out = state.copy()
    out[tuple(idx_ctrl)] = np.moveaxis(new, 0, t_axis)
    return out


def simulate_dense(c: Circuit, initial: int | str | None = None) -> np.ndarray:
    nq = c.num_qubits
    if nq > DENSE_MAX_QUBITS:
        raise ResourceError(f"dense simulation capped at {DENSE_MAX_QUBITS} qubits")
    vec = np.zeros(2**nq, dtype=complex)
    vec[_initial(nq, initial)] = 1
    state = vec.reshape((2,) * nq) if nq else vec
    for gate in c.prep_gates() + list(c.gates):
        state = _apply_dense(state, gate, nq)
    return state.reshape(-1)


def unitary_of(c: Circuit, columns: Sequence[int] | None = None) -> np.ndarray:
    """Columns of the circuit unitary (prep included as gates).

    ``columns`` selects input basis states; by default the full matrix is
    built, which is only allowed up to 14 qubits.
    """
    nq = c.num_qubits
    if columns is None:
        if nq > UNITARY_MAX_QUBITS:
            raise ResourceError(f"full unitary capped at {UNITARY_MAX_QUBITS} qubits")
        columns = range(2**nq)
    columns = list(columns)
    out = np.zeros((2**nq, len(columns)), dtype=complex)
    for j, k in enumerate(columns):
        st = simulate(c, k)
        for row, a in st.amps.items():
            out[row, j] = a
    return out


def unitary_dense(c: Circuit) -> np.ndarray:
    """Full unitary by batched dense simulation (cross-check, <= 12 qubits)."""
    nq = c.num_qubits
    if nq > 12:
        raise ResourceError("dense unitary capped at 12 qubits")
    dim = 2**nq
    state = np.eye(dim, dtype=complex).reshape((2,) * nq + (dim,))
    for gate in c.prep_gates() + list(c.gates):
        state = _apply_dense(state, gate, nq)
    return state.reshape(dim, dim)


# -- oracles and comparison -------------------------------------------------


def brute_force_state(d: Diagram) -> SparseState:
    """State of a weighted diagram evaluated amplitude by amplitude."""
    if d.n > 20:
        raise ResourceError("brute force limited to 20 variables")
    amps = {}
    for k in range(2**d.n):
        a = amplitude(d, index_to_bits(k, d.n))
        if a != 0:
            amps[k] = a
    return SparseState(d.n, amps, len(amps))


@dataclass(frozen=True)
class ComparisonReport:
    max_abs_error: float
    fidelity: float
    worst: str
    factorizes: bool
    leaked: float

    def ok(self, tol: float = 1e-9) -> bool:
        return self.factorizes and self.fidelity >= 1 - tol


def compare(
    a: SparseState,
    b: SparseState,
    ancillas: Mapping[int, int] | None = None,
) -> ComparisonReport:
    """Compare ``a`` against the reference ``b``.

    ``ancillas`` maps qubits of ``a`` to the basis value they must hold; the
    remaining qubits of ``a`` (in order) must line up with ``b``.
    """
    ancillas = dict(ancillas or {})
    keep = [q for q in range(a.num_qubits) if q not in ancillas]
    if len(keep) != b.num_qubits:
        raise ValueError(
            f"{len(keep)} non-ancilla qubits in the first state vs {b.num_qubits} in the second"
        )
    na = a.num_qubits
    reduced: dict[int, complex] = {}
    leaked = 0.0
    worst_err, worst = 0.0, ""
    for k, amp in a.amps.items():
        bits = [(k >> (na - 1 - q)) & 1 for q in range(na)]
        if any(bits[q] != v for q, v in ancillas.items()):
            leaked = max(leaked, abs(amp))
            if abs(amp) > worst_err:
                worst_err, worst = abs(amp), a.bitstring(k)
            continue
        key = 0
        for q in keep:
            key = (key << 1) | bits[q]
        reduced[key] = reduced.get(key, 0j) + amp
    overlap = 0j
    for key in set(reduced) | set(b.amps):
        ra, rb = reduced.get(key, 0j), b.amps.get(key, 0j)
        overlap += np.conj(rb) * ra
        err = abs(ra - rb)
        if err > worst_err:
            worst_err, worst = err, b.bitstring(key)
    fidelity = float(abs(overlap) ** 2)
    return ComparisonReport(worst_err, fidelity, worst, leaked <= COMPARE_TOL, leaked)


def synth_ancillas(c: Circuit, root_qubit: int | None) -> dict[int, int]:
    """Expected ancilla values after a state-preparation circuit."""
    return {q: int(q == root_qubit) for q in c.layout.ancillas}
