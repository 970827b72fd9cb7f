"""Dense statevector oracle used by every correctness property.

Qubit i is bit i of the amplitude index; bitstring keys put qubit 0 in the
leftmost character position.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .circuit import Circuit, Gate, GateKind
from .config import DEFAULT_SIM_CAP, TOL


class SimulationError(ValueError):
    pass


_SQ2 = 1.0 / math.sqrt(2.0)
_FIXED_1Q = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.T: np.array([[1, 0], [0, cmath.exp(0.25j * math.pi)]], dtype=complex),
    GateKind.TDG: np.array([[1, 0], [0, cmath.exp(-0.25j * math.pi)]], dtype=complex),
}


def gate_matrix(kind: GateKind, params: tuple[float, ...] = ()) -> np.ndarray:
    """2x2 matrix of a single-qubit gate (u3 in the standard OpenQASM convention)."""
    if kind in _FIXED_1Q:
        return _FIXED_1Q[kind].copy()
    if kind is GateKind.RZ:
        (theta,) = params
        return np.array(
            [[cmath.exp(-0.5j * theta), 0], [0, cmath.exp(0.5j * theta)]], dtype=complex
        )
    if kind is GateKind.U3:
        theta, phi, lam = params
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array(
            [
                [c, -cmath.exp(1j * lam) * s],
                [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
            ],
            dtype=complex,
        )
    raise SimulationError(f"no single-qubit matrix for {kind.value}")


@dataclass
class State:
    n_qubits: int
    amps: np.ndarray

    def copy(self) -> "State":
        return State(self.n_qubits, self.amps.copy())

    @classmethod
    def zero(cls, n_qubits: int) -> "State":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)


def _apply_gate(amps: np.ndarray, n: int, g: Gate) -> None:
    if g.kind is GateKind.CX:
        _kernels.apply_cx(amps, n, g.qubits[0], g.qubits[1])
    elif g.kind is GateKind.CZ:
        _kernels.apply_cz(amps, n, g.qubits[0], g.qubits[1])
    else:
        m = gate_matrix(g.kind, g.params)
        _kernels.apply_1q(amps, n, g.qubits[0], m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def simulate(c: Circuit, initial: State | None = None, cap: int = DEFAULT_SIM_CAP) -> State:
    """Apply the circuit's gates in order to |0...0> (or `initial`)."""
    if c.n_qubits > cap:
        raise SimulationError(f"width {c.n_qubits} exceeds simulation cap {cap}")
    if initial is None:
        state = State.zero(c.n_qubits)
    else:
        if initial.n_qubits != c.n_qubits:
            raise SimulationError("initial state width mismatch")
        state = initial.copy()
    for g in c.gates:
        _apply_gate(state.amps, c.n_qubits, g)
    norm = np.linalg.norm(state.amps)
    if abs(norm - 1.0) > TOL.norm:
        raise SimulationError(f"statevector norm drifted to {norm}")
    return state


def _bitstring(value: int, qubits: tuple[int, ...]) -> str:
    return "".join(str((value >> j) & 1) for j in range(len(qubits)))


def exact_distribution(state: State, measured: tuple[int, ...] | None = None) -> dict[str, float]:
    """Marginal Born probabilities over the measured qubits (all qubits by default)."""
    n = state.n_qubits
    qubits = tuple(range(n)) if measured is None else tuple(sorted(measured))
    probs = np.abs(state.amps) ** 2
    indices = np.arange(1 << n)
    key = np.zeros(1 << n, dtype=np.int64)
    for j, q in enumerate(qubits):
        key |= ((indices >> q) & 1) << j
    marg = np.bincount(key, weights=probs, minlength=1 << len(qubits))
    total = marg.sum()
    if abs(total - 1.0) > TOL.norm:
        raise SimulationError(f"probabilities sum to {total}")
    return {
        _bitstring(v, qubits): float(p)
        for v, p in enumerate(marg)
        if p > 1e-15
    }


def sample_counts(
    state: State,
    shots: int,
    seed: int,
    measured: tuple[int, ...] | None = None,
) -> dict[str, int]:
    """Multinomial draw from the exact distribution; deterministic per seed."""
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    dist = exact_distribution(state, measured)
    keys = sorted(dist)
    p = np.array([dist[k] for k in keys])
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, p)
    return {k: int(cnt) for k, cnt in zip(keys, draws) if cnt > 0}


def fidelity(s1: State, s2: State) -> float:
    if s1.n_qubits != s2.n_qubits:
        raise SimulationError("width mismatch")
    return float(abs(np.vdot(s1.amps, s2.amps)) ** 2)


def states_equal_up_to_phase(s1: State, s2: State, tol: float = TOL.state_phase) -> bool:
    return 1.0 - abs(np.vdot(s1.amps, s2.amps)) <= tol


def apply_pauli_frame(state: State, key) -> State:
    """Apply X on wires with a=1, then Z on wires with b=1."""
    if len(key.a) != state.n_qubits:
        raise SimulationError("key width mismatch")
    out = state.copy()
    for q, bit in enumerate(key.a):
        if bit:
            _kernels.apply_1q(out.amps, out.n_qubits, q, 0, 1, 1, 0)
    for q, bit in enumerate(key.b):
        if bit:
            _kernels.apply_1q(out.amps, out.n_qubits, q, 1, 0, 0, -1)
    return out


def unitary_of(c: Circuit, cap: int = 10) -> np.ndarray:
    """Full matrix of the circuit, built by kron expansion (oracle-sized widths only)."""
    if c.n_qubits > cap:
        raise SimulationError(f"unitary_of capped at {cap} qubits")
    n = c.n_qubits
    dim = 1 << n
    U = np.eye(dim, dtype=complex)
    for g in c.gates:
        U = _gate_unitary(g, n) @ U
    return U


def _gate_unitary(g: Gate, n: int) -> np.ndarray:
    dim = 1 << n
    if g.kind is GateKind.CX:
        c, t = g.qubits
        M = np.zeros((dim, dim), dtype=complex)
        idx = np.arange(dim)
        flipped = np.where((idx >> c) & 1 == 1, idx ^ (1 << t), idx)
        M[flipped, idx] = 1.0
        return M
    if g.kind is GateKind.CZ:
        c, t = g.qubits
        diag = np.ones(dim, dtype=complex)
        idx = np.arange(dim)
        both = ((idx >> c) & 1) & ((idx >> t) & 1)
        diag[both == 1] = -1.0
        return np.diag(diag)
    m = gate_matrix(g.kind, g.params)
    q = g.qubits[0]
    # kron ordering: qubit 0 is the least significant factor
    M = np.array([[1.0]], dtype=complex)
    for i in range(n):
        M = np.kron(m, M) if i == q else np.kron(np.eye(2, dtype=complex), M)
    return M


def matrices_equal_up_to_phase(A: np.ndarray, B: np.ndarray, tol: float = TOL.state_phase) -> bool:
    r, c = np.unravel_index(np.argmax(np.abs(B)), B.shape)
    if abs(A[r, c]) < tol:
        return False
    phase = B[r, c] / A[r, c]
    if abs(abs(phase) - 1.0) > 1e-6:
        return False
    return bool(np.max(np.abs(A * phase - B)) <= tol)


def key_averaged_density(state: State) -> np.ndarray:
    """Average the one-time-padded projector over all 4^n Pauli keys."""
    from .qotp import PauliKey  # local import to avoid a cycle

    n = state.n_qubits
    dim = 1 << n
    rho = np.zeros((dim, dim), dtype=complex)
    for a_bits in range(dim):
        for b_bits in range(dim):
            key = PauliKey(
                tuple((a_bits >> i) & 1 for i in range(n)),
                tuple((b_bits >> i) & 1 for i in range(n)),
            )
            psi = apply_pauli_frame(state, key).amps
            rho += np.outer(psi, psi.conj())
    return rho / (4 ** n)
