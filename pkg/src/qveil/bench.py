"""Programmatically generated benchmark circuits.

Everything is built from the twelve supported gate kinds; multi-controlled
gates enter pre-decomposed into Clifford+T.
"""
from __future__ import annotations

import math
import random

from .circuit import Circuit, GateKind, random_clifford_t_circuit

X, Z, H, S, T, TDG, RZ, CX, CZ = (
    GateKind.X, GateKind.Z, GateKind.H, GateKind.S, GateKind.T,
    GateKind.TDG, GateKind.RZ, GateKind.CX, GateKind.CZ,
)


def toffoli_ops(c1: int, c2: int, t: int) -> list[tuple]:
    """Clifford+T Toffoli on (c1, c2 -> t), exactly CCX including global phase.

    The first control's T gate is carried as an S...Tdg pair (diagonal gates
    commute through the controls), which keeps the one-time-pad key walk
    non-trivial on this standard worked example.
    """
    return [
        (H, t), (CX, c2, t), (TDG, t), (S, c1), (CX, c1, t), (T, t),
        (CX, c2, t), (TDG, t), (CX, c1, t), (T, c2), (T, t), (H, t),
        (CX, c1, c2), (TDG, c1), (TDG, c2), (CX, c1, c2),
    ]


def ccz_ops(a: int, b: int, c: int) -> list[tuple]:
    """Doubly-controlled Z over Clifford+T (Toffoli with the outer H pair removed)."""
    return [
        (CX, b, c), (TDG, c), (S, a), (CX, a, c), (T, c),
        (CX, b, c), (TDG, c), (CX, a, c), (T, b), (T, c),
        (CX, a, b), (TDG, a), (TDG, b), (CX, a, b),
    ]


def toffoli_circuit() -> Circuit:
    """The 3-qubit Toffoli decomposition used as the worked pipeline example."""
    return Circuit.build(3, toffoli_ops(0, 1, 2), measured=(0, 1, 2))


def mcx_ladder(n_controls: int) -> Circuit:
    """Multi-controlled X via a Toffoli ladder with n_controls-2 ancillas."""
    if n_controls < 2:
        raise ValueError("need at least 2 controls")
    if n_controls == 2:
        return toffoli_circuit()
    n_anc = n_controls - 2
    n = n_controls + n_anc + 1
    controls = list(range(n_controls))
    anc = list(range(n_controls, n_controls + n_anc))
    target = n - 1
    ops: list[tuple] = []
    ops += toffoli_ops(controls[0], controls[1], anc[0])
    for i in range(2, n_controls - 1):
        ops += toffoli_ops(controls[i], anc[i - 2], anc[i - 1])
    ops += toffoli_ops(controls[-1], anc[-1], target)
    for i in reversed(range(2, n_controls - 1)):
        ops += toffoli_ops(controls[i], anc[i - 2], anc[i - 1])
    ops += toffoli_ops(controls[0], controls[1], anc[0])
    return Circuit.build(n, ops, measured=tuple(controls) + (target,))


def vbe_adder(bits: int) -> Circuit:
    """Ripple-carry adder: registers a, b and a carry chain; b <- a + b."""
    if bits < 1:
        raise ValueError("need at least 1 bit")
    a = list(range(bits))
    b = list(range(bits, 2 * bits))
    c = list(range(2 * bits, 3 * bits + 1))
    ops: list[tuple] = []

    def carry(ci, ai, bi, cj):
        ops.extend(toffoli_ops(ai, bi, cj))
        ops.append((CX, ai, bi))
        ops.extend(toffoli_ops(ci, bi, cj))

    def uncarry(ci, ai, bi, cj):
        ops.extend(toffoli_ops(ci, bi, cj))
        ops.append((CX, ai, bi))
        ops.extend(toffoli_ops(ai, bi, cj))

    def sum_(ci, ai, bi):
        ops.append((CX, ai, bi))
        ops.append((CX, ci, bi))

    for i in range(bits):
        carry(c[i], a[i], b[i], c[i + 1])
    ops.append((CX, a[bits - 1], b[bits - 1]))
    sum_(c[bits - 1], a[bits - 1], b[bits - 1])
    for i in reversed(range(bits - 1)):
        uncarry(c[i], a[i], b[i], c[i + 1])
        sum_(c[i], a[i], b[i])
    return Circuit.build(3 * bits + 1, ops, measured=tuple(b) + (c[bits],))


def bernstein_vazirani(n: int, seed: int) -> Circuit:
    """Hidden-parity circuit with an n-bit seeded secret (target wire is last)."""
    rng = random.Random(seed)
    secret = [rng.randrange(2) for _ in range(n)]
    if not any(secret):
        secret[rng.randrange(n)] = 1
    ops: list[tuple] = [(X, n)]
    ops += [(H, q) for q in range(n + 1)]
    ops += [(CX, i, n) for i, bit in enumerate(secret) if bit]
    ops += [(H, q) for q in range(n)]
    return Circuit.build(n + 1, ops, measured=tuple(range(n)))


def grover(n: int, seed: int, iterations: int | None = None) -> Circuit:
    """Grover search over n in {2, 3} qubits with a seeded marked string."""
    if n not in (2, 3):
        raise ValueError("grover builder supports 2 or 3 qubits")
    rng = random.Random(seed)
    marked = rng.randrange(1 << n)
    if iterations is None:
        iterations = max(1, int(math.floor(math.pi / 4 * math.sqrt(1 << n))))
    ops: list[tuple] = [(H, q) for q in range(n)]

    def multi_z():
        if n == 2:
            ops.append((CZ, 0, 1))
        else:
            ops.extend(ccz_ops(0, 1, 2))

    for _ in range(iterations):
        # oracle: flip the phase of |marked>
        for q in range(n):
            if not (marked >> q) & 1:
                ops.append((X, q))
        multi_z()
        for q in range(n):
            if not (marked >> q) & 1:
                ops.append((X, q))
        # diffusion
        for q in range(n):
            ops.append((H, q))
            ops.append((X, q))
        multi_z()
        for q in range(n):
            ops.append((X, q))
            ops.append((H, q))
    return Circuit.build(n, ops, measured=tuple(range(n)))


def qft(n: int, max_distance: int | None = None) -> Circuit:
    """Quantum Fourier transform; controlled phases decomposed to CX + RZ.

    max_distance bands the rotation ladder (the standard approximate form),
    keeping angles dyadic while trimming the gate count on wide instances.
    """
    ops: list[tuple] = []
    for i in range(n):
        ops.append((H, i))
        for j in range(i + 1, n):
            d = j - i
            if max_distance is not None and d > max_distance:
                continue
            theta = math.pi / (1 << d)
            half = theta / 2
            ops.append((RZ, j, (half,)))
            ops.append((CX, j, i))
            ops.append((RZ, i, (-half,)))
            ops.append((CX, j, i))
            ops.append((RZ, i, (half,)))
    return Circuit.build(n, ops, measured=tuple(range(n)))


SUITES = ("toffoli", "adders", "grover", "bv", "qft", "random")


def suite(name: str, seed: int = 0) -> list[tuple[str, Circuit]]:
    """Named benchmark families used by the bench command."""
    if name == "toffoli":
        return [("toffoli_3q", toffoli_circuit()),
                ("mcx_4", mcx_ladder(4)),
                ("mcx_6", mcx_ladder(6))]
    if name == "adders":
        return [(f"adder_{b}bit", vbe_adder(b)) for b in (2, 3, 4)]
    if name == "grover":
        return [("grover_2", grover(2, seed)), ("grover_3", grover(3, seed))]
    if name == "bv":
        return [(f"bv_{n}", bernstein_vazirani(n, seed + n)) for n in (3, 4, 6)]
    if name == "qft":
        return [(f"qft_{n}", qft(n)) for n in (3, 4, 8)]
    if name == "random":
        return [
            (f"random_{i}", random_clifford_t_circuit(2 + i % 4, 20 + 3 * i, 0.25, seed + i))
            for i in range(6)
        ]
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


def largest_benchmark() -> tuple[str, Circuit]:
    """The widest desk-scale instance: a banded 48-qubit Fourier transform."""
    return "qft_48_banded", qft(48, max_distance=20)
