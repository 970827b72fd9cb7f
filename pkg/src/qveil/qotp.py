"""Quantum one-time-pad circuit encryption.

The key is a pair of bit vectors (a, b) realizing X^a Z^b.  Clifford gates
rewrite the key as they commute past it; T/Tdg (and RZ) are replaced by an
RZ whose angle sign carries the key bit, leaving the key itself unchanged.
Measurement counts decrypt classically: a-bits flip measured bits, b-bits
vanish in computational-basis statistics.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace

from .circuit import CLIFFORD_KINDS, Circuit, Gate, GateKind


class QotpError(ValueError):
    pass


@dataclass(frozen=True)
class PauliKey:
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise QotpError(f"|a|={len(self.a)} and |b|={len(self.b)} differ")
        if not all(bit in (0, 1) for bit in self.a + self.b):
            raise QotpError("key bits must be 0/1")

    @property
    def n(self) -> int:
        return len(self.a)

    def to_json(self) -> dict:
        return {"a": "".join(map(str, self.a)), "b": "".join(map(str, self.b))}

    @classmethod
    def from_json(cls, obj: dict) -> "PauliKey":
        return cls(tuple(int(ch) for ch in obj["a"]), tuple(int(ch) for ch in obj["b"]))


@dataclass(frozen=True)
class EncryptionResult:
    enc_circuit: Circuit              # server-visible circuit: replaced gates, no Pauli prefix
    enc_prefix: Circuit               # X^a then Z^b realizing the input encryption
    ek: PauliKey
    dk: PauliKey
    replacement_log: tuple[tuple[int, str, int], ...]  # (uid, original kind, angle sign)


def keygen(n: int, seed: int) -> PauliKey:
    """Uniform key over {0,1}^n x {0,1}^n, deterministic per seed."""
    if n < 1:
        raise QotpError("key width must be >= 1")
    rng = random.Random(seed)
    return PauliKey(
        tuple(rng.randrange(2) for _ in range(n)),
        tuple(rng.randrange(2) for _ in range(n)),
    )


def update_key_clifford(kind: GateKind, wires: tuple[int, ...], key: PauliKey) -> PauliKey:
    """Rewrite the key across one Clifford gate (X/Y/Z leave it unchanged)."""
    if kind not in CLIFFORD_KINDS:
        raise QotpError(f"{kind.value} has no Clifford key-update rule")
    for w in wires:
        if not 0 <= w < key.n:
            raise QotpError(f"wire {w} out of range for width {key.n}")
    a, b = list(key.a), list(key.b)
    if kind in (GateKind.X, GateKind.Y, GateKind.Z):
        pass
    elif kind is GateKind.H:
        (q,) = wires
        a[q], b[q] = b[q], a[q]
    elif kind in (GateKind.S, GateKind.SDG):
        (q,) = wires
        b[q] ^= a[q]
    elif kind is GateKind.CX:
        c, t = wires
        b[c] ^= b[t]
        a[t] ^= a[c]
    elif kind is GateKind.CZ:
        c, t = wires
        bc, bt = b[c] ^ a[t], b[t] ^ a[c]
        b[c], b[t] = bc, bt
    return PauliKey(tuple(a), tuple(b))


def update_key_u3(params: tuple[float, float, float, float], a: int, b: int):
    """Angle rewrite for a generic single-qubit gate commuted past X^a Z^b.

    Takes (alpha, beta, gamma, delta) of U = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta);
    the key is unchanged.  Client-side only: using this as the server-visible
    replacement for T would leak key bits.
    """
    alpha, beta, gamma, delta = params
    sa = -1.0 if a else 1.0
    sab = -1.0 if (a + b) % 2 else 1.0
    return (alpha, sa * beta, sab * gamma, sa * delta)


def replaced_rz_angle(kind: GateKind, a_bit: int, angle: float | None = None) -> float:
    """Server-visible RZ angle replacing T/Tdg/RZ under key bit a."""
    sign = -1.0 if a_bit else 1.0
    if kind is GateKind.T:
        return sign * math.pi / 4
    if kind is GateKind.TDG:
        return sign * -(math.pi / 4)
    if kind is GateKind.RZ:
        return sign * angle
    raise QotpError(f"{kind.value} is not replaced by RZ")


def replace_t_gate(g: Gate, a_bit: int) -> Gate:
    """T -> RZ((-1)^a pi/4), Tdg -> RZ((-1)^a (-pi/4)); uid and wire preserved."""
    if g.kind not in (GateKind.T, GateKind.TDG):
        raise QotpError(f"replace_t_gate expects T/Tdg, got {g.kind.value}")
    angle = replaced_rz_angle(g.kind, a_bit)
    return Gate(GateKind.RZ, g.qubits, (angle,), uid=g.uid, inserted=g.inserted)


def encrypt_circuit(c: Circuit, ek: PauliKey) -> EncryptionResult:
    """Walk the circuit left to right, replacing non-Clifford phase gates and
    rewriting the key across Clifford gates; the final key is dk."""
    if ek.n != c.n_qubits:
        raise QotpError(f"key width {ek.n} does not match circuit width {c.n_qubits}")
    key = ek
    out_gates: list[Gate] = []
    log: list[tuple[int, str, int]] = []
    for g in c.gates:
        if g.kind in (GateKind.T, GateKind.TDG):
            a_bit = key.a[g.qubits[0]]
            out_gates.append(replace_t_gate(g, a_bit))
            log.append((g.uid, g.kind.value, -1 if a_bit else 1))
        elif g.kind is GateKind.RZ:
            a_bit = key.a[g.qubits[0]]
            angle = replaced_rz_angle(GateKind.RZ, a_bit, g.params[0])
            out_gates.append(replace(g, params=(angle,)))
            log.append((g.uid, g.kind.value, -1 if a_bit else 1))
        elif g.kind in CLIFFORD_KINDS:
            key = update_key_clifford(g.kind, g.qubits, key)
            out_gates.append(g)
        else:
            raise QotpError(
                f"unsupported gate kind '{g.kind.value}' in encryption input "
                "(only Clifford+T and RZ are accepted)"
            )
    prefix_ops = [(GateKind.X, q) for q, bit in enumerate(ek.a) if bit]
    prefix_ops += [(GateKind.Z, q) for q, bit in enumerate(ek.b) if bit]
    enc_prefix = Circuit.build(c.n_qubits, prefix_ops)
    enc_circuit = Circuit(c.n_qubits, tuple(out_gates), c.measured_qubits)
    return EncryptionResult(enc_circuit, enc_prefix, ek, key, tuple(log))


def decrypt_counts(
    counts: dict[str, int],
    dk: PauliKey,
    measured: tuple[int, ...] | None = None,
) -> dict[str, int]:
    """Classical decryption: XOR each bitstring with dk.a on the measured wires.

    Z-bits act trivially on computational-basis statistics.  Counts values and
    the shot total are preserved.
    """
    qubits = tuple(range(dk.n)) if measured is None else tuple(sorted(measured))
    out: dict[str, int] = {}
    for bits, cnt in counts.items():
        if len(bits) != len(qubits):
            raise QotpError(
                f"bitstring length {len(bits)} does not match {len(qubits)} measured wires"
            )
        flipped = "".join(
            str(int(ch) ^ dk.a[q]) for ch, q in zip(bits, qubits)
        )
        out[flipped] = out.get(flipped, 0) + cnt
    return out
