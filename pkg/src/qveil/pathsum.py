"""Path-sum circuit semantics and equivalence checking.

A circuit over x inputs becomes (1/sqrt(2^m)) * sum_y e^{2 pi i phi(x,y)} |f(x,y)><x|
with one path variable y per Hadamard, a multilinear phase polynomial phi with
dyadic coefficients mod 1, and affine-over-GF(2) output forms f.  Equality of
two such sums is decided either canonically (coefficient-wise) or by sampling
the polynomials at uniform boolean points, where a single differing point is a
counterexample and agreement on all samples certifies equivalence with high
probability (random evaluation of a low-degree polynomial rarely hides a
nonzero difference).
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import _kernels
from .circuit import Circuit, Gate, GateKind
from .config import DEFAULT_RATIO, DEFAULT_SAMPLES, TOL, stage_seed


class PathsumError(ValueError):
    pass


_MAX_EXPANSION = 1 << 21  # per-gate monomial budget; structured circuits stay tiny
_MAX_DYADIC_DEN = 1 << 26

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class AffineForm:
    """XOR of variables plus a constant bit."""

    vars: frozenset[int]
    const: int = 0

    def flip(self) -> "AffineForm":
        return AffineForm(self.vars, self.const ^ 1)

    def xor(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(self.vars ^ other.vars, self.const ^ other.const)

    def evaluate(self, bits) -> int:
        v = self.const
        for i in self.vars:
            v ^= bits[i]
        return v


@dataclass
class PathSum:
    n: int
    m: int
    phase: dict[frozenset[int], Fraction]
    outputs: tuple[AffineForm, ...]
    global_phase: Fraction

    @property
    def n_vars(self) -> int:
        return self.n + self.m


@dataclass(frozen=True)
class EquivVerdict:
    equal: bool
    witness: object = None       # assignment dict, structural reason string, or None
    samples_used: int = 0
    mode: str = "canonical"

    def to_json(self) -> dict:
        return {
            "equal": self.equal,
            "witness": self.witness,
            "samples_used": self.samples_used,
            "mode": self.mode,
        }


class _Builder:
    def __init__(self, n: int):
        self.n = n
        self.m = 0
        self.phase: dict[frozenset[int], Fraction] = {}
        self.outputs = [AffineForm(frozenset({i})) for i in range(n)]
        self.global_phase = Fraction(0)

    def add_global(self, c: Fraction) -> None:
        self.global_phase = (self.global_phase + c) % 1

    def _add_monomial(self, mono: frozenset[int], c: Fraction) -> None:
        c %= 1
        if not c:
            return
        cur = (self.phase.get(mono, Fraction(0)) + c) % 1
        if cur:
            self.phase[mono] = cur
        else:
            self.phase.pop(mono, None)

    def add_affine(self, coeff: Fraction, form: AffineForm) -> None:
        """phase += coeff * form, with the XOR lifted to multilinear monomials.

        Degree-d terms carry coeff * (-2)^(d-1), so only d up to the dyadic
        level of coeff survive mod 1.
        """
        coeff %= 1
        if not coeff:
            return
        if form.const:
            self.add_global(coeff)
            coeff = -coeff % 1
        level = coeff.denominator.bit_length() - 1
        vs = sorted(form.vars)
        max_d = min(level, len(vs))
        total = sum(math.comb(len(vs), d) for d in range(1, max_d + 1))
        if total > _MAX_EXPANSION:
            raise PathsumError(
                f"phase expansion too large ({total} monomials from a "
                f"{len(vs)}-variable form at dyadic level {level})"
            )
        sign_pow = Fraction(1)
        for d in range(1, max_d + 1):
            term = coeff * sign_pow  # coeff * (-2)^(d-1)
            for sub in combinations(vs, d):
                self._add_monomial(frozenset(sub), term)
            sign_pow *= -2

    def add_half_product(self, f: AffineForm, g: AffineForm) -> None:
        """phase += (1/2) * f * g; only degree <= 2 terms survive mod 1."""
        if f.const and g.const:
            self.add_global(HALF)
        if f.const:
            for j in g.vars:
                self._add_monomial(frozenset({j}), HALF)
        if g.const:
            for i in f.vars:
                self._add_monomial(frozenset({i}), HALF)
        for i in f.vars:
            for j in g.vars:
                self._add_monomial(frozenset({i, j}), HALF)

    def fresh_path_var(self) -> int:
        y = self.n + self.m
        self.m += 1
        return y


def _dyadic_turns(theta: float) -> Fraction:
    """theta/(2*pi) as an exact dyadic fraction, or raise."""
    x = theta / (2.0 * math.pi)
    frac = Fraction(x).limit_denominator(_MAX_DYADIC_DEN)
    den = frac.denominator
    if den & (den - 1) or abs(x - frac) > TOL.angle_snap:
        raise PathsumError(f"angle {theta} is not a dyadic multiple of pi")
    return frac


def _apply_rz(b: _Builder, q: int, turns: Fraction) -> None:
    b.add_affine(turns, b.outputs[q])
    b.add_global(-turns / 2)


def _apply_h(b: _Builder, q: int) -> None:
    y = AffineForm(frozenset({b.fresh_path_var()}))
    b.add_half_product(b.outputs[q], y)
    b.outputs[q] = y


def _apply_u3(b: _Builder, q: int, params: tuple[float, float, float]) -> None:
    """u3 = e^{i(phi+lam)/2} Rz(phi) Ry(theta) Rz(lam), with Ry(theta) exact for
    theta in multiples of pi/2: I, H.Z, X.Z, Z.H."""
    theta, phi, lam = params
    quarter = (theta / (math.pi / 2)) % 4.0
    k = round(quarter) % 4
    if abs(quarter - round(quarter)) * (math.pi / 2) > TOL.angle_snap:
        raise PathsumError(
            f"u3 theta {theta} not a multiple of pi/2; cannot be represented exactly"
        )
    t_phi = _dyadic_turns(phi)
    t_lam = _dyadic_turns(lam)
    _apply_rz(b, q, t_lam)
    if k == 1:      # Ry(pi/2) = H Z
        b.add_affine(HALF, b.outputs[q])
        _apply_h(b, q)
    elif k == 2:    # Ry(pi) = X Z
        b.add_affine(HALF, b.outputs[q])
        b.outputs[q] = b.outputs[q].flip()
    elif k == 3:    # Ry(3pi/2) = Z H
        _apply_h(b, q)
        b.add_affine(HALF, b.outputs[q])
    _apply_rz(b, q, t_phi)
    b.add_global((t_phi + t_lam) / 2)  # cancels the Rz global terms: u3 carries none


def circuit_to_pathsum(c: Circuit) -> PathSum:
    """Gate-by-gate path-sum construction; x by wire index, y by H occurrence order."""
    b = _Builder(c.n_qubits)
    for g in c.gates:
        kind = g.kind
        if kind is GateKind.X:
            b.outputs[g.qubits[0]] = b.outputs[g.qubits[0]].flip()
        elif kind is GateKind.Y:
            q = g.qubits[0]
            b.add_affine(HALF, b.outputs[q])
            b.outputs[q] = b.outputs[q].flip()
            b.add_global(Fraction(1, 4))
        elif kind is GateKind.Z:
            b.add_affine(HALF, b.outputs[g.qubits[0]])
        elif kind is GateKind.S:
            b.add_affine(Fraction(1, 4), b.outputs[g.qubits[0]])
        elif kind is GateKind.SDG:
            b.add_affine(Fraction(3, 4), b.outputs[g.qubits[0]])
        elif kind is GateKind.T:
            b.add_affine(Fraction(1, 8), b.outputs[g.qubits[0]])
        elif kind is GateKind.TDG:
            b.add_affine(Fraction(7, 8), b.outputs[g.qubits[0]])
        elif kind is GateKind.RZ:
            _apply_rz(b, g.qubits[0], _dyadic_turns(g.params[0]))
        elif kind is GateKind.H:
            _apply_h(b, g.qubits[0])
        elif kind is GateKind.CX:
            ctl, tgt = g.qubits
            b.outputs[tgt] = b.outputs[tgt].xor(b.outputs[ctl])
        elif kind is GateKind.CZ:
            b.add_half_product(b.outputs[g.qubits[0]], b.outputs[g.qubits[1]])
        elif kind is GateKind.U3:
            _apply_u3(b, g.qubits[0], g.params)
        else:
            raise PathsumError(f"unsupported gate kind {kind.value}")
    return PathSum(b.n, b.m, b.phase, tuple(b.outputs), b.global_phase)


# --- equality --------------------------------------------------------------

def canonical_equal(p: PathSum, q: PathSum) -> EquivVerdict:
    """Exact comparison: widths, path-variable counts, output forms termwise,
    and phase coefficients mod 1 (global phase ignored)."""
    if p.n != q.n:
        return EquivVerdict(False, f"width mismatch: {p.n} vs {q.n}")
    if p.m != q.m:
        return EquivVerdict(False, f"path-variable count mismatch: {p.m} vs {q.m}")
    for i, (fp, fq) in enumerate(zip(p.outputs, q.outputs)):
        if fp != fq:
            return EquivVerdict(False, f"output form differs on wire {i}")
    if p.phase != q.phase:
        differing = set(p.phase) ^ set(q.phase)
        if not differing:
            differing = {m_ for m_ in p.phase if p.phase[m_] != q.phase[m_]}
        mono = sorted(next(iter(differing)))
        return EquivVerdict(False, f"phase coefficient differs at monomial {mono}")
    return EquivVerdict(True)


def _phase_diff(p: PathSum, q: PathSum) -> dict[frozenset[int], Fraction]:
    diff = dict(p.phase)
    for mono, coeff in q.phase.items():
        cur = (diff.get(mono, Fraction(0)) - coeff) % 1
        if cur:
            diff[mono] = cur
        else:
            diff.pop(mono, None)
    return diff


def _diff_arrays(diff: dict[frozenset[int], Fraction]):
    """CSR encoding of the difference polynomial on a common dyadic denominator."""
    if not diff:
        return None
    modulus = max(c.denominator for c in diff.values())
    nums, idx, ptr = [], [], [0]
    for mono, coeff in diff.items():
        nums.append(coeff.numerator * (modulus // coeff.denominator))
        idx.extend(sorted(mono))
        ptr.append(len(idx))
    return (
        np.asarray(nums, dtype=np.int64),
        np.asarray(idx, dtype=np.int32),
        np.asarray(ptr, dtype=np.int32),
        modulus,
    )


def sampled_equal(
    p: PathSum,
    q: PathSum,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> EquivVerdict:
    """Evaluate the phase difference and output forms at uniform boolean points.

    Any disagreeing point is a definite counterexample; agreement on all points
    yields an "equal" verdict with confidence carried by samples_used.
    """
    if samples < 1:
        raise PathsumError("samples must be >= 1")
    if p.n != q.n:
        raise PathsumError(f"width mismatch: {p.n} vs {q.n}")
    if p.m != q.m:
        return EquivVerdict(
            False, f"path-variable count mismatch: {p.m} vs {q.m}", 0, "sampled"
        )
    nvars = p.n_vars
    rng = np.random.default_rng(seed)
    points = rng.integers(0, 2, size=(samples, max(nvars, 1)), dtype=np.uint8)

    bad = np.zeros(samples, dtype=bool)
    arrays = _diff_arrays(_phase_diff(p, q))
    if arrays is not None:
        nums, idx, ptr, modulus = arrays
        residues = _kernels.eval_poly_batch(nums, idx, ptr, points, modulus)
        bad |= residues != 0
    for fp, fq in zip(p.outputs, q.outputs):
        d = fp.xor(fq)
        if not d.vars and not d.const:
            continue
        if d.vars:
            parity = points[:, sorted(d.vars)].sum(axis=1) % 2
        else:
            parity = np.zeros(samples, dtype=np.uint8)
        bad |= (parity ^ d.const).astype(bool)

    hits = np.nonzero(bad)[0]
    if hits.size:
        first = int(hits[0])
        bits = points[first]
        witness = {
            "x": "".join(str(int(v)) for v in bits[:p.n]),
            "y": "".join(str(int(v)) for v in bits[p.n:nvars]),
        }
        return EquivVerdict(False, witness, first + 1, "sampled")
    return EquivVerdict(True, None, samples, "sampled")


def pathsum_to_unitary(p: PathSum) -> np.ndarray:
    """Dense operator reconstruction, summing over all path assignments."""
    if p.n_vars > 22:
        raise PathsumError("reconstruction is oracle-sized only")
    dim = 1 << p.n
    U = np.zeros((dim, dim), dtype=complex)
    amp = 2.0 ** (-p.m / 2.0)
    bits = [0] * p.n_vars
    for x in range(dim):
        for i in range(p.n):
            bits[i] = (x >> i) & 1
        for y in range(1 << p.m):
            for j in range(p.m):
                bits[p.n + j] = (y >> j) & 1
            phi = p.global_phase
            for mono, coeff in p.phase.items():
                if all(bits[v] for v in mono):
                    phi += coeff
            row = 0
            for i, form in enumerate(p.outputs):
                row |= form.evaluate(bits) << i
            U[row, x] += amp * np.exp(2j * math.pi * float(phi % 1))
    return U


# --- mutation and the positive/negative harness ----------------------------

_MUTATION_1Q = [GateKind.X, GateKind.Y, GateKind.Z, GateKind.H,
                GateKind.S, GateKind.SDG, GateKind.T, GateKind.TDG]
_MUTATION_2Q = [GateKind.CX, GateKind.CZ]


def mutate_circuit(c: Circuit, ratio: float, seed: int) -> Circuit:
    """Delete or re-kind ceil(ratio * gate count) gates; the usual adversarial fake."""
    if not c.gates:
        raise PathsumError("cannot mutate an empty circuit")
    if not 0.0 < ratio <= 1.0:
        raise PathsumError(f"mutation ratio must be in (0, 1], got {ratio}")
    rng = random.Random(seed)
    k = math.ceil(ratio * len(c.gates))
    positions = set(rng.sample(range(len(c.gates)), k))
    out: list[Gate] = []
    for pos, g in enumerate(c.gates):
        if pos not in positions:
            out.append(g)
            continue
        if rng.random() < 0.5:
            continue  # delete
        pool = _MUTATION_2Q if g.kind.arity == 2 else _MUTATION_1Q
        choices = [kind for kind in pool if kind is not g.kind]
        new_kind = rng.choice(choices)
        out.append(Gate(new_kind, g.qubits, (), uid=g.uid, inserted=g.inserted))
    return Circuit(c.n_qubits, tuple(out), c.measured_qubits)


@dataclass(frozen=True)
class VerificationReport:
    positive: EquivVerdict
    negative: EquivVerdict
    positive_ms: float
    negative_ms: float
    ratio: float
    samples: int
    mode: str = "sampled"

    @property
    def passed(self) -> bool:
        return self.positive.equal and not self.negative.equal

    def to_json(self) -> dict:
        return {
            "positive": self.positive.to_json(),
            "negative": self.negative.to_json(),
            "positive_ms": self.positive_ms,
            "negative_ms": self.negative_ms,
            "ratio": self.ratio,
            "samples": self.samples,
            "mode": self.mode,
            "passed": self.passed,
        }


def positive_negative_test(
    c: Circuit,
    obf: Circuit,
    ratio: float = DEFAULT_RATIO,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    mode: str = "sampled",
) -> VerificationReport:
    """Positive: obf must match c.  Negative: a mutated obf must be caught.

    Each side's wall time covers its path-sum constructions plus the check,
    mirroring how equivalence-verification timings are usually reported.
    """
    def compare(a: PathSum, b_: PathSum, sample_seed: int) -> EquivVerdict:
        if mode == "canonical":
            return canonical_equal(a, b_)
        return sampled_equal(a, b_, samples, sample_seed)

    t0 = time.perf_counter()
    ps_c = circuit_to_pathsum(c)
    ps_obf = circuit_to_pathsum(obf)
    positive = compare(ps_c, ps_obf, stage_seed(seed, "positive"))
    positive_ms = (time.perf_counter() - t0) * 1e3

    t1 = time.perf_counter()
    fake = mutate_circuit(obf, ratio, stage_seed(seed, "mutate"))
    ps_obf_again = circuit_to_pathsum(obf)
    ps_fake = circuit_to_pathsum(fake)
    negative = compare(ps_obf_again, ps_fake, stage_seed(seed, "negative"))
    negative_ms = (time.perf_counter() - t1) * 1e3

    return VerificationReport(positive, negative, positive_ms, negative_ms, ratio, samples, mode)
