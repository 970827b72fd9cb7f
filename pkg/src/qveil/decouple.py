"""Structure obfuscation via decoupling-sequence insertion.

The circuit is layered into discrete frames, timed into an analog schedule
from a gate-duration table, and every idle window is filled with a pulse
sequence whose product is the identity: XY-8, XY-4, XX, or (for windows too
short for pulses) a ZZ pair with one Z merged into a neighbouring
single-qubit gate as a U3.  Insertions never grow the schedule makespan.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .circuit import Circuit, CircuitDag, Gate, GateKind, build_dag
from .config import TOL
from .simulator import gate_matrix


class DecoupleError(ValueError):
    pass


_DEFAULT_1Q_NS = 30.0
_DEFAULT_2Q_NS = 60.0


@dataclass(frozen=True)
class DurationTable:
    """Gate durations in nanoseconds; Z may be 0 (virtual)."""

    ns: dict[GateKind, float]

    def __post_init__(self):
        for kind, d in self.ns.items():
            if d < 0:
                raise DecoupleError(f"negative duration for {kind.value}")

    @classmethod
    def default(cls) -> "DurationTable":
        ns = {k: _DEFAULT_1Q_NS for k in GateKind if k.arity == 1}
        ns[GateKind.Z] = 0.0
        ns[GateKind.CX] = _DEFAULT_2Q_NS
        ns[GateKind.CZ] = _DEFAULT_2Q_NS
        return cls(ns)

    @classmethod
    def uniform(cls, one_q: float, two_q: float, z: float | None = None) -> "DurationTable":
        ns = {k: one_q for k in GateKind if k.arity == 1}
        if z is not None:
            ns[GateKind.Z] = z
        ns[GateKind.CX] = two_q
        ns[GateKind.CZ] = two_q
        return cls(ns)

    @classmethod
    def from_json(cls, obj: dict) -> "DurationTable":
        return cls({GateKind(k): float(v) for k, v in obj.items()})

    def to_json(self) -> dict:
        return {k.value: v for k, v in self.ns.items()}

    def duration(self, kind: GateKind) -> float:
        try:
            return self.ns[kind]
        except KeyError:
            raise DecoupleError(f"missing duration entry for {kind.value}") from None


@dataclass(frozen=True)
class TimedGate:
    gate: Gate
    start: float
    end: float


@dataclass(frozen=True)
class AnalogSchedule:
    n_qubits: int
    timelines: tuple[tuple[TimedGate, ...], ...]  # one per qubit, time-ordered
    makespan: float
    measured_qubits: tuple[int, ...] = ()


@dataclass(frozen=True)
class IdleWindow:
    qubit: int
    start: float
    end: float
    before: Gate                 # gate ending at `start` on this wire
    after: Gate | None           # gate starting at `end`, None for a pre-measurement tail
    context: tuple[Gate, ...]    # the single-qubit neighbours among before/after

    @property
    def length(self) -> float:
        return self.end - self.start


XY8 = "XY8"
XY4 = "XY4"
XX = "XX"
ZZ_MERGE = "ZZ_MERGE"
NONE = "NONE"

_PULSES = {
    XY8: (GateKind.X, GateKind.Y, GateKind.X, GateKind.Y,
          GateKind.Y, GateKind.X, GateKind.Y, GateKind.X),
    XY4: (GateKind.X, GateKind.Y, GateKind.X, GateKind.Y),
    XX: (GateKind.X, GateKind.X),
    ZZ_MERGE: (GateKind.Z, GateKind.Z),
    NONE: (),
}


@dataclass(frozen=True)
class DDChoice:
    kind: str
    pulses: tuple[GateKind, ...]
    placements: tuple[tuple[float, float], ...]  # (start, end) offsets inside the window


def discrete_frames(dag: CircuitDag) -> list[list[Gate]]:
    """ASAP layering: frame k holds gates whose longest dependency chain is k."""
    level: dict[int, int] = {}
    frames: list[list[Gate]] = []
    for g in dag.nodes:
        lv = max((level[p] + 1 for p in dag.pred[g.uid]), default=0)
        level[g.uid] = lv
        while len(frames) <= lv:
            frames.append([])
        frames[lv].append(g)
    return frames


def to_analog(
    frames: list[list[Gate]],
    durations: DurationTable,
    n_qubits: int,
    measured: tuple[int, ...] = (),
) -> AnalogSchedule:
    """ASAP timing: each gate starts at the max end-time over its wires."""
    avail = [0.0] * n_qubits
    lanes: list[list[TimedGate]] = [[] for _ in range(n_qubits)]
    for frame in frames:
        for g in frame:
            start = max(avail[q] for q in g.qubits)
            end = start + durations.duration(g.kind)
            timed = TimedGate(g, start, end)
            for q in g.qubits:
                lanes[q].append(timed)
                avail[q] = end
    makespan = max(avail) if any(lanes) else 0.0
    return AnalogSchedule(
        n_qubits, tuple(tuple(lane) for lane in lanes), makespan, tuple(sorted(measured))
    )


def schedule_circuit(c: Circuit, durations: DurationTable) -> AnalogSchedule:
    return to_analog(discrete_frames(build_dag(c)), durations, c.n_qubits, c.measured_qubits)


def find_idle_windows(sched: AnalogSchedule) -> list[IdleWindow]:
    """Maximal per-wire gaps, excluding the leading gap before a wire's first gate.

    The tail gap before the makespan is reported only on measured wires.
    """
    windows: list[IdleWindow] = []
    for q, lane in enumerate(sched.timelines):
        if not lane:
            continue
        for prev, nxt in zip(lane, lane[1:]):
            if nxt.start - prev.end > 0:
                windows.append(_make_window(q, prev.end, nxt.start, prev.gate, nxt.gate))
        last = lane[-1]
        if q in sched.measured_qubits and sched.makespan - last.end > 0:
            windows.append(_make_window(q, last.end, sched.makespan, last.gate, None))
    windows.sort(key=lambda w: (w.start, w.qubit))
    return windows


def _make_window(q: int, start: float, end: float, before: Gate, after: Gate | None) -> IdleWindow:
    context = tuple(
        g for g in (before, after) if g is not None and g.kind.arity == 1
    )
    return IdleWindow(q, start, end, before, after, context)


def select_sequence(
    window_len: float,
    durations: DurationTable,
    has_context: bool,
    zz_merge: bool,
) -> DDChoice:
    """Threshold ladder over sequence durations; pulses spaced evenly."""
    if window_len <= 0:
        raise DecoupleError("window length must be positive")
    dx = durations.duration(GateKind.X)
    dy = durations.duration(GateKind.Y)
    dz = durations.duration(GateKind.Z)
    xy8_dur = 4 * (dx + dy)
    xy4_dur = 2 * (dx + dy)
    xx_dur = 2 * dx
    zz_dur = 2 * dz
    if window_len > xy8_dur:
        kind = XY8
    elif window_len > xy4_dur:
        kind = XY4
    elif window_len > xx_dur:
        kind = XX
    elif window_len > zz_dur and has_context and zz_merge:
        kind = ZZ_MERGE
    else:
        kind = NONE
    pulses = _PULSES[kind]
    placements = _even_placements(window_len, [durations.duration(k) for k in pulses])
    return DDChoice(kind, pulses, placements)


def _even_placements(window_len: float, durs: list[float]) -> tuple[tuple[float, float], ...]:
    if not durs:
        return ()
    gap = (window_len - sum(durs)) / (len(durs) + 1)
    out = []
    t = gap
    for d in durs:
        out.append((t, t + d))
        t += d + gap
    return tuple(out)


def merge_z_u3(g: Gate, side: str) -> Gate:
    """U3 whose matrix equals Z applied after (side='after') or before g.

    Exact up to global phase; angles snap to dyadic multiples of pi.
    """
    if g.kind.arity != 1:
        raise DecoupleError("can only merge Z into a single-qubit gate")
    if side not in ("before", "after"):
        raise DecoupleError(f"side must be 'before' or 'after', got {side!r}")
    Zm = gate_matrix(GateKind.Z)
    Gm = gate_matrix(g.kind, g.params)
    M = Zm @ Gm if side == "after" else Gm @ Zm
    theta, phi, lam = _zyz_angles(M)
    return Gate(GateKind.U3, g.qubits, (theta, phi, lam), uid=g.uid, inserted=g.inserted)


def _zyz_angles(M: np.ndarray) -> tuple[float, float, float]:
    """Angles (theta, phi, lam) with u3(theta,phi,lam) = M up to global phase."""
    a00, a01, a10, a11 = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    theta = 2.0 * math.atan2(abs(a10), abs(a00))
    if abs(a00) < 1e-12:          # theta = pi
        phi = cmath.phase(a10) - cmath.phase(-a01)
        lam = 0.0
    elif abs(a10) < 1e-12:        # theta = 0
        phi = 0.0
        lam = cmath.phase(a11) - cmath.phase(a00)
    else:
        phi = cmath.phase(a10) - cmath.phase(a00)
        lam = cmath.phase(-a01) - cmath.phase(a00)
    return (_snap_angle(theta), _snap_angle(phi), _snap_angle(lam))


def _snap_angle(x: float, grid: float = math.pi / 64) -> float:
    k = round(x / grid)
    snapped = k * (math.pi / 64)
    return snapped if abs(snapped - x) <= TOL.angle_snap else x


@dataclass(frozen=True)
class Insertion:
    """One planned window fill: pulses, their absolute placements, and an
    optional (uid, side) gate merge for the ZZ branch."""

    window: IdleWindow
    choice: DDChoice
    merge_uid: int | None = None
    merge_side: str | None = None
    explicit_pulses: tuple[GateKind, ...] = ()


def plan_insertions(c: Circuit, durations: DurationTable, zz_merge: bool) -> list[Insertion]:
    sched = schedule_circuit(c, durations)
    plans: list[Insertion] = []
    for w in find_idle_windows(sched):
        choice = select_sequence(w.length, durations, bool(w.context), zz_merge)
        if choice.kind == NONE:
            continue
        if choice.kind == ZZ_MERGE:
            # merge into the earlier context gate when both flanks qualify
            if w.before.kind.arity == 1:
                merge_uid, merge_side, ctx_kind = w.before.uid, "after", w.before.kind
            else:
                assert w.after is not None  # context non-empty guarantees it
                merge_uid, merge_side, ctx_kind = w.after.uid, "before", w.after.kind
            # the merged U3 replaces the context gate in place: any duration it
            # adds must fit in the window or the makespan would grow
            slack = (
                durations.duration(GateKind.U3)
                - durations.duration(ctx_kind)
                + durations.duration(GateKind.Z)
            )
            if slack > w.length + 1e-9:
                continue
            explicit = (GateKind.Z,)
        else:
            merge_uid, merge_side = None, None
            explicit = choice.pulses
        plans.append(Insertion(w, choice, merge_uid, merge_side, explicit))
    return plans


def apply_insertions(c: Circuit, plans: list[Insertion]) -> Circuit:
    """Rebuild the gate list with pulses after each window's predecessor gate."""
    merges: dict[int, list[str]] = {}  # a gate can absorb a Z from each side
    after_uid: dict[int, list[Insertion]] = {}
    for p in plans:
        if p.merge_uid is not None:
            merges.setdefault(p.merge_uid, []).append(p.merge_side)
        after_uid.setdefault(p.window.before.uid, []).append(p)
    for lst in after_uid.values():
        lst.sort(key=lambda p: (p.window.start, p.window.qubit))

    next_uid = max((g.uid for g in c.gates), default=-1) + 1
    out: list[Gate] = []
    for g in c.gates:
        current = g
        if g.uid in merges:
            for side in merges[g.uid]:
                current = merge_z_u3(current, side)
            current = replace(current, uid=next_uid, inserted=True)
            next_uid += 1
        out.append(current)
        for p in after_uid.get(g.uid, ()):
            for kind in p.explicit_pulses:
                out.append(Gate(kind, (p.window.qubit,), uid=next_uid, inserted=True))
                next_uid += 1
    return Circuit(c.n_qubits, tuple(out), c.measured_qubits)


def insert_dd(
    c: Circuit,
    durations: DurationTable | None = None,
    zz_merge: bool = False,
    seed: int = 0,
) -> Circuit:
    """Fill idle windows with identity pulse sequences.

    The result computes the same unitary (up to global phase) and re-schedules
    to the same makespan.  `seed` is accepted for interface stability; the
    procedure itself is deterministic.
    """
    del seed
    durations = durations or DurationTable.default()
    return apply_insertions(c, plan_insertions(c, durations, zz_merge))


def obfuscate(
    c: Circuit,
    durations: DurationTable | None = None,
    zz_merge: bool = False,
) -> tuple[Circuit, list[Insertion]]:
    """insert_dd plus the insertion log, for report emission."""
    durations = durations or DurationTable.default()
    plans = plan_insertions(c, durations, zz_merge)
    return apply_insertions(c, plans), plans
