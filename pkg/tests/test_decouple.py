"""Scheduling, idle-window extraction, sequence selection, and DD insertion."""
import math

import numpy as np
import pytest

from qveil.bench import suite, toffoli_circuit
from qveil.circuit import Circuit, GateKind, build_dag
from qveil.decouple import (
    NONE,
    XX,
    XY4,
    XY8,
    ZZ_MERGE,
    DecoupleError,
    DurationTable,
    discrete_frames,
    find_idle_windows,
    insert_dd,
    merge_z_u3,
    obfuscate,
    schedule_circuit,
    select_sequence,
    to_analog,
)
from qveil.simulator import fidelity, gate_matrix, simulate


D30 = DurationTable.default()           # 30 ns single-qubit, 60 ns two-qubit, Z virtual
D1 = DurationTable.uniform(1.0, 2.0)    # the worked example's 2x ratio


class TestDurations:
    def test_default_z_virtual(self):
        assert D30.duration(GateKind.Z) == 0.0
        assert D30.duration(GateKind.CX) == 60.0

    def test_missing_entry(self):
        table = DurationTable({GateKind.H: 30.0})
        with pytest.raises(DecoupleError, match="missing duration"):
            table.duration(GateKind.CX)

    def test_json_roundtrip(self):
        assert DurationTable.from_json(D30.to_json()) == D30


class TestFrames:
    def test_chain(self):
        c = Circuit.build(2, [(GateKind.H, 0), (GateKind.CX, 0, 1), (GateKind.H, 1)])
        frames = discrete_frames(build_dag(c))
        assert [[g.kind for g in f] for f in frames] == [[GateKind.H], [GateKind.CX], [GateKind.H]]

    def test_independent_share_frame(self):
        c = Circuit.build(2, [(GateKind.X, 0), (GateKind.Y, 1)])
        frames = discrete_frames(build_dag(c))
        assert len(frames) == 1 and len(frames[0]) == 2

    def test_toffoli_layout_with_unit_durations(self):
        # hand-computed ASAP schedule at 1 ns single-qubit / 2 ns CX
        sched = schedule_circuit(toffoli_circuit(), D1)
        assert sched.makespan == 17.0
        starts = {(w.qubit, w.start, w.end) for w in find_idle_windows(sched)}
        assert starts == {
            (0, 1.0, 4.0), (1, 3.0, 7.0), (0, 6.0, 10.0), (1, 10.0, 12.0), (2, 14.0, 17.0),
        }


class TestToAnalog:
    def test_single_gate(self):
        c = Circuit.build(1, [(GateKind.H, 0)])
        sched = to_analog(discrete_frames(build_dag(c)), D30, 1)
        assert sched.timelines[0][0].start == 0.0
        assert sched.timelines[0][0].end == 30.0
        assert sched.makespan == 30.0

    def test_hand_schedule_h_cx(self):
        c = Circuit.build(2, [(GateKind.H, 0), (GateKind.CX, 0, 1)])
        sched = schedule_circuit(c, D30)
        cx = sched.timelines[1][0]
        assert (cx.start, cx.end) == (30.0, 90.0)
        assert sched.timelines[0][1] is cx  # same interval on both wires
        assert sched.makespan == 90.0

    def test_parallel_x(self):
        c = Circuit.build(2, [(GateKind.X, 0), (GateKind.X, 1)])
        sched = schedule_circuit(c, D30)
        assert all(lane[0].start == 0.0 and lane[0].end == 30.0 for lane in sched.timelines)

    def test_asap_consistency(self):
        # no op can start earlier than the latest end among its wire predecessors
        for _, c in suite("random", seed=5):
            sched = schedule_circuit(c, D30)
            for lane in sched.timelines:
                for prev, nxt in zip(lane, lane[1:]):
                    assert nxt.start >= prev.end

    def test_missing_duration_raises(self):
        c = Circuit.build(1, [(GateKind.T, 0)])
        with pytest.raises(DecoupleError):
            schedule_circuit(c, DurationTable({GateKind.H: 1.0}))


class TestIdleWindows:
    def test_leading_gap_excluded(self):
        c = Circuit.build(2, [(GateKind.H, 0), (GateKind.CX, 0, 1)], measured=(0, 1))
        windows = find_idle_windows(schedule_circuit(c, D30))
        assert windows == []  # q1's [0, 30) leading gap is not reported

    def test_back_to_back_no_windows(self):
        c = Circuit.build(1, [(GateKind.H, 0), (GateKind.H, 0)], measured=(0,))
        assert find_idle_windows(schedule_circuit(c, D30)) == []

    def test_tail_window_on_measured_wire(self):
        ops = [(GateKind.H, 0), (GateKind.CX, 0, 1), (GateKind.H, 0), (GateKind.H, 0)]
        c = Circuit.build(2, ops, measured=(0, 1))
        windows = find_idle_windows(schedule_circuit(c, D30))
        assert [(w.qubit, w.start, w.end) for w in windows] == [(1, 90.0, 150.0)]

    def test_tail_window_skipped_when_unmeasured(self):
        ops = [(GateKind.H, 0), (GateKind.CX, 0, 1), (GateKind.H, 0), (GateKind.H, 0)]
        c = Circuit.build(2, ops, measured=())
        assert find_idle_windows(schedule_circuit(c, D30)) == []

    def test_context_gates(self):
        ops = [(GateKind.T, 1), (GateKind.H, 0), (GateKind.H, 0),
               (GateKind.CX, 0, 1), (GateKind.S, 1)]
        c = Circuit.build(2, ops)
        windows = find_idle_windows(schedule_circuit(c, D30))
        (w,) = windows
        assert w.qubit == 1
        assert w.before.kind is GateKind.T
        assert w.after.kind is GateKind.CX
        assert [g.kind for g in w.context] == [GateKind.T]


class TestSelectSequence:
    def test_xy8(self):
        choice = select_sequence(9 * 30.0, D30, has_context=False, zz_merge=False)
        assert choice.kind == XY8
        assert choice.pulses == (GateKind.X, GateKind.Y, GateKind.X, GateKind.Y,
                                 GateKind.Y, GateKind.X, GateKind.Y, GateKind.X)

    def test_xy4_and_xx(self):
        assert select_sequence(5 * 30.0, D30, False, False).kind == XY4
        assert select_sequence(3 * 30.0, D30, False, False).kind == XX

    def test_zz_merge_branch(self):
        choice = select_sequence(1 * 30.0, D30, has_context=True, zz_merge=True)
        assert choice.kind == ZZ_MERGE

    def test_zz_needs_context_and_flag(self):
        assert select_sequence(30.0, D30, has_context=False, zz_merge=True).kind == NONE
        assert select_sequence(30.0, D30, has_context=True, zz_merge=False).kind == NONE

    def test_even_spacing_fits_window(self):
        choice = select_sequence(10 * 30.0, D30, False, False)
        assert len(choice.placements) == 8
        gaps = [choice.placements[0][0]]
        for (s1, e1), (s2, _) in zip(choice.placements, choice.placements[1:]):
            gaps.append(s2 - e1)
        gaps.append(10 * 30.0 - choice.placements[-1][1])
        assert all(abs(g - gaps[0]) < 1e-9 for g in gaps)
        assert choice.placements[-1][1] <= 10 * 30.0 + 1e-9


class TestSequenceIdentities:
    def test_xx_identity(self):
        X = gate_matrix(GateKind.X)
        assert np.max(np.abs(X @ X - np.eye(2))) < 1e-12

    def test_xy4_identity_up_to_phase(self):
        X, Y = gate_matrix(GateKind.X), gate_matrix(GateKind.Y)
        prod = Y @ X @ Y @ X  # pulses applied X,Y,X,Y
        assert np.max(np.abs(prod + np.eye(2))) < 1e-12  # equals -I

    def test_xy8_identity(self):
        X, Y = gate_matrix(GateKind.X), gate_matrix(GateKind.Y)
        seq = [X, Y, X, Y, Y, X, Y, X]
        prod = np.eye(2)
        for m in seq:
            prod = m @ prod
        assert np.max(np.abs(prod - np.eye(2))) < 1e-12


class TestMergeZU3:
    @pytest.mark.parametrize("kind,params", [
        (GateKind.Z, ()), (GateKind.X, ()), (GateKind.H, ()), (GateKind.S, ()),
        (GateKind.T, ()), (GateKind.Y, ()), (GateKind.SDG, ()),
        (GateKind.RZ, (math.pi / 4,)), (GateKind.RZ, (-math.pi / 4,)),
        (GateKind.U3, (math.pi / 2, math.pi, math.pi)),
    ])
    @pytest.mark.parametrize("side", ["before", "after"])
    def test_matrix_oracle(self, kind, params, side):
        from qveil.circuit import Gate

        g = Gate(kind, (0,), params, uid=0)
        merged = merge_z_u3(g, side)
        Z = gate_matrix(GateKind.Z)
        target = Z @ gate_matrix(kind, params) if side == "after" else gate_matrix(kind, params) @ Z
        got = gate_matrix(GateKind.U3, merged.params)
        idx = np.unravel_index(np.argmax(np.abs(target)), (2, 2))
        phase = target[idx] / got[idx]
        assert abs(abs(phase) - 1) < 1e-12
        assert np.max(np.abs(got * phase - target)) < 1e-12

    def test_z_after_z_is_identity(self):
        from qveil.circuit import Gate

        merged = merge_z_u3(Gate(GateKind.Z, (0,), uid=0), "after")
        got = gate_matrix(GateKind.U3, merged.params)
        assert np.max(np.abs(got - np.eye(2))) < 1e-12

    def test_multi_qubit_rejected(self):
        from qveil.circuit import Gate

        with pytest.raises(DecoupleError):
            merge_z_u3(Gate(GateKind.CX, (0, 1), uid=0), "after")


class TestInsertDd:
    def test_no_windows_unchanged(self):
        c = Circuit.build(1, [(GateKind.H, 0), (GateKind.T, 0)])
        assert insert_dd(c, D30) == c

    def test_long_tail_gets_xy_pulses(self):
        ops = [(GateKind.CX, 0, 1)] + [(GateKind.H, 0)] * 10
        c = Circuit.build(2, ops, measured=(0, 1))
        out = insert_dd(c, D30)
        added = [g for g in out.gates if g.inserted]
        assert {g.kind for g in added} == {GateKind.X, GateKind.Y}
        assert all(g.qubits == (1,) for g in added)
        assert fidelity(simulate(c), simulate(out)) >= 1 - 1e-9

    def test_lambda_false_means_no_merges(self):
        _, plans = obfuscate(toffoli_circuit(), D30, zz_merge=False)
        assert all(p.choice.kind != ZZ_MERGE for p in plans)

    def test_toffoli_with_merges(self):
        out, plans = obfuscate(toffoli_circuit(), D30, zz_merge=True)
        kinds = [p.choice.kind for p in plans]
        assert kinds.count(XX) == 4 and kinds.count(ZZ_MERGE) == 1
        assert sum(1 for g in out.gates if g.kind is GateKind.U3) == 1
        assert sum(1 for g in out.gates if g.kind is GateKind.Z and g.inserted) == 1

    def test_makespan_preserved_and_counts_grow(self):
        for name in ("toffoli", "adders", "grover", "bv", "qft", "random"):
            for _, c in suite(name, seed=1):
                before = schedule_circuit(c, D30)
                out = insert_dd(c, D30, zz_merge=True)
                after = schedule_circuit(out, D30)
                assert after.makespan == pytest.approx(before.makespan), name
                assert len(out.gates) >= len(c.gates)
                added_kinds = {g.kind for g in out.gates if g.inserted}
                assert added_kinds <= {GateKind.X, GateKind.Y, GateKind.Z, GateKind.U3}

    def test_unitary_preserved_across_suites(self):
        for name in ("toffoli", "grover", "bv"):
            for _, c in suite(name, seed=1):
                if c.n_qubits > 12:
                    continue
                out = insert_dd(c, D30, zz_merge=True)
                assert fidelity(simulate(c), simulate(out)) >= 1 - 1e-9

    def test_deterministic(self):
        c = toffoli_circuit()
        assert insert_dd(c, D30, zz_merge=True, seed=3) == insert_dd(c, D30, zz_merge=True, seed=9)

    def test_zz_merge_replaces_context_gate(self):
        out, plans = obfuscate(toffoli_circuit(), D30, zz_merge=True)
        merge_plans = [p for p in plans if p.choice.kind == ZZ_MERGE]
        (plan,) = merge_plans
        # merged into the earlier (before) context gate, later Z stays explicit
        assert plan.merge_uid == plan.window.before.uid
        assert plan.merge_side == "after"

    def test_zz_merge_skipped_when_u3_would_not_fit(self):
        # a table where U3 is much slower than the gate it would replace
        ns = {k: 1.0 for k in GateKind if k.arity == 1}
        ns[GateKind.Z] = 0.0
        ns[GateKind.U3] = 100.0
        ns[GateKind.CX] = 2.0
        ns[GateKind.CZ] = 2.0
        table = DurationTable(ns)
        c = toffoli_circuit()
        out, plans = obfuscate(c, table, zz_merge=True)
        assert all(p.choice.kind != ZZ_MERGE for p in plans)
        before = schedule_circuit(c, table)
        after = schedule_circuit(out, table)
        assert after.makespan == pytest.approx(before.makespan)
