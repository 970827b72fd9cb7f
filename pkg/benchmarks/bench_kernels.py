"""Compare the compiled kernel core against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--quick]
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qveil._kernels import backends  # noqa: E402
from qveil.bench import largest_benchmark  # noqa: E402
from qveil.circuit import GateKind, random_clifford_t_circuit  # noqa: E402
from qveil.pathsum import _diff_arrays, circuit_to_pathsum  # noqa: E402
from qveil.simulator import gate_matrix  # noqa: E402


def time_statevector(impl, n_qubits: int, n_gates: int, reps: int) -> float:
    circuit = random_clifford_t_circuit(n_qubits, n_gates, 0.25, seed=1, measure=False)
    ops = []
    for g in circuit.gates:
        if g.kind is GateKind.CX:
            ops.append(("cx", g.qubits))
        elif g.kind is GateKind.CZ:
            ops.append(("cz", g.qubits))
        else:
            m = gate_matrix(g.kind, g.params)
            ops.append(("1q", (g.qubits[0], m[0, 0], m[0, 1], m[1, 0], m[1, 1])))
    best = float("inf")
    for _ in range(reps):
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[0] = 1.0
        t0 = time.perf_counter()
        for kind, payload in ops:
            if kind == "cx":
                impl.apply_cx(amps, n_qubits, *payload)
            elif kind == "cz":
                impl.apply_cz(amps, n_qubits, *payload)
            else:
                impl.apply_1q(amps, n_qubits, *payload)
        best = min(best, time.perf_counter() - t0)
    return best


def time_poly_eval(impl, samples: int, reps: int) -> float:
    _, big = largest_benchmark()
    ps = circuit_to_pathsum(big)
    nums, idx, ptr, modulus = _diff_arrays(dict(ps.phase))
    rng = np.random.default_rng(0)
    points = rng.integers(0, 2, size=(samples, ps.n_vars), dtype=np.uint8)
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        impl.eval_poly_batch(nums, idx, ptr, points, modulus)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="small sizes, for smoke testing")
    args = parser.parse_args(argv)

    n_qubits, n_gates, samples, reps = (8, 120, 256, 2) if args.quick else (14, 400, 4096, 5)
    available = backends()
    print(f"backends: {', '.join(available)}")
    print(f"statevector: {n_qubits} qubits x {n_gates} gates | "
          f"poly eval: {samples} samples on the widest benchmark\n")
    rows = []
    for name, impl in available.items():
        sv = time_statevector(impl, n_qubits, n_gates, reps)
        pe = time_poly_eval(impl, samples, reps)
        rows.append((name, sv, pe))
        print(f"  {name:<9} statevector {sv * 1e3:8.2f} ms   poly-eval {pe * 1e3:8.2f} ms")
    if len(rows) == 2:
        print(f"\nspeedup (python/compiled): "
              f"statevector {rows[0][1] / rows[1][1]:.1f}x, poly-eval {rows[0][2] / rows[1][2]:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
