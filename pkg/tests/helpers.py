"""Shared test oracles, kept independent of the implementation paths they check."""
from __future__ import annotations

from itertools import combinations, permutations

import numpy as np

from qveil.circuit import Circuit, GateKind, random_clifford_t_circuit


def brute_force_ged(nodes1, edges1, nodes2, edges2) -> int:
    """Exact graph edit distance by enumerating node mappings.

    nodes are (id, label) pairs, edges are (id, id) pairs.  Unit costs for
    relabel/insert/delete of nodes and insert/delete of edges; for a uniform
    metric cost model the optimum is attained by some injective node mapping.
    """
    ids1 = [nid for nid, _ in nodes1]
    ids2 = [nid for nid, _ in nodes2]
    lab1 = dict(nodes1)
    lab2 = dict(nodes2)
    e1 = set(edges1)
    e2 = set(edges2)
    best = len(ids1) + len(ids2) + len(e1) + len(e2)  # delete all, insert all
    for k in range(min(len(ids1), len(ids2)), -1, -1):
        node_floor = (len(ids1) - k) + (len(ids2) - k)
        if node_floor >= best:
            continue
        for sub in combinations(ids1, k):
            for perm in permutations(ids2, k):
                mapping = dict(zip(sub, perm))
                cost = node_floor
                cost += sum(1 for u in sub if lab1[u] != lab2[mapping[u]])
                matched = sum(
                    1
                    for (u, v) in e1
                    if u in mapping and v in mapping and (mapping[u], mapping[v]) in e2
                )
                cost += (len(e1) - matched) + (len(e2) - matched)
                best = min(best, cost)
    return best


def dag_to_pairs(dag):
    return [(g.uid, g.kind.value) for g in dag.nodes], list(dag.edges)


def small_circuit_corpus(count: int, max_qubits: int = 5, max_gates: int = 40,
                         seed: int = 0) -> list[Circuit]:
    """Seeded random Clifford+T circuits of bounded size."""
    out = []
    for i in range(count):
        n = 1 + (seed + i) % max_qubits
        gates = (7 * i + seed) % (max_gates + 1)
        t_frac = ((i % 4) + 1) / 5.0
        out.append(random_clifford_t_circuit(n, gates, t_frac, seed=seed * 1000 + i))
    return out


def corpus_with_bounded_h(count: int, max_qubits: int = 6, max_gates: int = 24,
                          max_h: int = 8, seed: int = 0) -> list[Circuit]:
    """Random circuits filtered to at most max_h Hadamards (path-variable budget)."""
    out = []
    attempt = 0
    while len(out) < count:
        n = 1 + (len(out) + seed) % max_qubits
        c = random_clifford_t_circuit(
            n, 4 + (attempt * 3) % max_gates, 0.3, seed=seed * 7919 + attempt
        )
        attempt += 1
        if sum(1 for g in c.gates if g.kind is GateKind.H) <= max_h:
            out.append(c)
    return out


def kron_pauli_word(a_bits, b_bits) -> np.ndarray:
    """X^a Z^b as a dense matrix; qubit 0 is the least significant kron factor."""
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Z = np.array([[1, 0], [0, -1]], dtype=complex)
    I = np.eye(2, dtype=complex)
    M = np.array([[1.0]], dtype=complex)
    for a, b in zip(a_bits, b_bits):
        local = (X if a else I) @ (Z if b else I)
        M = np.kron(local, M)
    return M
