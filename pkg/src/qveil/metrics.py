"""Obfuscation-strength and overhead metrics.

TVD measures how far the encrypted output distribution moved; the normalized
graph edit distance between circuit DAGs measures structural change.  Exact
GED is NP-hard, so large graphs get a bounded estimate and the mode is always
reported alongside the value.
"""
from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .circuit import Circuit, CircuitDag, dag_depth
from .config import DEFAULT_GED_BUDGET
from .decouple import AnalogSchedule


class MetricsError(ValueError):
    pass


def tvd(a: dict[str, int | float], b: dict[str, int | float]) -> float:
    """Half the L1 distance between count vectors; unequal totals are rescaled."""
    if not a and not b:
        raise MetricsError("both count maps are empty")
    na = float(sum(a.values()))
    nb = float(sum(b.values()))
    if na <= 0 or nb <= 0:
        raise MetricsError("count maps must have positive totals")
    if na == nb:
        scale_a = scale_b = 1.0
        denom = 2.0 * na
    else:
        scale_a, scale_b = 1.0 / na, 1.0 / nb
        denom = 2.0
    keys = set(a) | set(b)
    total = sum(abs(a.get(k, 0) * scale_a - b.get(k, 0) * scale_b) for k in keys)
    return total / denom


def _to_nx(dag: CircuitDag) -> nx.DiGraph:
    g = nx.DiGraph()
    for node in dag.nodes:
        g.add_node(node.uid, label=node.kind.value)
    g.add_edges_from(dag.edges)
    return g


@dataclass(frozen=True)
class GedResult:
    value: float          # normalized headline value (midpoint in bounded mode)
    mode: str             # "exact" or "bounded"
    ged: float            # raw edit distance (midpoint in bounded mode)
    lower: float          # normalized bounds; lower == upper in exact mode
    upper: float

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "mode": self.mode,
            "ged": self.ged,
            "lower": self.lower,
            "upper": self.upper,
        }


def norm_ged(g1: CircuitDag, g2: CircuitDag, budget: int = DEFAULT_GED_BUDGET) -> GedResult:
    """Normalized graph edit distance between two gate-labeled DAGs.

    Node relabel/insert/delete and edge insert/delete all cost 1; the result
    is divided by max(|V1|,|V2|) + max(|E1|,|E2|).
    """
    n1, n2 = len(g1.nodes), len(g2.nodes)
    denom = max(n1, n2) + max(len(g1.edges), len(g2.edges))
    if denom == 0:
        return GedResult(0.0, "exact", 0.0, 0.0, 0.0)
    if n1 <= budget and n2 <= budget:
        raw = nx.graph_edit_distance(
            _to_nx(g1), _to_nx(g2),
            node_match=lambda u, v: u["label"] == v["label"],
        )
        value = min(raw / denom, 1.0)
        return GedResult(value, "exact", raw, value, value)
    lo = _ged_lower_bound(g1, g2)
    hi = _ged_upper_bound(g1, g2)
    hi = max(hi, lo)
    value = min((lo + hi) / 2 / denom, 1.0)
    return GedResult(value, "bounded", (lo + hi) / 2, min(lo / denom, 1.0), min(hi / denom, 1.0))


def _label_counts(dag: CircuitDag) -> dict[str, int]:
    counts: dict[str, int] = {}
    for g in dag.nodes:
        counts[g.kind.value] = counts.get(g.kind.value, 0) + 1
    return counts


def _ged_lower_bound(g1: CircuitDag, g2: CircuitDag) -> float:
    """Node edits needed to fix the label multiset, plus the edge-count gap."""
    c1, c2 = _label_counts(g1), _label_counts(g2)
    common = sum(min(c1.get(k, 0), c2.get(k, 0)) for k in set(c1) | set(c2))
    node_lb = max(len(g1.nodes), len(g2.nodes)) - common
    edge_lb = abs(len(g1.edges) - len(g2.edges))
    return float(node_lb + edge_lb)


def _ged_upper_bound(g1: CircuitDag, g2: CircuitDag) -> float:
    """Cost of a greedy label-preserving alignment in list order."""
    by_label_1: dict[str, list[int]] = {}
    by_label_2: dict[str, list[int]] = {}
    for g in g1.nodes:
        by_label_1.setdefault(g.kind.value, []).append(g.uid)
    for g in g2.nodes:
        by_label_2.setdefault(g.kind.value, []).append(g.uid)
    mapping: dict[int, int] = {}
    for label, us in by_label_1.items():
        vs = by_label_2.get(label, [])
        for u, v in zip(us, vs):
            mapping[u] = v
    rest1 = [g.uid for g in g1.nodes if g.uid not in mapping]
    mapped_targets = set(mapping.values())
    rest2 = [g.uid for g in g2.nodes if g.uid not in mapped_targets]
    relabels = min(len(rest1), len(rest2))
    for u, v in zip(rest1, rest2):
        mapping[u] = v
    node_cost = relabels + abs(len(rest1) - len(rest2))
    e2 = set(g2.edges)
    matched = 0
    for u, v in g1.edges:
        if u in mapping and v in mapping and (mapping[u], mapping[v]) in e2:
            matched += 1
    edge_cost = (len(g1.edges) - matched) + (len(g2.edges) - matched)
    return float(node_cost + edge_cost)


@dataclass(frozen=True)
class ObfuscationReport:
    tvd: float | None
    norm_ged: GedResult
    depth_before: int
    depth_after: int
    duration_before: float
    duration_after: float
    gate_count_before: int
    gate_count_after: int
    fidelity: float | None = None

    def to_json(self) -> dict:
        out = {
            "tvd": self.tvd,
            "norm_ged": self.norm_ged.to_json(),
            "depth_before": self.depth_before,
            "depth_after": self.depth_after,
            "duration_before_ns": self.duration_before,
            "duration_after_ns": self.duration_after,
            "gate_count_before": self.gate_count_before,
            "gate_count_after": self.gate_count_after,
        }
        if self.fidelity is not None:
            out["fidelity"] = self.fidelity
        return out


def overhead_report(
    before: Circuit,
    sched_before: AnalogSchedule,
    after: Circuit,
    sched_after: AnalogSchedule,
    counts_pair: tuple[dict, dict] | None = None,
    state_fidelity: float | None = None,
    ged_budget: int = DEFAULT_GED_BUDGET,
) -> ObfuscationReport:
    """Assemble depth/duration/gate-count deltas plus TVD and normGED."""
    from .circuit import build_dag  # local to keep import graph flat

    if before.n_qubits != after.n_qubits:
        raise MetricsError("circuit widths differ")
    dag_b, dag_a = build_dag(before), build_dag(after)
    return ObfuscationReport(
        tvd=tvd(*counts_pair) if counts_pair else None,
        norm_ged=norm_ged(dag_b, dag_a, ged_budget),
        depth_before=dag_depth(dag_b),
        depth_after=dag_depth(dag_a),
        duration_before=sched_before.makespan,
        duration_after=sched_after.makespan,
        gate_count_before=len(before.gates),
        gate_count_after=len(after.gates),
        fidelity=state_fidelity,
    )
