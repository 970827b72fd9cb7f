"""Command-line surface: encrypt, obfuscate, verify, decrypt, simulate, metrics, bench, pipeline.

All randomness flows from --seed, split per stage; every output file records
the seed it was produced from (JSON keys starting with "_" are metadata).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import bench as bench_mod
from .circuit import Circuit, concat, emit_qasm, gate_census, parse_qasm
from .config import (
    DEFAULT_GED_BUDGET,
    DEFAULT_RATIO,
    DEFAULT_REPEATS,
    DEFAULT_SAMPLES,
    DEFAULT_SHOTS,
    DEFAULT_SIM_CAP,
    PipelineConfig,
    REFERENCE_NORM_GED,
    REFERENCE_TVD,
    stage_seed,
)
from .decouple import ZZ_MERGE, DurationTable, obfuscate, schedule_circuit
from .metrics import norm_ged, overhead_report, tvd
from .pathsum import canonical_equal, positive_negative_test
from .qotp import PauliKey, decrypt_counts, encrypt_circuit, keygen
from .simulator import exact_distribution, fidelity, sample_counts, simulate


def _write_json(path: Path, obj: dict, seed: int | None = None) -> None:
    if seed is not None:
        obj = {"_seed": seed, **obj}
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_counts(path: Path, counts: dict[str, int], shots: int, seed: int | None = None) -> None:
    obj: dict = dict(sorted(counts.items()))
    obj["_shots"] = shots
    if seed is not None:
        obj["_seed"] = seed
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _read_counts(path: Path) -> tuple[dict[str, int], int]:
    raw = json.loads(Path(path).read_text())
    counts = {k: int(v) for k, v in raw.items() if not k.startswith("_")}
    shots = int(raw.get("_shots", sum(counts.values())))
    return counts, shots


def _write_circuit(path: Path, c: Circuit, seed: int | None = None) -> None:
    header = f"seed: {seed}" if seed is not None else None
    path.write_text(emit_qasm(c, header_comment=header))


def _load_config(args) -> PipelineConfig:
    cfg = PipelineConfig()
    if getattr(args, "config", None):
        raw = json.loads(Path(args.config).read_text())
        for key in ("seed", "zz_merge", "samples", "ratio", "shots", "cap", "repeats"):
            if key in raw:
                setattr(cfg, key, raw[key])
        if "durations" in raw:
            cfg.durations = raw["durations"]
    for key in ("seed", "samples", "ratio", "shots", "cap", "repeats"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "zz_merge", None):
        cfg.zz_merge = True
    if getattr(args, "durations", None):
        cfg.durations = json.loads(Path(args.durations).read_text())
    cfg.validate(allow_wide_ratio=getattr(args, "allow_wide_ratio", False))
    return cfg


def _duration_table(cfg: PipelineConfig) -> DurationTable:
    if cfg.durations is None:
        return DurationTable.default()
    return DurationTable.from_json(cfg.durations)


def _out_dir(args, default: str) -> Path:
    out = Path(args.out) if args.out else Path(default)
    out.mkdir(parents=True, exist_ok=True)
    return out


# --- commands ---------------------------------------------------------------

def cmd_encrypt(args) -> int:
    cfg = _load_config(args)
    circ = parse_qasm(Path(args.circuit).read_text())
    if args.ek:
        ek = PauliKey.from_json(json.loads(Path(args.ek).read_text()))
    else:
        ek = keygen(circ.n_qubits, stage_seed(cfg.seed, "keygen"))
    result = encrypt_circuit(circ, ek)
    out = _out_dir(args, "encrypted")
    _write_circuit(out / "enc_circuit.qasm", result.enc_circuit, cfg.seed)
    _write_circuit(out / "enc_prefix.qasm", result.enc_prefix, cfg.seed)
    _write_json(out / "ek.json", result.ek.to_json(), cfg.seed)
    _write_json(out / "dk.json", result.dk.to_json(), cfg.seed)
    _write_json(
        out / "replacement_log.json",
        {"replacements": [
            {"uid": uid, "kind": kind, "sign": sign}
            for uid, kind, sign in result.replacement_log
        ]},
        cfg.seed,
    )
    print(f"encrypted {args.circuit} -> {out}/ (dk a={''.join(map(str, result.dk.a))})")
    return 0


def cmd_obfuscate(args) -> int:
    cfg = _load_config(args)
    circ = parse_qasm(Path(args.circuit).read_text())
    durations = _duration_table(cfg)
    obf, plans = obfuscate(circ, durations, cfg.zz_merge)
    out = _out_dir(args, "obfuscated")
    _write_circuit(out / "obf_circuit.qasm", obf, cfg.seed)
    log = [
        {
            "qubit": p.window.qubit,
            "window_start_ns": p.window.start,
            "window_end_ns": p.window.end,
            "sequence": p.choice.kind,
            "pulses": [k.value for k in p.choice.pulses],
            "placements_ns": [list(pl) for pl in p.choice.placements],
            "merged_uid": p.merge_uid,
        }
        for p in plans
    ]
    _write_json(out / "insertion_log.json", {"insertions": log}, cfg.seed)
    n_merge = sum(1 for p in plans if p.choice.kind == ZZ_MERGE)
    print(f"obfuscated {args.circuit} -> {out}/ ({len(plans)} insertions, {n_merge} merges)")
    return 0


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    original = parse_qasm(Path(args.original).read_text())
    obf = parse_qasm(Path(args.obfuscated).read_text())
    mode = "canonical" if args.canonical else "sampled"
    report = positive_negative_test(
        original, obf, ratio=cfg.ratio, samples=cfg.samples,
        seed=stage_seed(cfg.seed, "verify"), mode=mode,
    )
    negative_equal = report.negative.equal
    if negative_equal and mode == "sampled":
        # sampling missed the mutation: the canonical check settles it
        from .pathsum import circuit_to_pathsum as to_ps, mutate_circuit

        fake = mutate_circuit(obf, cfg.ratio, stage_seed(stage_seed(cfg.seed, "verify"), "mutate"))
        negative_equal = canonical_equal(to_ps(obf), to_ps(fake)).equal
    out = _out_dir(args, "verify")
    _write_json(out / "verdict.json", report.to_json(), cfg.seed)
    if not report.positive.equal:
        print("FAIL: obfuscated circuit is not equivalent to the original", file=sys.stderr)
        return 2
    if negative_equal:
        print("FAIL: mutated circuit was not detected", file=sys.stderr)
        return 3
    print(
        f"verified: positive equal ({report.positive_ms:.2f} ms), "
        f"negative detected ({report.negative_ms:.2f} ms)"
    )
    return 0


def cmd_decrypt(args) -> int:
    counts, shots = _read_counts(Path(args.counts))
    dk = PauliKey.from_json(json.loads(Path(args.dk).read_text()))
    measured = None
    if args.circuit:
        measured = parse_qasm(Path(args.circuit).read_text()).measured_qubits
    decrypted = decrypt_counts(counts, dk, measured)
    out_path = Path(args.out) if args.out else Path(args.counts).with_suffix(".decrypted.json")
    _write_counts(out_path, decrypted, shots)
    print(f"decrypted {args.counts} -> {out_path}")
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    circ = parse_qasm(Path(args.circuit).read_text())
    if args.prefix:
        circ = concat(parse_qasm(Path(args.prefix).read_text()), circ)
    state = simulate(circ, cap=cfg.cap)
    measured = circ.measured_qubits or None
    out_path = Path(args.out) if args.out else Path(args.circuit).with_suffix(".counts.json")
    if args.exact:
        dist = exact_distribution(state, measured)
        _write_json(out_path, {"probabilities": dist}, cfg.seed)
    else:
        seed = stage_seed(cfg.seed, "sample")
        counts = sample_counts(state, cfg.shots, seed, measured)
        _write_counts(out_path, counts, cfg.shots, seed)
    print(f"simulated {args.circuit} -> {out_path}")
    return 0


def cmd_metrics(args) -> int:
    cfg = _load_config(args)
    before = parse_qasm(Path(args.before).read_text())
    after = parse_qasm(Path(args.after).read_text())
    durations = _duration_table(cfg)
    counts_pair = None
    if args.counts_before and args.counts_after:
        counts_pair = (_read_counts(args.counts_before)[0], _read_counts(args.counts_after)[0])
    report = overhead_report(
        before, schedule_circuit(before, durations),
        after, schedule_circuit(after, durations),
        counts_pair=counts_pair,
        ged_budget=args.ged_budget,
    )
    out_path = Path(args.out) if args.out else Path("metrics.json")
    _write_json(out_path, report.to_json(), cfg.seed)
    print(f"metrics -> {out_path}")
    return 0


def _pipeline_entry(name: str, circ: Circuit, cfg: PipelineConfig, repeat: int) -> dict:
    """One encrypt -> obfuscate -> verify -> (simulate) -> metrics run."""
    seed = stage_seed(cfg.seed, f"{name}/{repeat}")
    ek = keygen(circ.n_qubits, stage_seed(seed, "keygen"))
    enc = encrypt_circuit(circ, ek)
    durations = _duration_table(cfg)
    obf, plans = obfuscate(enc.enc_circuit, durations, cfg.zz_merge)
    report = positive_negative_test(
        enc.enc_circuit, obf, ratio=cfg.ratio, samples=cfg.samples,
        seed=stage_seed(seed, "verify"),
    )
    entry: dict = {
        "benchmark": name,
        "repeat": repeat,
        "n_qubits": circ.n_qubits,
        "census": gate_census(circ),
        "insertions": len(plans),
        "positive_equal": report.positive.equal,
        "negative_detected": not report.negative.equal,
        "positive_ms": report.positive_ms,
        "negative_ms": report.negative_ms,
    }
    sched_before = schedule_circuit(circ, durations)
    sched_after = schedule_circuit(obf, durations)
    entry["depth_delta"] = gate_census(obf)["depth"] - entry["census"]["depth"]
    entry["duration_delta_ns"] = sched_after.makespan - sched_before.makespan
    from .circuit import build_dag

    ged = norm_ged(build_dag(circ), build_dag(obf), DEFAULT_GED_BUDGET)
    entry["norm_ged"] = ged.value
    entry["norm_ged_mode"] = ged.mode
    if circ.n_qubits <= cfg.cap:
        plain = simulate(circ, cap=cfg.cap)
        scrambled = simulate(concat(enc.enc_prefix, obf), cap=cfg.cap)
        measured = circ.measured_qubits or None
        entry["tvd"] = tvd(
            exact_distribution(plain, measured), exact_distribution(scrambled, measured)
        )
        decrypted = decrypt_counts(
            exact_round(exact_distribution(scrambled, measured), cfg.shots),
            enc.dk, circ.measured_qubits or tuple(range(circ.n_qubits)),
        )
        entry["decrypt_tvd"] = tvd(
            decrypted, exact_round(exact_distribution(plain, measured), cfg.shots)
        )
        entry["fidelity_pre_post"] = fidelity(
            simulate(enc.enc_circuit, cap=cfg.cap), simulate(obf, cap=cfg.cap)
        )
    else:
        entry["tvd"] = None
        entry["decrypt_tvd"] = None
        entry["fidelity_pre_post"] = None
    return entry


def exact_round(dist: dict[str, float], shots: int) -> dict[str, int]:
    """Deterministic shot counts from an exact distribution (largest remainders)."""
    items = sorted(dist.items())
    raw = [(k, p * shots) for k, p in items]
    counts = {k: int(v) for k, v in raw}
    leftover = shots - sum(counts.values())
    remainders = sorted(raw, key=lambda kv: kv[1] - int(kv[1]), reverse=True)
    for k, _ in remainders[:leftover]:
        counts[k] += 1
    return {k: v for k, v in counts.items() if v > 0}


def _bench_one(payload):
    name, qasm_text, cfg_dict, repeats = payload
    cfg = PipelineConfig(**cfg_dict)
    circ = parse_qasm(qasm_text)
    return [_pipeline_entry(name, circ, cfg, r) for r in range(repeats)]


def cmd_bench(args) -> int:
    cfg = _load_config(args)
    entries = bench_mod.suite(args.suite, stage_seed(cfg.seed, "suite"))
    out = _out_dir(args, f"bench_{args.suite}")
    payloads = [
        (name, emit_qasm(circ), cfg.__dict__ | {"extras": {}}, cfg.repeats)
        for name, circ in entries
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            all_rows = [row for rows in pool.map(_bench_one, payloads) for row in rows]
    else:
        all_rows = [row for payload in payloads for row in _bench_one(payload)]

    # average the repeats per benchmark for the plot-ready table
    csv_path = out / "bench.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["benchmark", "tvd", "norm_ged", "depth_delta", "duration_delta"])
        for name, _ in entries:
            rows = [r for r in all_rows if r["benchmark"] == name]
            tvds = [r["tvd"] for r in rows if r["tvd"] is not None]
            writer.writerow([
                name,
                f"{sum(tvds) / len(tvds):.6f}" if tvds else "",
                f"{sum(r['norm_ged'] for r in rows) / len(rows):.6f}",
                f"{sum(r['depth_delta'] for r in rows) / len(rows):.2f}",
                f"{sum(r['duration_delta_ns'] for r in rows) / len(rows):.2f}",
            ])
    summary = {
        "suite": args.suite,
        "repeats": cfg.repeats,
        "entries": all_rows,
        "positive_pass_rate": sum(r["positive_equal"] for r in all_rows) / len(all_rows),
        "negative_detect_rate": sum(r["negative_detected"] for r in all_rows) / len(all_rows),
        "reference_averages": {
            "tvd": REFERENCE_TVD,
            "norm_ged": REFERENCE_NORM_GED,
            "note": "published hardware-scale averages, for context only",
        },
    }
    _write_json(out / "summary.json", summary, cfg.seed)
    print(f"bench suite '{args.suite}' -> {out}/ "
          f"(positive pass rate {summary['positive_pass_rate']:.0%})")
    return 0


def cmd_pipeline(args) -> int:
    cfg = _load_config(args)
    circ = parse_qasm(Path(args.circuit).read_text())
    out = _out_dir(args, "pipeline")
    seed = cfg.seed

    ek = keygen(circ.n_qubits, stage_seed(seed, "keygen"))
    enc = encrypt_circuit(circ, ek)
    durations = _duration_table(cfg)
    obf, plans = obfuscate(enc.enc_circuit, durations, cfg.zz_merge)

    _write_circuit(out / "enc_circuit.qasm", enc.enc_circuit, seed)
    _write_circuit(out / "enc_prefix.qasm", enc.enc_prefix, seed)
    _write_circuit(out / "obf_circuit.qasm", obf, seed)
    _write_json(out / "ek.json", enc.ek.to_json(), seed)
    _write_json(out / "dk.json", enc.dk.to_json(), seed)

    report = positive_negative_test(
        enc.enc_circuit, obf, ratio=cfg.ratio, samples=cfg.samples,
        seed=stage_seed(seed, "verify"),
    )
    _write_json(out / "verdict.json", report.to_json(), seed)
    if not report.passed:
        print("pipeline verification failed", file=sys.stderr)
        return 2 if not report.positive.equal else 3

    summary: dict = {"verified": True, "insertions": len(plans)}
    if circ.n_qubits <= cfg.cap:
        measured = circ.measured_qubits or None
        plain_state = simulate(circ, cap=cfg.cap)
        scrambled_state = simulate(concat(enc.enc_prefix, obf), cap=cfg.cap)
        sample_seed = stage_seed(seed, "sample")
        raw_counts = sample_counts(scrambled_state, cfg.shots, sample_seed, measured)
        _write_counts(out / "counts_raw.json", raw_counts, cfg.shots, sample_seed)
        decrypted = decrypt_counts(
            raw_counts, enc.dk, circ.measured_qubits or tuple(range(circ.n_qubits))
        )
        _write_counts(out / "counts_decrypted.json", decrypted, cfg.shots, sample_seed)
        plain_counts = sample_counts(plain_state, cfg.shots, stage_seed(seed, "plain"), measured)
        _write_counts(out / "counts_plain.json", plain_counts, cfg.shots, seed)
        metrics_report = overhead_report(
            circ, schedule_circuit(circ, durations),
            obf, schedule_circuit(obf, durations),
            counts_pair=(plain_counts, raw_counts),
        )
        _write_json(out / "report.json", metrics_report.to_json(), seed)
        summary["tvd"] = metrics_report.tvd
        summary["decrypted_vs_plain_tvd"] = tvd(decrypted, plain_counts)
    _write_json(out / "summary.json", summary, seed)
    print(f"pipeline complete -> {out}/")
    return 0


# --- argument wiring --------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="root seed (default 0)")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="output file or directory")
    p.add_argument("--lambda", dest="zz_merge", action="store_true", default=None,
                   help="enable the ZZ-merge branch (structure over decoherence)")
    p.add_argument("--durations", help="JSON gate-duration table (ns)")
    p.add_argument("--samples", type=int, default=None, help=f"equivalence sample count (default {DEFAULT_SAMPLES})")
    p.add_argument("--ratio", type=float, default=None, help=f"mutation ratio (default {DEFAULT_RATIO})")
    p.add_argument("--allow-wide-ratio", action="store_true", help="accept a ratio outside [0.05, 0.15]")
    p.add_argument("--shots", type=int, default=None, help=f"sampling shots (default {DEFAULT_SHOTS})")
    p.add_argument("--cap", type=int, default=None, help=f"simulator width cap (default {DEFAULT_SIM_CAP})")
    p.add_argument("--repeats", type=int, default=None, help=f"bench repetitions (default {DEFAULT_REPEATS})")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qveil",
        description="Encrypt, structure-obfuscate, verify, and decrypt quantum circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encrypt", help="one-time-pad encrypt a circuit")
    p.add_argument("circuit")
    p.add_argument("--ek", help="JSON key file to use instead of generating one")
    _add_common(p)
    p.set_defaults(fn=cmd_encrypt)

    p = sub.add_parser("obfuscate", help="insert decoupling sequences into idle windows")
    p.add_argument("circuit")
    _add_common(p)
    p.set_defaults(fn=cmd_obfuscate)

    p = sub.add_parser("verify", help="positive/negative equivalence test")
    p.add_argument("original")
    p.add_argument("obfuscated")
    p.add_argument("--canonical", action="store_true", help="exact comparison instead of sampling")
    _add_common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("decrypt", help="classically decrypt measurement counts")
    p.add_argument("counts")
    p.add_argument("dk")
    p.add_argument("--circuit", help="circuit file, to read the measured-wire set")
    _add_common(p)
    p.set_defaults(fn=cmd_decrypt)

    p = sub.add_parser("simulate", help="statevector-simulate and sample counts")
    p.add_argument("circuit")
    p.add_argument("--prefix", help="circuit to prepend (e.g. the encryption prefix)")
    p.add_argument("--exact", action="store_true", help="write exact probabilities instead of samples")
    _add_common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("metrics", help="overhead and obfuscation-strength report")
    p.add_argument("before")
    p.add_argument("after")
    p.add_argument("--counts-before")
    p.add_argument("--counts-after")
    p.add_argument("--ged-budget", type=int, default=DEFAULT_GED_BUDGET)
    _add_common(p)
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("bench", help="run a benchmark suite through the full pipeline")
    p.add_argument("suite", choices=bench_mod.SUITES)
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    _add_common(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("pipeline", help="encrypt, obfuscate, verify, simulate, decrypt, report")
    p.add_argument("circuit")
    _add_common(p)
    p.set_defaults(fn=cmd_pipeline)

    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None:
        args.seed = 0
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
