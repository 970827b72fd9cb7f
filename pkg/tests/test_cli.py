"""Command-line workflows, file formats, and exit codes."""
import json
import math

import pytest

import qveil.pathsum
from qveil.bench import toffoli_circuit
from qveil.circuit import Circuit, GateKind, concat, emit_qasm, parse_qasm, same_semantics
from qveil.cli import main
from qveil.simulator import exact_distribution, simulate


@pytest.fixture
def toffoli_file(tmp_path):
    path = tmp_path / "toffoli.qasm"
    path.write_text(emit_qasm(toffoli_circuit()))
    return path


@pytest.fixture
def ek_file(tmp_path):
    path = tmp_path / "ek.json"
    path.write_text(json.dumps({"a": "101", "b": "010"}))
    return path


class TestEncrypt:
    def test_worked_example_key_files(self, tmp_path, toffoli_file, ek_file):
        out = tmp_path / "enc"
        assert main(["encrypt", str(toffoli_file), "--ek", str(ek_file), "--out", str(out)]) == 0
        dk = json.loads((out / "dk.json").read_text())
        assert dk["a"] == "101" and dk["b"] == "110"
        ek = json.loads((out / "ek.json").read_text())
        assert ek["a"] == "101" and ek["b"] == "010"
        enc = parse_qasm((out / "enc_circuit.qasm").read_text())
        assert all(g.kind not in (GateKind.T, GateKind.TDG) for g in enc.gates)
        log = json.loads((out / "replacement_log.json").read_text())
        assert len(log["replacements"]) == 7

    def test_empty_circuit_dk_equals_ek(self, tmp_path):
        src = tmp_path / "empty.qasm"
        src.write_text(emit_qasm(Circuit(2)))
        out = tmp_path / "enc"
        assert main(["encrypt", str(src), "--seed", "5", "--out", str(out)]) == 0
        assert json.loads((out / "ek.json").read_text())["a"] == json.loads(
            (out / "dk.json").read_text()
        )["a"]

    def test_seed_determinism(self, tmp_path, toffoli_file):
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            main(["encrypt", str(toffoli_file), "--seed", "42", "--out", str(out)])
            outs.append((out / "dk.json").read_text())
        assert outs[0] == outs[1]

    def test_unsupported_gate_nonzero_exit(self, tmp_path, capsys):
        src = tmp_path / "bad.qasm"
        src.write_text("qreg q[1];\nu3(0.1,0.2,0.3) q[0];\n")
        assert main(["encrypt", str(src), "--out", str(tmp_path / "x")]) == 1
        assert "u3" in capsys.readouterr().err


class TestObfuscate:
    def test_logs_and_flag(self, tmp_path, toffoli_file):
        out = tmp_path / "obf"
        assert main(["obfuscate", str(toffoli_file), "--lambda", "--out", str(out)]) == 0
        log = json.loads((out / "insertion_log.json").read_text())
        kinds = [row["sequence"] for row in log["insertions"]]
        assert kinds.count("XX") == 4 and kinds.count("ZZ_MERGE") == 1
        obf = parse_qasm((out / "obf_circuit.qasm").read_text())
        assert any(g.kind is GateKind.U3 for g in obf.gates)

    def test_no_lambda_no_merge_rows(self, tmp_path, toffoli_file):
        out = tmp_path / "obf"
        main(["obfuscate", str(toffoli_file), "--out", str(out)])
        log = json.loads((out / "insertion_log.json").read_text())
        assert all(row["sequence"] != "ZZ_MERGE" for row in log["insertions"])

    def test_idle_free_circuit_unchanged(self, tmp_path):
        src = tmp_path / "line.qasm"
        circ = Circuit.build(1, [(GateKind.H, 0)] * 4)
        src.write_text(emit_qasm(circ))
        out = tmp_path / "obf"
        main(["obfuscate", str(src), "--out", str(out)])
        assert same_semantics(parse_qasm((out / "obf_circuit.qasm").read_text()), circ)


class TestVerify:
    def test_good_pipeline_exit_zero(self, tmp_path, toffoli_file):
        enc_dir, obf_dir = tmp_path / "enc", tmp_path / "obf"
        main(["encrypt", str(toffoli_file), "--seed", "7", "--out", str(enc_dir)])
        main(["obfuscate", str(enc_dir / "enc_circuit.qasm"), "--lambda", "--out", str(obf_dir)])
        code = main([
            "verify", str(enc_dir / "enc_circuit.qasm"), str(obf_dir / "obf_circuit.qasm"),
            "--out", str(tmp_path / "v"),
        ])
        assert code == 0
        verdict = json.loads((tmp_path / "v" / "verdict.json").read_text())
        assert verdict["positive"]["equal"] is True
        assert verdict["negative"]["equal"] is False

    def test_tampered_exit_two(self, tmp_path, toffoli_file):
        c = toffoli_circuit()
        tampered = Circuit(3, c.gates + (c.gates[2],), c.measured_qubits)
        bad = tmp_path / "bad.qasm"
        bad.write_text(emit_qasm(tampered))
        assert main(["verify", str(toffoli_file), str(bad), "--out", str(tmp_path / "v")]) == 2

    def test_undetected_mutation_exit_three(self, tmp_path, toffoli_file, monkeypatch):
        # force the degenerate case: the "mutation" returns the circuit unchanged
        monkeypatch.setattr(qveil.pathsum, "mutate_circuit", lambda c, r, s: c)
        code = main([
            "verify", str(toffoli_file), str(toffoli_file), "--out", str(tmp_path / "v"),
        ])
        assert code == 3

    def test_canonical_mode(self, tmp_path, toffoli_file):
        assert main([
            "verify", str(toffoli_file), str(toffoli_file), "--canonical",
            "--out", str(tmp_path / "v"),
        ]) == 0


class TestDecrypt:
    def test_zero_key_identity(self, tmp_path):
        counts_file = tmp_path / "counts.json"
        counts_file.write_text(json.dumps({"00": 700, "11": 300, "_shots": 1000}))
        dk_file = tmp_path / "dk.json"
        dk_file.write_text(json.dumps({"a": "00", "b": "10"}))
        out = tmp_path / "dec.json"
        assert main(["decrypt", str(counts_file), str(dk_file), "--out", str(out)]) == 0
        decrypted = json.loads(out.read_text())
        assert decrypted["00"] == 700 and decrypted["11"] == 300
        assert decrypted["_shots"] == 1000

    def test_known_flip(self, tmp_path):
        counts_file = tmp_path / "counts.json"
        counts_file.write_text(json.dumps({"10": 700, "11": 300, "_shots": 1000}))
        dk_file = tmp_path / "dk.json"
        dk_file.write_text(json.dumps({"a": "10", "b": "00"}))
        out = tmp_path / "dec.json"
        main(["decrypt", str(counts_file), str(dk_file), "--out", str(out)])
        decrypted = json.loads(out.read_text())
        assert decrypted["00"] == 700 and decrypted["01"] == 300

    def test_width_mismatch_exit_one(self, tmp_path):
        counts_file = tmp_path / "counts.json"
        counts_file.write_text(json.dumps({"0": 5, "_shots": 5}))
        dk_file = tmp_path / "dk.json"
        dk_file.write_text(json.dumps({"a": "00", "b": "00"}))
        assert main(["decrypt", str(counts_file), str(dk_file)]) == 1


class TestSimulateCmd:
    def test_counts_format(self, tmp_path):
        src = tmp_path / "bell.qasm"
        src.write_text(emit_qasm(Circuit.build(2, [(GateKind.H, 0), (GateKind.CX, 0, 1)], (0, 1))))
        out = tmp_path / "counts.json"
        assert main(["simulate", str(src), "--shots", "1000", "--seed", "3", "--out", str(out)]) == 0
        counts = json.loads(out.read_text())
        assert counts["_shots"] == 1000
        assert sum(v for k, v in counts.items() if not k.startswith("_")) == 1000

    def test_prefix_concat(self, tmp_path):
        circ = tmp_path / "x.qasm"
        circ.write_text(emit_qasm(Circuit.build(1, [(GateKind.X, 0)], (0,))))
        prefix = tmp_path / "p.qasm"
        prefix.write_text(emit_qasm(Circuit.build(1, [(GateKind.X, 0)])))
        out = tmp_path / "c.json"
        main(["simulate", str(circ), "--prefix", str(prefix), "--shots", "10", "--out", str(out)])
        counts = json.loads(out.read_text())
        assert counts["0"] == 10  # X then X is identity


class TestMetricsCmd:
    def test_report_written(self, tmp_path, toffoli_file):
        obf_dir = tmp_path / "obf"
        main(["obfuscate", str(toffoli_file), "--lambda", "--out", str(obf_dir)])
        out = tmp_path / "metrics.json"
        assert main([
            "metrics", str(toffoli_file), str(obf_dir / "obf_circuit.qasm"), "--out", str(out),
        ]) == 0
        report = json.loads(out.read_text())
        assert report["duration_after_ns"] == report["duration_before_ns"]
        assert report["gate_count_after"] > report["gate_count_before"]
        assert 0.0 <= report["norm_ged"]["value"] <= 1.0


class TestBenchCmd:
    def test_random_suite_deterministic_csv(self, tmp_path):
        outs = []
        for sub in ("one", "two"):
            out = tmp_path / sub
            code = main([
                "bench", "random", "--seed", "11", "--repeats", "2", "--out", str(out),
            ])
            assert code == 0
            outs.append((out / "bench.csv").read_text())
        assert outs[0] == outs[1]
        header = outs[0].splitlines()[0]
        assert header == "benchmark,tvd,norm_ged,depth_delta,duration_delta"

    def test_toffoli_suite_all_positive(self, tmp_path):
        out = tmp_path / "bench"
        assert main(["bench", "toffoli", "--repeats", "2", "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["positive_pass_rate"] == 1.0
        assert summary["reference_averages"]["tvd"] == 0.7

    def test_unknown_suite_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["bench", "nope"])

    def test_worker_pool_matches_sequential(self, tmp_path):
        csvs = []
        for sub, jobs in (("seq", "1"), ("par", "2")):
            out = tmp_path / sub
            assert main([
                "bench", "grover", "--seed", "2", "--repeats", "1",
                "--jobs", jobs, "--out", str(out),
            ]) == 0
            csvs.append((out / "bench.csv").read_text())
        assert csvs[0] == csvs[1]


class TestDurationsFile:
    def test_custom_table_changes_schedule(self, tmp_path, toffoli_file):
        table = {k.value: 1.0 for k in GateKind}
        table["cx"] = table["cz"] = 2.0
        table["z"] = 0.0
        dur_file = tmp_path / "durations.json"
        dur_file.write_text(json.dumps(table))
        out = tmp_path / "obf"
        assert main([
            "obfuscate", str(toffoli_file), "--durations", str(dur_file),
            "--lambda", "--out", str(out),
        ]) == 0
        log = json.loads((out / "insertion_log.json").read_text())
        assert max(row["window_end_ns"] for row in log["insertions"]) <= 17.0

    def test_missing_entry_fails(self, tmp_path, toffoli_file):
        dur_file = tmp_path / "durations.json"
        dur_file.write_text(json.dumps({"h": 30.0}))
        assert main([
            "obfuscate", str(toffoli_file), "--durations", str(dur_file),
            "--out", str(tmp_path / "o"),
        ]) == 1


class TestPipelineCmd:
    def test_end_to_end83(self, tmp_path, toffoli_file):
        out = tmp_path / "pipe"
        assert main([
            "pipeline", str(toffoli_file), "--lambda", "--seed", "4",
            "--shots", "20000", "--out", str(out),
        ]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["verified"] is True
        # decrypted counts approximate the plaintext distribution
        decrypted = {
            k: v for k, v in json.loads((out / "counts_decrypted.json").read_text()).items()
            if not k.startswith("_")
        }
        plain_dist = exact_distribution(simulate(toffoli_circuit()), (0, 1, 2))
        for key, p in plain_dist.items():
            sigma = math.sqrt(20000 * p * (1 - p)) or 1.0
            assert abs(decrypted.get(key, 0) - 20000 * p) <= 5 * sigma

    def test_composition_invariant_exact(self, tmp_path):
        # decrypt(dist(prefix + obf)) equals dist(original) exactly
        src = tmp_path / "c.qasm"
        circ = Circuit.build(
            3,
            [(GateKind.H, 0), (GateKind.CX, 0, 1), (GateKind.T, 1),
             (GateKind.H, 2), (GateKind.CZ, 1, 2), (GateKind.TDG, 0)],
            measured=(0, 1, 2),
        )
        src.write_text(emit_qasm(circ))
        from qveil.decouple import insert_dd
        from qveil.qotp import decrypt_counts, encrypt_circuit, keygen

        enc = encrypt_circuit(circ, keygen(3, seed=8))
        obf = insert_dd(enc.enc_circuit, zz_merge=True)
        scrambled = exact_distribution(simulate(concat(enc.enc_prefix, obf)), (0, 1, 2))
        quantized = {k: round(v * 10 ** 12) for k, v in scrambled.items()}
        decrypted = decrypt_counts(quantized, enc.dk, (0, 1, 2))
        plain = exact_distribution(simulate(circ), (0, 1, 2))
        for key, p in plain.items():
            assert abs(decrypted.get(key, 0) / 10 ** 12 - p) < 1e-9


class TestConfigFile:
    def test_ratio_band_enforced(self, tmp_path, toffoli_file):
        assert main([
            "obfuscate", str(toffoli_file), "--ratio", "0.5", "--out", str(tmp_path / "o"),
        ]) == 1
        assert main([
            "obfuscate", str(toffoli_file), "--ratio", "0.5", "--allow-wide-ratio",
            "--out", str(tmp_path / "o2"),
        ]) == 0

    def test_config_json(self, tmp_path, toffoli_file):
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"seed": 3, "zz_merge": True, "shots": 500}))
        out = tmp_path / "pipe"
        assert main(["pipeline", str(toffoli_file), "--config", str(cfg), "--out", str(out)]) == 0
        raw = json.loads((out / "counts_raw.json").read_text())
        assert raw["_shots"] == 500
