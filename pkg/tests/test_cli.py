import csv
import hashlib
import json
import subprocess
import sys
from pathlib import Path

import pytest

from vqalab.cli import (
    EXPERIMENTS,
    _ensure_finite,
    list_experiments,
    main,
    run,
)

REPO = Path(__file__).resolve().parents[1]


def write_config(path: Path, kind: str, params: dict, seed: int = 0) -> str:
    path.write_text(json.dumps({"kind": kind, "seed": seed, "params": params}))
    return str(path)


def read_summary(out_dir: Path) -> dict:
    with open(out_dir / "summary.csv", newline="") as fh:
        return next(csv.DictReader(fh))


# -- schema listing ---------------------------------------------------------------

def test_twelve_experiment_kinds_listed():
    text = list_experiments()
    assert len(EXPERIMENTS) == 12
    for kind in EXPERIMENTS:
        assert kind in text
    assert "dvqa" in text


def test_xeb_schema_declares_default_threshold():
    text = list_experiments()
    xeb_block = text[text.index("xeb\n") :]
    assert "threshold" in xeb_block
    assert "1.5/2^n" in xeb_block


def test_list_command_exits_zero(capsys):
    assert main(["list"]) == 0
    assert "chi2-tail" in capsys.readouterr().out


# -- validation ---------------------------------------------------------------------

def test_malformed_json_exits_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{nope")
    assert run(str(cfg), out=str(tmp_path / "out")) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_config_exits_2(tmp_path, capsys):
    assert run(str(tmp_path / "absent.json"), out=str(tmp_path / "out")) == 2


def test_unknown_field_named_in_message(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "cfg.json", "simon",
        {"n": 3, "samples_per_side": 8, "num_circuit_draws": 2, "bogus": 1},
    )
    assert run(cfg, out=str(tmp_path / "out")) == 2
    assert "bogus" in capsys.readouterr().err


def test_missing_required_field_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", "simon", {"n": 3})
    assert run(cfg, out=str(tmp_path / "out")) == 2
    assert "samples_per_side" in capsys.readouterr().err


def test_unknown_kind_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path / "cfg.json", "teleport", {})
    assert run(cfg, out=str(tmp_path / "out")) == 2


def test_unknown_top_level_field_exits_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kind": "chi2-tail", "params": {}, "extra": 1}))
    assert run(str(cfg), out=str(tmp_path / "out")) == 2


def test_wrong_type_exits_2(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "cfg.json", "chi2-tail", {"degrees": "many", "x": 5.0, "trials": 10},
    )
    assert run(cfg, out=str(tmp_path / "out")) == 2
    assert "degrees" in capsys.readouterr().err


def test_bad_generator_spec_exits_2(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "cfg.json", "efi-check",
        {"gen0": {"type": "warp"}, "gen1": {"type": "uniform", "num_bits": 2},
         "m": 10, "trials": 2},
    )
    assert run(cfg, out=str(tmp_path / "out")) == 2


def test_hybrid_rejects_wide_generators(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "cfg.json", "hybrid",
        {"gen0": {"type": "uniform", "num_bits": 2},
         "gen1": {"type": "uniform", "num_bits": 2},
         "t": 2, "num_challenges": 10},
    )
    assert run(cfg, out=str(tmp_path / "out")) == 2


def test_runtime_failure_exits_3(tmp_path, capsys):
    # micro-sampler search refuses n=5 outputs, after validation passes
    cfg = write_config(
        tmp_path / "cfg.json", "mcsp",
        {"source": {"type": "uniform", "num_bits": 5}, "m": 50,
         "size_bound": 1, "tolerance": 0.1},
    )
    assert run(cfg, out=str(tmp_path / "out")) == 3
    assert "runtime error" in capsys.readouterr().err


def test_workers_flag_validated(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "cfg.json", "chi2-tail", {"degrees": 8, "x": 2.0, "trials": 100},
    )
    assert main(["run", "--config", cfg, "--workers", "0"]) == 2


# -- a real run -----------------------------------------------------------------------

def test_simon_run_summary(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "cfg.json", "simon",
        {"n": 4, "samples_per_side": 16, "num_circuit_draws": 10},
    )
    out = tmp_path / "out"
    assert run(cfg, out=str(out), workers=1) == 0
    summary = read_summary(out)
    assert summary["kind"] == "simon"
    assert float(summary["advantage_estimate"]) >= 0.9
    assert float(summary["quantum_accept_rate"]) >= 0.95
    assert float(summary["classical_accept_rate"]) <= 0.05
    rows = (out / "report.jsonl").read_text().splitlines()
    assert len(rows) == 10
    first = json.loads(rows[0])
    assert first["config_hash"] == summary["config_hash"]
    assert len(summary["config_hash"]) == 64


SMOKE_CASES = {
    "vqa-game": {"family": "hadamard", "n": 3, "spoofer": "uniform",
                 "distinguisher": "battery", "samples_per_side": 200,
                 "num_circuit_draws": 3, "batches_per_side": 5},
    "uvqa-game": {"family": "random", "n": 4, "depth": 4, "spoofer": "uniform",
                  "distinguisher": "xeb", "samples_per_side": 500,
                  "num_circuit_draws": 3, "batches_per_side": 5},
    "xeb": {"n": 4, "depth": 4, "num_circuits": 5, "samples": 500},
    "simon": {"n": 3, "samples_per_side": 12, "num_circuit_draws": 5,
              "batches_per_side": 5},
    "prs-shadow": {"n": 6, "m": 500, "trials": 5},
    "unidentifiability": {"family": "phase-prs", "n": 6, "m": 500, "trials": 5},
    "haar-collision": {"n": 10, "m": 20, "num_distributions": 5,
                       "batches_per_dist": 500},
    "chi2-tail": {"degrees": 64, "x": 3.0, "trials": 2000},
    "efi-check": {"gen0": {"type": "uniform", "num_bits": 3},
                  "gen1": {"type": "point", "num_bits": 3, "value": 0},
                  "m": 200, "trials": 20},
    "hybrid": {"gen0": {"type": "point", "num_bits": 1, "value": 0},
               "gen1": {"type": "point", "num_bits": 1, "value": 1},
               "t": 3, "num_trials": 500, "num_challenges": 500},
    "mcsp": {"source": {"type": "coin", "bias": 0.25}, "m": 2000,
             "size_bound": 1, "tolerance": 0.05, "num_random_bits": 2},
    "dvqa": {"modulus_bits": 16, "rounds": 4, "num_transcripts": 30},
}


@pytest.mark.parametrize("kind", sorted(SMOKE_CASES))
def test_every_kind_runs(tmp_path, capsys, kind):
    cfg = write_config(tmp_path / "cfg.json", kind, SMOKE_CASES[kind])
    out = tmp_path / "out"
    assert run(cfg, out=str(out), workers=1) == 0
    assert (out / "summary.csv").exists()
    assert (out / "manifest.json").exists()
    summary = read_summary(out)
    assert summary["kind"] == kind


# -- determinism -----------------------------------------------------------------------

def test_repeat_runs_byte_identical(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "cfg.json", "simon",
        {"n": 3, "samples_per_side": 12, "num_circuit_draws": 4, "batches_per_side": 5},
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(cfg, out=str(out1), workers=1) == 0
    assert run(cfg, out=str(out2), workers=1) == 0
    for name in ("summary.csv", "rows.csv", "report.jsonl", "manifest.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name


def test_worker_count_does_not_change_outputs(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "cfg.json", "xeb",
        {"n": 4, "depth": 4, "num_circuits": 6, "samples": 400},
    )
    out1, out2 = tmp_path / "w1", tmp_path / "w3"
    assert run(cfg, out=str(out1), workers=1) == 0
    assert run(cfg, out=str(out2), workers=3) == 0
    assert (out1 / "summary.csv").read_bytes() == (out2 / "summary.csv").read_bytes()
    assert (out1 / "rows.csv").read_bytes() == (out2 / "rows.csv").read_bytes()


def test_seed_override_changes_hash(tmp_path, capsys):
    cfg = write_config(
        tmp_path / "cfg.json", "chi2-tail", {"degrees": 64, "x": 3.0, "trials": 500},
    )
    out1, out2 = tmp_path / "s0", tmp_path / "s1"
    assert run(cfg, out=str(out1), workers=1) == 0
    assert run(cfg, seed=1, out=str(out2), workers=1) == 0
    assert read_summary(out1)["config_hash"] != read_summary(out2)["config_hash"]
    m2 = json.loads((out2 / "manifest.json").read_text())
    assert m2["seed"] == 1 and m2["config"]["seed"] == 1


# -- output formats ---------------------------------------------------------------------

def run_chi2(tmp_path, fmt: str) -> Path:
    cfg = write_config(
        tmp_path / "cfg.json", "chi2-tail", {"degrees": 32, "x": 2.0, "trials": 500},
    )
    out = tmp_path / f"out-{fmt}"
    assert run(cfg, out=str(out), workers=1, fmt=fmt) == 0
    return out


def test_format_jsonl_only(tmp_path, capsys):
    out = run_chi2(tmp_path, "jsonl")
    assert (out / "report.jsonl").exists()
    assert not (out / "rows.csv").exists()
    assert (out / "summary.csv").exists() and (out / "manifest.json").exists()


def test_format_csv_only(tmp_path, capsys):
    out = run_chi2(tmp_path, "csv")
    assert (out / "rows.csv").exists()
    assert not (out / "report.jsonl").exists()


def test_format_both(tmp_path, capsys):
    out = run_chi2(tmp_path, "both")
    assert (out / "rows.csv").exists() and (out / "report.jsonl").exists()


# -- manifest ---------------------------------------------------------------------

def test_manifest_rederives(tmp_path, capsys):
    out = run_chi2(tmp_path, "both")
    manifest = json.loads((out / "manifest.json").read_text())
    canonical = json.dumps(manifest["config"], sort_keys=True, separators=(",", ":"))
    assert hashlib.sha256(canonical.encode()).hexdigest() == manifest["config_hash"]
    for name, recorded in manifest["files"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == recorded
    assert manifest["schema_version"] == 1
    assert "timestamp" not in (out / "manifest.json").read_text()


def test_verify_manifest_script(tmp_path):
    out = run_chi2(tmp_path, "both")
    script = str(REPO / "scripts" / "verify_manifest.py")
    proc = subprocess.run([sys.executable, script, str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "OK" in proc.stdout

    (out / "summary.csv").write_text("tampered\n")
    proc = subprocess.run([sys.executable, script, str(out)], capture_output=True, text=True)
    assert proc.returncode == 1
    assert "mismatch" in proc.stdout


def test_console_entry_point(tmp_path):
    cfg = write_config(
        tmp_path / "cfg.json", "chi2-tail", {"degrees": 16, "x": 2.0, "trials": 200},
    )
    proc = subprocess.run(
        [sys.executable, "-m", "vqalab.cli", "run", "--config", cfg,
         "--out", str(tmp_path / "out"), "--workers", "1"],
        capture_output=True, text=True, cwd=str(REPO),
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert (tmp_path / "out" / "summary.csv").exists()


# -- finiteness guard --------------------------------------------------------------

def test_non_finite_values_refused():
    _ensure_finite({"ok": 1.0, "fine": [2.0, 3]}, "x")
    with pytest.raises(RuntimeError):
        _ensure_finite({"bad": float("nan")}, "x")
    with pytest.raises(RuntimeError):
        _ensure_finite([{"worse": float("inf")}], "x")
