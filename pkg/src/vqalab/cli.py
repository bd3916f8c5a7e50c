"""Batch front door: configure, run, and record any experiment in the package.

One experiment per invocation.  A JSON config names the experiment kind and
its parameters; the runner validates it against a declared schema, executes,
and writes the results to an output directory:

    report.jsonl   one observation per line        (format jsonl or both)
    rows.csv       the same observations, tidy CSV (format csv or both)
    summary.csv    one-row experiment summary      (always)
    manifest.json  config echo, config hash, file hashes, versions (always)

Every row and the summary carry the config hash, so tables can be traced
back to the exact configuration that produced them.  Outputs contain no
timestamps and no machine identifiers: identical config and seed give
byte-identical files at any worker count.

Exit status: 0 done, 2 config invalid, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass

from . import __version__
from .cryptocheck import (
    EfiCandidate,
    chi_squared_tail_check,
    collision_probability_check,
    efi_check,
    generator_distribution,
    generator_num_bits,
    hybrid_amplify,
    majority_one_decider,
    multi_copy_advantage,
    prs_shadow_test,
    single_copy_advantage,
    unidentifiability_test,
)
from .dvqa import run_dvqa_game, setup
from .families import (
    hadamard_family,
    phase_prs_family,
    random_circuit_family,
    simon_family,
)
from .harness import GameConfig, run_uvqa_game, run_vqa_game
from .mcsp import samp_mcsp_bruteforce, sampler_to_netlist
from .qsim import Distribution, output_distribution, sample
from .rng import derive_seed
from .strategies import (
    DistinctUniformSampler,
    OmniscientSampler,
    UniformSampler,
    default_xeb_threshold,
    xeb_score,
)
from .workers import parallel_map

SCHEMA_VERSION = 1

__all__ = ["ConfigError", "EXPERIMENTS", "list_experiments", "main", "run"]


class ConfigError(ValueError):
    """Configuration rejected before execution; maps to exit status 2."""


_REQUIRED = object()


@dataclass(frozen=True)
class Param:
    name: str
    kind: str  # int | float | str | bool | dict
    default: object = _REQUIRED
    choices: tuple = ()
    help: str = ""


def _check_type(name: str, kind: str, value):
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"field {name!r} must be an integer")
    elif kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"field {name!r} must be a number")
        value = float(value)
    elif kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"field {name!r} must be a string")
    elif kind == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"field {name!r} must be true or false")
    elif kind == "dict":
        if not isinstance(value, dict):
            raise ConfigError(f"field {name!r} must be an object")
    return value


def _validate_params(kind: str, schema: tuple, params: dict) -> dict:
    known = {p.name for p in schema}
    for key in params:
        if key not in known:
            raise ConfigError(f"unknown field {key!r} for experiment {kind!r}")
    out = {}
    for p in schema:
        if p.name in params:
            value = _check_type(p.name, p.kind, params[p.name])
            if p.choices and value not in p.choices:
                raise ConfigError(
                    f"field {p.name!r} must be one of {', '.join(map(str, p.choices))}"
                )
            out[p.name] = value
        elif p.default is _REQUIRED:
            raise ConfigError(f"experiment {kind!r} requires field {p.name!r}")
        else:
            out[p.name] = p.default
    return out


# -- shared builders -----------------------------------------------------------

_FAMILY_PARAMS = (
    Param("family", "str", choices=("simon", "random", "phase-prs", "hadamard"),
          help="circuit family"),
    Param("n", "int", help="number of measured bits"),
    Param("depth", "int", 0, help="brickwork depth (random family only)"),
    Param("levels", "int", 2, help="phase granularity (phase-prs family only)"),
    Param("family_seed", "int", 0, help="key material seed for keyed families"),
)


def _build_family(params: dict):
    name = params["family"]
    n = params["n"]
    if n < 1:
        raise ConfigError("field 'n' must be positive")
    if name == "simon":
        return simon_family(n, seed=params["family_seed"])
    if name == "random":
        if params["depth"] < 1:
            raise ConfigError("random family requires field 'depth' >= 1")
        return random_circuit_family(n, params["depth"], seed=params["family_seed"])
    if name == "phase-prs":
        return phase_prs_family(n, key_seed=params["family_seed"], levels=params["levels"])
    return hadamard_family(n)


def _build_generator(name: str, spec: dict):
    """A distribution or family from a nested generator spec."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(f"field {name!r} must be an object with a 'type'")
    kind = spec["type"]
    if kind == "uniform":
        extra = set(spec) - {"type", "num_bits"}
        if extra or "num_bits" not in spec:
            raise ConfigError(f"{name}: uniform generator takes exactly 'num_bits'")
        k = _check_type(f"{name}.num_bits", "int", spec["num_bits"])
        return Distribution(k, [1.0 / (1 << k)] * (1 << k))
    if kind == "point":
        extra = set(spec) - {"type", "num_bits", "value"}
        if extra or not {"num_bits", "value"} <= set(spec):
            raise ConfigError(f"{name}: point generator takes 'num_bits' and 'value'")
        k = _check_type(f"{name}.num_bits", "int", spec["num_bits"])
        v = _check_type(f"{name}.value", "int", spec["value"])
        if not 0 <= v < (1 << k):
            raise ConfigError(f"{name}: value out of range for {k} bits")
        probs = [0.0] * (1 << k)
        probs[v] = 1.0
        return Distribution(k, probs)
    if kind == "coin":
        extra = set(spec) - {"type", "bias"}
        if extra or "bias" not in spec:
            raise ConfigError(f"{name}: coin generator takes exactly 'bias'")
        b = _check_type(f"{name}.bias", "float", spec["bias"])
        if not 0.0 <= b <= 1.0:
            raise ConfigError(f"{name}: bias must lie in [0, 1]")
        return Distribution(1, [1.0 - b, b])
    if kind == "family":
        fields = dict(spec)
        fields.pop("type")
        fam_params = _validate_params(name, _FAMILY_PARAMS, fields)
        return _build_family(fam_params)
    raise ConfigError(f"{name}: unknown generator type {kind!r}")


def _build_spoofer(name: str, family, seed: int):
    n = family.num_qubits
    if name == "uniform":
        return UniformSampler(n).description(seed)
    if name == "distinct-uniform":
        return DistinctUniformSampler(n).description(seed)
    # omniscient: embed a representative circuit; draws follow the trial's law
    circuit, _ = family.draw(derive_seed(seed, 9))
    return OmniscientSampler(circuit).description(seed)


# -- experiment runners ----------------------------------------------------------

_GAME_PARAMS = _FAMILY_PARAMS + (
    Param("spoofer", "str", "uniform", choices=("uniform", "distinct-uniform", "omniscient"),
          help="classical sampler"),
    Param("distinguisher", "str", choices=("xeb", "simon", "battery"), help="decider"),
    Param("threshold", "float", -1.0, help="xeb accept threshold; -1 means 1.5/2^n"),
    Param("alpha", "float", 0.02, help="battery test level"),
    Param("samples_per_side", "int", help="samples per batch"),
    Param("num_circuit_draws", "int", help="independent circuit draws"),
    Param("batches_per_side", "int", 20, help="accept/reject batches per side per draw"),
)


def _distinguisher_params(params: dict) -> dict:
    if params["distinguisher"] == "xeb" and params["threshold"] >= 0:
        return {"threshold": params["threshold"]}
    if params["distinguisher"] == "battery":
        return {"alpha": params["alpha"]}
    return {}


def _run_game(params: dict, seed: int, workers: int, mode: str):
    family = _build_family(params)
    config = GameConfig(
        family=family,
        spoofer=_build_spoofer(params["spoofer"], family, derive_seed(seed, 8)),
        distinguisher=params["distinguisher"],
        samples_per_side=params["samples_per_side"],
        num_circuit_draws=params["num_circuit_draws"],
        distinguisher_params=_distinguisher_params(params),
        batches_per_side=params["batches_per_side"],
        seed=seed,
    )
    runner = run_vqa_game if mode == "VQA" else run_uvqa_game
    report = runner(config, workers=workers)
    rows = [
        {
            "trial": r.trial,
            "circuit_seed": r.circuit_seed,
            "quantum_accepts": r.quantum_accepts,
            "classical_accepts": r.classical_accepts,
        }
        for r in report.per_trial
    ]
    total = report.batches_per_side * len(report.per_trial)
    summary = {
        "mode": report.mode,
        "advantage_estimate": report.advantage_estimate,
        "std_error": report.std_error,
        "quantum_accept_rate": sum(r.quantum_accepts for r in report.per_trial) / total,
        "classical_accept_rate": sum(r.classical_accepts for r in report.per_trial) / total,
        "num_circuit_draws": len(report.per_trial),
        "batches_per_side": report.batches_per_side,
    }
    return rows, summary


def _run_vqa(params, seed, workers):
    return _run_game(params, seed, workers, "VQA")


def _run_uvqa(params, seed, workers):
    return _run_game(params, seed, workers, "UVQA")


_SIMON_PARAMS = (
    Param("n", "int", help="hidden-shift length"),
    Param("samples_per_side", "int", help="samples per batch"),
    Param("num_circuit_draws", "int", help="independent instance draws"),
    Param("batches_per_side", "int", 20),
)


def _run_simon(params, seed, workers):
    full = dict(params)
    full.update(family="simon", depth=0, levels=2, family_seed=0,
                spoofer="uniform", distinguisher="simon", threshold=-1.0, alpha=0.02)
    return _run_game(full, seed, workers, "VQA")


_XEB_PARAMS = (
    Param("n", "int", help="qubits"),
    Param("depth", "int", help="brickwork depth"),
    Param("num_circuits", "int", help="independent circuit draws"),
    Param("samples", "int", help="samples per batch"),
    Param("threshold", "float", -1.0, help="accept threshold; -1 means 1.5/2^n"),
)


def _xeb_one(args):
    n, depth, samples, threshold, seed, index = args
    fam = random_circuit_family(n, depth, seed=derive_seed(seed, 0))
    circuit, _ = fam.draw(derive_seed(seed, 1, index))
    dist = output_distribution(circuit)
    honest = sample(dist, samples, derive_seed(seed, 2, index))
    uniform = UniformSampler(n).draw(samples, derive_seed(seed, 3, index))
    h = xeb_score(circuit, honest, dist)
    u = xeb_score(circuit, uniform, dist)
    return {
        "circuit": index,
        "honest_xeb": h,
        "uniform_xeb": u,
        "honest_accept": int(h >= threshold),
        "uniform_accept": int(u >= threshold),
    }


def _run_xeb(params, seed, workers):
    n = params["n"]
    threshold = params["threshold"] if params["threshold"] >= 0 else default_xeb_threshold(n)
    tasks = [
        (n, params["depth"], params["samples"], threshold, seed, i)
        for i in range(params["num_circuits"])
    ]
    rows = parallel_map(_xeb_one, tasks, workers=workers)
    count = len(rows)
    summary = {
        "mean_honest_xeb": sum(r["honest_xeb"] for r in rows) / count,
        "mean_uniform_xeb": sum(r["uniform_xeb"] for r in rows) / count,
        "mean_honest_xeb_scaled": sum(r["honest_xeb"] for r in rows) / count * (1 << n),
        "mean_uniform_xeb_scaled": sum(r["uniform_xeb"] for r in rows) / count * (1 << n),
        "honest_accept_rate": sum(r["honest_accept"] for r in rows) / count,
        "uniform_accept_rate": sum(r["uniform_accept"] for r in rows) / count,
        "threshold": threshold,
    }
    return rows, summary


_PRS_PARAMS = (
    Param("n", "int", help="qubits"),
    Param("m", "int", help="samples per batch"),
    Param("trials", "int", help="independent key draws"),
    Param("levels", "int", 2, help="phase granularity"),
    Param("alpha", "float", 0.02, help="battery test level"),
)


def _run_prs_shadow(params, seed, workers):
    fam = phase_prs_family(params["n"], key_seed=derive_seed(seed, 4), levels=params["levels"])
    advantage = prs_shadow_test(fam, params["m"], params["trials"], seed, alpha=params["alpha"])
    summary = {
        "advantage": advantage,
        "n": params["n"],
        "m": params["m"],
        "trials": params["trials"],
    }
    return [dict(summary)], summary


_UNID_PARAMS = _FAMILY_PARAMS + (
    Param("m", "int", help="samples per batch"),
    Param("trials", "int", help="independent draw pairs"),
    Param("alpha", "float", 0.02, help="battery test level"),
    Param("identical_control", "bool", False, help="score the same circuit on both sides"),
)


def _run_unidentifiability(params, seed, workers):
    fam = _build_family(params)
    advantage = unidentifiability_test(
        fam, params["m"], params["trials"], seed,
        alpha=params["alpha"], identical_control=params["identical_control"],
    )
    summary = {
        "advantage": advantage,
        "family": params["family"],
        "n": params["n"],
        "m": params["m"],
        "trials": params["trials"],
        "identical_control": int(params["identical_control"]),
    }
    return [dict(summary)], summary


_HAAR_PARAMS = (
    Param("n", "int", help="qubits"),
    Param("m", "int", help="samples per batch"),
    Param("num_distributions", "int", help="independent Haar outcome draws"),
    Param("batches_per_dist", "int", 10_000, help="Monte Carlo batches per draw"),
)


def _run_haar_collision(params, seed, workers):
    report = collision_probability_check(
        params["n"], params["m"], params["num_distributions"],
        batches_per_dist=params["batches_per_dist"], seed=seed,
    )
    rows = [
        {
            "dist_index": i,
            "collision_estimate": est,
            "over_statement": int(est > report.statement_bound),
            "over_markov": int(est > report.markov_bound),
        }
        for i, est in enumerate(report.estimates)
    ]
    summary = {
        "mean_estimate": report.mean_estimate,
        "statement_bound": report.statement_bound,
        "markov_bound": report.markov_bound,
        "frac_over_statement": report.frac_over_statement,
        "frac_over_markov": report.frac_over_markov,
        "statement_vacuous": int(report.statement_vacuous),
        "markov_vacuous": int(report.markov_vacuous),
    }
    return rows, summary


_CHI2_PARAMS = (
    Param("degrees", "int", help="chi-squared degrees of freedom"),
    Param("x", "float", help="tail parameter"),
    Param("trials", "int", help="Monte Carlo draws"),
)


def _run_chi2_tail(params, seed, workers):
    report = chi_squared_tail_check(params["degrees"], params["x"], params["trials"], seed)
    summary = {
        "degrees": report.degrees,
        "x": report.x,
        "trials": report.trials,
        "out_frequency": report.out_frequency,
        "bound": report.bound,
        "sigma": report.sigma,
        "passed": int(report.passed),
        "empirical_mean": report.empirical_mean,
    }
    return [dict(summary)], summary


_EFI_PARAMS = (
    Param("gen0", "dict", help="first generator spec"),
    Param("gen1", "dict", help="second generator spec"),
    Param("m", "int", help="samples per batch"),
    Param("trials", "int", help="batches per side"),
    Param("farness_threshold", "float", 0.1),
    Param("refutation_threshold", "float", 0.1),
)


def _run_efi_check(params, seed, workers):
    candidate = EfiCandidate(
        _build_generator("gen0", params["gen0"]),
        _build_generator("gen1", params["gen1"]),
    )
    report = efi_check(
        candidate, params["m"], params["trials"], seed,
        farness_threshold=params["farness_threshold"],
        refutation_threshold=params["refutation_threshold"],
    )
    summary = {
        "statistical_farness": report.statistical_farness,
        "battery_advantage": report.battery_advantage,
        "farness_pass": report.farness_pass,
        "indistinguishability_not_refuted": report.indistinguishability_not_refuted,
        "farness_threshold": report.farness_threshold,
        "refutation_threshold": report.refutation_threshold,
    }
    return [dict(summary)], summary


_HYBRID_PARAMS = (
    Param("gen0", "dict", help="first generator spec (1-bit outputs)"),
    Param("gen1", "dict", help="second generator spec (1-bit outputs)"),
    Param("t", "int", help="copies given to the majority decider"),
    Param("num_trials", "int", 2000, help="multi-copy Monte Carlo trials"),
    Param("num_challenges", "int", help="single-copy challenges"),
)


def _run_hybrid(params, seed, workers):
    candidate = EfiCandidate(
        _build_generator("gen0", params["gen0"]),
        _build_generator("gen1", params["gen1"]),
    )
    if generator_num_bits(candidate.gen0) != 1:
        raise ConfigError("hybrid experiment requires 1-bit generators")
    t = params["t"]
    if t < 1:
        raise ConfigError("field 't' must be >= 1")
    multi, multi_err = multi_copy_advantage(
        candidate, majority_one_decider, t, params["num_trials"], derive_seed(seed, 0)
    )
    decider = hybrid_amplify(candidate, majority_one_decider, t, derive_seed(seed, 1))
    single, single_err = single_copy_advantage(
        candidate, decider, params["num_challenges"], derive_seed(seed, 2)
    )
    summary = {
        "num_copies": t,
        "multi_copy_advantage": multi,
        "multi_copy_std_error": multi_err,
        "single_copy_advantage": single,
        "single_copy_std_error": single_err,
        "amplified_bound": multi / t,
    }
    return [dict(summary)], summary


_MCSP_PARAMS = (
    Param("source", "dict", help="generator spec the samples come from"),
    Param("m", "int", help="number of samples"),
    Param("size_bound", "int", help="gate budget for candidate samplers"),
    Param("tolerance", "float", help="total-variation acceptance radius"),
    Param("num_random_bits", "int", 4, help="input wires per candidate"),
)


def _run_mcsp(params, seed, workers):
    dist = generator_distribution(_build_generator("source", params["source"]))
    batch = sample(dist, params["m"], derive_seed(seed, 5))
    verdict = samp_mcsp_bruteforce(
        batch, params["size_bound"], params["tolerance"],
        num_random_bits=params["num_random_bits"],
    )
    witness = verdict.witness
    summary = {
        "answer": verdict.answer,
        "verifier_bit": int(verdict.answer == "NO"),
        "achieved_distance": verdict.achieved_distance,
        "witness_size": witness.size if witness is not None else -1,
        "witness_netlist": (
            sampler_to_netlist(witness).replace("\n", "; ") if witness is not None else ""
        ),
        "size_bound": verdict.size_bound,
        "tolerance": verdict.tolerance,
        "variant": verdict.variant,
    }
    return [dict(summary)], summary


_DVQA_PARAMS = (
    Param("modulus_bits", "int", 32, help="Blum modulus width"),
    Param("rounds", "int", help="protocol rounds per transcript"),
    Param("num_transcripts", "int", help="transcripts per side per key draw"),
    Param("sim_strategy", "str", "one-root-guess",
          choices=("one-root-guess", "replay", "random-response", "honest")),
    Param("num_key_draws", "int", 1, help="outer average over fresh key material"),
)


def _run_dvqa(params, seed, workers):
    rows = []
    for d in range(params["num_key_draws"]):
        keys = setup(params["modulus_bits"], params["rounds"], derive_seed(seed, 0, d))
        report = run_dvqa_game(
            keys, params["num_transcripts"], params["sim_strategy"],
            derive_seed(seed, 1, d), workers=workers,
        )
        rows.append(
            {
                "key_draw": d,
                "honest_rate": report.honest_rate,
                "sim_rate": report.sim_rate,
                "advantage": report.advantage_estimate,
                "std_error": report.std_error,
            }
        )
    count = len(rows)
    summary = {
        "advantage": sum(r["advantage"] for r in rows) / count,
        "honest_rate": sum(r["honest_rate"] for r in rows) / count,
        "sim_rate": sum(r["sim_rate"] for r in rows) / count,
        "std_error": sum(r["std_error"] for r in rows) / count,
        "num_key_draws": count,
        "rounds": params["rounds"],
        "modulus_bits": params["modulus_bits"],
        "sim_strategy": params["sim_strategy"],
    }
    return rows, summary


EXPERIMENTS = {
    "vqa-game": (_GAME_PARAMS, _run_vqa),
    "uvqa-game": (_GAME_PARAMS, _run_uvqa),
    "xeb": (_XEB_PARAMS, _run_xeb),
    "simon": (_SIMON_PARAMS, _run_simon),
    "prs-shadow": (_PRS_PARAMS, _run_prs_shadow),
    "unidentifiability": (_UNID_PARAMS, _run_unidentifiability),
    "haar-collision": (_HAAR_PARAMS, _run_haar_collision),
    "chi2-tail": (_CHI2_PARAMS, _run_chi2_tail),
    "efi-check": (_EFI_PARAMS, _run_efi_check),
    "hybrid": (_HYBRID_PARAMS, _run_hybrid),
    "mcsp": (_MCSP_PARAMS, _run_mcsp),
    "dvqa": (_DVQA_PARAMS, _run_dvqa),
}


# -- output plumbing -----------------------------------------------------------


def _config_hash(effective: dict) -> str:
    canonical = json.dumps(effective, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _ensure_finite(obj, where: str):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise RuntimeError(f"non-finite value in {where}")
    if isinstance(obj, dict):
        for v in obj.values():
            _ensure_finite(v, where)
    if isinstance(obj, (list, tuple)):
        for v in obj:
            _ensure_finite(v, where)


def _write_csv(path: str, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def _write_outputs(out_dir, kind, effective, cfg_hash, rows, summary, fmt) -> None:
    os.makedirs(out_dir, exist_ok=True)
    rows = [{**row, "config_hash": cfg_hash} for row in rows]
    summary = {"kind": kind, **summary, "config_hash": cfg_hash}
    _ensure_finite(rows, "report rows")
    _ensure_finite(summary, "summary")

    files = ["summary.csv"]
    _write_csv(os.path.join(out_dir, "summary.csv"), [summary])
    if fmt in ("jsonl", "both"):
        with open(os.path.join(out_dir, "report.jsonl"), "w") as fh:
            for row in rows:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
        files.append("report.jsonl")
    if fmt in ("csv", "both"):
        _write_csv(os.path.join(out_dir, "rows.csv"), rows)
        files.append("rows.csv")

    hashes = {}
    for name in sorted(files):
        with open(os.path.join(out_dir, name), "rb") as fh:
            hashes[name] = hashlib.sha256(fh.read()).hexdigest()
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "kind": kind,
        "seed": effective["seed"],
        "config": effective,
        "config_hash": cfg_hash,
        "files": hashes,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(
    config_path: str,
    seed: int | None = None,
    workers: int = 1,
    out: str | None = None,
    fmt: str = "both",
) -> int:
    """Execute one configured experiment; returns the process exit status."""
    try:
        try:
            with open(config_path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        extra = set(raw) - {"kind", "params", "seed", "out"}
        if extra:
            raise ConfigError(f"unknown top-level fields: {', '.join(sorted(extra))}")
        kind = raw.get("kind")
        if kind not in EXPERIMENTS:
            raise ConfigError(
                f"field 'kind' must be one of {', '.join(sorted(EXPERIMENTS))}"
            )
        schema, runner = EXPERIMENTS[kind]
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("field 'params' must be an object")
        params = _validate_params(kind, schema, params)
        cfg_seed = raw.get("seed", 0)
        cfg_seed = _check_type("seed", "int", cfg_seed) if seed is None else seed
        effective = {"kind": kind, "params": params, "seed": cfg_seed}
        cfg_hash = _config_hash(effective)
        out_dir = out or raw.get("out") or os.path.join("runs", f"{kind}-{cfg_hash[:12]}")
        if not isinstance(out_dir, str):
            raise ConfigError("field 'out' must be a string")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        rows, summary = runner(params, cfg_seed, workers)
        _write_outputs(out_dir, kind, effective, cfg_hash, rows, summary, fmt)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    print(f"{kind}: wrote {out_dir}/summary.csv (config {cfg_hash[:12]})")
    return 0


def list_experiments() -> str:
    """Table of every experiment kind with its parameter schema."""
    lines = []
    for kind in sorted(EXPERIMENTS):
        schema, _ = EXPERIMENTS[kind]
        lines.append(kind)
        for p in schema:
            default = "required" if p.default is _REQUIRED else f"default {p.default!r}"
            choices = f" one of {', '.join(map(str, p.choices))};" if p.choices else ""
            help_text = f"  {p.help}" if p.help else ""
            lines.append(f"  {p.name}: {p.kind} ({default}){choices}{help_text}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vqalab", description="verification-game laboratory batch runner"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="execute one configured experiment")
    run_parser.add_argument("--config", required=True, help="path to a JSON config")
    run_parser.add_argument("--seed", type=int, default=None, help="override config seed")
    run_parser.add_argument("--workers", type=int, default=None,
                            help="worker processes (default: machine parallelism)")
    run_parser.add_argument("--out", default=None, help="output directory")
    run_parser.add_argument("--format", choices=("jsonl", "csv", "both"), default="both")
    sub.add_parser("list", help="print every experiment kind and its schema")

    args = parser.parse_args(argv)
    if args.command == "list":
        print(list_experiments())
        return 0
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    if workers < 1:
        print("config error: --workers must be >= 1", file=sys.stderr)
        return 2
    return run(args.config, seed=args.seed, workers=workers, out=args.out, fmt=args.format)


if __name__ == "__main__":
    sys.exit(main())
