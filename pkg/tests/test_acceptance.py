"""Acceptance gate: the headline checks, one test and one printed line each.

Every test times its own body against the stated budget and prints
    criterion NN PASS/FAIL: <what was checked> (<numbers>)
past pytest's capture, so any run of this file reads as a checklist.
"""

import json
import time

import numpy as np
import pytest

from vqalab.cli import run as cli_run
from vqalab.cryptocheck import (
    EfiCandidate,
    chi_squared_tail_check,
    collision_probability_check,
    hybrid_amplify,
    majority_one_decider,
    single_copy_advantage,
    unidentifiability_test,
)
from vqalab.dvqa import run_dvqa_game, setup
from vqalab.families import (
    family_mixture_distribution,
    hadamard_family,
    phase_prs_family,
    random_circuit_family,
    simon_family,
)
from vqalab.harness import GameConfig, run_vqa_game
from vqalab.mcsp import enumerate_samplers, samp_mcsp_bruteforce, sampler_distribution
from vqalab.qsim import (
    Distribution,
    diagonal_density,
    output_distribution,
    sample,
    total_variation_distance,
    trace_distance,
)
from vqalab.rng import derive_seed
from vqalab.strategies import UniformSampler, xeb_score


_CAPSYS = None


@pytest.fixture(autouse=True)
def _expose_capsys(capsys):
    # report() prints through capsys.disabled() so the checklist lines show
    # up even though passing tests normally swallow their stdout.
    global _CAPSYS
    _CAPSYS = capsys
    yield
    _CAPSYS = None


def report(num: int, name: str, ok: bool, detail: str) -> None:
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {name} ({detail})"
    if _CAPSYS is not None:
        with _CAPSYS.disabled():
            print(line)
    else:
        print(line)
    assert ok, f"criterion {num}: {name}: {detail}"


def test_criterion_01_hidden_shift_game():
    budget = 60.0
    t0 = time.perf_counter()
    config = GameConfig(
        family=simon_family(8, seed=0),
        spoofer=UniformSampler(8).description(seed=1),
        distinguisher="simon",
        samples_per_side=32,
        num_circuit_draws=100,
        seed=0,
    )
    game = run_vqa_game(config, workers=1)
    total = game.batches_per_side * len(game.per_trial)
    honest = sum(r.quantum_accepts for r in game.per_trial) / total
    uniform = sum(r.classical_accepts for r in game.per_trial) / total
    elapsed = time.perf_counter() - t0
    ok = (
        honest >= 0.99
        and uniform <= 0.05
        and game.advantage_estimate >= 0.9
        and elapsed <= budget
    )
    report(
        1,
        "hidden-shift game separates honest samples from uniform",
        ok,
        f"honest {honest:.3f}, uniform {uniform:.3f}, "
        f"advantage {game.advantage_estimate:.3f}, {elapsed:.1f}s",
    )


def test_criterion_02_xeb_anchors():
    budget = 300.0
    t0 = time.perf_counter()
    n, depth, circuits, m = 10, 20, 100, 10_000
    fam = random_circuit_family(n, depth, seed=0)
    spoofer = UniformSampler(n)
    honest_scores, uniform_scores = [], []
    for i in range(circuits):
        circuit, _ = fam.draw(derive_seed(0, 1, i))
        dist = output_distribution(circuit)
        honest_scores.append(xeb_score(circuit, sample(dist, m, derive_seed(0, 2, i)), dist))
        uniform_scores.append(xeb_score(circuit, spoofer.draw(m, derive_seed(0, 3, i)), dist))
    scale = 1 << n
    honest = float(np.mean(honest_scores)) * scale
    uniform = float(np.mean(uniform_scores)) * scale
    elapsed = time.perf_counter() - t0
    ok = 1.5 <= honest <= 2.5 and 0.8 <= uniform <= 1.2 and elapsed <= budget
    report(
        2,
        "cross-entropy score anchors for honest and uniform samples",
        ok,
        f"honest {honest:.3f}/2^n, uniform {uniform:.3f}/2^n, {elapsed:.1f}s",
    )


def test_criterion_03_phase_family_unidentifiability():
    budget = 120.0
    t0 = time.perf_counter()
    fam = phase_prs_family(12, key_seed=0)
    advantage = unidentifiability_test(fam, m=10_000, trials=50, seed=0)
    elapsed = time.perf_counter() - t0
    ok = advantage <= 0.06 and elapsed <= budget
    report(
        3,
        "keyed phase states are unidentifiable from each other's samples",
        ok,
        f"battery advantage {advantage:.3f}, {elapsed:.1f}s",
    )


def test_criterion_04_haar_collision_bound():
    budget = 300.0
    t0 = time.perf_counter()
    reportc = collision_probability_check(n=20, m=100, num_distributions=100, seed=0)
    elapsed = time.perf_counter() - t0
    frac_within = 1.0 - reportc.frac_over_statement
    ok = (
        frac_within >= 0.99
        and 0.005 <= reportc.mean_estimate <= 0.015
        and elapsed <= budget
    )
    report(
        4,
        "Haar outcome collision rates sit under the stated ceiling",
        ok,
        f"within-bound fraction {frac_within:.2f}, "
        f"mean estimate {reportc.mean_estimate:.4f}, bound {reportc.statement_bound:.3f}, "
        f"{elapsed:.1f}s",
    )


def test_criterion_05_chi_squared_tail():
    budget = 10.0
    t0 = time.perf_counter()
    reportc = chi_squared_tail_check(k=1024, x=5.0, trials=100_000, seed=0)
    elapsed = time.perf_counter() - t0
    ok = bool(reportc.passed) and elapsed <= budget
    report(
        5,
        "chi-squared mass outside the two-sided window stays under the bound",
        ok,
        f"out-frequency {reportc.out_frequency:.2e} <= "
        f"{reportc.bound:.2e}, {elapsed:.1f}s",
    )


def test_criterion_06_hybrid_amplifier():
    budget = 30.0
    t0 = time.perf_counter()
    candidate = EfiCandidate(Distribution(1, [1.0, 0.0]), Distribution(1, [0.0, 1.0]))
    t = 5
    decider = hybrid_amplify(candidate, majority_one_decider, t, seed=0)
    estimate, err = single_copy_advantage(candidate, decider, num_challenges=10_000, seed=1)
    elapsed = time.perf_counter() - t0
    ok = estimate >= 0.2 - 4 * err and elapsed <= budget
    report(
        6,
        "hybrid argument yields the advantage/t single-copy decider",
        ok,
        f"single-copy {estimate:.3f} >= 0.2 - 4*{err:.4f}, {elapsed:.1f}s",
    )


def test_criterion_07_farness_equals_tvd():
    budget = 10.0
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        dim = 1 << n
        p = Distribution(n, rng.dirichlet(np.ones(dim)))
        q = Distribution(n, rng.dirichlet(np.ones(dim)))
        td = trace_distance(diagonal_density(p), diagonal_density(q))
        tv = total_variation_distance(p, q)
        worst = max(worst, abs(td - tv))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed <= budget
    report(
        7,
        "trace distance of dephased states equals total variation distance",
        ok,
        f"max |difference| {worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_08_mixture_identity():
    budget = 30.0
    t0 = time.perf_counter()
    families = []
    for k in range(50):
        which = k % 4
        n = 2 + k % 5
        if which == 0:
            families.append(simon_family(2 + k % 2, seed=k))
        elif which == 1:
            families.append(random_circuit_family(n, depth=4 + k % 7, seed=k))
        elif which == 2:
            families.append(phase_prs_family(n, key_seed=k))
        else:
            families.append(hadamard_family(n))
    num_draws = 30
    worst = 0.0
    for k, fam in enumerate(families):
        mixture = family_mixture_distribution(fam, num_draws, seed=k)
        members = fam.enumerate()
        if members is not None:
            stack = [output_distribution(c).probs for c, _ in members]
        else:
            stack = [
                output_distribution(fam.draw(derive_seed(k, i))[0]).probs
                for i in range(num_draws)
            ]
        worst = max(worst, float(np.abs(mixture.probs - np.mean(stack, axis=0)).max()))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed <= budget
    report(
        8,
        "family mixture law equals the mean of member laws",
        ok,
        f"50 families, max elementwise gap {worst:.2e}, {elapsed:.1f}s",
    )


def test_criterion_09_planted_sampler_recovery():
    budget = 600.0
    t0 = time.perf_counter()
    recovered = total = 0
    for n in (1, 2):
        for idx, planted in enumerate(enumerate_samplers(n, 4, 3)):
            batch = sample(sampler_distribution(planted), 100_000, derive_seed(9, n, idx))
            verdict = samp_mcsp_bruteforce(batch, 3, 0.02, num_random_bits=4)
            total += 1
            recovered += int(
                verdict.answer == "YES" and verdict.witness.size <= planted.size
            )
    elapsed = time.perf_counter() - t0
    ok = recovered == total and elapsed <= budget
    report(
        9,
        "every enumerable micro-sampler is recovered from its own samples",
        ok,
        f"{recovered}/{total} recovered with witness <= planted size, {elapsed:.1f}s",
    )


def test_criterion_10_designated_verifier_separation():
    budget = 120.0
    t0 = time.perf_counter()
    keys = setup(modulus_bits=32, num_rounds=20, seed=0)
    game = run_dvqa_game(keys, num_transcripts=200, sim_strategy="one-root-guess", seed=1)
    elapsed = time.perf_counter() - t0
    ok = (
        game.honest_rate == 1.0
        and game.sim_rate <= 0.01
        and game.advantage_estimate >= 0.99
        and elapsed <= budget
    )
    report(
        10,
        "claw-holding prover beats the one-root-guess simulator",
        ok,
        f"honest {game.honest_rate:.3f}, simulator {game.sim_rate:.4f}, "
        f"advantage {game.advantage_estimate:.3f}, {elapsed:.1f}s",
    )


DETERMINISM_CASES = {
    "vqa-game": {"family": "hadamard", "n": 3, "spoofer": "uniform",
                 "distinguisher": "battery", "samples_per_side": 200,
                 "num_circuit_draws": 3, "batches_per_side": 5},
    "uvqa-game": {"family": "random", "n": 4, "depth": 4, "spoofer": "uniform",
                  "distinguisher": "xeb", "samples_per_side": 500,
                  "num_circuit_draws": 3, "batches_per_side": 5},
    "xeb": {"n": 4, "depth": 4, "num_circuits": 8, "samples": 500},
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
    "dvqa": {"modulus_bits": 16, "rounds": 4, "num_transcripts": 20},
}


def test_criterion_11_determinism_across_worker_counts(tmp_path):
    mismatched = []
    for kind, params in DETERMINISM_CASES.items():
        cfg = tmp_path / f"{kind}.json"
        cfg.write_text(json.dumps({"kind": kind, "seed": 0, "params": params}))
        out1 = tmp_path / f"{kind}-w1"
        out8 = tmp_path / f"{kind}-w8"
        assert cli_run(str(cfg), out=str(out1), workers=1) == 0, kind
        assert cli_run(str(cfg), out=str(out8), workers=8) == 0, kind
        if (out1 / "summary.csv").read_bytes() != (out8 / "summary.csv").read_bytes():
            mismatched.append(kind)
    ok = not mismatched
    report(
        11,
        "summary CSVs are byte-identical at worker counts 1 and 8",
        ok,
        f"{len(DETERMINISM_CASES)} experiment kinds"
        + (f"; mismatched: {', '.join(mismatched)}" if mismatched else ""),
    )
