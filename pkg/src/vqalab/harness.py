"""Three-party verification games and advantage estimators.

A game draws circuits from a family, produces exact quantum samples on one
side and spoofer samples on the other, and asks a fixed distinguisher to
accept or reject each batch. The reported advantage is the mean absolute
acceptance-rate gap across circuit draws.

The inner acceptance probabilities are per-circuit quantities, so each draw
runs the distinguisher on ``batches_per_side`` independent batch pairs; the
absolute rate difference of a finite batch count is biased upward, and that
bias is charged to ``std_error`` instead of being hidden.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .families import CircuitFamily, family_mixture_distribution
from .qsim import Distribution, output_distribution, sample, total_variation_distance
from .rng import derive_seed
from .strategies import SamplerDescription, make_distinguisher, spoofer_from_description
from .workers import parallel_map

# disjoint derivation streams under the master seed
_CIRCUIT_STREAM = 0
_QUANTUM_STREAM = 1
_CLASSICAL_STREAM = 2

MAX_EXACT_BITS = 14


@dataclass(frozen=True)
class GameConfig:
    """One verification game: family vs spoofer in front of a distinguisher."""

    family: CircuitFamily
    spoofer: SamplerDescription
    distinguisher: str
    samples_per_side: int
    num_circuit_draws: int
    distinguisher_params: dict = field(default_factory=dict)
    batches_per_side: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.samples_per_side < 1:
            raise ValueError("samples_per_side must be >= 1")
        if self.num_circuit_draws < 1:
            raise ValueError("num_circuit_draws must be >= 1")
        if self.batches_per_side < 1:
            raise ValueError("batches_per_side must be >= 1")


@dataclass(frozen=True)
class TrialRecord:
    """Acceptance counts over batches_per_side batch pairs for one draw."""

    trial: int
    circuit_seed: int
    quantum_accepts: int
    classical_accepts: int


@dataclass(frozen=True)
class GameReport:
    mode: str  # "VQA" | "UVQA"
    advantage_estimate: float
    std_error: float
    batches_per_side: int
    per_trial: tuple[TrialRecord, ...]


def _run_trial(config: GameConfig, mode: str, trial: int) -> TrialRecord:
    circuit_seed = derive_seed(config.seed, _CIRCUIT_STREAM, trial)
    circuit, metadata = config.family.draw(circuit_seed)
    dist = output_distribution(circuit)
    sampler = spoofer_from_description(config.spoofer)
    decider = make_distinguisher(config.distinguisher, config.distinguisher_params)
    desc = config.spoofer if mode == "VQA" else None
    t = config.samples_per_side
    quantum_accepts = classical_accepts = 0
    for b in range(config.batches_per_side):
        quantum_batch = sample(dist, t, derive_seed(config.seed, _QUANTUM_STREAM, trial, b))
        classical_batch = sampler.draw(
            t,
            derive_seed(config.seed, _CLASSICAL_STREAM, trial, b),
            circuit=circuit,
            circuit_dist=dist,
        )
        try:
            quantum_accepts += decider.decide(
                circuit, metadata, desc, quantum_batch, circuit_dist=dist
            ).decision
            classical_accepts += decider.decide(
                circuit, metadata, desc, classical_batch, circuit_dist=dist
            ).decision
        except Exception as exc:
            raise RuntimeError(f"distinguisher failed on trial {trial}") from exc
    return TrialRecord(trial, int(circuit_seed), quantum_accepts, classical_accepts)


def _aggregate(config: GameConfig, mode: str, records) -> GameReport:
    records = tuple(sorted(records, key=lambda r: r.trial))
    num_batches = config.batches_per_side
    diffs = np.array(
        [abs(r.quantum_accepts - r.classical_accepts) / num_batches for r in records]
    )
    trials = len(records)
    variance = float(diffs.var(ddof=1)) if trials > 1 else 0.0
    monte_carlo = float(np.sqrt(variance / trials))
    # smoothed plug-in bound on the per-trial binomial noise that inflates |p - q|
    bias_terms = []
    for r in records:
        p = (r.quantum_accepts + 0.5) / (num_batches + 1)
        q = (r.classical_accepts + 0.5) / (num_batches + 1)
        bias_terms.append(np.sqrt((p * (1 - p) + q * (1 - q)) / num_batches))
    return GameReport(
        mode=mode,
        advantage_estimate=float(diffs.mean()),
        std_error=monte_carlo + float(np.mean(bias_terms)),
        batches_per_side=num_batches,
        per_trial=records,
    )


def run_vqa_game(config: GameConfig, workers: int = 1) -> GameReport:
    """Game where the distinguisher also receives the spoofer's description."""
    records = parallel_map(
        partial(_run_trial, config, "VQA"), range(config.num_circuit_draws), workers
    )
    return _aggregate(config, "VQA", records)


def run_uvqa_game(config: GameConfig, workers: int = 1) -> GameReport:
    """Game where the distinguisher never sees the spoofer's description."""
    records = parallel_map(
        partial(_run_trial, config, "UVQA"), range(config.num_circuit_draws), workers
    )
    return _aggregate(config, "UVQA", records)


# -- distribution-level advantage estimators ----------------------------------------

def _exact_member_distributions(fam: CircuitFamily, num_draws: int, seed: int):
    if fam.num_qubits > MAX_EXACT_BITS:
        raise ValueError(f"exact estimators need output width <= {MAX_EXACT_BITS}")
    members = fam.enumerate()
    if members is not None:
        return [output_distribution(c) for c, _ in members]
    if num_draws < 1:
        raise ValueError("num_draws must be >= 1")
    return [
        output_distribution(fam.draw(derive_seed(seed, i))[0]) for i in range(num_draws)
    ]


def estimate_avg_advantage(
    fam: CircuitFamily, spoofer_dist: Distribution, num_draws: int, seed: int = 0
) -> float:
    """Mean over draws of the exact distance between member and spoofer laws."""
    dists = _exact_member_distributions(fam, num_draws, seed)
    return float(
        np.mean([total_variation_distance(d, spoofer_dist) for d in dists])
    )


def estimate_strong_advantage(
    fam: CircuitFamily, spoofer_dist: Distribution, num_draws: int, seed: int = 0
) -> float:
    """Distance between the family mixture and the spoofer's law.

    Uses the same draw schedule as estimate_avg_advantage, so convexity makes
    strong <= average hold exactly on every sampled set.
    """
    if fam.num_qubits > MAX_EXACT_BITS:
        raise ValueError(f"exact estimators need output width <= {MAX_EXACT_BITS}")
    mixture = family_mixture_distribution(fam, num_draws, seed=seed)
    return total_variation_distance(mixture, spoofer_dist)
