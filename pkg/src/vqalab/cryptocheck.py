"""Farness and indistinguishability checks for pairs of sample generators.

Covers four related instruments: exact statistical farness of diagonal state
pairs with an empirical distinguishing lower bound, the hybrid amplifier that
turns a multi-copy decider into a single-copy one, the Gaussian outcome model
for measurements of Haar-random states with its collision and chi-squared
tail checks, and unidentifiability tests for keyed circuit families.

Every empirical quantity here is a LOWER bound on distinguishing power. A
small value is consistent with indistinguishability but never proves it,
which is why the report verdict is named ``indistinguishability_not_refuted``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .families import CircuitFamily, family_mixture_distribution
from .qsim import (
    Circuit,
    Distribution,
    SampleBatch,
    circuit_to_json,
    diagonal_density,
    output_distribution,
    sample,
    sample_indices,
    trace_distance,
)
from .rng import derive_rng, derive_seed
from .strategies import battery_distinguisher

MAX_HAAR_BITS = 26


# -- generators --------------------------------------------------------------------

def generator_num_bits(gen) -> int:
    if isinstance(gen, Distribution):
        return gen.num_bits
    if isinstance(gen, Circuit):
        return gen.num_measured
    if isinstance(gen, CircuitFamily):
        return gen.num_qubits
    raise TypeError(f"not a sample generator: {type(gen).__name__}")


def generator_distribution(gen, num_draws: int = 64, seed: int = 0) -> Distribution:
    """Exact output law of a generator.

    A distribution stands for itself, a circuit dephases to its measurement
    law, and a family contributes its mixture law.
    """
    if isinstance(gen, Distribution):
        return gen
    if isinstance(gen, Circuit):
        return output_distribution(gen)
    if isinstance(gen, CircuitFamily):
        return family_mixture_distribution(gen, num_draws, seed=seed)
    raise TypeError(f"not a sample generator: {type(gen).__name__}")


@dataclass(frozen=True)
class EfiCandidate:
    """A pair of generators proposed as statistically-far-yet-hard states.

    Generators are restricted to diagonal states: explicit distributions,
    circuit dephasings, and family mixtures.
    """

    gen0: object
    gen1: object
    security_bits: int | None = None

    def __post_init__(self):
        w0 = generator_num_bits(self.gen0)
        w1 = generator_num_bits(self.gen1)
        if w0 != w1:
            raise ValueError(f"generator widths differ: {w0} vs {w1}")
        if self.security_bits is not None and self.security_bits < 1:
            raise ValueError("security_bits must be positive")

    @property
    def num_bits(self) -> int:
        return generator_num_bits(self.gen0)

    @property
    def lambda_bits(self) -> int:
        return self.num_bits if self.security_bits is None else self.security_bits


@dataclass(frozen=True)
class EfiReport:
    statistical_farness: float
    battery_advantage: float
    farness_pass: int
    indistinguishability_not_refuted: int
    farness_threshold: float
    refutation_threshold: float


def efi_statistical_farness(candidate: EfiCandidate, num_draws: int = 64, seed: int = 0) -> float:
    """Exact half trace norm between the two generated diagonal states."""
    rho0 = diagonal_density(generator_distribution(candidate.gen0, num_draws, seed))
    rho1 = diagonal_density(generator_distribution(candidate.gen1, num_draws, seed))
    return trace_distance(rho0, rho1)


def _refutes_first_only(batch: SampleBatch, dist0: Distribution, dist1: Distribution, alpha: float) -> int:
    """1 iff the battery rejects the batch under dist0 but not under dist1."""
    d0 = battery_distinguisher(batch, null_dist=dist0, alpha=alpha).decision
    d1 = battery_distinguisher(batch, null_dist=dist1, alpha=alpha).decision
    return int(d0 == 1 and d1 == 0)


def efi_empirical_indistinguishability(
    candidate: EfiCandidate, m: int, trials: int, seed: int = 0, alpha: float = 0.02
) -> float:
    """Battery lower bound on distinguishing the two generators by m samples.

    The decision rule fires when a batch refutes gen0's law but not gen1's;
    the returned advantage is the absolute firing-rate gap between batches
    drawn from each side. Small values never certify indistinguishability.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dist0 = generator_distribution(candidate.gen0)
    dist1 = generator_distribution(candidate.gen1)
    fires0 = fires1 = 0
    for i in range(trials):
        batch0 = sample(dist0, m, derive_seed(seed, 0, i))
        batch1 = sample(dist1, m, derive_seed(seed, 1, i))
        fires0 += _refutes_first_only(batch0, dist0, dist1, alpha)
        fires1 += _refutes_first_only(batch1, dist0, dist1, alpha)
    return abs(fires0 - fires1) / trials


def efi_check(
    candidate: EfiCandidate,
    m: int,
    trials: int,
    seed: int = 0,
    farness_threshold: float = 0.1,
    refutation_threshold: float = 0.1,
) -> EfiReport:
    """Combined farness / empirical-indistinguishability report."""
    farness = efi_statistical_farness(candidate)
    advantage = efi_empirical_indistinguishability(candidate, m, trials, seed)
    return EfiReport(
        statistical_farness=farness,
        battery_advantage=advantage,
        farness_pass=int(farness >= farness_threshold),
        indistinguishability_not_refuted=int(advantage <= refutation_threshold),
        farness_threshold=farness_threshold,
        refutation_threshold=refutation_threshold,
    )


# -- hybrid amplifier ----------------------------------------------------------------

@dataclass(frozen=True)
class HybridDecider:
    """Single-copy decider built from a t-copy decider by hybrid interpolation.

    On challenge z it picks i uniformly in {0..t-1}, synthesizes i fresh
    samples from gen0 and t-1-i from gen1, and feeds the t-tuple with z at
    position i+1 to the multi-copy decider. If the multi-copy advantage is
    delta, this decider's advantage telescopes to delta/t.
    """

    dist0: Distribution
    dist1: Distribution
    multi_copy_decider: object
    num_copies: int
    seed: int

    def decide(self, value: int, nonce: int) -> int:
        t = self.num_copies
        i = int(derive_rng(self.seed, 0, nonce).integers(t))
        left = sample(self.dist0, i, derive_seed(self.seed, 1, nonce))
        right = sample(self.dist1, t - 1 - i, derive_seed(self.seed, 2, nonce))
        values = np.concatenate(
            [left.samples, np.array([value], dtype=np.int64), right.samples]
        )
        return int(self.multi_copy_decider(SampleBatch(self.dist0.num_bits, values)))


def hybrid_amplify(candidate: EfiCandidate, multi_copy_decider, t: int, seed: int = 0) -> HybridDecider:
    if t < 1:
        raise ValueError("copy count must be >= 1")
    return HybridDecider(
        dist0=generator_distribution(candidate.gen0),
        dist1=generator_distribution(candidate.gen1),
        multi_copy_decider=multi_copy_decider,
        num_copies=t,
        seed=seed,
    )


def majority_one_decider(batch: SampleBatch) -> int:
    """1 when strictly more than half of the 1-bit samples equal 1."""
    return int(2 * np.count_nonzero(batch.samples) > len(batch.samples))


def _smoothed_rate_error(count0: int, count1: int, trials: int) -> float:
    p = (count0 + 0.5) / (trials + 1)
    q = (count1 + 0.5) / (trials + 1)
    return float(np.sqrt((p * (1 - p) + q * (1 - q)) / trials))


def multi_copy_advantage(
    candidate: EfiCandidate, multi_copy_decider, t: int, num_trials: int, seed: int = 0
) -> tuple[float, float]:
    """(advantage estimate, std error) of a t-copy decider on the candidate."""
    dist0 = generator_distribution(candidate.gen0)
    dist1 = generator_distribution(candidate.gen1)
    fires0 = fires1 = 0
    for i in range(num_trials):
        batch0 = sample(dist0, t, derive_seed(seed, 0, i))
        batch1 = sample(dist1, t, derive_seed(seed, 1, i))
        fires0 += int(multi_copy_decider(batch0))
        fires1 += int(multi_copy_decider(batch1))
    estimate = abs(fires0 - fires1) / num_trials
    return estimate, _smoothed_rate_error(fires0, fires1, num_trials)


def single_copy_advantage(
    candidate: EfiCandidate, decider: HybridDecider, num_challenges: int, seed: int = 0
) -> tuple[float, float]:
    """(advantage estimate, std error) of a single-copy decider on the candidate."""
    dist0 = generator_distribution(candidate.gen0)
    dist1 = generator_distribution(candidate.gen1)
    fires0 = fires1 = 0
    for j in range(num_challenges):
        value0 = int(sample(dist0, 1, derive_seed(seed, 0, j)).samples[0])
        value1 = int(sample(dist1, 1, derive_seed(seed, 1, j)).samples[0])
        fires0 += decider.decide(value0, nonce=derive_seed(seed, 2, j))
        fires1 += decider.decide(value1, nonce=derive_seed(seed, 3, j))
    estimate = abs(fires0 - fires1) / num_challenges
    return estimate, _smoothed_rate_error(fires0, fires1, num_challenges)


# -- Haar outcome model ---------------------------------------------------------------

@dataclass(frozen=True)
class HaarOutcomeModel:
    """Measurement law of a Haar-random state via the Gaussian quotient model.

    p(x) = (g_x^2 + h_x^2) / (G + H) with g, h standard normal vectors and
    G, H their sums of squares, so p sums to 1 by construction.
    """

    num_bits: int
    g: np.ndarray
    h: np.ndarray
    sum_g2: float
    sum_h2: float
    distribution: Distribution


def haar_measurement_distribution(n: int, seed: int = 0) -> HaarOutcomeModel:
    if not 1 <= n <= MAX_HAAR_BITS:
        raise ValueError(f"need 1 <= n <= {MAX_HAAR_BITS}")
    rng = derive_rng(seed)
    g = rng.standard_normal(1 << n)
    h = rng.standard_normal(1 << n)
    sum_g2 = float(g @ g)
    sum_h2 = float(h @ h)
    probs = (g * g + h * h) / (sum_g2 + sum_h2)
    return HaarOutcomeModel(n, g, h, sum_g2, sum_h2, Distribution(n, probs))


@dataclass(frozen=True)
class CollisionReport:
    num_bits: int
    samples_per_batch: int
    num_distributions: int
    batches_per_dist: int
    estimates: tuple[float, ...]
    mean_estimate: float
    statement_bound: float
    markov_bound: float
    frac_over_statement: float
    frac_over_markov: float
    statement_vacuous: bool
    markov_vacuous: bool


def collision_probability_check(
    n: int,
    m: int,
    num_distributions: int,
    batches_per_dist: int = 10_000,
    seed: int = 0,
) -> CollisionReport:
    """Monte Carlo collision rates of m-sample batches against both bounds.

    The two ceilings differ in the exponent (2^-n vs 2^-n/2); both are
    reported, each with a vacuity flag that fires when the ceiling exceeds 1
    and the comparison carries no information.
    """
    if m < 1:
        raise ValueError("samples per batch must be >= 1")
    if num_distributions < 1 or batches_per_dist < 1:
        raise ValueError("need at least one distribution and one batch")
    estimates = []
    for d in range(num_distributions):
        model = haar_measurement_distribution(n, derive_seed(seed, 0, d))
        if m == 1:
            estimates.append(0.0)
            continue
        rng = derive_rng(seed, 1, d)
        idx = sample_indices(model.distribution.probs, batches_per_dist * m, rng)
        idx = np.sort(idx.reshape(batches_per_dist, m), axis=1)
        collided = (idx[:, 1:] == idx[:, :-1]).any(axis=1)
        estimates.append(float(collided.mean()))
    est = np.array(estimates)
    statement_bound = 50.0 * m * m * 2.0 ** -n
    markov_bound = 50.0 * m * m * 2.0 ** (-n / 2)
    return CollisionReport(
        num_bits=n,
        samples_per_batch=m,
        num_distributions=num_distributions,
        batches_per_dist=batches_per_dist,
        estimates=tuple(estimates),
        mean_estimate=float(est.mean()),
        statement_bound=statement_bound,
        markov_bound=markov_bound,
        frac_over_statement=float((est > statement_bound).mean()),
        frac_over_markov=float((est > markov_bound).mean()),
        statement_vacuous=statement_bound > 1.0,
        markov_vacuous=markov_bound > 1.0,
    )


@dataclass(frozen=True)
class ChiSquaredTailReport:
    degrees: int
    x: float
    trials: int
    out_frequency: float
    bound: float
    sigma: float
    passed: bool
    empirical_mean: float


def chi_squared_tail_check(k: int, x: float, trials: int, seed: int = 0) -> ChiSquaredTailReport:
    """Empirical mass outside [k - 2 sqrt(kx), k + 2 sqrt(kx) + 2x] vs 2 e^-x."""
    if k < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if x <= 0:
        raise ValueError("tail parameter must be positive")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    draws = derive_rng(seed).chisquare(k, size=trials)
    lo = k - 2.0 * np.sqrt(k * x)
    hi = k + 2.0 * np.sqrt(k * x) + 2.0 * x
    out_frequency = float(((draws < lo) | (draws > hi)).mean())
    bound = 2.0 * np.exp(-x)
    sigma = float(np.sqrt(min(bound, 1.0) * max(1.0 - bound, 0.0) / trials))
    return ChiSquaredTailReport(
        degrees=k,
        x=float(x),
        trials=trials,
        out_frequency=out_frequency,
        bound=bound,
        sigma=sigma,
        passed=out_frequency <= bound + 3.0 * sigma,
        empirical_mean=float(draws.mean()),
    )


# -- unidentifiability -----------------------------------------------------------------

_MAX_REDRAWS = 64


def _draw_distinct(fam: CircuitFamily, reference: Circuit, seed: int, trial: int) -> Circuit:
    ref_text = circuit_to_json(reference)
    for attempt in range(_MAX_REDRAWS):
        other, _ = fam.draw(derive_seed(seed, 1, trial, attempt))
        if circuit_to_json(other) != ref_text:
            return other
    raise RuntimeError("family produced no distinct member; cannot form i != j pairs")


def unidentifiability_test(
    fam: CircuitFamily,
    m: int,
    trials: int,
    seed: int = 0,
    alpha: float = 0.02,
    identical_control: bool = False,
) -> float:
    """Battery gap between own-circuit samples and wrong-circuit samples.

    Each trial draws circuits C_i != C_j, hands the battery C_i as context
    (its law is the null), and scores one batch from C_i against one from
    C_j. Returns the absolute firing-rate difference over trials; with
    identical_control the second batch also comes from C_i.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    fires_self = fires_cross = 0
    for trial in range(trials):
        own, _ = fam.draw(derive_seed(seed, 0, trial))
        other = own if identical_control else _draw_distinct(fam, own, seed, trial)
        own_dist = output_distribution(own)
        other_dist = own_dist if other is own else output_distribution(other)
        self_batch = sample(own_dist, m, derive_seed(seed, 2, trial))
        cross_batch = sample(other_dist, m, derive_seed(seed, 3, trial))
        fires_self += battery_distinguisher(
            self_batch, null_dist=own_dist, circuit=own, alpha=alpha
        ).decision
        fires_cross += battery_distinguisher(
            cross_batch, null_dist=own_dist, circuit=own, alpha=alpha
        ).decision
    return abs(fires_self - fires_cross) / trials


def prs_shadow_test(
    fam: CircuitFamily, m: int, trials: int, seed: int = 0, alpha: float = 0.02
) -> float:
    """Battery gap between family samples and Haar outcome-model samples.

    Single-copy measurement proxy: each trial scores one batch from a drawn
    circuit against one batch from a fresh Haar outcome draw, both judged
    against the circuit's exact law. Multi-copy state access is out of scope.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    fires_fam = fires_haar = 0
    for trial in range(trials):
        circuit, _ = fam.draw(derive_seed(seed, 0, trial))
        dist = output_distribution(circuit)
        fam_batch = sample(dist, m, derive_seed(seed, 1, trial))
        model = haar_measurement_distribution(fam.num_qubits, derive_seed(seed, 2, trial))
        haar_batch = sample(model.distribution, m, derive_seed(seed, 3, trial))
        fires_fam += battery_distinguisher(
            fam_batch, null_dist=dist, circuit=circuit, alpha=alpha
        ).decision
        fires_haar += battery_distinguisher(
            haar_batch, null_dist=dist, circuit=circuit, alpha=alpha
        ).decision
    return abs(fires_fam - fires_haar) / trials
