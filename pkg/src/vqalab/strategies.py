"""Distinguishers and classical spoofers for the sampling games.

A distinguisher maps (circuit context, sample batch) to an accept bit plus
a raw score.  A spoofer is a classical sampler with a self-contained
description: re-executing the description reproduces its distribution
exactly.  The battery distinguisher is the fixed generic test suite used
by the indistinguishability checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .qsim import (
    Circuit,
    Distribution,
    SampleBatch,
    circuit_from_dict,
    circuit_to_dict,
    output_distribution,
    uniform_distribution,
)
from .rng import derive_rng


@dataclass(frozen=True)
class DistinguisherResult:
    """decision is deterministic given the inputs; score is the raw statistic."""

    decision: int
    score: float


# -- cross-entropy benchmarking ------------------------------------------------

def default_xeb_threshold(num_bits: int) -> float:
    """Midpoint-style threshold between the uniform mean 1/2^n and the
    exponential-ensemble mean 2/2^n."""
    return 1.5 * 2.0 ** -num_bits


def xeb_score(circuit: Circuit, batch: SampleBatch, circuit_dist: Distribution | None = None) -> float:
    """Mean exact outcome probability of the batch under the circuit."""
    dist = circuit_dist if circuit_dist is not None else output_distribution(circuit)
    if dist.num_bits != batch.num_bits:
        raise ValueError("batch width does not match circuit output width")
    if len(batch) == 0:
        return 0.0
    return float(dist.probs[batch.samples].mean())


def xeb_distinguisher(
    circuit: Circuit,
    batch: SampleBatch,
    threshold: float | None = None,
    circuit_dist: Distribution | None = None,
) -> DistinguisherResult:
    dist = circuit_dist if circuit_dist is not None else output_distribution(circuit)
    if threshold is None:
        threshold = default_xeb_threshold(dist.num_bits)
    score = xeb_score(circuit, batch, circuit_dist=dist)
    return DistinguisherResult(int(score >= threshold), score)


# -- GF(2) linear algebra and the Simon check -----------------------------------

def gf2_null_space(rows, num_bits: int) -> list[int]:
    """Basis of {v : r . v = 0 mod 2 for every row r}, rows as bit-packed ints."""
    mask = (1 << num_bits) - 1
    pivots: dict[int, int] = {}
    for r in rows:
        cur = int(r) & mask
        # pivot rows are fully reduced, so one pass clears every pivot bit
        for p, row in pivots.items():
            if (cur >> p) & 1:
                cur ^= row
        if cur:
            p = cur.bit_length() - 1
            for pb in list(pivots):
                if (pivots[pb] >> p) & 1:
                    pivots[pb] ^= cur
            pivots[p] = cur
    basis = []
    for j in range(num_bits):
        if j in pivots:
            continue
        v = 1 << j
        for p, row in pivots.items():
            if (row >> j) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


def simon_distinguisher(metadata, batch: SampleBatch) -> DistinguisherResult:
    """Accept iff the batch pins down a unique nonzero shift that the oracle
    table confirms: null space exactly {0, s_hat} and table(0) == table(s_hat)."""
    n = metadata.num_bits
    if batch.num_bits != n:
        raise ValueError("batch width does not match the Simon instance")
    basis = gf2_null_space(batch.samples, n)
    if len(basis) != 1:
        return DistinguisherResult(0, 0.0)
    s_hat = basis[0]
    ok = s_hat != 0 and int(metadata.table[0]) == int(metadata.table[s_hat])
    return DistinguisherResult(int(ok), float(ok))


# -- generic statistical battery --------------------------------------------------

_BATTERY_ALPHA = 0.02  # per-run false-fire budget; the declared pair budget is 0.05
_COLLISION_FACTOR = 8.0  # coarse on purpose: see battery_distinguisher docstring


def _bit_mask_matrix(num_bits: int) -> np.ndarray:
    idx = np.arange(1 << num_bits, dtype=np.int64)
    return ((idx[:, None] >> np.arange(num_bits)) & 1).astype(float)


def battery_distinguisher(
    batch: SampleBatch,
    null_dist: Distribution | None = None,
    circuit: Circuit | None = None,
    alpha: float = _BATTERY_ALPHA,
) -> DistinguisherResult:
    """Fixed test suite against a null model: per-bit frequencies, pairwise
    bit correlations, collision count, and the mean null probability of the
    batch (the cross-entropy statistic) when a circuit or null distribution
    is supplied.

    Fires (decision 1) when any statistic exceeds its Bonferroni-corrected
    critical value; the score is the largest threshold ratio.  The collision
    test is deliberately coarse, firing only when colliding pairs exceed
    several times the null expectation: it is aimed at small-support
    spoofers, and stays quiet on the factor-two inflation that exponentially
    distributed probability weights produce.
    """
    if len(batch) == 0:
        return DistinguisherResult(0, 0.0)
    n = batch.num_bits
    if circuit is not None and null_dist is None:
        null_dist = output_distribution(circuit)
    if null_dist is None:
        null_dist = uniform_distribution(n)
    if null_dist.num_bits != n:
        raise ValueError("null distribution width does not match the batch")

    m = len(batch)
    p = null_dist.probs
    bits = _bit_mask_matrix(n)
    mu = bits.T @ p
    mu11 = bits.T @ (bits * p[:, None])
    s2 = float((p ** 2).sum())
    s3 = float((p ** 3).sum())

    comparisons = n + n * (n - 1) // 2 + 2
    z_star = float(ndtri(1.0 - alpha / (2.0 * comparisons)))
    ratios = []

    def z_ratio(observed, expected, sd):
        if sd < 1e-15:
            scale = max(abs(expected), 1e-12)
            return 0.0 if abs(observed - expected) <= 1e-9 * scale else np.inf
        return abs(observed - expected) / sd / z_star

    B = batch.bit_matrix().astype(float)
    freq = B.mean(axis=0)
    for j in range(n):
        sd = np.sqrt(mu[j] * (1.0 - mu[j]) / m)
        ratios.append(z_ratio(freq[j], mu[j], sd))

    f11 = (B.T @ B) / m
    for j in range(n):
        for k in range(j + 1, n):
            sd = np.sqrt(mu11[j, k] * (1.0 - mu11[j, k]) / m)
            ratios.append(z_ratio(f11[j, k], mu11[j, k], sd))

    _, counts = np.unique(batch.samples, return_counts=True)
    colliding_pairs = float((counts * (counts - 1) // 2).sum())
    expected_pairs = 0.5 * m * (m - 1) * s2
    collision_cap = _COLLISION_FACTOR * expected_pairs + 10.0 * np.sqrt(expected_pairs) + 5.0
    ratios.append(colliding_pairs / collision_cap)

    score_mean = float(p[batch.samples].mean())
    sd_score = np.sqrt(max(s3 - s2 ** 2, 0.0) / m)
    ratios.append(z_ratio(score_mean, s2, sd_score))

    top = float(np.max(ratios))
    return DistinguisherResult(int(top >= 1.0), top)


# -- spoofers ------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplerDescription:
    """Self-contained program text for a classical sampler plus its size."""

    name: str
    params: dict
    size: int
    seed: int = 0

    def to_dict(self) -> dict:
        return {"name": self.name, "params": self.params, "size": self.size, "seed": self.seed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_dict(d: dict) -> "SamplerDescription":
        return SamplerDescription(d["name"], dict(d.get("params", {})), int(d["size"]), int(d.get("seed", 0)))


@dataclass(frozen=True)
class UniformSampler:
    num_bits: int
    name: str = "uniform"

    def description(self, seed: int = 0) -> SamplerDescription:
        return SamplerDescription("uniform", {"num_bits": self.num_bits}, size=1, seed=seed)

    def draw(self, m: int, seed: int, circuit=None, circuit_dist=None) -> SampleBatch:
        vals = derive_rng(seed).integers(0, 1 << self.num_bits, size=m)
        return SampleBatch(self.num_bits, vals, source="uniform", seed=int(seed))


@dataclass(frozen=True)
class DistinctUniformSampler:
    """Uniform strings with duplicates rejected until m distinct values land."""

    num_bits: int
    name: str = "distinct_uniform"

    def description(self, seed: int = 0) -> SamplerDescription:
        return SamplerDescription("distinct_uniform", {"num_bits": self.num_bits}, size=1, seed=seed)

    def draw(self, m: int, seed: int, circuit=None, circuit_dist=None) -> SampleBatch:
        if m > (1 << self.num_bits):
            raise ValueError(f"cannot draw {m} distinct {self.num_bits}-bit values")
        rng = derive_rng(seed)
        seen: set[int] = set()
        out: list[int] = []
        while len(out) < m:
            for v in rng.integers(0, 1 << self.num_bits, size=max(64, m)):
                v = int(v)
                if v not in seen:
                    seen.add(v)
                    out.append(v)
                    if len(out) == m:
                        break
        return SampleBatch(self.num_bits, np.array(out, dtype=np.int64), source="distinct_uniform", seed=int(seed))


@dataclass(frozen=True)
class OmniscientSampler:
    """Samples the circuit's exact output distribution; size is the support cost."""

    circuit: Circuit
    name: str = "omniscient"

    def description(self, seed: int = 0) -> SamplerDescription:
        return SamplerDescription(
            "omniscient",
            {"circuit": circuit_to_dict(self.circuit)},
            size=1 << self.circuit.num_measured,
            seed=seed,
        )

    def draw(self, m: int, seed: int, circuit=None, circuit_dist=None) -> SampleBatch:
        dist = circuit_dist if circuit_dist is not None else output_distribution(self.circuit)
        from .qsim import sample

        batch = sample(dist, m, seed)
        return SampleBatch(batch.num_bits, batch.samples, source="omniscient", seed=int(seed))


def spoofer_from_description(desc: SamplerDescription):
    if desc.name == "uniform":
        return UniformSampler(int(desc.params["num_bits"]))
    if desc.name == "distinct_uniform":
        return DistinctUniformSampler(int(desc.params["num_bits"]))
    if desc.name == "omniscient":
        return OmniscientSampler(circuit_from_dict(desc.params["circuit"]))
    raise ValueError(f"unknown sampler {desc.name!r}")


def uniform_spoofer(n: int, m: int, seed: int) -> tuple[SamplerDescription, SampleBatch]:
    sampler = UniformSampler(n)
    return sampler.description(seed), sampler.draw(m, seed)


def distinct_uniform_spoofer(n: int, m: int, seed: int) -> tuple[SamplerDescription, SampleBatch]:
    sampler = DistinctUniformSampler(n)
    return sampler.description(seed), sampler.draw(m, seed)


def omniscient_spoofer(circuit: Circuit, m: int, seed: int) -> tuple[SamplerDescription, SampleBatch]:
    sampler = OmniscientSampler(circuit)
    return sampler.description(seed), sampler.draw(m, seed)


# -- distinguisher registry ------------------------------------------------------------

@dataclass(frozen=True)
class XebDistinguisher:
    threshold: float | None = None
    name: str = "xeb"

    def decide(self, circuit, metadata, spoofer_desc, batch, circuit_dist=None) -> DistinguisherResult:
        return xeb_distinguisher(circuit, batch, threshold=self.threshold, circuit_dist=circuit_dist)


@dataclass(frozen=True)
class SimonDistinguisher:
    name: str = "simon"

    def decide(self, circuit, metadata, spoofer_desc, batch, circuit_dist=None) -> DistinguisherResult:
        return simon_distinguisher(metadata, batch)


@dataclass(frozen=True)
class BatteryDistinguisher:
    alpha: float = _BATTERY_ALPHA
    name: str = "battery"

    def decide(self, circuit, metadata, spoofer_desc, batch, circuit_dist=None) -> DistinguisherResult:
        return battery_distinguisher(batch, null_dist=circuit_dist, circuit=circuit, alpha=self.alpha)


def make_distinguisher(name: str, params: dict | None = None):
    params = params or {}
    if name == "xeb":
        thr = params.get("threshold")
        return XebDistinguisher(threshold=float(thr) if thr is not None else None)
    if name == "simon":
        return SimonDistinguisher()
    if name == "battery":
        return BatteryDistinguisher(alpha=float(params.get("alpha", _BATTERY_ALPHA)))
    raise ValueError(f"unknown distinguisher {name!r}")
