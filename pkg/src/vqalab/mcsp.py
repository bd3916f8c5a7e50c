"""Micro-scale sampler synthesis: is a sample batch producible by a tiny circuit?

A MicroSampler feeds r fresh random bits through a Boolean gate list and
outputs n designated wires. Enumeration walks all canonical samplers within
a size bound, and the brute-force solver answers YES when some candidate's
exact output law lands within a total-variation tolerance of the empirical
law of the given samples.

The tolerance criterion deliberately strengthens indistinguishability: at
these widths the candidate laws are exact, and TVD closeness defeats every
bounded-sample test at once. The criterion never reads a sampler
description, so the oblivious and description-aware decision problems
coincide here; verdicts carry variant="oblivious" to record that.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .qsim import Distribution, SampleBatch

MAX_OUTPUT_BITS = 4
MAX_RANDOM_BITS = 6
MAX_SIZE_BOUND = 5
MAX_EXACT_RANDOM_BITS = 16

_BINARY_KINDS = ("AND", "OR", "XOR")


class BudgetExceededError(Exception):
    """Enumeration refused; carries the estimated raw sampler count."""

    def __init__(self, message: str, estimated_count: int):
        super().__init__(message)
        self.estimated_count = estimated_count


@dataclass(frozen=True)
class MicroSampler:
    """Gate-list sampler over r random bits.

    Wire 0 is constant zero, wires 1..r are the random inputs, and gate k
    writes wire r+1+k. Binary gates take ordered operand pairs a < b.
    """

    num_random_bits: int
    gates: tuple[tuple, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        r = self.num_random_bits
        if not 0 <= r <= MAX_EXACT_RANDOM_BITS:
            raise ValueError(f"need 0 <= random bits <= {MAX_EXACT_RANDOM_BITS}")
        wires = r + 1
        for gate in self.gates:
            kind = gate[0]
            if kind in _BINARY_KINDS:
                if len(gate) != 3:
                    raise ValueError(f"{kind} takes two operands")
                a, b = gate[1], gate[2]
                if not (0 <= a < b < wires):
                    raise ValueError(f"bad operands {gate} with {wires} wires")
            elif kind == "NOT":
                if len(gate) != 2:
                    raise ValueError("NOT takes one operand")
                if not 0 <= gate[1] < wires:
                    raise ValueError(f"bad operand {gate} with {wires} wires")
            else:
                raise ValueError(f"unknown gate kind {kind!r}")
            wires += 1
        if not self.outputs:
            raise ValueError("need at least one output wire")
        for o in self.outputs:
            if not 0 <= o < wires:
                raise ValueError(f"output wire {o} out of range")

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def num_bits(self) -> int:
        return len(self.outputs)


def _wire_tables(sampler: MicroSampler) -> list[np.ndarray]:
    """Per-wire 0/1 vectors over all 2^r assignments, vectorized."""
    r = sampler.num_random_bits
    assignments = np.arange(1 << r, dtype=np.int64)
    tables = [np.zeros(1 << r, dtype=np.uint8)]
    for i in range(r):
        tables.append(((assignments >> i) & 1).astype(np.uint8))
    for gate in sampler.gates:
        if gate[0] == "AND":
            tables.append(tables[gate[1]] & tables[gate[2]])
        elif gate[0] == "OR":
            tables.append(tables[gate[1]] | tables[gate[2]])
        elif gate[0] == "XOR":
            tables.append(tables[gate[1]] ^ tables[gate[2]])
        else:
            tables.append(1 - tables[gate[1]])
    return tables


def _output_counts(tables, outputs, num_assignments: int) -> np.ndarray:
    values = np.zeros(num_assignments, dtype=np.int64)
    for j, o in enumerate(outputs):
        values += tables[o].astype(np.int64) << j
    return np.bincount(values, minlength=1 << len(outputs))


def sampler_distribution(sampler: MicroSampler) -> Distribution:
    """Exact output law by enumerating all random-input assignments."""
    tables = _wire_tables(sampler)
    counts = _output_counts(tables, sampler.outputs, 1 << sampler.num_random_bits)
    return Distribution(sampler.num_bits, counts / (1 << sampler.num_random_bits))


def _rowwise_distribution(sampler: MicroSampler) -> np.ndarray:
    """Re-simulation one assignment at a time; the independent check route."""
    r = sampler.num_random_bits
    counts = np.zeros(1 << sampler.num_bits)
    for assignment in range(1 << r):
        wires = [0] + [(assignment >> i) & 1 for i in range(r)]
        for gate in sampler.gates:
            if gate[0] == "AND":
                wires.append(wires[gate[1]] & wires[gate[2]])
            elif gate[0] == "OR":
                wires.append(wires[gate[1]] | wires[gate[2]])
            elif gate[0] == "XOR":
                wires.append(wires[gate[1]] ^ wires[gate[2]])
            else:
                wires.append(1 - wires[gate[1]])
        value = sum(wires[o] << j for j, o in enumerate(sampler.outputs))
        counts[value] += 1
    return counts / (1 << r)


# -- enumeration ----------------------------------------------------------------------

def estimate_enumeration_count(n: int, r: int, size_bound: int) -> int:
    """Raw gate-sequence-times-output count, before any pruning."""
    total = 0
    for size in range(size_bound + 1):
        sequences = 1
        w = r + 1
        for _ in range(size):
            sequences *= 3 * (w * (w - 1) // 2) + w
            w += 1
        total += sequences * w ** n
    return total


def _check_budget(n: int, r: int, size_bound: int):
    if n < 1 or r < 0 or size_bound < 0:
        raise ValueError("need n >= 1, r >= 0, size_bound >= 0")
    if n > MAX_OUTPUT_BITS or r > MAX_RANDOM_BITS or size_bound > MAX_SIZE_BOUND:
        raise BudgetExceededError(
            f"enumeration budget is n <= {MAX_OUTPUT_BITS}, r <= {MAX_RANDOM_BITS}, "
            f"size <= {MAX_SIZE_BOUND}; asked for (n={n}, r={r}, size={size_bound}) "
            f"with roughly {estimate_enumeration_count(n, r, size_bound)} raw candidates",
            estimate_enumeration_count(n, r, size_bound),
        )


def _walk_canonical(n: int, r: int, size_bound: int):
    """Yield (sampler, count tuple) pairs, one per distinct output law.

    Size-major deterministic order, so the first sampler achieving a law is
    the smallest witness for it. Gates whose truth table duplicates an
    existing wire add no new functions and are pruned; joint output
    functions and final laws are each deduplicated globally.
    """
    num_assignments = 1 << r
    assignments = np.arange(num_assignments, dtype=np.int64)
    base_tables = [np.zeros(num_assignments, dtype=np.uint8)]
    for i in range(r):
        base_tables.append(((assignments >> i) & 1).astype(np.uint8))
    base_keys = [t.tobytes() for t in base_tables]

    seen_joint: set[tuple] = set()
    seen_laws: set[tuple] = set()

    def candidates(tables):
        w = len(tables)
        for a in range(w):
            for b in range(a + 1, w):
                yield ("AND", a, b), tables[a] & tables[b]
                yield ("OR", a, b), tables[a] | tables[b]
                yield ("XOR", a, b), tables[a] ^ tables[b]
        for a in range(w):
            yield ("NOT", a), 1 - tables[a]

    def emit(tables, keys, gates):
        for outputs in product(range(len(tables)), repeat=n):
            joint = tuple(keys[o] for o in outputs)
            if joint in seen_joint:
                continue
            seen_joint.add(joint)
            counts = tuple(int(c) for c in _output_counts(tables, outputs, num_assignments))
            if counts in seen_laws:
                continue
            seen_laws.add(counts)
            yield MicroSampler(r, tuple(gates), outputs), counts

    def extend(tables, keys, key_set, gates, remaining):
        if remaining == 0:
            yield from emit(tables, keys, gates)
            return
        for gate, table in candidates(tables):
            key = table.tobytes()
            if key in key_set:
                continue
            yield from extend(
                tables + [table], keys + [key], key_set | {key}, gates + [gate], remaining - 1
            )

    for size in range(size_bound + 1):
        yield from extend(base_tables, base_keys, set(base_keys), [], size)


def enumerate_samplers(n: int, r: int, size_bound: int):
    """Lazy canonical enumeration: one sampler per reachable output law."""
    _check_budget(n, r, size_bound)
    for sampler, _ in _walk_canonical(n, r, size_bound):
        yield sampler


@lru_cache(maxsize=32)
def _canonical_laws(n: int, r: int, size_bound: int) -> tuple:
    _check_budget(n, r, size_bound)
    return tuple(_walk_canonical(n, r, size_bound))


# -- decision problem ---------------------------------------------------------------

@dataclass(frozen=True)
class McspVerdict:
    answer: str
    witness: MicroSampler | None
    achieved_distance: float
    size_bound: int
    tolerance: float
    variant: str = "oblivious"

    def __post_init__(self):
        if self.answer not in ("YES", "NO"):
            raise ValueError("answer must be YES or NO")
        if self.answer == "YES":
            if self.witness is None:
                raise ValueError("YES needs a witness")
            if self.witness.size > self.size_bound:
                raise ValueError("witness exceeds the size bound")
            if self.achieved_distance > self.tolerance:
                raise ValueError("witness distance exceeds the tolerance")
        elif self.witness is not None:
            raise ValueError("NO carries no witness")


def samp_mcsp_bruteforce(
    samples: SampleBatch,
    size_bound: int,
    tolerance: float,
    num_random_bits: int = 4,
) -> McspVerdict:
    """YES iff some canonical sampler's exact law is TVD-close to the samples.

    Scans candidates in size-major order and stops at the first law within
    `tolerance` of the empirical distribution, so the witness is the
    smallest one. An empty batch is fit vacuously by the first candidate.
    Every YES is re-checked by an independent row-by-row re-simulation of
    the witness before being returned.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    laws = _canonical_laws(samples.num_bits, num_random_bits, size_bound)
    if len(samples) == 0:
        sampler = laws[0][0]
        return McspVerdict("YES", sampler, 0.0, size_bound, tolerance)
    counts = np.bincount(samples.samples, minlength=1 << samples.num_bits)
    empirical = counts / len(samples)
    num_assignments = 1 << num_random_bits
    best = np.inf
    for sampler, law_counts in laws:
        dist = 0.5 * float(np.abs(np.array(law_counts) / num_assignments - empirical).sum())
        best = min(best, dist)
        if dist <= tolerance:
            recheck = 0.5 * float(np.abs(_rowwise_distribution(sampler) - empirical).sum())
            if abs(recheck - dist) > 1e-12:
                raise RuntimeError("witness re-simulation disagrees with enumeration")
            return McspVerdict("YES", sampler, dist, size_bound, tolerance)
    return McspVerdict("NO", None, best, size_bound, tolerance)


def universal_verifier(
    samples: SampleBatch,
    declared_spoofer_size: int,
    tolerance: float,
    num_random_bits: int = 4,
) -> int:
    """1 ("not classically samplable at the declared size") or 0 ("classical").

    Caveat at this scale: any law that a small sampler CAN express is judged
    classical, even when the samples come from a quantum circuit. Uniform
    subgroup-coset laws, such as hidden-shift outputs at tiny n, are in that
    class.
    """
    verdict = samp_mcsp_bruteforce(samples, declared_spoofer_size, tolerance, num_random_bits)
    return int(verdict.answer == "NO")


# -- serialization ---------------------------------------------------------------------

def sampler_to_netlist(sampler: MicroSampler) -> str:
    lines = [f"inputs {sampler.num_random_bits}"]
    for gate in sampler.gates:
        lines.append(" ".join(str(part) for part in gate))
    lines.append("outputs " + " ".join(str(o) for o in sampler.outputs))
    return "\n".join(lines)


def sampler_from_netlist(text: str) -> MicroSampler:
    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if not lines or not lines[0].startswith("inputs "):
        raise ValueError("netlist must start with an inputs line")
    r = int(lines[0].split()[1])
    if not lines[-1].startswith("outputs "):
        raise ValueError("netlist must end with an outputs line")
    outputs = tuple(int(tok) for tok in lines[-1].split()[1:])
    gates = []
    for line in lines[1:-1]:
        parts = line.split()
        kind = parts[0]
        if kind == "NOT":
            gates.append(("NOT", int(parts[1])))
        elif kind in _BINARY_KINDS:
            gates.append((kind, int(parts[1]), int(parts[2])))
        else:
            raise ValueError(f"unknown netlist gate {kind!r}")
    return MicroSampler(r, tuple(gates), outputs)
