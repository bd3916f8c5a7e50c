import numpy as np
import pytest
from hypothesis import given, strategies as st

from vqalab.families import simon_family
from vqalab.mcsp import (
    BudgetExceededError,
    McspVerdict,
    MicroSampler,
    enumerate_samplers,
    estimate_enumeration_count,
    samp_mcsp_bruteforce,
    sampler_distribution,
    sampler_from_netlist,
    sampler_to_netlist,
    universal_verifier,
    _rowwise_distribution,
)
from vqalab.qsim import SampleBatch, output_distribution, sample
from vqalab.rng import derive_seed

from oracles import bruteforce_sampler_distributions


# -- MicroSampler -------------------------------------------------------------

def test_sampler_validation():
    with pytest.raises(ValueError):
        MicroSampler(2, (("AND", 2, 1),), (0,))  # operands must satisfy a < b
    with pytest.raises(ValueError):
        MicroSampler(2, (("AND", 1, 3),), (0,))  # wire 3 not yet written
    with pytest.raises(ValueError):
        MicroSampler(2, (("NAND", 1, 2),), (0,))
    with pytest.raises(ValueError):
        MicroSampler(2, (), ())
    with pytest.raises(ValueError):
        MicroSampler(2, (), (3,))
    with pytest.raises(ValueError):
        MicroSampler(17, (), (0,))


def test_sampler_distribution_basics():
    const0 = MicroSampler(1, (), (0,))
    assert sampler_distribution(const0).probs.tolist() == [1.0, 0.0]
    raw = MicroSampler(1, (), (1,))
    assert sampler_distribution(raw).probs.tolist() == [0.5, 0.5]
    and2 = MicroSampler(2, (("AND", 1, 2),), (3,))
    assert sampler_distribution(and2).probs.tolist() == [0.75, 0.25]
    xor2 = MicroSampler(2, (("XOR", 1, 2),), (3,))
    assert sampler_distribution(xor2).probs.tolist() == [0.5, 0.5]
    const1 = MicroSampler(1, (("NOT", 0),), (2,))
    assert sampler_distribution(const1).probs.tolist() == [0.0, 1.0]


def test_sampler_pair_output():
    # two copies of one random bit: perfectly correlated pair
    s = MicroSampler(1, (), (1, 1))
    assert sampler_distribution(s).probs.tolist() == [0.5, 0.0, 0.0, 0.5]


@st.composite
def random_samplers(draw):
    r = draw(st.integers(0, 4))
    size = draw(st.integers(0, 3))
    gates = []
    wires = r + 1
    for _ in range(size):
        if draw(st.booleans()) and wires >= 2:
            b = draw(st.integers(1, wires - 1))
            a = draw(st.integers(0, b - 1))
            kind = draw(st.sampled_from(["AND", "OR", "XOR"]))
            gates.append((kind, a, b))
        else:
            gates.append(("NOT", draw(st.integers(0, wires - 1))))
        wires += 1
    k = draw(st.integers(1, 3))
    outputs = tuple(draw(st.integers(0, wires - 1)) for _ in range(k))
    return MicroSampler(r, tuple(gates), outputs)


@given(random_samplers())
def test_rowwise_resimulation_agrees(sampler):
    fast = sampler_distribution(sampler).probs
    slow = _rowwise_distribution(sampler)
    assert np.allclose(fast, slow, atol=1e-12)


# -- enumeration ---------------------------------------------------------------

def test_enumeration_base_case():
    samplers = list(enumerate_samplers(1, 1, 0))
    assert len(samplers) == 2
    laws = [tuple(sampler_distribution(s).probs) for s in samplers]
    assert (1.0, 0.0) in laws and (0.5, 0.5) in laws
    assert all(s.size == 0 for s in samplers)


@pytest.mark.parametrize("n,r,size", [(1, 1, 1), (1, 2, 2), (2, 2, 1)])
def test_enumeration_matches_bruteforce_oracle(n, r, size):
    mine = list(enumerate_samplers(n, r, size))
    my_laws = {
        tuple(int(round(p * (1 << r))) for p in sampler_distribution(s).probs) for s in mine
    }
    oracle_laws = bruteforce_sampler_distributions(n, r, size)
    assert my_laws == oracle_laws
    assert len(mine) == len(oracle_laws)


def test_enumeration_no_duplicate_laws():
    seen = set()
    for s in enumerate_samplers(2, 3, 2):
        law = tuple(sampler_distribution(s).probs)
        assert law not in seen
        seen.add(law)


def test_enumeration_is_size_major():
    sizes = [s.size for s in enumerate_samplers(1, 2, 2)]
    assert sizes == sorted(sizes)


def test_budget_refusal_carries_estimate():
    for n, r, size in [(5, 2, 1), (2, 7, 1), (2, 2, 6)]:
        with pytest.raises(BudgetExceededError) as err:
            list(enumerate_samplers(n, r, size))
        assert err.value.estimated_count == estimate_enumeration_count(n, r, size)
        assert err.value.estimated_count > 0


def test_estimate_counts_base():
    # size 0 at (n=1, r=1): two wires to pick one output from
    assert estimate_enumeration_count(1, 1, 0) == 2


# -- decision problem --------------------------------------------------------------

def test_bruteforce_all_zero_batch():
    batch = SampleBatch(1, np.zeros(100, dtype=np.int64))
    verdict = samp_mcsp_bruteforce(batch, 0, 0.0, num_random_bits=1)
    assert verdict.answer == "YES"
    assert verdict.achieved_distance == 0.0
    assert verdict.witness.size == 0
    assert tuple(sampler_distribution(verdict.witness).probs) == (1.0, 0.0)


def test_bruteforce_xor_samples_fit_at_size_zero():
    planted = MicroSampler(2, (("XOR", 1, 2),), (3,))
    batch = sample(sampler_distribution(planted), 4000, seed=1)
    verdict = samp_mcsp_bruteforce(batch, 1, 0.05, num_random_bits=2)
    assert verdict.answer == "YES"
    assert verdict.witness.size == 0


def test_bruteforce_three_quarters_law():
    batch = SampleBatch(1, np.array([0] * 750 + [1] * 250))
    verdict = samp_mcsp_bruteforce(batch, 1, 0.05, num_random_bits=2)
    assert verdict.answer == "YES"
    assert verdict.witness.size == 1
    assert verdict.achieved_distance == 0.0
    assert np.allclose(sampler_distribution(verdict.witness).probs, [0.75, 0.25])


def hard_three_bit_batch() -> SampleBatch:
    counts = [36, 1, 2, 3, 4, 5, 6, 7]
    values = np.repeat(np.arange(8), counts)
    return SampleBatch(3, values)


def test_bruteforce_rejects_unreachable_law():
    batch = hard_three_bit_batch()
    verdict = samp_mcsp_bruteforce(batch, 1, 0.01, num_random_bits=3)
    assert verdict.answer == "NO"
    assert verdict.witness is None
    assert verdict.achieved_distance > 0.01
    # cross-check by raw exhaustion: no size <= 1 law is close either
    empirical = np.bincount(batch.samples, minlength=8) / len(batch)
    best = min(
        0.5 * np.abs(np.array(law) / 8 - empirical).sum()
        for law in bruteforce_sampler_distributions(3, 3, 1)
    )
    assert best > 0.01
    assert verdict.achieved_distance == pytest.approx(best, abs=1e-12)


def test_bruteforce_monotone_in_size_bound():
    batch = SampleBatch(1, np.array([0] * 750 + [1] * 250))
    v1 = samp_mcsp_bruteforce(batch, 1, 0.05, num_random_bits=2)
    v3 = samp_mcsp_bruteforce(batch, 3, 0.05, num_random_bits=2)
    assert v1.answer == "YES" and v3.answer == "YES"
    assert v3.witness.size <= v1.witness.size


def test_planted_recovery_small_grid():
    # every canonical sampler is recovered from its own samples
    for idx, planted in enumerate(enumerate_samplers(2, 3, 2)):
        law = sampler_distribution(planted)
        batch = sample(law, 20_000, seed=derive_seed(50, idx))
        verdict = samp_mcsp_bruteforce(batch, 2, 0.02, num_random_bits=3)
        assert verdict.answer == "YES"
        assert verdict.witness.size <= planted.size


def test_verdict_validation():
    with pytest.raises(ValueError):
        McspVerdict("MAYBE", None, 0.0, 1, 0.1)
    with pytest.raises(ValueError):
        McspVerdict("YES", None, 0.0, 1, 0.1)
    with pytest.raises(ValueError):
        McspVerdict("NO", MicroSampler(1, (), (0,)), 0.5, 1, 0.1)
    with pytest.raises(ValueError):
        McspVerdict("YES", MicroSampler(1, (), (0,)), 0.5, 1, 0.1)


# -- universal verifier --------------------------------------------------------------

def test_verifier_accepts_uniform_spoofer_as_classical():
    rng_batch = sample(sampler_distribution(MicroSampler(2, (), (1, 2))), 5000, seed=2)
    assert universal_verifier(rng_batch, 1, 0.02, num_random_bits=2) == 0


def test_verifier_flags_unreachable_law():
    assert universal_verifier(hard_three_bit_batch(), 1, 0.01, num_random_bits=3) == 1


def test_verifier_empty_batch_is_classical():
    batch = SampleBatch(2, np.array([], dtype=np.int64))
    assert universal_verifier(batch, 1, 0.02, num_random_bits=2) == 0


def test_hidden_shift_outputs_judged_classical_at_micro_scale():
    # tiny hidden-shift laws are uniform cosets, which small samplers express
    fam = simon_family(2, seed=3)
    circuit, _ = fam.draw(0)
    batch = sample(output_distribution(circuit), 10_000, seed=5)
    assert universal_verifier(batch, 1, 0.02, num_random_bits=2) == 0


# -- serialization -------------------------------------------------------------------

def test_netlist_round_trip():
    s = MicroSampler(3, (("AND", 1, 2), ("NOT", 4), ("XOR", 3, 5)), (6, 2))
    text = sampler_to_netlist(s)
    assert sampler_from_netlist(text) == s


def test_netlist_rejects_garbage():
    with pytest.raises(ValueError):
        sampler_from_netlist("gates first\noutputs 0")
    with pytest.raises(ValueError):
        sampler_from_netlist("inputs 2\nNAND 1 2\noutputs 3")
    with pytest.raises(ValueError):
        sampler_from_netlist("inputs 2\nAND 1 2")
