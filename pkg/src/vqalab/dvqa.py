"""Designated-verifier quantum-advantage protocol at desk scale.

The trapdoor claw-free function is Rabin squaring x -> x^2 mod N over Blum
integers N = p*q with p = q = 3 (mod 4).  Squaring is 4-to-1 on units; the
four square roots of y split into two classes {a, N-a} and {b, N-b}, and a
claw is one representative from each class.  Whoever holds the factors of N
computes both classes by CRT; the "quantum" prover is stood in for by a
bounded brute-force search that recovers the factors, while the classical
simulators are restricted to single-root knowledge by construction.

Challenges are derived by hashing the public parameters, the round index,
and the round's commitment, so transcripts are non-interactive and anyone
can recompute the challenge bits.  Verifying the parity-equation responses
on challenge 1 requires the factor pairs, which is what makes the verifier
designated: a verifier without them can only check the root-reveal rounds.

No cryptographic hardness is claimed at these modulus sizes.  The point is
the protocol structure: honest transcripts verify with probability 1, the
one-root-guess simulator passes each round with probability 3/4, and the
gap survives only for the key holder.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import lru_cache

from .rng import derive_rng, derive_seed
from .workers import parallel_map

__all__ = [
    "DvqaKeys",
    "DvqaPublicParams",
    "DvqaReport",
    "DvqaRound",
    "DvqaTranscript",
    "SearchBudgetError",
    "SIM_STRATEGIES",
    "challenge_bit",
    "classical_sim",
    "designated_verify",
    "honest_prove",
    "keys_from_json",
    "keys_to_json",
    "public_verify",
    "run_dvqa_game",
    "setup",
    "square_roots",
    "transcript_from_json",
    "transcript_to_json",
]

HASH_NAME = "sha256"
DEFAULT_SEARCH_BUDGET = 1 << 24
SIM_STRATEGIES = ("one-root-guess", "replay", "random-response")

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class SearchBudgetError(RuntimeError):
    """Raised when claw recovery would exceed the brute-force search budget."""


# -- number theory -------------------------------------------------------------


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with a fixed base set, deterministic below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _draw_blum_prime(bits: int, rng, attempts: int = 10_000) -> int:
    # force the top bit and the 3 (mod 4) residue, then test
    for _ in range(attempts):
        raw = int.from_bytes(rng.bytes(8), "big") % (1 << bits)
        candidate = raw | (1 << (bits - 1)) | 3
        if candidate.bit_length() == bits and is_probable_prime(candidate):
            return candidate
    raise RuntimeError(f"no {bits}-bit prime = 3 (mod 4) within the retry budget")


@lru_cache(maxsize=4096)
def _factor_semiprime(n: int, search_budget: int = DEFAULT_SEARCH_BUDGET) -> tuple[int, int]:
    """Recover (p, q) with p <= q by trial division up to sqrt(n)."""
    limit = math.isqrt(n)
    if limit > search_budget:
        raise SearchBudgetError(
            f"claw search for a {n.bit_length()}-bit modulus needs {limit} "
            f"divisions, over the budget of {search_budget}"
        )
    if n % 2 == 0:
        raise ValueError("modulus must be odd")
    for d in range(3, limit + 1, 2):
        if n % d == 0:
            return d, n // d
    raise ValueError(f"{n} has no nontrivial factor up to its square root")


def square_roots(y: int, p: int, q: int) -> tuple[int, int] | None:
    """Canonical claw of y mod p*q, or None when y has no four distinct roots.

    Returns the smaller representative of each root class, sorted.  Both
    prover and verifier derive the claw this way, so the parity equation
    is checked against exactly the pair the prover used.
    """
    n = p * q
    yp, yq = y % p, y % q
    if yp == 0 or yq == 0:
        return None
    rp = pow(yp, (p + 1) // 4, p)
    rq = pow(yq, (q + 1) // 4, q)
    if rp * rp % p != yp or rq * rq % q != yq:
        return None  # not a quadratic residue
    # CRT the two sign choices that generate distinct classes
    qinv = pow(q, -1, p)
    a = (rq + q * ((rp - rq) * qinv % p)) % n
    b = (rq + q * ((-rp - rq) * qinv % p)) % n
    x0 = min(a, n - a)
    x1 = min(b, n - b)
    if x0 == x1:
        return None
    return (x0, x1) if x0 < x1 else (x1, x0)


# -- keys ----------------------------------------------------------------------


@dataclass(frozen=True)
class DvqaPublicParams:
    """Per-round Blum moduli plus the self-describing protocol constants."""

    moduli: tuple[int, ...]
    modulus_bits: int
    hash_name: str = HASH_NAME

    def __post_init__(self):
        if self.hash_name != HASH_NAME:
            raise ValueError(f"unsupported hash {self.hash_name!r}")
        if not self.moduli:
            raise ValueError("need at least one round")
        for n in self.moduli:
            if n.bit_length() != self.modulus_bits:
                raise ValueError(f"modulus {n} is not {self.modulus_bits}-bit")

    @property
    def num_rounds(self) -> int:
        return len(self.moduli)

    @property
    def byte_width(self) -> int:
        return (self.modulus_bits + 7) // 8

    def digest(self) -> bytes:
        h = hashlib.sha256(b"dvqa-pp-v1")
        h.update(self.hash_name.encode())
        h.update(self.modulus_bits.to_bytes(2, "big"))
        h.update(len(self.moduli).to_bytes(4, "big"))
        for n in self.moduli:
            h.update(n.to_bytes(self.byte_width, "big"))
        return h.digest()


@dataclass(frozen=True)
class DvqaKeys:
    """Public parameters and the factor pairs that form the verification key."""

    pp: DvqaPublicParams
    vk: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.vk) != self.pp.num_rounds:
            raise ValueError("one factor pair per modulus required")
        for n, (p, q) in zip(self.pp.moduli, self.vk):
            if p * q != n:
                raise ValueError(f"{p} * {q} != {n}")
            if p % 4 != 3 or q % 4 != 3:
                raise ValueError("factors must be 3 (mod 4)")
            if not (is_probable_prime(p) and is_probable_prime(q)):
                raise ValueError("factors must be prime")


def setup(modulus_bits: int, num_rounds: int, seed: int = 0) -> DvqaKeys:
    """Draw one fresh Blum integer per round, keeping the factors as vk."""
    if not 16 <= modulus_bits <= 64:
        raise ValueError("modulus_bits must lie in [16, 64]")
    if num_rounds < 1:
        raise ValueError("need at least one round")
    p_bits = (modulus_bits + 1) // 2
    q_bits = modulus_bits - p_bits
    moduli = []
    vk = []
    for i in range(num_rounds):
        rng = derive_rng(seed, i)
        for _ in range(10_000):
            p = _draw_blum_prime(p_bits, rng)
            q = _draw_blum_prime(q_bits, rng)
            if p != q and (p * q).bit_length() == modulus_bits:
                break
        else:
            raise RuntimeError("modulus generation retry budget exhausted")
        moduli.append(p * q)
        vk.append((min(p, q), max(p, q)))
    return DvqaKeys(DvqaPublicParams(tuple(moduli), modulus_bits), tuple(vk))


# -- transcripts ---------------------------------------------------------------


@dataclass(frozen=True)
class DvqaRound:
    """Commitment, derived challenge, and the response for that challenge."""

    commitment: int
    challenge: int
    root: int | None = None
    equation: tuple[int, int] | None = None

    def __post_init__(self):
        if self.challenge not in (0, 1):
            raise ValueError("challenge must be a bit")
        if (self.root is None) == (self.equation is None):
            raise ValueError("exactly one response form per round")


@dataclass(frozen=True)
class DvqaTranscript:
    rounds: tuple[DvqaRound, ...]

    @property
    def num_rounds(self) -> int:
        return len(self.rounds)


def challenge_bit(pp: DvqaPublicParams, round_index: int, commitment: int) -> int:
    """First bit of Hash(pp digest, round index, commitment)."""
    h = hashlib.sha256(b"dvqa-challenge-v1")
    h.update(pp.digest())
    h.update(round_index.to_bytes(8, "big"))
    h.update(commitment.to_bytes(pp.byte_width, "big"))
    return h.digest()[0] >> 7


def _random_below(rng, bound: int) -> int:
    # 128 hash-width bytes make the modulo bias negligible at <= 64-bit bounds
    return int.from_bytes(rng.bytes(16), "big") % bound


def _parity(v: int) -> int:
    return v.bit_count() & 1


def honest_prove(pp: DvqaPublicParams, seed: int = 0) -> DvqaTranscript:
    """Transcript from a prover that recovers the whole claw per round.

    The prover sees only the public parameters; it rederives the factors of
    each modulus by trial division, the desk-scale stand-in for quantum claw
    access.  Raises SearchBudgetError when a modulus is too large for that.
    """
    rounds = []
    for i, n in enumerate(pp.moduli):
        rng = derive_rng(seed, i)
        p, q = _factor_semiprime(n)
        while True:
            x = 1 + _random_below(rng, n - 1)
            if math.gcd(x, n) == 1:
                break
        y = x * x % n
        b = challenge_bit(pp, i, y)
        if b == 0:
            rounds.append(DvqaRound(y, 0, root=x))
        else:
            x0, x1 = square_roots(y, p, q)
            d = 1 + _random_below(rng, (1 << pp.modulus_bits) - 1)
            m = _parity(d & (x0 ^ x1))
            rounds.append(DvqaRound(y, 1, equation=(d, m)))
    return DvqaTranscript(tuple(rounds))


def classical_sim(pp: DvqaPublicParams, strategy: str, seed: int = 0) -> DvqaTranscript:
    """Transcript from a classical simulator restricted to one root per round.

    one-root-guess commits to a square it knows one root of, answers the
    root-reveal challenge perfectly, and guesses the parity equation.
    replay presents an honest transcript built under unrelated moduli.
    random-response emits uniform garbage in the right shape.
    """
    if strategy == "replay":
        stale = setup(pp.modulus_bits, pp.num_rounds, derive_seed(seed, 1))
        return honest_prove(stale.pp, derive_seed(seed, 2))
    if strategy not in ("one-root-guess", "random-response"):
        raise ValueError(f"unknown strategy {strategy!r}")
    rounds = []
    for i, n in enumerate(pp.moduli):
        rng = derive_rng(seed, i)
        if strategy == "one-root-guess":
            x = 1 + _random_below(rng, n - 1)
            y = x * x % n
        else:
            x = _random_below(rng, n)
            y = _random_below(rng, n)
        b = challenge_bit(pp, i, y)
        if b == 0:
            rounds.append(DvqaRound(y, 0, root=x))
        else:
            d = 1 + _random_below(rng, (1 << pp.modulus_bits) - 1)
            m = int(rng.integers(2))
            rounds.append(DvqaRound(y, 1, equation=(d, m)))
    return DvqaTranscript(tuple(rounds))


# -- verification --------------------------------------------------------------


def _verify_round(pp, factors, index: int, rnd: DvqaRound) -> bool:
    n = pp.moduli[index]
    y = rnd.commitment
    if not 0 <= y < n:
        return False
    if rnd.challenge != challenge_bit(pp, index, y):
        return False
    if rnd.challenge == 0:
        x = rnd.root
        return 0 <= x < n and x * x % n == y
    d, m = rnd.equation
    if not 0 < d < (1 << pp.modulus_bits) or m not in (0, 1):
        return False
    if factors is None:
        return True  # without vk the parity equation is unverifiable
    claw = square_roots(y, *factors[index])
    if claw is None:
        return False
    x0, x1 = claw
    return m == _parity(d & (x0 ^ x1))


def designated_verify(pp: DvqaPublicParams, vk, transcript: DvqaTranscript) -> int:
    """1 iff every round verifies, with the parity rounds checked via vk."""
    DvqaKeys(pp, tuple(vk))  # reject mismatched key material up front
    if transcript.num_rounds != pp.num_rounds:
        return 0
    ok = all(
        _verify_round(pp, tuple(vk), i, rnd) for i, rnd in enumerate(transcript.rounds)
    )
    return int(ok)


def public_verify(pp: DvqaPublicParams, transcript: DvqaTranscript) -> int:
    """Verification without vk: parity rounds pass on shape alone.

    Demonstrates why the verifier is designated; the one-root-guess
    simulator is accepted here with probability 1.
    """
    if transcript.num_rounds != pp.num_rounds:
        return 0
    ok = all(
        _verify_round(pp, None, i, rnd) for i, rnd in enumerate(transcript.rounds)
    )
    return int(ok)


# -- the game ------------------------------------------------------------------


@dataclass(frozen=True)
class DvqaReport:
    """Accept rates of honest prover vs simulator under one key draw."""

    honest_accepts: tuple[int, ...]
    sim_accepts: tuple[int, ...]
    sim_strategy: str
    num_rounds: int
    modulus_bits: int
    advantage_estimate: float
    std_error: float

    @property
    def honest_rate(self) -> float:
        return sum(self.honest_accepts) / len(self.honest_accepts)

    @property
    def sim_rate(self) -> float:
        return sum(self.sim_accepts) / len(self.sim_accepts)


def _one_transcript(keys: DvqaKeys, strategy: str, seed: int) -> int:
    if strategy == "honest":
        transcript = honest_prove(keys.pp, seed)
    else:
        transcript = classical_sim(keys.pp, strategy, seed)
    return designated_verify(keys.pp, keys.vk, transcript)


def _transcript_task(args) -> int:
    return _one_transcript(*args)


def _smoothed_rate_error(count: int, trials: int) -> float:
    rate = (count + 0.5) / (trials + 1)
    return math.sqrt(rate * (1.0 - rate) / trials)


def run_dvqa_game(
    keys: DvqaKeys,
    num_transcripts: int,
    sim_strategy: str = "one-root-guess",
    seed: int = 0,
    workers: int = 1,
) -> DvqaReport:
    """Accept-rate gap between the honest prover and a classical simulator.

    Generates num_transcripts independent transcripts per side under the
    fixed keys and reports the absolute accept-rate difference.  Passing
    sim_strategy="honest" runs the honest prover on both sides as a null
    control.  Fresh-key averaging is the caller's loop over setup seeds.
    """
    if num_transcripts < 1:
        raise ValueError("need at least one transcript per side")
    if sim_strategy != "honest" and sim_strategy not in SIM_STRATEGIES:
        raise ValueError(f"unknown strategy {sim_strategy!r}")
    tasks = [(keys, "honest", derive_seed(seed, 0, t)) for t in range(num_transcripts)]
    tasks += [(keys, sim_strategy, derive_seed(seed, 1, t)) for t in range(num_transcripts)]
    accepts = parallel_map(_transcript_task, tasks, workers=workers)
    honest = tuple(accepts[:num_transcripts])
    sim = tuple(accepts[num_transcripts:])
    advantage = abs(sum(honest) - sum(sim)) / num_transcripts
    err = math.hypot(
        _smoothed_rate_error(sum(honest), num_transcripts),
        _smoothed_rate_error(sum(sim), num_transcripts),
    )
    return DvqaReport(
        honest_accepts=honest,
        sim_accepts=sim,
        sim_strategy=sim_strategy,
        num_rounds=keys.pp.num_rounds,
        modulus_bits=keys.pp.modulus_bits,
        advantage_estimate=advantage,
        std_error=err,
    )


# -- serialization -------------------------------------------------------------


def keys_to_json(keys: DvqaKeys) -> str:
    return json.dumps(
        {
            "hash": keys.pp.hash_name,
            "modulus_bits": keys.pp.modulus_bits,
            "moduli": [hex(n) for n in keys.pp.moduli],
            "vk": [[hex(p), hex(q)] for p, q in keys.vk],
        },
        indent=2,
    )


def keys_from_json(text: str) -> DvqaKeys:
    obj = json.loads(text)
    pp = DvqaPublicParams(
        tuple(int(n, 16) for n in obj["moduli"]),
        int(obj["modulus_bits"]),
        obj["hash"],
    )
    vk = tuple((int(p, 16), int(q, 16)) for p, q in obj["vk"])
    return DvqaKeys(pp, vk)


def transcript_to_json(transcript: DvqaTranscript) -> str:
    rounds = []
    for r in transcript.rounds:
        entry = {"y": hex(r.commitment), "b": r.challenge}
        if r.root is not None:
            entry["root"] = hex(r.root)
        else:
            entry["d"] = hex(r.equation[0])
            entry["m"] = r.equation[1]
        rounds.append(entry)
    return json.dumps({"rounds": rounds}, indent=2)


def transcript_from_json(text: str) -> DvqaTranscript:
    obj = json.loads(text)
    rounds = []
    for entry in obj["rounds"]:
        if "root" in entry:
            rounds.append(DvqaRound(int(entry["y"], 16), entry["b"], root=int(entry["root"], 16)))
        else:
            rounds.append(
                DvqaRound(
                    int(entry["y"], 16),
                    entry["b"],
                    equation=(int(entry["d"], 16), int(entry["m"])),
                )
            )
    return DvqaTranscript(tuple(rounds))
