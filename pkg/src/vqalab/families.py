"""Circuit family generators for the sampling games.

A family hands out (circuit, metadata) pairs under explicit draw seeds.
The declared num_qubits is the width of reported outcomes; a drawn circuit
may simulate extra ancilla qubits as long as its measured register has the
declared width (the Simon construction measures n of its 2n-1 qubits).
Metadata carries the family's secrets (hidden shift, oracle table, hash
key) and is enough to rebuild the drawn circuit exactly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .qsim import (
    Circuit,
    Distribution,
    MAX_QUBITS,
    cnot,
    h,
    oracle,
    output_distribution,
    phase_oracle,
    unitary2,
)
from .rng import derive_rng, derive_seed


class CircuitFamily:
    """Seeded generator of circuits sharing one output width."""

    name: str
    num_qubits: int

    def draw(self, seed: int) -> tuple[Circuit, object]:
        raise NotImplementedError

    def enumerate(self):
        """All (circuit, metadata) members for finite families, else None."""
        return None


# -- Simon ------------------------------------------------------------------

@dataclass(frozen=True)
class SimonInstance:
    """Hidden-shift function: table is exactly 2-to-1 with f(x) = f(x ^ shift)."""

    num_bits: int
    shift: int
    table: np.ndarray

    def __post_init__(self):
        tab = np.asarray(self.table, dtype=np.int64)
        tab.setflags(write=False)
        object.__setattr__(self, "table", tab)


def simon_circuit(instance: SimonInstance) -> Circuit:
    """H on the input register, the XOR oracle, H again; inputs are measured."""
    n = instance.num_bits
    inputs = tuple(range(n))
    outputs = tuple(range(n, 2 * n - 1))
    gates = (
        tuple(h(q) for q in inputs)
        + (oracle(instance.table, inputs, outputs),)
        + tuple(h(q) for q in inputs)
    )
    return Circuit(2 * n - 1, gates, measured=inputs)


def _draw_simon_instance(n: int, rng: np.random.Generator, fixed_shift: int | None) -> SimonInstance:
    if fixed_shift is not None:
        s = int(fixed_shift)
    else:
        s = int(rng.integers(1, 1 << n))
    if not 0 < s < (1 << n):
        raise ValueError(f"shift must be a nonzero {n}-bit value, got {s}")
    xs = np.arange(1 << n, dtype=np.int64)
    reps = xs[xs < (xs ^ s)]  # one representative per {x, x^s} coset
    values = rng.permutation(1 << (n - 1)).astype(np.int64)
    table = np.zeros(1 << n, dtype=np.int64)
    table[reps] = values
    table[reps ^ s] = values
    return SimonInstance(n, s, table)


@dataclass(frozen=True)
class SimonFamily(CircuitFamily):
    num_qubits: int
    base_seed: int = 0
    fixed_shift: int | None = None
    name: str = "simon"

    def __post_init__(self):
        n = self.num_qubits
        if not 2 <= n <= (MAX_QUBITS + 1) // 2:
            raise ValueError(f"simon family needs 2 <= n <= {(MAX_QUBITS + 1) // 2}")
        if self.fixed_shift is not None and not 0 < self.fixed_shift < (1 << n):
            raise ValueError("fixed shift must be a nonzero n-bit value")

    def draw(self, seed: int) -> tuple[Circuit, SimonInstance]:
        rng = derive_rng(self.base_seed, int(seed))
        inst = _draw_simon_instance(self.num_qubits, rng, self.fixed_shift)
        return simon_circuit(inst), inst


def simon_family(n: int, seed: int = 0, fixed_shift: int | None = None) -> SimonFamily:
    return SimonFamily(num_qubits=n, base_seed=seed, fixed_shift=fixed_shift)


# -- brickwork random circuits -------------------------------------------------

def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix, phases fixed."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class BrickworkDraw:
    num_qubits: int
    depth: int
    draw_seed: int


@dataclass(frozen=True)
class RandomCircuitFamily(CircuitFamily):
    """Alternating even/odd layers of independent Haar 2-qubit blocks."""

    num_qubits: int
    depth: int
    base_seed: int = 0
    name: str = "random_circuit"

    def __post_init__(self):
        if not 2 <= self.num_qubits <= 14:
            raise ValueError("random circuit family needs 2 <= n <= 14")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")

    def draw(self, seed: int) -> tuple[Circuit, BrickworkDraw]:
        rng = derive_rng(self.base_seed, int(seed))
        n = self.num_qubits
        gates = []
        for layer in range(self.depth):
            start = 0 if layer % 2 == 0 else 1
            for a in range(start, n - 1, 2):
                gates.append(unitary2(haar_unitary(4, rng), a, a + 1))
        return Circuit(n, tuple(gates)), BrickworkDraw(n, self.depth, int(seed))


def random_circuit_family(n: int, depth: int, seed: int = 0) -> RandomCircuitFamily:
    return RandomCircuitFamily(num_qubits=n, depth=depth, base_seed=seed)


# -- binary-phase pseudorandom states ------------------------------------------

@dataclass(frozen=True)
class PhaseKey:
    num_bits: int
    key_hex: str
    levels: int = 2


def keyed_phase_table(n: int, key: bytes, levels: int = 2) -> np.ndarray:
    """Phase exponents from a keyed hash: entry x is derived from BLAKE2b_key(x)."""
    out = np.empty(1 << n, dtype=np.int64)
    for val in range(1 << n):
        digest = hashlib.blake2b(
            val.to_bytes(4, "big"), key=key, digest_size=8
        ).digest()
        if levels == 2:
            out[val] = digest[0] >> 7
        else:
            out[val] = int.from_bytes(digest, "big") % levels
    return out


def phase_state_circuit(n: int, table: np.ndarray, levels: int = 2) -> Circuit:
    """H on every qubit, then the diagonal phase lookup.

    With an all-zero table this is just H^n acting on |0..0>; any table
    leaves the measurement distribution exactly uniform.
    """
    qubits = tuple(range(n))
    return Circuit(n, tuple(h(q) for q in qubits) + (phase_oracle(table, qubits, levels),))


@dataclass(frozen=True)
class PhasePrsFamily(CircuitFamily):
    num_qubits: int
    base_seed: int = 0
    levels: int = 2
    name: str = "phase_prs"

    def __post_init__(self):
        if not 1 <= self.num_qubits <= 14:
            raise ValueError("phase family needs 1 <= n <= 14")
        if self.levels < 2:
            raise ValueError("levels must be >= 2")

    def key_for(self, seed: int) -> bytes:
        return derive_rng(self.base_seed, int(seed)).bytes(16)

    def draw(self, seed: int) -> tuple[Circuit, PhaseKey]:
        key = self.key_for(seed)
        table = keyed_phase_table(self.num_qubits, key, self.levels)
        meta = PhaseKey(self.num_qubits, key.hex(), self.levels)
        return phase_state_circuit(self.num_qubits, table, self.levels), meta


def phase_prs_family(n: int, key_seed: int = 0, levels: int = 2) -> PhasePrsFamily:
    return PhasePrsFamily(num_qubits=n, base_seed=key_seed, levels=levels)


# -- fixed finite families -------------------------------------------------------

@dataclass(frozen=True)
class FixedChoice:
    index: int


@dataclass(frozen=True)
class FixedCircuitFamily(CircuitFamily):
    """Uniform draw over an explicit circuit list."""

    circuits: tuple[Circuit, ...]
    name: str = "fixed"

    def __post_init__(self):
        if not self.circuits:
            raise ValueError("fixed family needs at least one circuit")
        widths = {c.num_measured for c in self.circuits}
        if len(widths) != 1:
            raise ValueError("all circuits in a family must share output width")

    @property
    def num_qubits(self) -> int:
        return self.circuits[0].num_measured

    def draw(self, seed: int) -> tuple[Circuit, FixedChoice]:
        idx = int(derive_rng(0, int(seed)).integers(len(self.circuits))) if len(self.circuits) > 1 else 0
        return self.circuits[idx], FixedChoice(idx)

    def enumerate(self):
        return [(c, FixedChoice(i)) for i, c in enumerate(self.circuits)]


def hadamard_family(n: int) -> FixedCircuitFamily:
    return FixedCircuitFamily((Circuit(n, tuple(h(q) for q in range(n))),), name="hadamard")


# -- family-level operations -------------------------------------------------------

def extend_circuit(circuit: Circuit) -> Circuit:
    """Copy each output qubit onto a fresh register with CNOT fan-out.

    The reduced state of the extension on the original register is the
    dephasing of the circuit's output state, so its diagonal reproduces
    output_distribution(circuit).
    """
    if circuit.measured is not None:
        raise ValueError("extension expects a fully measured circuit")
    n = circuit.num_qubits
    if 2 * n > MAX_QUBITS:
        raise ValueError(f"extension needs 2n <= {MAX_QUBITS} qubits")
    fanout = tuple(cnot(q, n + q) for q in range(n))
    return Circuit(2 * n, circuit.gates + fanout)


def family_mixture_distribution(fam: CircuitFamily, num_draws: int, seed: int = 0) -> Distribution:
    """Equal-weight average of exact member distributions.

    Finite families are averaged over their full enumeration; generative
    families are averaged over num_draws seeded draws.
    """
    members = fam.enumerate()
    if members is not None:
        dists = [output_distribution(c) for c, _ in members]
    else:
        if num_draws < 1:
            raise ValueError("num_draws must be >= 1")
        dists = [
            output_distribution(fam.draw(derive_seed(seed, i))[0])
            for i in range(num_draws)
        ]
    probs = np.mean([d.probs for d in dists], axis=0)
    return Distribution(fam.num_qubits, probs)


# -- serialization -----------------------------------------------------------------

def _table_to_hex(table: np.ndarray) -> str:
    return b"".join(int(v).to_bytes(2, "big") for v in table).hex()


def _table_from_hex(text: str) -> np.ndarray:
    raw = bytes.fromhex(text)
    return np.array(
        [int.from_bytes(raw[i : i + 2], "big") for i in range(0, len(raw), 2)],
        dtype=np.int64,
    )


def metadata_to_dict(meta) -> dict:
    if isinstance(meta, SimonInstance):
        return {
            "kind": "simon",
            "num_bits": meta.num_bits,
            "shift": int(meta.shift),
            "table_hex": _table_to_hex(meta.table),
        }
    if isinstance(meta, PhaseKey):
        return {"kind": "phase", "num_bits": meta.num_bits, "key_hex": meta.key_hex, "levels": meta.levels}
    if isinstance(meta, BrickworkDraw):
        return {"kind": "brickwork", "num_qubits": meta.num_qubits, "depth": meta.depth, "draw_seed": meta.draw_seed}
    if isinstance(meta, FixedChoice):
        return {"kind": "fixed", "index": meta.index}
    raise TypeError(f"unknown metadata {type(meta)}")


def metadata_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "simon":
        return SimonInstance(int(d["num_bits"]), int(d["shift"]), _table_from_hex(d["table_hex"]))
    if kind == "phase":
        return PhaseKey(int(d["num_bits"]), d["key_hex"], int(d.get("levels", 2)))
    if kind == "brickwork":
        return BrickworkDraw(int(d["num_qubits"]), int(d["depth"]), int(d["draw_seed"]))
    if kind == "fixed":
        return FixedChoice(int(d["index"]))
    raise ValueError(f"unknown metadata kind {kind!r}")


def family_to_dict(fam: CircuitFamily) -> dict:
    if isinstance(fam, SimonFamily):
        d = {"family": "simon", "num_qubits": fam.num_qubits, "base_seed": fam.base_seed}
        if fam.fixed_shift is not None:
            d["fixed_shift"] = fam.fixed_shift
        return d
    if isinstance(fam, RandomCircuitFamily):
        return {
            "family": "random_circuit",
            "num_qubits": fam.num_qubits,
            "depth": fam.depth,
            "base_seed": fam.base_seed,
        }
    if isinstance(fam, PhasePrsFamily):
        return {
            "family": "phase_prs",
            "num_qubits": fam.num_qubits,
            "base_seed": fam.base_seed,
            "levels": fam.levels,
        }
    if isinstance(fam, FixedCircuitFamily):
        from .qsim import circuit_to_dict

        return {
            "family": "fixed",
            "name": fam.name,
            "circuits": [circuit_to_dict(c) for c in fam.circuits],
        }
    raise TypeError(f"unknown family {type(fam)}")


def family_from_dict(d: dict) -> CircuitFamily:
    kind = d.get("family")
    if kind == "simon":
        return SimonFamily(
            num_qubits=int(d["num_qubits"]),
            base_seed=int(d.get("base_seed", 0)),
            fixed_shift=d.get("fixed_shift"),
        )
    if kind == "random_circuit":
        return RandomCircuitFamily(
            num_qubits=int(d["num_qubits"]),
            depth=int(d["depth"]),
            base_seed=int(d.get("base_seed", 0)),
        )
    if kind == "phase_prs":
        return PhasePrsFamily(
            num_qubits=int(d["num_qubits"]),
            base_seed=int(d.get("base_seed", 0)),
            levels=int(d.get("levels", 2)),
        )
    if kind == "hadamard":
        return hadamard_family(int(d["num_qubits"]))
    if kind == "fixed":
        from .qsim import circuit_from_dict

        return FixedCircuitFamily(
            tuple(circuit_from_dict(c) for c in d["circuits"]),
            name=d.get("name", "fixed"),
        )
    raise ValueError(f"unknown family kind {kind!r}")
