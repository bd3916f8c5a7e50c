"""Exact statevector simulation and the distribution machinery built on it.

Conventions: qubit q is bit q of the basis-state index, so qubit 0 is the
least significant bit.  Rendered bit strings put qubit n-1 first (standard
ket order).  A circuit may declare a measured sub-register; its output
distribution is then the exact marginal on those qubits, which is how
algorithms with ancilla registers (Simon) report n-bit outcomes from a
wider simulation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .rng import derive_rng

MAX_QUBITS = 24
MAX_DENSITY_BITS = 12

_NORM_TOL = 1e-9
_UNITARY_TOL = 1e-9


class MalformedCircuitError(ValueError):
    """Raised when a circuit or gate fails structural validation."""


_SQ2 = 1.0 / math.sqrt(2.0)

GATE_MATRICES = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}

_ONE_QUBIT_KINDS = frozenset(["H", "X", "Y", "Z", "S", "T", "Phase", "Unitary1"])
_TWO_QUBIT_KINDS = frozenset(["CNOT", "CZ", "SWAP", "Unitary2"])


def _is_unitary(mat: np.ndarray) -> bool:
    d = mat.shape[0]
    return bool(np.allclose(mat @ mat.conj().T, np.eye(d), atol=_UNITARY_TOL * d))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Gate:
    """A single circuit element.

    kind: one of H X Y Z S T Phase CNOT CZ SWAP Unitary1 Unitary2 Oracle
    PhaseOracle.  The enum is open: the two oracle kinds carry explicit
    tables, Phase carries an angle, Unitary1/2 carry explicit matrices.

    Oracle targets list input qubits then output qubits
    (params["num_inputs"] says where the split is); the table maps each
    input pattern to the value XORed onto the output register, so the gate
    is always a permutation of the joint register.  PhaseOracle multiplies
    basis state x of its target register by exp(2*pi*i*table[x]/levels).
    """

    kind: str
    targets: tuple[int, ...]
    params: dict | None = None
    table: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        if self.table is not None:
            tab = np.asarray(self.table, dtype=np.int64)
            object.__setattr__(self, "table", _freeze(tab))
        self._validate()

    def _validate(self):
        kind, targets = self.kind, self.targets
        if len(set(targets)) != len(targets):
            raise MalformedCircuitError(f"{kind}: repeated target qubit in {targets}")
        if kind in _ONE_QUBIT_KINDS:
            if len(targets) != 1:
                raise MalformedCircuitError(f"{kind} takes 1 target, got {targets}")
        elif kind in _TWO_QUBIT_KINDS:
            if len(targets) != 2:
                raise MalformedCircuitError(f"{kind} takes 2 targets, got {targets}")
        elif kind == "Oracle":
            if not self.params or "num_inputs" not in self.params:
                raise MalformedCircuitError("Oracle needs params['num_inputs']")
            num_in = int(self.params["num_inputs"])
            num_out = len(targets) - num_in
            if num_in < 1 or num_out < 1:
                raise MalformedCircuitError(
                    f"Oracle needs >=1 input and >=1 output qubit, got split {num_in}/{num_out}"
                )
            if self.table is None or self.table.shape != (1 << num_in,):
                raise MalformedCircuitError(
                    f"Oracle table must have 2^{num_in} entries"
                )
            if self.table.min() < 0 or self.table.max() >= (1 << num_out):
                raise MalformedCircuitError(
                    f"Oracle table values must fit in {num_out} output bits"
                )
        elif kind == "PhaseOracle":
            if not targets:
                raise MalformedCircuitError("PhaseOracle needs >=1 target")
            levels = int((self.params or {}).get("levels", 0))
            if levels < 2:
                raise MalformedCircuitError("PhaseOracle needs params['levels'] >= 2")
            if self.table is None or self.table.shape != (1 << len(targets),):
                raise MalformedCircuitError(
                    f"PhaseOracle table must have 2^{len(targets)} entries"
                )
            if self.table.min() < 0 or self.table.max() >= levels:
                raise MalformedCircuitError("PhaseOracle table values must be in [0, levels)")
        else:
            raise MalformedCircuitError(f"unknown gate kind {kind!r}")

        if kind == "Phase":
            if not self.params or "theta" not in self.params:
                raise MalformedCircuitError("Phase needs params['theta']")
        if kind in ("Unitary1", "Unitary2"):
            dim = 2 if kind == "Unitary1" else 4
            mat = np.asarray((self.params or {}).get("matrix"), dtype=complex)
            if mat.shape != (dim, dim):
                raise MalformedCircuitError(f"{kind} matrix must be {dim}x{dim}")
            if not _is_unitary(mat):
                raise MalformedCircuitError(f"{kind} matrix is not unitary within tolerance")
            object.__setattr__(self, "params", {"matrix": _freeze(mat)})

    def matrix(self) -> np.ndarray:
        """Explicit matrix for non-oracle kinds."""
        if self.kind in GATE_MATRICES:
            return GATE_MATRICES[self.kind]
        if self.kind == "Phase":
            return np.diag([1.0, np.exp(1j * float(self.params["theta"]))])
        if self.kind in ("Unitary1", "Unitary2"):
            return self.params["matrix"]
        raise MalformedCircuitError(f"{self.kind} has no dense matrix form")


# -- gate constructors ---------------------------------------------------

def h(q): return Gate("H", (q,))
def x(q): return Gate("X", (q,))
def y(q): return Gate("Y", (q,))
def z(q): return Gate("Z", (q,))
def s(q): return Gate("S", (q,))
def t(q): return Gate("T", (q,))
def phase(theta, q): return Gate("Phase", (q,), params={"theta": float(theta)})
def cnot(control, target): return Gate("CNOT", (control, target))
def cz(a, b): return Gate("CZ", (a, b))
def swap(a, b): return Gate("SWAP", (a, b))
def unitary1(matrix, q): return Gate("Unitary1", (q,), params={"matrix": matrix})
def unitary2(matrix, a, b): return Gate("Unitary2", (a, b), params={"matrix": matrix})


def oracle(table, inputs, outputs) -> Gate:
    """Reversible table lookup |x>|y> -> |x>|y XOR table[x]>."""
    return Gate(
        "Oracle",
        tuple(inputs) + tuple(outputs),
        params={"num_inputs": len(tuple(inputs))},
        table=np.asarray(table, dtype=np.int64),
    )


def phase_oracle(table, targets, levels: int = 2) -> Gate:
    """Diagonal gate multiplying |x> by the levels-th root of unity to table[x]."""
    return Gate(
        "PhaseOracle",
        tuple(targets),
        params={"levels": int(levels)},
        table=np.asarray(table, dtype=np.int64),
    )


@dataclass(frozen=True, eq=False)
class Circuit:
    """Gate list on num_qubits qubits, applied in order to |0...0>.

    measured: qubit indices whose marginal defines the output distribution;
    None means all qubits.
    """

    num_qubits: int
    gates: tuple[Gate, ...] = ()
    measured: tuple[int, ...] | None = None

    def __post_init__(self):
        n = int(self.num_qubits)
        object.__setattr__(self, "num_qubits", n)
        object.__setattr__(self, "gates", tuple(self.gates))
        if not 1 <= n <= MAX_QUBITS:
            raise MalformedCircuitError(f"num_qubits must be in [1, {MAX_QUBITS}], got {n}")
        for g in self.gates:
            if not isinstance(g, Gate):
                raise MalformedCircuitError(f"not a Gate: {g!r}")
            for q in g.targets:
                if not 0 <= q < n:
                    raise MalformedCircuitError(
                        f"{g.kind} targets qubit {q}, circuit has {n} qubits"
                    )
        if self.measured is not None:
            meas = tuple(int(q) for q in self.measured)
            if len(set(meas)) != len(meas) or not meas:
                raise MalformedCircuitError("measured register must be non-empty and distinct")
            for q in meas:
                if not 0 <= q < n:
                    raise MalformedCircuitError(f"measured qubit {q} out of range")
            object.__setattr__(self, "measured", meas)

    @property
    def num_measured(self) -> int:
        return self.num_qubits if self.measured is None else len(self.measured)


@dataclass(frozen=True, eq=False)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}]")
        if amps.shape != (1 << self.num_qubits,):
            raise ValueError("amplitude vector length must be 2^num_qubits")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {_NORM_TOL}")
        object.__setattr__(self, "amplitudes", _freeze(amps))


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over n-bit strings, indexed by integer value."""

    num_bits: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if not 1 <= self.num_bits <= 26:
            raise ValueError("num_bits must be in [1, 26]")
        if p.shape != (1 << self.num_bits,):
            raise ValueError("probability vector length must be 2^num_bits")
        if p.min() < -1e-12:
            raise ValueError(f"negative probability {p.min()}")
        total = p.sum()
        if abs(total - 1.0) > _NORM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1 within {_NORM_TOL}")
        object.__setattr__(self, "probs", _freeze(p))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, PSD, trace-1 matrix on k qubits, k <= MAX_DENSITY_BITS."""

    num_bits: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if not 1 <= self.num_bits <= MAX_DENSITY_BITS:
            raise ValueError(f"num_bits must be in [1, {MAX_DENSITY_BITS}]")
        dim = 1 << self.num_bits
        if m.shape != (dim, dim):
            raise ValueError("matrix dimension must be 2^num_bits")
        if np.abs(m - m.conj().T).max() > 1e-9:
            raise ValueError("matrix is not Hermitian within 1e-9")
        tr = m.trace().real
        if abs(tr - 1.0) > _NORM_TOL:
            raise ValueError(f"trace is {tr}, not 1 within {_NORM_TOL}")
        offdiag = np.abs(m - np.diag(np.diag(m))).max()
        if offdiag == 0.0:
            min_eig = np.diag(m).real.min()
        else:
            min_eig = np.linalg.eigvalsh(m).min()
        if min_eig < -1e-8:
            raise ValueError(f"matrix has eigenvalue {min_eig} below -1e-8")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return 1 << self.num_bits


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """m samples from a distribution over num_bits-bit strings, stored as ints."""

    num_bits: int
    samples: np.ndarray
    source: str = ""
    seed: int | None = None

    def __post_init__(self):
        vals = np.asarray(self.samples, dtype=np.int64)
        if vals.ndim != 1:
            raise ValueError("samples must be a 1-d array")
        if len(vals) and (vals.min() < 0 or vals.max() >= (1 << self.num_bits)):
            raise ValueError(f"sample values must fit in {self.num_bits} bits")
        object.__setattr__(self, "samples", _freeze(vals))

    def __len__(self) -> int:
        return len(self.samples)

    def bit_matrix(self) -> np.ndarray:
        """(m, num_bits) 0/1 array; column j is qubit j (LSB first)."""
        shifts = np.arange(self.num_bits, dtype=np.int64)
        return ((self.samples[:, None] >> shifts) & 1).astype(np.uint8)

    def strings(self) -> list[str]:
        return [format(int(v), f"0{self.num_bits}b") for v in self.samples]


# -- simulation kernels --------------------------------------------------

def _apply_1q(amps: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    v = amps.reshape(1 << (n - 1 - q), 2, 1 << q)
    return np.einsum("ab,hbl->hal", mat, v).reshape(-1)


def _apply_2q(amps: np.ndarray, mat: np.ndarray, t0: int, t1: int, n: int) -> np.ndarray:
    # matrix local index = bit(t0)*2 + bit(t1)
    qmax, qmin = max(t0, t1), min(t0, t1)
    m4 = mat.reshape(2, 2, 2, 2)
    if t0 == qmin:
        m4 = m4.transpose(1, 0, 3, 2)
    v = amps.reshape(
        1 << (n - 1 - qmax), 2, 1 << (qmax - qmin - 1), 2, 1 << qmin
    )
    return np.einsum("pqrs,arbsc->apbqc", m4, v).reshape(-1)


def _gather_bits(idx: np.ndarray, qubits: tuple[int, ...]) -> np.ndarray:
    out = np.zeros_like(idx)
    for j, q in enumerate(qubits):
        out |= ((idx >> q) & 1) << j
    return out


def _apply_oracle(amps: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    num_in = int(gate.params["num_inputs"])
    in_qs = gate.targets[:num_in]
    out_qs = gate.targets[num_in:]
    idx = np.arange(1 << n, dtype=np.int64)
    f = gate.table[_gather_bits(idx, in_qs)]
    flip = np.zeros_like(idx)
    for j, q in enumerate(out_qs):
        flip |= ((f >> j) & 1) << q
    # XOR oracles are involutions, so the permutation is its own inverse
    return amps[idx ^ flip]


def _apply_phase_oracle(amps: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    levels = int(gate.params["levels"])
    idx = np.arange(1 << n, dtype=np.int64)
    vals = gate.table[_gather_bits(idx, gate.targets)]
    if levels == 2:
        return amps * (1 - 2 * vals)
    return amps * np.exp(2j * math.pi * vals / levels)


def _apply_gate(amps: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    if gate.kind == "Oracle":
        return _apply_oracle(amps, gate, n)
    if gate.kind == "PhaseOracle":
        return _apply_phase_oracle(amps, gate, n)
    mat = gate.matrix()
    if len(gate.targets) == 1:
        return _apply_1q(amps, mat, gate.targets[0], n)
    return _apply_2q(amps, mat, gate.targets[0], gate.targets[1], n)


def _simulate(circuit: Circuit) -> np.ndarray:
    n = circuit.num_qubits
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    for gate in circuit.gates:
        amps = _apply_gate(amps, gate, n)
    return amps


def run_circuit(circuit: Circuit) -> StateVector:
    """Apply the circuit to |0...0> and return the exact final state."""
    return StateVector(circuit.num_qubits, _simulate(circuit))


def _marginal_probs(amps: np.ndarray, n: int, keep: tuple[int, ...]) -> np.ndarray:
    probs = np.abs(amps) ** 2
    idx = np.arange(1 << n, dtype=np.int64)
    reduced = _gather_bits(idx, keep)
    return np.bincount(reduced, weights=probs, minlength=1 << len(keep))


def output_distribution(circuit: Circuit) -> Distribution:
    """Exact measurement distribution over the circuit's measured register."""
    amps = _simulate(circuit)
    if circuit.measured is None:
        return Distribution(circuit.num_qubits, np.abs(amps) ** 2)
    probs = _marginal_probs(amps, circuit.num_qubits, circuit.measured)
    return Distribution(len(circuit.measured), probs)


def amplitude_probability(circuit: Circuit, x: int) -> float:
    """Exact probability of outcome x on the measured register."""
    dist = output_distribution(circuit)
    if not 0 <= x < (1 << dist.num_bits):
        raise ValueError(f"outcome {x} does not fit in {dist.num_bits} bits")
    return float(dist.probs[x])


def sample_indices(probs: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    """m inverse-CDF draws from a probability vector."""
    cdf = np.cumsum(probs)
    u = rng.random(m)
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(probs) - 1).astype(np.int64)


def sample(dist: Distribution, m: int, seed: int) -> SampleBatch:
    """m i.i.d. draws from dist, deterministic per seed."""
    if m < 0:
        raise ValueError("sample count must be non-negative")
    vals = sample_indices(dist.probs, m, derive_rng(seed))
    return SampleBatch(dist.num_bits, vals, source="exact", seed=int(seed))


# -- distances and density helpers ----------------------------------------

def trace_distance(rho0: DensityMatrix, rho1: DensityMatrix) -> float:
    """Half the trace norm of the difference, via eigenvalues of rho0 - rho1."""
    if rho0.num_bits != rho1.num_bits:
        raise ValueError("density matrices must have equal dimension")
    eigs = np.linalg.eigvalsh(rho0.matrix - rho1.matrix)
    return 0.5 * float(np.abs(eigs).sum())


def total_variation_distance(d0: Distribution, d1: Distribution) -> float:
    """Half the l1 distance between probability vectors."""
    if d0.num_bits != d1.num_bits:
        raise ValueError("distributions must have equal dimension")
    return 0.5 * float(np.abs(d0.probs - d1.probs).sum())


def diagonal_density(dist: Distribution) -> DensityMatrix:
    """The classical state sum_x p(x) |x><x|."""
    if dist.num_bits > MAX_DENSITY_BITS:
        raise ValueError(f"diagonal density capped at {MAX_DENSITY_BITS} bits")
    return DensityMatrix(dist.num_bits, np.diag(dist.probs.astype(complex)))


def partial_trace(state: StateVector, keep) -> DensityMatrix:
    """Reduced density matrix on the kept qubits (ascending order = LSB first)."""
    keep = tuple(sorted(int(q) for q in keep))
    n = state.num_qubits
    if len(set(keep)) != len(keep) or not keep:
        raise ValueError("keep must be non-empty distinct qubit indices")
    if any(not 0 <= q < n for q in keep):
        raise ValueError("kept qubit out of range")
    if len(keep) > MAX_DENSITY_BITS:
        raise ValueError(f"reduced state capped at {MAX_DENSITY_BITS} bits")
    other = [q for q in range(n) if q not in keep]
    # tensor axis i corresponds to qubit n-1-i
    psi = state.amplitudes.reshape((2,) * n)
    perm = [n - 1 - q for q in reversed(keep)] + [n - 1 - q for q in reversed(other)]
    psi = psi.transpose(perm).reshape(1 << len(keep), -1)
    return DensityMatrix(len(keep), psi @ psi.conj().T)


def uniform_distribution(num_bits: int) -> Distribution:
    return Distribution(num_bits, np.full(1 << num_bits, 2.0 ** -num_bits))


def point_mass_distribution(num_bits: int, value: int) -> Distribution:
    p = np.zeros(1 << num_bits)
    p[value] = 1.0
    return Distribution(num_bits, p)


_INVERSE_SELF = frozenset(["H", "X", "Y", "Z", "CNOT", "CZ", "SWAP", "Oracle"])


def inverse_gate(gate: Gate) -> Gate:
    if gate.kind in _INVERSE_SELF:
        return gate
    if gate.kind == "Phase":
        return phase(-float(gate.params["theta"]), gate.targets[0])
    if gate.kind == "S":
        return phase(-math.pi / 2, gate.targets[0])
    if gate.kind == "T":
        return phase(-math.pi / 4, gate.targets[0])
    if gate.kind == "Unitary1":
        return unitary1(gate.params["matrix"].conj().T, gate.targets[0])
    if gate.kind == "Unitary2":
        return unitary2(gate.params["matrix"].conj().T, *gate.targets)
    if gate.kind == "PhaseOracle":
        levels = int(gate.params["levels"])
        return phase_oracle((levels - gate.table) % levels, gate.targets, levels)
    raise MalformedCircuitError(f"cannot invert {gate.kind}")


def inverse_circuit(circuit: Circuit) -> Circuit:
    """Circuit applying the inverse unitary (gates reversed and inverted)."""
    return Circuit(
        circuit.num_qubits,
        tuple(inverse_gate(g) for g in reversed(circuit.gates)),
        measured=circuit.measured,
    )


# -- serialization ---------------------------------------------------------

def _complex_matrix_to_json(mat: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in mat]


def _complex_matrix_from_json(rows: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def gate_to_dict(gate: Gate) -> dict:
    d: dict = {"kind": gate.kind, "targets": list(gate.targets)}
    if gate.kind == "Phase":
        d["params"] = {"theta": float(gate.params["theta"])}
    elif gate.kind in ("Unitary1", "Unitary2"):
        d["params"] = {"matrix": _complex_matrix_to_json(gate.params["matrix"])}
    elif gate.kind == "Oracle":
        d["params"] = {"num_inputs": int(gate.params["num_inputs"])}
        d["table"] = [int(v) for v in gate.table]
    elif gate.kind == "PhaseOracle":
        d["params"] = {"levels": int(gate.params["levels"])}
        d["table"] = [int(v) for v in gate.table]
    return d


def gate_from_dict(d: dict) -> Gate:
    kind = d.get("kind")
    targets = tuple(d.get("targets", ()))
    params = d.get("params") or {}
    try:
        if kind in ("Unitary1", "Unitary2"):
            return Gate(kind, targets, params={"matrix": _complex_matrix_from_json(params["matrix"])})
        if kind in ("Oracle", "PhaseOracle"):
            return Gate(kind, targets, params=dict(params), table=np.asarray(d["table"], dtype=np.int64))
        if kind == "Phase":
            return Gate(kind, targets, params={"theta": float(params["theta"])})
        return Gate(kind, targets)
    except (KeyError, TypeError) as exc:
        raise MalformedCircuitError(f"malformed gate record {d!r}: {exc}") from exc


def circuit_to_dict(circuit: Circuit) -> dict:
    d = {"num_qubits": circuit.num_qubits, "gates": [gate_to_dict(g) for g in circuit.gates]}
    if circuit.measured is not None:
        d["measured"] = list(circuit.measured)
    return d


def circuit_from_dict(d: dict) -> Circuit:
    if not isinstance(d, dict) or "num_qubits" not in d:
        raise MalformedCircuitError("circuit record needs a num_qubits field")
    gates = tuple(gate_from_dict(g) for g in d.get("gates", []))
    measured = tuple(d["measured"]) if "measured" in d else None
    return Circuit(int(d["num_qubits"]), gates, measured=measured)


def circuit_to_json(circuit: Circuit) -> str:
    return json.dumps(circuit_to_dict(circuit), sort_keys=True)


def circuit_from_json(text: str) -> Circuit:
    try:
        record = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedCircuitError(f"invalid circuit JSON: {exc}") from exc
    return circuit_from_dict(record)


def distribution_to_json(dist: Distribution) -> str:
    return json.dumps({"num_bits": dist.num_bits, "probs": [float(p) for p in dist.probs]})


def distribution_from_json(text: str) -> Distribution:
    record = json.loads(text)
    return Distribution(int(record["num_bits"]), np.asarray(record["probs"], dtype=float))
