"""Gate circuits, exact statevector simulation and shot sampling.

Gate set: ``RY(theta)``, ``RZ(theta)``, ``X``, ``CNOT(control, target)`` and
a global ``PHASE(theta)`` multiplying every amplitude by ``exp(1j*theta)``.
``RY(theta) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]]`` and
``RZ(theta) = diag(exp(-1j t/2), exp(1j t/2))``.

Shots are drawn in blocks of :data:`SHOT_BLOCK`; block ``b`` uses the
stream ``rng.stream(seed, *stream_key, b)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _backend
from ._program import OP_CNOT, OP_PHASE, OP_RY, OP_RZ, OP_X
from .errors import DataError, DimensionError
from .rng import stream
from .statevec import StateVector

SHOT_BLOCK = 1024


class GateKind(str, enum.Enum):
    RY = "RY"
    RZ = "RZ"
    X = "X"
    CNOT = "CNOT"
    PHASE = "PHASE"


_OPCODES = {
    GateKind.RY: OP_RY,
    GateKind.RZ: OP_RZ,
    GateKind.X: OP_X,
    GateKind.CNOT: OP_CNOT,
    GateKind.PHASE: OP_PHASE,
}
_ARITY = {GateKind.RY: 1, GateKind.RZ: 1, GateKind.X: 1, GateKind.CNOT: 2, GateKind.PHASE: 0}
_ROTATIONS = (GateKind.RY, GateKind.RZ, GateKind.PHASE)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    targets: tuple[int, ...] = ()
    angle: float = 0.0

    def __post_init__(self):
        kind = GateKind(self.kind)
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "angle", float(self.angle))
        if len(targets) != _ARITY[kind]:
            raise ValueError(f"{kind.value} acts on {_ARITY[kind]} qubit(s), got targets {targets}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"{kind.value} targets must be distinct, got {targets}")
        if any(t < 0 for t in targets):
            raise ValueError(f"negative qubit index in {targets}")

    def inverse(self) -> "Gate":
        if self.kind in _ROTATIONS:
            return Gate(self.kind, self.targets, -self.angle)
        return self

    def shifted(self, offset: int) -> "Gate":
        return Gate(self.kind, tuple(t + offset for t in self.targets), self.angle)


def ry(q: int, theta: float) -> Gate:
    return Gate(GateKind.RY, (q,), theta)


def rz(q: int, theta: float) -> Gate:
    return Gate(GateKind.RZ, (q,), theta)


def x(q: int) -> Gate:
    return Gate(GateKind.X, (q,))


def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (control, target))


def phase(theta: float) -> Gate:
    return Gate(GateKind.PHASE, (), theta)


@dataclass(frozen=True)
class GateCircuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        for g in gates:
            if any(t >= self.n_qubits for t in g.targets):
                raise ValueError(f"gate {g} addresses a qubit outside a {self.n_qubits}-qubit circuit")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def cnot_count(self) -> int:
        return sum(g.kind is GateKind.CNOT for g in self.gates)

    def count(self, kind: GateKind | str) -> int:
        kind = GateKind(kind)
        return sum(g.kind is kind for g in self.gates)

    def then(self, other: "GateCircuit") -> "GateCircuit":
        """This circuit followed by ``other`` on the same register."""
        if other.n_qubits != self.n_qubits:
            raise DimensionError(f"cannot compose {self.n_qubits}- and {other.n_qubits}-qubit circuits")
        return GateCircuit(self.n_qubits, self.gates + other.gates)

    def widened(self, n_qubits: int, offset: int = 0) -> "GateCircuit":
        """Embed into a larger register, acting on qubits ``offset..offset+self.n_qubits-1``."""
        if offset < 0 or offset + self.n_qubits > n_qubits:
            raise DimensionError(f"cannot place {self.n_qubits} qubits at offset {offset} in {n_qubits}")
        return GateCircuit(n_qubits, tuple(g.shifted(offset) for g in self.gates))

    @cached_property
    def program(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        ops = np.array([_OPCODES[g.kind] for g in self.gates], dtype=np.intc)
        q0 = np.array([g.targets[0] if g.targets else 0 for g in self.gates], dtype=np.intc)
        q1 = np.array([g.targets[1] if len(g.targets) > 1 else 0 for g in self.gates], dtype=np.intc)
        angles = np.array([g.angle for g in self.gates], dtype=np.float64)
        return ops, q0, q1, angles

    def to_text(self) -> str:
        lines = [f"QUBITS {self.n_qubits}"]
        for g in self.gates:
            if g.kind is GateKind.PHASE:
                lines.append(f"PHASE {g.angle:.17g}")
            elif g.kind in _ROTATIONS:
                lines.append(f"{g.kind.value} q{g.targets[0]} {g.angle:.17g}")
            else:
                lines.append(" ".join([g.kind.value] + [f"q{t}" for t in g.targets]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GateCircuit":
        n_qubits = None
        gates = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            head, *args = line.split()
            try:
                if head == "QUBITS":
                    (n,) = args
                    n_qubits = int(n)
                    continue
                kind = GateKind(head)
                qubits = [a for a in args if a.startswith("q")]
                rest = [a for a in args if not a.startswith("q")]
                if len(qubits) != _ARITY[kind] or len(rest) != (1 if kind in _ROTATIONS else 0):
                    raise ValueError("wrong operand count")
                gates.append(Gate(kind, tuple(int(q[1:]) for q in qubits), float(rest[0]) if rest else 0.0))
            except ValueError as exc:
                raise DataError(f"line {lineno}: cannot parse gate {line!r}: {exc}") from None
        if n_qubits is None:
            raise DataError("circuit text has no QUBITS header")
        return cls(n_qubits, tuple(gates))


def adjoint(circuit: GateCircuit) -> GateCircuit:
    """Reverse the gate order and negate every angle."""
    return GateCircuit(circuit.n_qubits, tuple(g.inverse() for g in reversed(circuit.gates)))


def simulate(circuit: GateCircuit, initial: StateVector | None = None, backend: str | None = None) -> StateVector:
    """Apply ``circuit`` to ``initial`` (default ``|0...0>``) exactly."""
    if initial is None:
        initial = StateVector.basis(circuit.n_qubits)
    if initial.n_qubits != circuit.n_qubits:
        raise DimensionError(
            f"initial state has {initial.n_qubits} qubits, circuit has {circuit.n_qubits}"
        )
    state = np.array(initial.amplitudes, dtype=np.complex128)
    _backend.get(backend).apply_program(state, circuit.n_qubits, *circuit.program)
    return StateVector(state)


def born_probabilities(circuit: GateCircuit, initial: StateVector | None = None) -> np.ndarray:
    amps = simulate(circuit, initial).amplitudes
    return amps.real * amps.real + amps.imag * amps.imag


@dataclass(frozen=True)
class NoiseSpec:
    """Depolarizing gate errors, symmetric readout flips and reset errors."""

    p_depol_1q: float = 0.0
    p_depol_2q: float = 0.0
    p_readout_flip: float = 0.0
    p_reset_error: float = 0.0

    def __post_init__(self):
        for name in ("p_depol_1q", "p_depol_2q", "p_readout_flip", "p_reset_error"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    @property
    def is_zero(self) -> bool:
        return not (self.p_depol_1q or self.p_depol_2q or self.p_readout_flip or self.p_reset_error)


@dataclass(frozen=True)
class ShotRecord:
    n_qubits: int
    shots: int
    counts: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("a shot record needs at least one shot")
        if sum(self.counts.values()) != self.shots:
            raise ValueError("counts do not add up to the shot total")
        if any(len(k) != self.n_qubits for k in self.counts):
            raise ValueError(f"bitstrings must have length {self.n_qubits}")

    @classmethod
    def from_outcomes(cls, n_qubits: int, outcomes: np.ndarray) -> "ShotRecord":
        values, freq = np.unique(np.asarray(outcomes, dtype=np.int64), return_counts=True)
        counts = {format(int(v), f"0{n_qubits}b"): int(c) for v, c in zip(values, freq)}
        return cls(n_qubits, int(freq.sum()), counts)

    def count(self, bits: str) -> int:
        return self.counts.get(bits, 0)

    def frequency(self, bits: str) -> float:
        return self.count(bits) / self.shots

    def frequencies(self) -> np.ndarray:
        freq = np.zeros(1 << self.n_qubits)
        for bits, c in self.counts.items():
            freq[int(bits, 2)] = c
        return freq / self.shots


def _blocks(shots: int):
    start = 0
    while start < shots:
        size = min(SHOT_BLOCK, shots - start)
        yield start // SHOT_BLOCK, size
        start += size


def _check_shots(shots: int) -> None:
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")


def sample_from_probabilities(probs: np.ndarray, shots: int, seed: int, stream_key=()) -> np.ndarray:
    """Outcome indices drawn i.i.d. from ``probs`` by inverse-CDF lookup."""
    _check_shots(shots)
    cdf = np.cumsum(probs)
    last = int(np.flatnonzero(probs > 0)[-1])
    out = []
    for block, size in _blocks(shots):
        u = stream(seed, *stream_key, block).random(size)
        out.append(np.minimum(np.searchsorted(cdf, u, side="right"), last))
    return np.concatenate(out)


def sample_shots(circuit: GateCircuit, shots: int, seed: int, stream_key=()) -> ShotRecord:
    """Measure ``circuit|0...0>`` in the computational basis ``shots`` times."""
    outcomes = sample_from_probabilities(born_probabilities(circuit), shots, seed, stream_key)
    return ShotRecord.from_outcomes(circuit.n_qubits, outcomes)


def sample_shots_noisy(
    circuit: GateCircuit,
    noise: NoiseSpec,
    shots: int,
    seed: int,
    stream_key=(),
    *,
    force_trajectories: bool = False,
    backend: str | None = None,
) -> ShotRecord:
    """Trajectory sampling: each shot resimulates the circuit with random Pauli errors.

    After every 1-qubit gate a uniformly chosen X/Y/Z hits its qubit with
    probability ``p_depol_1q``; after every CNOT one of the 15 non-identity
    two-qubit Paulis hits (control, target) with probability ``p_depol_2q``.
    Each qubit starts flipped with ``p_reset_error`` and each measured bit is
    flipped with ``p_readout_flip``. With all probabilities zero this is the exact
    sampler unless ``force_trajectories`` is set.
    """
    _check_shots(shots)
    if noise.is_zero and not force_trajectories:
        return sample_shots(circuit, shots, seed, stream_key)
    kern = _backend.get(backend)
    n = circuit.n_qubits
    program = circuit.program
    width = 2 * n + 2 * len(circuit) + 1
    out = np.empty(shots, dtype=np.int64)
    for block, size in _blocks(shots):
        u = stream(seed, *stream_key, block).random((size, width))
        start = block * SHOT_BLOCK
        kern.run_trajectories(
            n, *program,
            noise.p_depol_1q, noise.p_depol_2q, noise.p_readout_flip, noise.p_reset_error,
            u, out[start:start + size],
        )
    return ShotRecord.from_outcomes(n, out)


def bernoulli_stderr(p_hat: float, shots: int) -> float:
    """Normal-approximation standard error ``sqrt(p(1-p)/M)``."""
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / shots)


__all__ = [
    "Gate", "GateKind", "GateCircuit", "NoiseSpec", "ShotRecord", "SHOT_BLOCK",
    "ry", "rz", "x", "cnot", "phase", "adjoint", "simulate", "born_probabilities",
    "sample_shots", "sample_shots_noisy", "sample_from_probabilities",
    "bernoulli_stderr",
]
