"""Density estimation and classification by projecting onto a dataset state.

The dataset state is the normalized sum of feature-mapped samples
``|Psi> = (1/Nc) sum_i |psi(x_i)>`` (tensored with the label state for
classification). A query is scored by a Born probability:

* density: ``|<Psi|psi(x*)>|^2``,
* classification: ``|<Psi|(psi(x*) (x) phi_k)>|^2`` per class ``k``.

Each has an exact path and a circuit path that prepares ``|Psi>``, undoes
the query preparation and counts all-zero outcomes (``M_0 / M``), or the
outcomes ``0...0 b_k`` carrying the class pattern on the label qubits.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .circuit import (
    GateCircuit,
    NoiseSpec,
    adjoint,
    bernoulli_stderr,
    born_probabilities,
    sample_shots_noisy,
)
from .errors import DegenerateStateError, DimensionError
from .qfm import LabelEncoding
from .statevec import DensityMatrix, StateVector, SubsystemSplit, expectation, partial_trace_array
from .stateprep import prepare_circuit

CANCEL_TOL = 1e-12
DEGENERATE_JOINT = 1e-12


@dataclass(frozen=True, eq=False)
class DatasetState:
    state: StateVector
    norm_constant: float
    n_samples: int
    split: SubsystemSplit | None = None
    circuit: GateCircuit | None = field(default=None, repr=False)

    @property
    def labeled(self) -> bool:
        return self.split is not None

    @property
    def n_qubits(self) -> int:
        return self.state.n_qubits

    @cached_property
    def preparation(self) -> GateCircuit:
        """Circuit preparing ``state`` from ``|0...0>``; compiled once."""
        return self.circuit if self.circuit is not None else prepare_circuit(self.state)


@dataclass(frozen=True)
class DensityEstimate:
    value: float
    stderr: float = 0.0
    shots: int = 0

    def __post_init__(self):
        object.__setattr__(self, "value", min(max(float(self.value), 0.0), 1.0))


@dataclass(frozen=True, eq=False)
class ClassProbabilities:
    joint: np.ndarray
    conditional: np.ndarray
    shots: int = 0
    degenerate: bool = False

    @property
    def predicted(self) -> int:
        """Most probable class, lowest index on ties."""
        return int(np.argmax(self.conditional)) + 1

    @property
    def joint_stderr(self) -> np.ndarray:
        if self.shots == 0:
            return np.zeros_like(self.joint)
        return np.sqrt(self.joint * (1.0 - self.joint) / self.shots)


def _superpose(rows: np.ndarray, n_samples: int, split=None) -> DatasetState:
    # sort each column first: the sum becomes independent of sample order
    total = np.sort(rows.real, axis=0).sum(axis=0) + 1j * np.sort(rows.imag, axis=0).sum(axis=0)
    norm = float(np.linalg.norm(total))
    if norm < CANCEL_TOL:
        raise DegenerateStateError(f"feature states cancel: superposition norm {norm:.3g}")
    return DatasetState(StateVector(total / norm), norm, n_samples, split)


def build_dataset_state(samples: Sequence, qfm) -> DatasetState:
    """Unlabeled dataset state ``sum_i psi(x_i)``, normalized."""
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    rows = np.array([qfm.amplitudes(x) for x in samples], dtype=np.complex128)
    return _superpose(rows, len(samples))


def build_labeled_state(samples: Sequence, labels: Sequence[int], qfm, label_enc: LabelEncoding) -> DatasetState:
    """Labeled dataset state ``sum_i psi(x_i) (x) phi(y_i)``, normalized."""
    samples, labels = list(samples), list(labels)
    if not samples:
        raise ValueError("need at least one sample")
    if len(samples) != len(labels):
        raise ValueError(f"{len(samples)} samples but {len(labels)} labels")
    rows = np.array(
        [np.kron(qfm.amplitudes(x), label_enc(y).amplitudes) for x, y in zip(samples, labels)],
        dtype=np.complex128,
    )
    return _superpose(rows, len(samples), SubsystemSplit(qfm.n_qubits, label_enc.n_qubits))


def _require_unlabeled(Psi: DatasetState, qfm) -> None:
    if Psi.labeled:
        raise ValueError("dataset state carries labels; use classification instead of density estimation")
    if Psi.n_qubits != qfm.n_qubits:
        raise DimensionError(f"dataset state has {Psi.n_qubits} qubits, feature map produces {qfm.n_qubits}")


def _require_labeled(Psi: DatasetState, qfm, label_enc: LabelEncoding) -> SubsystemSplit:
    if not Psi.labeled:
        raise ValueError("dataset state has no labels; use density estimation instead of classification")
    split = Psi.split
    if split.left_qubits != qfm.n_qubits or split.right_qubits != label_enc.n_qubits:
        raise DimensionError(
            f"dataset split {split.left_qubits}+{split.right_qubits} does not match "
            f"feature map ({qfm.n_qubits}) and label encoding ({label_enc.n_qubits}) widths"
        )
    return split


def density_exact(Psi: DatasetState, x_star, qfm) -> DensityEstimate:
    _require_unlabeled(Psi, qfm)
    amp = np.vdot(Psi.state.amplitudes, qfm.amplitudes(x_star))
    return DensityEstimate(abs(amp) ** 2)


def density_circuit_program(Psi: DatasetState, x_star, qfm) -> GateCircuit:
    """``U_D`` followed by the inverse of the query preparation."""
    _require_unlabeled(Psi, qfm)
    return Psi.preparation.then(adjoint(prepare_circuit(qfm(x_star))))


def density_circuit_probability(Psi: DatasetState, x_star, qfm) -> float:
    """Exact Born probability of the all-zero outcome of the density circuit."""
    return float(born_probabilities(density_circuit_program(Psi, x_star, qfm))[0])


def density_circuit(
    Psi: DatasetState,
    x_star,
    qfm,
    shots: int,
    seed: int,
    noise: NoiseSpec | None = None,
    stream_key=(),
    force_trajectories: bool = False,
) -> DensityEstimate:
    """Shot estimate ``M_0 / M`` with its Bernoulli standard error."""
    circ = density_circuit_program(Psi, x_star, qfm)
    record = sample_shots_noisy(circ, noise or NoiseSpec(), shots, seed, stream_key,
                                force_trajectories=force_trajectories)
    p_hat = record.frequency("0" * circ.n_qubits)
    return DensityEstimate(p_hat, bernoulli_stderr(p_hat, shots), shots)


def classify_joint(Psi: DatasetState, x_star, qfm, label_enc: LabelEncoding) -> np.ndarray:
    """``|<Psi|(psi(x*) (x) phi_k)>|^2`` for ``k = 1..K``."""
    _require_labeled(Psi, qfm, label_enc)
    psi = qfm.amplitudes(x_star)
    return np.array(
        [abs(np.vdot(Psi.state.amplitudes, np.kron(psi, label_enc(k).amplitudes))) ** 2
         for k in range(1, label_enc.num_classes + 1)]
    )


def reduced_label_state(Psi: DatasetState, x_star, qfm, label_enc: LabelEncoding) -> DensityMatrix | None:
    """Label-register state after projecting the feature register onto ``psi(x*)``.

    Computed as ``Tr_X(|Psi><Psi| (|psi*><psi*| (x) Id) / Tr[...])``; returns
    ``None`` when the normalizing trace vanishes.
    """
    split = _require_labeled(Psi, qfm, label_enc)
    psi = qfm.amplitudes(x_star)
    proj = np.kron(np.outer(psi, psi.conj()), np.eye(1 << split.right_qubits))
    big = np.outer(Psi.state.amplitudes, Psi.state.amplitudes.conj()) @ proj
    tr = np.trace(big).real
    if tr < DEGENERATE_JOINT:
        return None
    rho = partial_trace_array(big / tr, split, keep="right")
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def _uniform(k: int) -> np.ndarray:
    return np.full(k, 1.0 / k)


def classify_exact(Psi: DatasetState, x_star, qfm, label_enc: LabelEncoding) -> ClassProbabilities:
    joint = classify_joint(Psi, x_star, qfm, label_enc)
    K = label_enc.num_classes
    rho = reduced_label_state(Psi, x_star, qfm, label_enc)
    if rho is None or joint.sum() < DEGENERATE_JOINT:
        return ClassProbabilities(joint, _uniform(K), 0, True)
    cond = np.array([expectation(rho, label_enc(k)) for k in range(1, K + 1)])
    return ClassProbabilities(joint, cond, 0, False)


def classify_circuit_program(Psi: DatasetState, x_star, qfm, label_enc: LabelEncoding) -> GateCircuit:
    """``U_C`` followed by the inverse query preparation on the feature qubits only."""
    split = _require_labeled(Psi, qfm, label_enc)
    undo = adjoint(prepare_circuit(qfm(x_star))).widened(split.n_qubits, 0)
    return Psi.preparation.then(undo)


def class_bitstring(k: int, n_feature_qubits: int, label_enc: LabelEncoding) -> str:
    """Outcome ``b_k``: zeros on the feature qubits, class pattern on the label qubits."""
    return "0" * n_feature_qubits + label_enc.pattern(k)


def classify_circuit(
    Psi: DatasetState,
    x_star,
    qfm,
    label_enc: LabelEncoding,
    shots: int,
    seed: int,
    noise: NoiseSpec | None = None,
    stream_key=(),
    force_trajectories: bool = False,
) -> ClassProbabilities:
    """Shot estimates ``M_{b_k} / M``; conditionals renormalize over the class patterns."""
    circ = classify_circuit_program(Psi, x_star, qfm, label_enc)
    record = sample_shots_noisy(circ, noise or NoiseSpec(), shots, seed, stream_key,
                                force_trajectories=force_trajectories)
    K = label_enc.num_classes
    counts = np.array(
        [record.count(class_bitstring(k, Psi.split.left_qubits, label_enc)) for k in range(1, K + 1)],
        dtype=np.float64,
    )
    joint = counts / shots
    if counts.sum() == 0:
        return ClassProbabilities(joint, _uniform(K), shots, True)
    return ClassProbabilities(joint, counts / counts.sum(), shots, False)


def pdf_scale(Psi: DatasetState, qfm, lo: float, hi: float, steps: int = 1001) -> float:
    """Factor turning raw 1-D Born densities into a unit-area curve on ``[lo, hi]``.

    Integrates the exact density with the trapezoid rule.
    """
    if qfm.dim != 1:
        raise DimensionError("pdf rescaling is only defined for one-dimensional data")
    if not hi > lo or steps < 2:
        raise ValueError("need hi > lo and at least two integration points")
    grid = np.linspace(lo, hi, steps)
    vals = np.array([density_exact(Psi, [g], qfm).value for g in grid])
    area = float(trapezoid(vals, grid))
    if area <= 0.0:
        raise DegenerateStateError("density integrates to zero on the requested interval")
    return 1.0 / area


def thread_count() -> int:
    """Worker count from ``QBORN_THREADS`` (0 or unset: one per CPU)."""
    raw = os.environ.get("QBORN_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"QBORN_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("QBORN_THREADS must be non-negative")
    return n or (os.cpu_count() or 1)


def evaluate_many(fn: Callable[[int, object], object], queries: Sequence, threads: int | None = None) -> list:
    """``[fn(i, q) for i, q in enumerate(queries)]``, possibly in parallel, in query order."""
    threads = thread_count() if threads is None else threads
    items = list(enumerate(queries))
    if threads <= 1 or len(items) < 2:
        return [fn(i, q) for i, q in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda item: fn(*item), items))
