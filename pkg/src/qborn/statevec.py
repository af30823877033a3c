"""State vectors, density matrices and the handful of linear-algebra
primitives the estimators are built from.

Qubit 0 is the most significant bit of an amplitude index, so the basis
state ``|q0 q1 ... q_{n-1}>`` has index ``int("q0q1...", 2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DimensionError, NormalizationError

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
EIGEN_TOL = 1e-10


def _n_qubits_for(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise DimensionError(f"length {dim} is not a power of two")
    return n


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm amplitude vector over ``n_qubits`` qubits.

    Construction rejects vectors whose squared norm is off by more than
    ``NORM_TOL``; nothing is renormalized silently. Use
    :meth:`from_unnormalized` when the caller is explicitly normalizing.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        _n_qubits_for(amps.size)
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NormalizationError(f"squared norm {norm2!r} differs from 1 by more than {NORM_TOL}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.amplitudes.size)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def from_unnormalized(cls, vec) -> "StateVector":
        vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise NormalizationError("cannot normalize the zero vector")
        return cls(vec / norm)

    @classmethod
    def basis(cls, n_qubits: int, index: int = 0) -> "StateVector":
        if not 0 <= index < 1 << n_qubits:
            raise DimensionError(f"basis index {index} out of range for {n_qubits} qubits")
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def from_bitstring(cls, bits: str) -> "StateVector":
        return cls.basis(len(bits), int(bits, 2) if bits else 0)

    def outer(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))

    def is_real(self, tol: float = 1e-14) -> bool:
        return bool(np.max(np.abs(self.amplitudes.imag), initial=0.0) <= tol)

    def allclose(self, other: "StateVector", atol: float = 1e-9) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.amplitudes, other.amplitudes, atol=atol, rtol=0))

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits}, amplitudes={self.amplitudes!r})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=np.complex128)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
        _n_qubits_for(rho.shape[0])
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1.0) > NORM_TOL:
            raise NormalizationError(f"density matrix trace {tr!r} is not 1")
        if np.linalg.eigvalsh(rho).min() < -EIGEN_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", _frozen(rho))

    @property
    def n_qubits(self) -> int:
        return _n_qubits_for(self.entries.shape[0])

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.entries, self.entries).real)


@dataclass(frozen=True)
class SubsystemSplit:
    """Bipartition into the leading ``left_qubits`` and trailing ``right_qubits``."""

    left_qubits: int
    right_qubits: int

    def __post_init__(self):
        if self.left_qubits < 1 or self.right_qubits < 1:
            raise ValueError("both sides of a split need at least one qubit")

    @property
    def n_qubits(self) -> int:
        return self.left_qubits + self.right_qubits


def _check_same_dim(a: StateVector, b: StateVector) -> None:
    if a.dim != b.dim:
        raise DimensionError(
            f"dimension mismatch: {a.n_qubits} qubits (dim {a.dim}) vs {b.n_qubits} qubits (dim {b.dim})"
        )


def inner_product(a: StateVector, b: StateVector) -> complex:
    """Return ``<a|b>``, conjugate-linear in ``a``."""
    _check_same_dim(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def projector_overlap(psi: StateVector, state: StateVector) -> float:
    """Born probability ``|<psi|state>|**2``."""
    return abs(inner_product(psi, state)) ** 2


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    # np.kron puts a's index in the high bits, matching the qubit order
    return StateVector.from_unnormalized(np.kron(a.amplitudes, b.amplitudes))


def partial_trace_array(rho: np.ndarray, split: SubsystemSplit, keep: Literal["left", "right"]) -> np.ndarray:
    """Partial trace of a raw (not necessarily Hermitian) operator."""
    dl, dr = 1 << split.left_qubits, 1 << split.right_qubits
    if rho.shape != (dl * dr, dl * dr):
        raise DimensionError(
            f"operator of shape {rho.shape} does not match split "
            f"{split.left_qubits}+{split.right_qubits} qubits"
        )
    t = rho.reshape(dl, dr, dl, dr)
    if keep == "right":
        return np.einsum("ajak->jk", t)
    if keep == "left":
        return np.einsum("ajbj->ab", t)
    raise ValueError(f"keep must be 'left' or 'right', got {keep!r}")


def partial_trace(rho: DensityMatrix, split: SubsystemSplit, keep: Literal["left", "right"] = "right") -> DensityMatrix:
    """Trace out one side of ``split`` and return the reduced state of the other."""
    if rho.n_qubits != split.n_qubits:
        raise DimensionError(f"{rho.n_qubits}-qubit operator cannot be split as {split.left_qubits}+{split.right_qubits}")
    red = partial_trace_array(rho.entries, split, keep)
    return DensityMatrix(0.5 * (red + red.conj().T))


def expectation(rho: DensityMatrix, state: StateVector) -> float:
    """``<state|rho|state>`` for a unit vector; lies in [0, 1] up to rounding."""
    if rho.dim != state.dim:
        raise DimensionError(f"dimension mismatch: operator dim {rho.dim} vs state dim {state.dim}")
    v = state.amplitudes
    return float(np.vdot(v, rho.entries @ v).real)
