"""Quantum feature maps for samples and labels.

* :class:`SinCosQfm` puts each feature on one qubit as
  ``sin(pi x)|0> + cos(pi x)|1>``, so inner products are
  ``prod_i cos(pi (x_i - x'_i))``.
* :class:`RffQfm` amplitude-encodes ``D`` random Fourier features of the
  Gaussian kernel ``exp(-gamma ||x - x'||^2)`` on ``log2(D)`` qubits.
* :class:`LabelEncoding` maps class ``k`` in ``1..K`` to a basis state,
  one-hot on ``K`` qubits or binary on ``ceil(log2 K)`` qubits.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DegenerateStateError, DimensionError
from .rng import stream
from .statevec import StateVector

logger = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-12


def _as_vector(x, dim: int) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.ndim != 1 or x.size != dim:
        raise DimensionError(f"expected a feature vector of length {dim}, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class SinCosQfm:
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")

    @property
    def n_qubits(self) -> int:
        return self.dim

    def amplitudes(self, x) -> np.ndarray:
        x = _as_vector(x, self.dim)
        if np.any((x < 0.0) | (x > 1.0)):
            logger.warning("sin/cos feature map evaluated outside [0, 1]: %s", x)
        amps = np.ones(1)
        for xi in x:
            amps = np.kron(amps, [math.sin(math.pi * xi), math.cos(math.pi * xi)])
        return amps

    def __call__(self, x) -> StateVector:
        return StateVector(self.amplitudes(x))

    def descriptor(self) -> dict:
        return {"kind": "sincos", "dim": self.dim}


def sincos_map(x) -> StateVector:
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return SinCosQfm(x.size)(x)


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True, eq=False)
class RffParams:
    """Frequencies ``w`` (shape ``(D, dim)``) and offsets ``b`` for ``D`` random Fourier features."""

    D: int
    gamma: float
    dim: int
    w: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    seed: int = 0

    def __post_init__(self):
        if not _is_power_of_two(self.D):
            raise ValueError(f"D must be a power of two for amplitude encoding, got {self.D}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        w = np.array(self.w, dtype=np.float64).reshape(self.D, self.dim)
        b = np.array(self.b, dtype=np.float64).reshape(self.D)
        if np.any((b < 0.0) | (b >= 2 * np.pi)):
            raise ValueError("phase offsets must lie in [0, 2*pi)")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", b)

    def to_json(self) -> dict:
        return {
            "D": self.D,
            "gamma": self.gamma,
            "dim": self.dim,
            "seed": self.seed,
            "w": self.w.tolist(),
            "b": self.b.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RffParams":
        try:
            return cls(int(doc["D"]), float(doc["gamma"]), int(doc["dim"]), doc["w"], doc["b"], int(doc["seed"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"invalid RFF parameters: {exc}") from None


def rff_sample_params(D: int, gamma: float, dim: int = 1, seed: int = 0) -> RffParams:
    """Draw ``w_i ~ N(0, 2*gamma*I)`` and ``b_i ~ U[0, 2*pi)``.

    Variance ``2*gamma`` makes ``E[cos(w.(x-y))] = exp(-gamma ||x-y||^2)``.
    """
    if not _is_power_of_two(D):
        raise ValueError(f"D must be a power of two for amplitude encoding, got {D}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    rng = stream(seed)
    w = rng.normal(0.0, math.sqrt(2.0 * gamma), size=(D, dim))
    b = rng.uniform(0.0, 2.0 * np.pi, size=D)
    return RffParams(D, float(gamma), dim, w, b, seed)


def rff_features(x, params: RffParams) -> np.ndarray:
    """``sqrt(2/D) * cos(w_i . x + b_i)`` for ``i = 0..D-1``."""
    x = _as_vector(x, params.dim)
    return math.sqrt(2.0 / params.D) * np.cos(params.w @ x + params.b)


@dataclass(frozen=True)
class RffQfm:
    params: RffParams

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def n_qubits(self) -> int:
        return self.params.D.bit_length() - 1

    def amplitudes(self, x) -> np.ndarray:
        feats = rff_features(x, self.params)
        norm = np.linalg.norm(feats)
        if norm < DEGENERATE_TOL:
            raise DegenerateStateError("degenerate feature vector: all random Fourier features vanish")
        return feats / norm

    def __call__(self, x) -> StateVector:
        return StateVector(self.amplitudes(x))

    def descriptor(self) -> dict:
        return {"kind": "rff", "params": self.params.to_json()}


def rff_qfm(x, params: RffParams) -> StateVector:
    return RffQfm(params)(x)


def qfm_from_descriptor(doc: dict):
    kind = doc.get("kind")
    if kind == "sincos":
        return SinCosQfm(int(doc["dim"]))
    if kind == "rff":
        return RffQfm(RffParams.from_json(doc["params"]))
    raise DataError(f"unknown feature map kind {kind!r}")


class LabelKind(str, enum.Enum):
    ONE_HOT = "onehot"
    BASIS = "basis"


@dataclass(frozen=True)
class LabelEncoding:
    kind: LabelKind
    num_classes: int

    def __post_init__(self):
        object.__setattr__(self, "kind", LabelKind(self.kind))
        if self.num_classes < 2:
            raise ValueError("a label encoding needs at least two classes")

    @property
    def n_qubits(self) -> int:
        if self.kind is LabelKind.ONE_HOT:
            return self.num_classes
        return max(1, (self.num_classes - 1).bit_length())

    def _check(self, y: int) -> int:
        if isinstance(y, (bool, np.bool_)) or int(y) != y or not 1 <= y <= self.num_classes:
            raise ValueError(f"class {y!r} outside 1..{self.num_classes}")
        return int(y)

    def index(self, y: int) -> int:
        """Basis-state index of class ``y`` on the label register."""
        y = self._check(y)
        if self.kind is LabelKind.ONE_HOT:
            return 1 << (self.num_classes - y)
        return y - 1

    def pattern(self, y: int) -> str:
        """Bitstring of class ``y`` on the label qubits, qubit 0 first."""
        return format(self.index(y), f"0{self.n_qubits}b")

    def __call__(self, y: int) -> StateVector:
        return StateVector.basis(self.n_qubits, self.index(y))

    def descriptor(self) -> dict:
        return {"kind": self.kind.value, "num_classes": self.num_classes}

    @classmethod
    def from_descriptor(cls, doc: dict) -> "LabelEncoding":
        try:
            return cls(LabelKind(doc["kind"]), int(doc["num_classes"]))
        except (KeyError, ValueError) as exc:
            raise DataError(f"invalid label encoding: {exc}") from None


def label_map(y: int, enc: LabelEncoding) -> StateVector:
    return enc(y)
