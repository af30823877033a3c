"""Optimisation-free density estimation and classification with quantum state overlaps.

A training set is compressed into one dataset state, the normalized sum of
feature-mapped samples. Queries are scored by Born probabilities of their
own feature states projected onto it, either exactly or by sampling a
compiled circuit on the bundled statevector simulator.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .circuit import GateCircuit, NoiseSpec, ShotRecord, adjoint, sample_shots, sample_shots_noisy, simulate
from .estimator import (
    ClassProbabilities,
    DatasetState,
    DensityEstimate,
    build_dataset_state,
    build_labeled_state,
    classify_circuit,
    classify_exact,
    density_circuit,
    density_exact,
)
from .model import TrainedModel, fit
from .qfm import LabelEncoding, LabelKind, RffParams, RffQfm, SinCosQfm, rff_sample_params
from .statevec import DensityMatrix, StateVector, SubsystemSplit
from .stateprep import PrepReport, prepare_inverse, prepare_state

__all__ = [
    "BACKEND", "GateCircuit", "NoiseSpec", "ShotRecord", "adjoint", "sample_shots", "sample_shots_noisy",
    "simulate", "ClassProbabilities", "DatasetState", "DensityEstimate", "build_dataset_state",
    "build_labeled_state", "classify_circuit", "classify_exact", "density_circuit", "density_exact",
    "TrainedModel", "fit", "LabelEncoding", "LabelKind", "RffParams", "RffQfm", "SinCosQfm",
    "rff_sample_params", "DensityMatrix", "StateVector", "SubsystemSplit", "PrepReport",
    "prepare_inverse", "prepare_state",
]
