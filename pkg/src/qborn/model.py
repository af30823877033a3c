"""``qborn-model/1`` files: a fitted dataset state with everything needed to query it."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuit import GateCircuit, simulate
from .errors import DataError
from .estimator import DatasetState, build_dataset_state, build_labeled_state
from .qfm import LabelEncoding, qfm_from_descriptor
from .statevec import StateVector, SubsystemSplit, projector_overlap
from .stateprep import prepare_state

FORMAT = "qborn-model/1"
LOAD_FIDELITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TrainedModel:
    dataset: DatasetState
    qfm: object
    label_encoding: LabelEncoding | None
    fidelity: float
    training_features: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def labeled(self) -> bool:
        return self.label_encoding is not None

    @property
    def circuit(self) -> GateCircuit:
        return self.dataset.preparation

    def to_json(self) -> dict:
        ds = self.dataset
        amps = ds.state.amplitudes
        return {
            "format": FORMAT,
            "n_qubits": ds.n_qubits,
            "amplitudes": {"real": amps.real.tolist(), "imag": amps.imag.tolist()},
            "norm_constant": ds.norm_constant,
            "n_samples": ds.n_samples,
            "split": None if ds.split is None else {"left": ds.split.left_qubits, "right": ds.split.right_qubits},
            "qfm": self.qfm.descriptor(),
            "label_encoding": None if self.label_encoding is None else self.label_encoding.descriptor(),
            "circuit": self.circuit.to_text(),
            "cnot_count": self.circuit.cnot_count,
            "fidelity": self.fidelity,
            "training_features": None if self.training_features is None else self.training_features.tolist(),
            "metadata": self.metadata,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def from_json(cls, doc: dict) -> "TrainedModel":
        if doc.get("format") != FORMAT:
            raise DataError(f"not a {FORMAT} document (format={doc.get('format')!r})")
        try:
            amps = np.asarray(doc["amplitudes"]["real"], float) + 1j * np.asarray(doc["amplitudes"]["imag"], float)
            state = StateVector(amps)
            split = None if doc["split"] is None else SubsystemSplit(int(doc["split"]["left"]), int(doc["split"]["right"]))
            circuit = GateCircuit.from_text(doc["circuit"])
            qfm = qfm_from_descriptor(doc["qfm"])
            enc = None if doc["label_encoding"] is None else LabelEncoding.from_descriptor(doc["label_encoding"])
            feats = doc.get("training_features")
            ds = DatasetState(state, float(doc["norm_constant"]), int(doc["n_samples"]), split, circuit)
            model = cls(ds, qfm, enc, float(doc["fidelity"]),
                        None if feats is None else np.asarray(feats, dtype=np.float64),
                        dict(doc.get("metadata") or {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed model file: {exc}") from None
        if circuit.n_qubits != state.n_qubits:
            raise DataError("model circuit width does not match its state")
        if projector_overlap(simulate(circuit), state) < 1.0 - LOAD_FIDELITY_TOL:
            raise DataError("model circuit does not prepare the stored state")
        return model

    @classmethod
    def load(cls, path) -> "TrainedModel":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read model {path}: {exc.strerror}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        return cls.from_json(doc)


def fit(features, qfm, labels=None, label_encoding: LabelEncoding | None = None,
        metadata: dict | None = None, keep_training: bool = True) -> TrainedModel:
    """Build the dataset state and compile its preparation circuit once."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features[:, None]
    if label_encoding is None:
        ds = build_dataset_state(features, qfm)
    else:
        if labels is None:
            raise ValueError("a label encoding needs labels")
        ds = build_labeled_state(features, labels, qfm, label_encoding)
    report = prepare_state(ds.state)
    ds = DatasetState(ds.state, ds.norm_constant, ds.n_samples, ds.split, report.circuit)
    return TrainedModel(ds, qfm, label_encoding, report.fidelity,
                        features if keep_training else None, dict(metadata or {}))
