"""Toy datasets (XOR blobs, 1-D bi-Gaussian mixture) and their CSV form."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError
from .rng import stream

XOR_CENTERS = ((0.25, 0.25), (0.75, 0.75), (0.25, 0.75), (0.75, 0.25))
XOR_LABELS = (1, 1, 2, 2)


@dataclass(frozen=True)
class LabeledSample:
    features: tuple[float, ...]
    label: int

    def __post_init__(self):
        if self.label < 1:
            raise ValueError(f"labels start at 1, got {self.label}")


@dataclass(frozen=True)
class XorConfig:
    n_per_blob: int = 100
    blob_std: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_per_blob < 1:
            raise ValueError("n_per_blob must be positive")
        if self.blob_std < 0:
            raise ValueError("blob_std must be non-negative")


@dataclass(frozen=True)
class BiGaussConfig:
    n: int = 200
    means: tuple[float, float] = (0.3, 0.7)
    stds: tuple[float, float] = (0.05, 0.05)
    weights: tuple[float, float] = (0.5, 0.5)
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if len(self.means) != 2 or len(self.stds) != 2 or len(self.weights) != 2:
            raise ValueError("a bi-Gaussian mixture has exactly two components")
        if any(s < 0 for s in self.stds):
            raise ValueError("stds must be non-negative")
        if any(w < 0 for w in self.weights) or not math.isclose(sum(self.weights), 1.0, abs_tol=1e-12):
            raise ValueError("weights must be non-negative and sum to 1")


def config_dict(cfg) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(cfg).items()}


def gen_xor(cfg: XorConfig = XorConfig()) -> list[LabeledSample]:
    """Four Gaussian blobs on the quarter points of the unit square, clipped to it.

    Blobs at (0.25, 0.25) and (0.75, 0.75) are class 1, the other two class 2.
    Samples come blob by blob.
    """
    rng = stream(cfg.seed)
    out = []
    for center, label in zip(XOR_CENTERS, XOR_LABELS):
        pts = np.clip(rng.normal(center, cfg.blob_std, size=(cfg.n_per_blob, 2)), 0.0, 1.0)
        out.extend(LabeledSample((float(a), float(b)), label) for a, b in pts)
    return out


def gen_bigaussian(cfg: BiGaussConfig = BiGaussConfig()) -> np.ndarray:
    rng = stream(cfg.seed)
    comp = rng.choice(2, size=cfg.n, p=list(cfg.weights))
    noise = rng.standard_normal(cfg.n)
    return np.asarray(cfg.means)[comp] + np.asarray(cfg.stds)[comp] * noise


def train_test_split(samples, test_fraction: float, seed: int):
    """Seeded shuffle, then split off the last ``test_fraction`` of the samples."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie strictly between 0 and 1")
    samples = list(samples)
    order = stream(seed).permutation(len(samples))
    n_test = int(round(test_fraction * len(samples)))
    shuffled = [samples[i] for i in order]
    return shuffled[: len(samples) - n_test], shuffled[len(samples) - n_test:]


@dataclass
class Table:
    """Feature matrix plus optional integer labels, as read from CSV."""

    features: np.ndarray
    labels: np.ndarray | None = None
    columns: list[str] = field(default_factory=list)

    @property
    def labeled(self) -> bool:
        return self.labels is not None

    def __len__(self):
        return self.features.shape[0]

    def samples(self) -> list[LabeledSample]:
        if self.labels is None:
            raise DataError("table has no label column")
        return [LabeledSample(tuple(map(float, f)), int(y)) for f, y in zip(self.features, self.labels)]


def to_table(data) -> Table:
    """Accept a list of :class:`LabeledSample`, a 1-D array or a 2-D feature array."""
    if isinstance(data, Table):
        return data
    if len(data) and isinstance(data[0], LabeledSample):
        feats = np.array([s.features for s in data], dtype=np.float64)
        return Table(feats, np.array([s.label for s in data], dtype=np.int64))
    feats = np.asarray(data, dtype=np.float64)
    if feats.ndim == 1:
        feats = feats[:, None]
    return Table(feats)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def format_csv(data) -> str:
    table = to_table(data)
    d = table.features.shape[1]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{i + 1}" for i in range(d)] + (["label"] if table.labeled else []))
    for i, row in enumerate(table.features):
        cells = [_fmt(v) for v in row]
        if table.labeled:
            cells.append(str(int(table.labels[i])))
        writer.writerow(cells)
    return buf.getvalue()


def write_csv(path, data) -> None:
    """Write ``x1,...,xd[,label]`` rows, 17 significant digits, UTF-8, LF endings."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(data))


def read_csv(path, require_label: bool = False) -> Table:
    """Parse a CSV written by :func:`write_csv`.

    Raises :class:`DataError` with the offending line number for malformed rows.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    return parse_csv(text, require_label=require_label, source=str(path))


def parse_csv(text: str, require_label: bool = False, source: str = "<csv>") -> Table:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or not any(cell.strip() for cell in rows[0]):
        raise DataError(f"{source}: empty file, expected a header row x1,...,xd[,label]")
    header = [h.strip() for h in rows[0]]
    has_label = header[-1] == "label"
    feat_cols = header[:-1] if has_label else header
    expected = [f"x{i + 1}" for i in range(len(feat_cols))]
    if not feat_cols or feat_cols != expected:
        raise DataError(f"{source}: line 1: header must be x1,...,xd[,label], got {','.join(header)}")
    if require_label and not has_label:
        raise DataError(f"{source}: missing column 'label' required for classification data")
    feats, labels = [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"{source}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            feats.append([float(c) for c in row[: len(feat_cols)]])
            if has_label:
                labels.append(int(row[-1]))
        except ValueError as exc:
            raise DataError(f"{source}: line {lineno}: {exc}") from None
    if not feats:
        raise DataError(f"{source}: no data rows")
    arr = np.array(feats, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{source}: non-finite feature values")
    lab = np.array(labels, dtype=np.int64) if has_label else None
    if lab is not None and np.any(lab < 1):
        raise DataError(f"{source}: labels must be class indices starting at 1")
    return Table(arr, lab, header)
