"""Classical references: Gaussian kernel, Parzen KDE and ROC-AUC."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import DimensionError


@dataclass(frozen=True)
class KdeConfig:
    gamma: float
    normalized: bool = True

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")


def gaussian_kernel(x, x_prime, gamma: float) -> float:
    """``exp(-gamma * ||x - x'||^2)``."""
    x, x_prime = np.atleast_1d(np.asarray(x, float)), np.atleast_1d(np.asarray(x_prime, float))
    if x.shape != x_prime.shape:
        raise DimensionError(f"kernel arguments differ in shape: {x.shape} vs {x_prime.shape}")
    return float(np.exp(-gamma * np.sum((x - x_prime) ** 2)))


def kde(train, x, cfg: KdeConfig) -> float:
    """Parzen estimate ``(1/N) sum_i C exp(-gamma ||x - x_i||^2)``.

    ``C = sqrt(gamma/pi)`` per dimension when ``cfg.normalized``, else 1.
    """
    train = np.asarray(train, dtype=np.float64)
    if train.size == 0:
        raise ValueError("KDE needs at least one training sample")
    if train.ndim == 1:
        train = train[:, None]
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.size != train.shape[1]:
        raise DimensionError(f"query has {x.size} features, training data has {train.shape[1]}")
    sq = np.sum((train - x) ** 2, axis=1)
    c = math.sqrt(cfg.gamma / math.pi) ** train.shape[1] if cfg.normalized else 1.0
    return float(c * np.mean(np.exp(-cfg.gamma * sq)))


def roc_auc(scores, labels) -> float:
    """Mann-Whitney form of the ROC area; tied scores count one half.

    ``labels`` are binary (``True``/1 marks the positive class).
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    if scores.shape != labels.shape:
        raise DimensionError("scores and labels differ in length")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC-AUC needs both positive and negative labels")
    ranks = rankdata(scores)
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))
