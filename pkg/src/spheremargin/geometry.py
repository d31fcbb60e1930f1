"""Normalization, cosine/angle kernels, and inter-class angles.

Everything downstream (losses, training, metrics) works with unit vectors
on the hypersphere; this module owns the conversions and the numeric
guards around arccos.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroVector

# Cosines are clamped to [-1 + COS_CLAMP, 1 - COS_CLAMP] before arccos.
# Keeps d(arccos)/dx = -1/sqrt(1-x^2) bounded (~2.24e3 at the clamp edge)
# and rules out NaN from dot products that round past +/-1.
COS_CLAMP = 1e-7

_ZERO_NORM = 1e-12
_UNIT_TOL = 1e-9


def normalize(v) -> np.ndarray:
    """Return v / ||v||_2 as float64.

    Raises ZeroVector when ||v||_2 < 1e-12.
    """
    v = np.asarray(v, dtype=np.float64)
    n = float(np.linalg.norm(v))
    if n < _ZERO_NORM:
        raise ZeroVector(f"cannot normalize vector with norm {n:.3e}")
    return v / n


def normalize_rows(m) -> np.ndarray:
    """Row-wise normalize a 2-D array; raises ZeroVector on a degenerate row."""
    m = np.asarray(m, dtype=np.float64)
    norms = np.linalg.norm(m, axis=1)
    if np.any(norms < _ZERO_NORM):
        bad = int(np.argmin(norms))
        raise ZeroVector(f"row {bad} has norm {norms[bad]:.3e}")
    return m / norms[:, None]


def clamp_cosines(c) -> np.ndarray:
    """Clamp cosine values into the safe arccos domain."""
    return np.clip(np.asarray(c, dtype=np.float64), -1.0 + COS_CLAMP, 1.0 - COS_CLAMP)


def _check_unit_rows(m: np.ndarray, what: str) -> None:
    err = np.abs(np.linalg.norm(m, axis=1) - 1.0)
    if np.any(err > _UNIT_TOL):
        bad = int(np.argmax(err))
        raise ZeroVector(f"{what} row {bad} is not unit length (|norm-1| = {err[bad]:.3e})")


@dataclass(frozen=True)
class EmbeddingBatch:
    """N unit embeddings (rows) with integer class labels in [0, C)."""

    embeddings: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        emb = np.asarray(self.embeddings, dtype=np.float64)
        lab = np.asarray(self.labels, dtype=np.int64)
        if emb.ndim != 2 or emb.shape[1] < 2:
            raise DimensionMismatch(f"embeddings must be N x d with d >= 2, got {emb.shape}")
        if lab.shape != (emb.shape[0],):
            raise DimensionMismatch(f"labels shape {lab.shape} does not match N={emb.shape[0]}")
        if lab.size and lab.min() < 0:
            raise DimensionMismatch("labels must be non-negative")
        _check_unit_rows(emb, "embedding")
        object.__setattr__(self, "embeddings", emb)
        object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.embeddings.shape[0]

    @property
    def dim(self) -> int:
        return self.embeddings.shape[1]


@dataclass(frozen=True)
class ClassWeights:
    """Last-layer weight matrix; row j is the unit-norm center of class j."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 2:
            raise DimensionMismatch(f"weights must be C x d with d >= 2, got {m.shape}")
        _check_unit_rows(m, "weight")
        object.__setattr__(self, "matrix", m)

    @property
    def num_classes(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def cosine_matrix(batch: EmbeddingBatch, weights: ClassWeights) -> np.ndarray:
    """N x C matrix of clamped cosines <x_i, W_j>."""
    if batch.dim != weights.dim:
        raise DimensionMismatch(
            f"embedding dim {batch.dim} != weight dim {weights.dim}"
        )
    return clamp_cosines(batch.embeddings @ weights.matrix.T)


def angles(cosines) -> np.ndarray:
    """Element-wise arccos; inputs are assumed clamped upstream."""
    return np.arccos(np.asarray(cosines, dtype=np.float64))


def inter_class_angles(weights: ClassWeights) -> np.ndarray:
    """C x C matrix of angles between class centers.

    Symmetric with an exactly-zero diagonal (a center is at angle 0 from
    itself; the clamp is only applied to off-diagonal dot products).
    """
    w = weights.matrix
    if w.shape[0] < 2:
        raise DimensionMismatch("need at least 2 class centers")
    d = np.arccos(clamp_cosines(w @ w.T))
    np.fill_diagonal(d, 0.0)
    return d
