"""Deterministic hypersphere class-mixture datasets and verification pairs.

Samples are drawn as normalize(center + sigma * gaussian) from NumPy's
PCG64 generator, so every artifact is a pure function of (spec, seed) and
reproducible across platforms.  This is a perturb-then-project scheme, not
an exact von Mises-Fisher sampler; it is simpler and entirely adequate for
property tests.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigInvalid, InsufficientSamples
from .geometry import EmbeddingBatch, normalize_rows


@dataclass(frozen=True)
class SphereMixtureSpec:
    num_classes: int
    dim: int
    samples_per_class: int
    noise_sigma: float
    seed: int
    # with dim == 2, place centers at exactly uniform polar angles k*2pi/C
    uniform_2d_centers: bool = False

    def __post_init__(self):
        if self.num_classes < 2:
            raise ConfigInvalid(f"num_classes must be >= 2, got {self.num_classes}")
        if self.dim < 2:
            raise ConfigInvalid(f"dim must be >= 2, got {self.dim}")
        if self.samples_per_class < 1:
            raise ConfigInvalid("samples_per_class must be >= 1")
        if self.noise_sigma < 0:
            raise ConfigInvalid("noise_sigma must be >= 0")
        if self.uniform_2d_centers and self.dim != 2:
            raise ConfigInvalid("uniform_2d_centers requires dim == 2")


def _draw_centers(rng: np.random.Generator, spec: SphereMixtureSpec) -> np.ndarray:
    if spec.uniform_2d_centers:
        phi = 2.0 * math.pi * np.arange(spec.num_classes) / spec.num_classes
        return np.column_stack([np.cos(phi), np.sin(phi)])
    return normalize_rows(rng.standard_normal((spec.num_classes, spec.dim)))


def class_centers(spec: SphereMixtureSpec) -> np.ndarray:
    """The C unit center directions the generator perturbs around."""
    return _draw_centers(np.random.default_rng(spec.seed), spec)


def generate(spec: SphereMixtureSpec) -> EmbeddingBatch:
    """Class-major batch of unit samples around the seeded centers.

    With noise_sigma == 0 every sample is bitwise equal to its center.
    """
    rng = np.random.default_rng(spec.seed)
    centers = _draw_centers(rng, spec)
    per = spec.samples_per_class
    labels = np.repeat(np.arange(spec.num_classes), per)
    if spec.noise_sigma == 0.0:
        samples = np.repeat(centers, per, axis=0)
    else:
        noise = rng.standard_normal((spec.num_classes * per, spec.dim))
        samples = normalize_rows(centers[labels] + spec.noise_sigma * noise)
    return EmbeddingBatch(samples, labels)


@dataclass(frozen=True)
class PairSet:
    """Index pairs into a batch: genuine (same label) and impostor pairs."""

    idx_a: np.ndarray
    idx_b: np.ndarray
    same: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.idx_a, dtype=np.int64)
        b = np.asarray(self.idx_b, dtype=np.int64)
        s = np.asarray(self.same, dtype=bool)
        if not (a.shape == b.shape == s.shape) or a.ndim != 1:
            raise InsufficientSamples("pair index arrays must be equal-length 1-D")
        if not (s.any() and (~s).any()):
            raise InsufficientSamples("need at least one genuine and one impostor pair")
        object.__setattr__(self, "idx_a", a)
        object.__setattr__(self, "idx_b", b)
        object.__setattr__(self, "same", s)

    def __len__(self) -> int:
        return self.idx_a.shape[0]


def make_pairs(batch: EmbeddingBatch, pairs_per_kind: int, seed: int) -> PairSet:
    """Seeded, balanced genuine/impostor pairs, interleaved g,i,g,i,...

    Interleaving keeps contiguous fold slices balanced for the k-fold
    verification protocol.  Every class must have at least 2 samples.
    """
    if pairs_per_kind < 1:
        raise InsufficientSamples("pairs_per_kind must be >= 1")
    labels = batch.labels
    classes, counts = np.unique(labels, return_counts=True)
    if classes.size < 2:
        raise InsufficientSamples("need at least 2 classes for impostor pairs")
    if counts.min() < 2:
        raise InsufficientSamples("every class needs >= 2 samples for genuine pairs")
    by_class = {int(c): np.flatnonzero(labels == c) for c in classes}
    rng = np.random.default_rng(seed)
    idx_a = np.empty(2 * pairs_per_kind, dtype=np.int64)
    idx_b = np.empty(2 * pairs_per_kind, dtype=np.int64)
    same = np.zeros(2 * pairs_per_kind, dtype=bool)
    for k in range(pairs_per_kind):
        c = int(rng.choice(classes))
        a, b = rng.choice(by_class[c], size=2, replace=False)
        idx_a[2 * k], idx_b[2 * k], same[2 * k] = a, b, True
        ca, cb = rng.choice(classes, size=2, replace=False)
        idx_a[2 * k + 1] = rng.choice(by_class[int(ca)])
        idx_b[2 * k + 1] = rng.choice(by_class[int(cb)])
    return PairSet(idx_a, idx_b, same)


# -- CSV interchange --------------------------------------------------------

FLOAT_FMT = "%.9g"


def save_batch_csv(batch: EmbeddingBatch, path) -> None:
    """header: label, v0..v{d-1}; floats at 9 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label"] + [f"v{i}" for i in range(batch.dim)])
        for lab, row in zip(batch.labels, batch.embeddings):
            writer.writerow([int(lab)] + [FLOAT_FMT % v for v in row])


def load_batch_csv(path) -> EmbeddingBatch:
    """Inverse of save_batch_csv; rows are re-normalized to undo the
    9-digit quantization."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "label":
            raise ConfigInvalid(f"{path}: expected a 'label,v0,...' header")
        labels, rows = [], []
        for rec in reader:
            labels.append(int(rec[0]))
            rows.append([float(v) for v in rec[1:]])
    return EmbeddingBatch(normalize_rows(np.asarray(rows)), np.asarray(labels))


def save_pairs_csv(pairs: PairSet, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["idx_a", "idx_b", "same"])
        for a, b, s in zip(pairs.idx_a, pairs.idx_b, pairs.same):
            writer.writerow([int(a), int(b), int(s)])


def load_pairs_csv(path) -> PairSet:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["idx_a", "idx_b", "same"]:
            raise ConfigInvalid(f"{path}: expected an 'idx_a,idx_b,same' header")
        a, b, s = [], [], []
        for rec in reader:
            a.append(int(rec[0]))
            b.append(int(rec[1]))
            s.append(bool(int(rec[2])))
    return PairSet(np.asarray(a), np.asarray(b), np.asarray(s))
