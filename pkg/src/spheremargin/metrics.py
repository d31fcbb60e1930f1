"""Verification metrics and the board-count model-selection protocol.

Pair accuracy and TAR@FAR operate on cosine-similarity scores split into
genuine and impostor lists; both are defined so that an exhaustive sweep
over candidate thresholds reproduces them exactly.

Board count ranks configurations per benchmark column: a cell's count is
1 + the number of rows with strictly lower accuracy in that column
(competition ranking, ties share the minimum rank of their block), and
the configuration with the largest row sum wins.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyGallery,
    EmptyScores,
    FarOutOfRange,
    MalformedTable,
    MissingLabel,
)
from .geometry import EmbeddingBatch
from .data import PairSet


@dataclass(frozen=True)
class ScoredPairs:
    genuine: np.ndarray
    impostor: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.genuine, dtype=np.float64).ravel()
        i = np.asarray(self.impostor, dtype=np.float64).ravel()
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(i))):
            raise EmptyScores("scores must be finite")
        object.__setattr__(self, "genuine", g)
        object.__setattr__(self, "impostor", i)


def scored_pairs(batch: EmbeddingBatch, pairs: PairSet) -> ScoredPairs:
    """Cosine similarity per pair, split by genuine/impostor."""
    scores = np.einsum(
        "ij,ij->i", batch.embeddings[pairs.idx_a], batch.embeddings[pairs.idx_b]
    )
    return ScoredPairs(scores[pairs.same], scores[~pairs.same])


def _candidate_thresholds(genuine: np.ndarray, impostor: np.ndarray) -> np.ndarray:
    distinct = np.unique(np.concatenate([genuine, impostor]))
    mids = (distinct[:-1] + distinct[1:]) / 2.0
    return np.concatenate([[-np.inf], mids, [np.inf]])


def accuracy_at(pairs: ScoredPairs, threshold: float) -> float:
    """Fraction correct at one threshold: genuine >= t, impostor < t."""
    if pairs.genuine.size == 0 or pairs.impostor.size == 0:
        raise EmptyScores("need at least one genuine and one impostor score")
    correct = np.count_nonzero(pairs.genuine >= threshold) + np.count_nonzero(
        pairs.impostor < threshold
    )
    return correct / (pairs.genuine.size + pairs.impostor.size)


def pair_accuracy(pairs: ScoredPairs) -> tuple[float, float]:
    """Best threshold-sweep accuracy and its threshold (smallest on ties).

    Candidates are all midpoints between adjacent distinct scores plus
    +/- infinity, which covers every achievable split.
    """
    if pairs.genuine.size == 0 or pairs.impostor.size == 0:
        raise EmptyScores("need at least one genuine and one impostor score")
    g = np.sort(pairs.genuine)
    i = np.sort(pairs.impostor)
    taus = _candidate_thresholds(g, i)
    n_gen_ok = g.size - np.searchsorted(g, taus, side="left")
    n_imp_ok = np.searchsorted(i, taus, side="left")
    acc = (n_gen_ok + n_imp_ok) / (g.size + i.size)
    best = int(np.argmax(acc))  # first max = smallest threshold
    return float(acc[best]), float(taus[best])


def tar_at_far(pairs: ScoredPairs, far: float) -> float:
    """True-acceptance rate at the smallest threshold keeping FAR <= far.

    The threshold sits just above the (k+1)-th largest impostor score,
    where k is the largest admissible impostor count with k/M <= far,
    so the genuine side is counted with a strict > against that score.
    """
    if pairs.genuine.size == 0 or pairs.impostor.size == 0:
        raise EmptyScores("need at least one genuine and one impostor score")
    if not 0.0 < far <= 1.0:
        raise FarOutOfRange(f"far must be in (0, 1], got {far}")
    imp = np.sort(pairs.impostor)[::-1]
    m = imp.size
    k = int(far * m)
    while k > 0 and k / m > far:
        k -= 1
    while k + 1 <= m and (k + 1) / m <= far:
        k += 1
    if k >= m:
        return 1.0
    return float(np.mean(pairs.genuine > imp[k]))


def rank1(probes: EmbeddingBatch, gallery: EmbeddingBatch) -> float:
    """Fraction of probes whose nearest gallery entry shares their label.

    Nearest by max cosine; exact ties resolve to the lowest gallery index.
    """
    if gallery.n == 0:
        raise EmptyGallery("gallery is empty")
    missing = np.setdiff1d(probes.labels, gallery.labels)
    if missing.size:
        raise MissingLabel(f"probe labels {missing.tolist()} not present in gallery")
    sims = probes.embeddings @ gallery.embeddings.T
    nearest = np.argmax(sims, axis=1)
    return float(np.mean(gallery.labels[nearest] == probes.labels))


def kfold_accuracy(scores, same, folds: int = 10) -> float:
    """LFW-style k-fold accuracy over a flat pair list.

    Folds are contiguous equal slices; each fold is scored with the best
    threshold of the remaining pairs, and the fold accuracies are averaged.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    same = np.asarray(same, dtype=bool).ravel()
    if scores.shape != same.shape:
        raise EmptyScores("scores and same flags must be equal length")
    if folds < 2 or scores.size < folds:
        raise EmptyScores(f"need at least {max(folds, 2)} pairs for {folds} folds")
    bounds = np.linspace(0, scores.size, folds + 1).astype(int)
    accs = []
    for k in range(folds):
        test = np.zeros(scores.size, dtype=bool)
        test[bounds[k] : bounds[k + 1]] = True
        train = ScoredPairs(scores[~test & same], scores[~test & ~same])
        _, tau = pair_accuracy(train)
        accs.append(accuracy_at(ScoredPairs(scores[test & same], scores[test & ~same]), tau))
    return float(np.mean(accs))


# -- board count ------------------------------------------------------------


@dataclass(frozen=True)
class AccuracyTable:
    """Configurations x benchmarks grid of accuracies in [0, 100]."""

    row_labels: tuple
    col_labels: tuple
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape != (len(self.row_labels), len(self.col_labels)):
            raise MalformedTable(
                f"values shape {v.shape} does not match {len(self.row_labels)} rows "
                f"x {len(self.col_labels)} cols"
            )
        if not np.all(np.isfinite(v)):
            raise MalformedTable("accuracy cells must be finite")
        if np.any(v < 0) or np.any(v > 100):
            raise MalformedTable("accuracies must lie in [0, 100]")
        object.__setattr__(self, "row_labels", tuple(str(r) for r in self.row_labels))
        object.__setattr__(self, "col_labels", tuple(str(c) for c in self.col_labels))
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class BoardCount:
    bc: np.ndarray
    row_sums: np.ndarray
    best_row: int


def board_count(table: AccuracyTable) -> BoardCount:
    """Per-column competition ranks (higher accuracy -> higher count).

    bc[i, j] = 1 + #{rows with strictly lower accuracy in column j};
    best_row is the argmax of the row sums, lowest index on ties.
    """
    v = table.values
    if v.shape[0] < 2:
        raise MalformedTable("board count needs at least 2 configurations")
    bc = 1 + np.sum(v[None, :, :] < v[:, None, :], axis=1)
    row_sums = bc.sum(axis=1)
    return BoardCount(bc=bc, row_sums=row_sums, best_row=int(np.argmax(row_sums)))


def read_accuracy_csv(path) -> AccuracyTable:
    """First row = benchmark names, first column = configuration names."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 3 or len(rows[0]) < 2:
        raise MalformedTable(f"{path}: need a header row plus >= 2 data rows")
    col_labels = rows[0][1:]
    row_labels, values = [], []
    for rec in rows[1:]:
        if len(rec) != len(rows[0]):
            raise MalformedTable(f"{path}: ragged row {rec!r}")
        row_labels.append(rec[0])
        values.append([float(v) for v in rec[1:]])
    return AccuracyTable(tuple(row_labels), tuple(col_labels), np.asarray(values))


def write_accuracy_csv(table: AccuracyTable, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["config"] + list(table.col_labels))
        for name, row in zip(table.row_labels, table.values):
            writer.writerow([name] + ["%.9g" % v for v in row])


def write_board_count(bc: BoardCount, table: AccuracyTable, csv_path, json_path) -> None:
    """BC grid as CSV plus a {best_row, row_sums} JSON summary."""
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["config"] + list(table.col_labels) + ["bc_sum"])
        for name, row, total in zip(table.row_labels, bc.bc, bc.row_sums):
            writer.writerow([name] + [int(v) for v in row] + [int(total)])
    summary = {
        "best_row": table.row_labels[bc.best_row],
        "row_sums": {name: int(s) for name, s in zip(table.row_labels, bc.row_sums)},
    }
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
