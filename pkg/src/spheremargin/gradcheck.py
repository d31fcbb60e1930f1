"""Finite-difference oracle and comparison harness for analytic gradients.

Nothing from the analytic backward pass is reused here: the numeric side
only ever calls the forward loss on perturbed raw parameters.  The trainer
is not trusted until every variant passes this check in both gradient
modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import LengthMismatch, NonFiniteObjective
from .geometry import ClassWeights, EmbeddingBatch, normalize_rows
from .losses import (
    GRADIENT_MODES,
    VARIANTS,
    MarginConfig,
    loss_and_grad,
    loss_value,
    margins_at,
)

REL_TOL = 1e-5
ABS_FLOOR = 1e-9
STEP = 1e-6


@dataclass
class GradReport:
    max_rel_error: float
    max_abs_error: float
    argmax_tensor: str
    argmax_index: int
    passed: bool
    rel_tol: float = REL_TOL
    abs_floor: float = ABS_FLOOR


def finite_diff(objective: Callable[[np.ndarray], float], point, h: float) -> np.ndarray:
    """Central differences (f(x + h e_k) - f(x - h e_k)) / 2h per coordinate."""
    x0 = np.asarray(point, dtype=np.float64)
    grad = np.zeros_like(x0)
    for k in range(x0.size):
        x = x0.copy()
        x[k] = x0[k] + h
        fp = objective(x)
        x[k] = x0[k] - h
        fm = objective(x)
        if not (math.isfinite(fp) and math.isfinite(fm)):
            raise NonFiniteObjective(f"objective not finite near coordinate {k}")
        grad[k] = (fp - fm) / (2.0 * h)
    return grad


def compare(
    analytic,
    numeric,
    rel_tol: float = REL_TOL,
    abs_floor: float = ABS_FLOOR,
    sections: Sequence[tuple[str, int]] | None = None,
) -> GradReport:
    """Aggregate per-coordinate errors into a pass/fail report.

    Relative error per coordinate is |a - n| / max(|a|, |n|, 1e-9); the
    report passes when the max relative error is within rel_tol or every
    coordinate is within the absolute floor.  `sections` maps flat indices
    back to named tensors for the argmax location.
    """
    a = np.asarray(analytic, dtype=np.float64).ravel()
    n = np.asarray(numeric, dtype=np.float64).ravel()
    if a.size != n.size:
        raise LengthMismatch(f"analytic has {a.size} coordinates, numeric {n.size}")
    abs_err = np.abs(a - n)
    rel_err = abs_err / np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-9)
    k = int(np.argmax(rel_err)) if a.size else 0
    max_rel = float(rel_err[k]) if a.size else 0.0
    max_abs = float(abs_err.max()) if a.size else 0.0
    tensor, index = "params", k
    if sections is not None:
        offset = 0
        for name, size in sections:
            if k < offset + size:
                tensor, index = name, k - offset
                break
            offset += size
    return GradReport(
        max_rel_error=max_rel,
        max_abs_error=max_abs,
        argmax_tensor=tensor,
        argmax_index=index,
        passed=bool(max_rel <= rel_tol or max_abs <= abs_floor),
        rel_tol=rel_tol,
        abs_floor=abs_floor,
    )


# -- random instances -------------------------------------------------------

# Instances steer clear of two intentional non-smooth spots: the cosine
# clamp (its derivative is zero by design) and the target-margin overflow
# kink at theta_y + m = pi.
_COS_GUARD = 1e-4
_KINK_GUARD = 1e-3


def _target_margin_terms(cfg: MarginConfig) -> tuple[float, float] | None:
    if cfg.variant == "aml":
        return cfg.m1_mult, cfg.m2_add
    if cfg.variant == "rarc":
        return 1.0, cfg.m_split_1
    if cfg.variant.startswith("interface"):
        return 1.0, cfg.m
    return None


def random_instance(
    seed: int,
    cfg: MarginConfig,
    max_n: int = 4,
    max_c: int = 5,
    max_d: int = 6,
):
    """Seeded (embeddings, weights, labels) clear of clamp and kink regions."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    c = int(rng.integers(2, max_c + 1))
    d = int(rng.integers(2, max_d + 1))
    kink = _target_margin_terms(cfg)
    for _ in range(1000):
        emb = normalize_rows(rng.standard_normal((n, d)))
        wts = normalize_rows(rng.standard_normal((c, d)))
        labels = rng.integers(0, c, size=n)
        cos = emb @ wts.T
        if np.max(np.abs(cos)) > 1.0 - _COS_GUARD:
            continue
        wcos = wts @ wts.T
        off = ~np.eye(c, dtype=bool)
        if np.max(np.abs(wcos[off])) > 1.0 - _COS_GUARD:
            continue
        if kink is not None:
            m1, m2 = kink
            theta_y = np.arccos(cos[np.arange(n), labels])
            if np.any(np.abs(m1 * theta_y + m2 - math.pi) < _KINK_GUARD):
                continue
        return emb, wts, labels
    raise RuntimeError("could not sample an instance away from clamp/kink regions")


_AML_PRESETS = ((1.0, 0.5, 0.0), (1.0, 0.0, 0.35), (1.35, 0.0, 0.0), (1.2, 0.3, 0.1))
_RARC_SPLITS = ((0.5, 0.0), (0.4, 0.1), (0.3, 0.2), (0.2, 0.3))


def suite_config(variant: str, mode: str, seed: int, s: float = 4.0) -> MarginConfig:
    """Per-seed configuration cycling through the standard margin forms.

    The modest scale keeps softmax away from saturation, where whole rows
    of the gradient vanish and relative error against finite differences
    becomes meaningless.
    """
    if variant == "softmax":
        cfg = MarginConfig.softmax(s=s)
    elif variant == "aml":
        m1, m2, m3 = _AML_PRESETS[seed % len(_AML_PRESETS)]
        cfg = MarginConfig(variant="aml", s=s, m1_mult=m1, m2_add=m2, m3_sub=m3)
    elif variant == "rarc":
        s1, s2 = _RARC_SPLITS[seed % len(_RARC_SPLITS)]
        cfg = MarginConfig.rarc(s1, s2, s=s)
    elif variant == "interface-cid-ct":
        cfg = MarginConfig.interface_cid_ct(s=s)
    elif variant == "interface-did-ct":
        cfg = MarginConfig.interface_did_ct(s=s)
    elif variant == "interface-did-dt":
        cfg = MarginConfig.interface_did_dt(s=s)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    cfg.gradient_mode = mode
    return cfg


def check_instance(
    cfg: MarginConfig,
    emb: np.ndarray,
    wts: np.ndarray,
    labels: np.ndarray,
    h: float = STEP,
    rel_tol: float = REL_TOL,
) -> GradReport:
    """Compare analytic gradients against central differences at one point."""
    res = loss_and_grad(EmbeddingBatch(emb, labels), ClassWeights(wts), cfg)
    analytic = np.concatenate([res.grad_embeddings.ravel(), res.grad_weights.ravel()])

    frozen = None
    if cfg.gradient_mode == "frozen":
        frozen = margins_at(emb, wts, labels, cfg)

    ne, nw = emb.size, wts.size

    def objective(flat: np.ndarray) -> float:
        e = flat[:ne].reshape(emb.shape)
        w = flat[ne:].reshape(wts.shape)
        return loss_value(e, w, labels, cfg, frozen_margins=frozen)

    point = np.concatenate([emb.ravel(), wts.ravel()])
    numeric = finite_diff(objective, point, h)
    return compare(
        analytic,
        numeric,
        rel_tol=rel_tol,
        sections=(("embeddings", ne), ("weights", nw)),
    )


@dataclass
class SuiteRow:
    variant: str
    mode: str
    instances: int
    failures: int
    max_rel_error: float
    max_abs_error: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


def run_suite(
    variants: Sequence[str] = VARIANTS,
    modes: Sequence[str] = GRADIENT_MODES,
    seeds: Sequence[int] = tuple(range(100)),
    h: float = STEP,
    rel_tol: float = REL_TOL,
    s: float = 4.0,
) -> list[SuiteRow]:
    """Run the full certification grid; one summary row per variant x mode."""
    rows = []
    for variant in variants:
        for mode in modes:
            failures = 0
            worst_rel = 0.0
            worst_abs = 0.0
            for seed in seeds:
                cfg = suite_config(variant, mode, seed, s=s)
                emb, wts, labels = random_instance(seed, cfg)
                report = check_instance(cfg, emb, wts, labels, h=h, rel_tol=rel_tol)
                if not report.passed:
                    failures += 1
                worst_rel = max(worst_rel, report.max_rel_error)
                worst_abs = max(worst_abs, report.max_abs_error)
            rows.append(
                SuiteRow(
                    variant=variant,
                    mode=mode,
                    instances=len(list(seeds)),
                    failures=failures,
                    max_rel_error=worst_rel,
                    max_abs_error=worst_abs,
                )
            )
    return rows
