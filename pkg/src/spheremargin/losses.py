"""The angular-margin softmax loss family.

All variants share one recipe: compute cosines between unit embeddings and
unit class centers, warp the target (and possibly non-target) cosines with
a margin, scale by s, and take softmax cross-entropy.

Variants:

* ``softmax`` - no margin, plain cross-entropy on scaled cosines.
* ``aml`` - unified fixed-margin form ``cos(m1*theta_y + m2) - m3``
  (multiplicative, additive-angle, and additive-cosine margins in one).
* ``rarc`` - the additive-angle margin m split across both sides of the
  decision boundary: target ``cos(theta_y + m1)``, non-target
  ``cos(theta_j - m2)`` with ``m1 + m2 = m``.
* ``interface-*`` - per-class dynamic non-target margins driven by the
  sample-to-center / inter-class angle ratio ``gamma = theta_y / d_inter``:
  non-target ``cos(theta_j - f)`` with ``f = alpha*(exp(-gamma) - exp(-t))``
  and threshold ``t = a + b/d_inter``.  ``cid`` variants use a fixed
  inter-class distance, ``did`` variants measure it from the current
  weights; ``ct``/``dt`` is a constant (b = 0) vs distance-driven threshold.

Gradients are exact analytic derivatives with respect to the
pre-normalization embeddings and weights.  ``frozen`` mode treats the
dynamic margins (and the inter-class distances behind them) as constants
of the forward pass; ``full`` mode differentiates through them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigInvalid,
    DegenerateCenter,
    DimensionMismatch,
    SplitMismatch,
)
from .geometry import COS_CLAMP, ClassWeights, EmbeddingBatch

VARIANTS = (
    "softmax",
    "aml",
    "rarc",
    "interface-cid-ct",
    "interface-did-ct",
    "interface-did-dt",
)
GRADIENT_MODES = ("frozen", "full")

# An inter-class angle below this means two centers coincide for all
# practical purposes; gamma and t would blow up.
DEGENERATE_ANGLE = 1e-6


@dataclass
class MarginConfig:
    """Loss-variant selector plus every scalar hyperparameter.

    Only the fields relevant to ``variant`` are consumed; the rest are
    ignored.  Use the factory classmethods for the standard presets.
    """

    variant: str = "softmax"
    s: float = 64.0
    # unified fixed-margin parameters (variant "aml")
    m1_mult: float = 1.0
    m2_add: float = 0.0
    m3_sub: float = 0.0
    # split margin (variant "rarc"); must satisfy m_split_1 + m_split_2 = m
    m_split_1: float = 0.5
    m_split_2: float = 0.0
    # additive target margin for the interface variants
    m: float = 0.5
    # dynamic-margin shape: f = alpha * (exp(-gamma) - exp(-t)), t = a + b/d_inter
    alpha: float = 0.1
    a: float = 0.2
    b: float = 0.0
    # inter-class distance used by the cid variants
    fixed_d_inter: float = math.pi / 2
    gradient_mode: str = "frozen"

    def validate(self) -> "MarginConfig":
        if self.variant not in VARIANTS:
            raise ConfigInvalid(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.gradient_mode not in GRADIENT_MODES:
            raise ConfigInvalid(f"unknown gradient_mode {self.gradient_mode!r}")
        if not self.s > 0:
            raise ConfigInvalid(f"scale s must be positive, got {self.s}")
        if self.variant == "aml":
            if self.m1_mult < 1.0:
                raise ConfigInvalid(f"m1_mult must be >= 1, got {self.m1_mult}")
            if not 0.0 <= self.m2_add < 1.0 or not 0.0 <= self.m3_sub < 1.0:
                raise ConfigInvalid("m2_add and m3_sub must lie in [0, 1)")
        if self.variant == "rarc":
            if abs(self.m_split_1 + self.m_split_2 - self.m) > 1e-12:
                raise SplitMismatch(
                    f"m_split_1 + m_split_2 = {self.m_split_1 + self.m_split_2} != m = {self.m}"
                )
        if self.variant.startswith("interface"):
            if not 0.0 <= self.m < math.pi:
                raise ConfigInvalid(f"interface margin m must be in [0, pi), got {self.m}")
            if self.alpha < 0 or self.a < 0 or self.b < 0:
                raise ConfigInvalid("alpha, a and b must be non-negative")
            if not 0.0 < self.fixed_d_inter <= math.pi:
                raise ConfigInvalid(
                    f"fixed_d_inter must be in (0, pi], got {self.fixed_d_inter}"
                )
        return self

    # -- presets ---------------------------------------------------------

    @classmethod
    def softmax(cls, s: float = 1.0) -> "MarginConfig":
        return cls(variant="softmax", s=s)

    @classmethod
    def arcface(cls, m: float = 0.5, s: float = 64.0) -> "MarginConfig":
        return cls(variant="aml", s=s, m1_mult=1.0, m2_add=m, m3_sub=0.0, m=m)

    @classmethod
    def cosface(cls, m: float = 0.35, s: float = 64.0) -> "MarginConfig":
        return cls(variant="aml", s=s, m1_mult=1.0, m2_add=0.0, m3_sub=m, m=m)

    @classmethod
    def sphereface(cls, m1: float = 1.35, s: float = 64.0) -> "MarginConfig":
        return cls(variant="aml", s=s, m1_mult=m1, m2_add=0.0, m3_sub=0.0)

    @classmethod
    def rarc(cls, m_split_1: float, m_split_2: float, s: float = 64.0) -> "MarginConfig":
        return cls(
            variant="rarc",
            s=s,
            m_split_1=m_split_1,
            m_split_2=m_split_2,
            m=m_split_1 + m_split_2,
        )

    @classmethod
    def interface_cid_ct(
        cls,
        m: float = 0.5,
        s: float = 64.0,
        fixed_d_inter: float = math.pi / 2,
        a: float = 0.2,
        b: float = 0.0,
        alpha: float = 0.1,
        gradient_mode: str = "frozen",
    ) -> "MarginConfig":
        return cls(
            variant="interface-cid-ct",
            s=s,
            m=m,
            fixed_d_inter=fixed_d_inter,
            a=a,
            b=b,
            alpha=alpha,
            gradient_mode=gradient_mode,
        )

    @classmethod
    def interface_did_ct(
        cls,
        m: float = 0.5,
        s: float = 64.0,
        a: float = 0.3,
        b: float = 0.0,
        alpha: float = 0.1,
        gradient_mode: str = "frozen",
    ) -> "MarginConfig":
        return cls(
            variant="interface-did-ct",
            s=s,
            m=m,
            a=a,
            b=b,
            alpha=alpha,
            gradient_mode=gradient_mode,
        )

    @classmethod
    def interface_did_dt(
        cls,
        m: float = 0.5,
        s: float = 64.0,
        a: float = 0.0,
        b: float = 10.0,
        alpha: float = 0.1,
        gradient_mode: str = "frozen",
    ) -> "MarginConfig":
        return cls(
            variant="interface-did-dt",
            s=s,
            m=m,
            a=a,
            b=b,
            alpha=alpha,
            gradient_mode=gradient_mode,
        )


@dataclass
class LossResult:
    loss: float
    modified_logits: np.ndarray  # post-margin, pre-scale cosines, N x C
    grad_embeddings: np.ndarray  # N x d, w.r.t. pre-normalization embeddings
    grad_weights: np.ndarray  # C x d, w.r.t. pre-normalization weights


# -- scalar margin building blocks ---------------------------------------


def sir_gamma(theta_target: float, d_inter_row) -> np.ndarray:
    """Sample-to-center / inter-class angle ratio for each non-target class.

    Raises DegenerateCenter when any inter-class angle is below 1e-6.
    """
    d = np.asarray(d_inter_row, dtype=np.float64)
    if np.any(d < DEGENERATE_ANGLE):
        raise DegenerateCenter(
            f"inter-class angle {d.min():.3e} below {DEGENERATE_ANGLE:.0e}"
        )
    return theta_target / d


def threshold_t(d_inter, a: float, b: float):
    """Threshold a + b / d_inter; the margin flips sign where gamma crosses it."""
    d = np.asarray(d_inter, dtype=np.float64)
    if np.any(d < DEGENERATE_ANGLE):
        raise DegenerateCenter(
            f"inter-class angle {d.min():.3e} below {DEGENERATE_ANGLE:.0e}"
        )
    out = a + b / d
    return float(out) if np.ndim(d_inter) == 0 else out


def margin_f(gamma, t, alpha: float):
    """Dynamic margin alpha * (exp(-gamma) - exp(-t)).

    Positive when gamma < t (tight sample: push non-target classes harder),
    negative when gamma > t.
    """
    out = alpha * (np.exp(-np.asarray(gamma, dtype=np.float64)) - np.exp(-np.asarray(t, dtype=np.float64)))
    return float(out) if np.ndim(gamma) == 0 and np.ndim(t) == 0 else out


# -- logit transforms ------------------------------------------------------


def _sin_from_cos(c: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(1.0 - c * c, 0.0))


def _additive_target(c, sin_t, m: float):
    """cos(theta + m) for target cosines, with the overflow fallback.

    Computed via the angle-addition identity so that m = 0 returns the
    input bitwise.  Past theta + m = pi the cosine turns non-monotone, so
    the linear extension -1 - (theta + m - pi)*sin(m) is substituted,
    keeping the logit decreasing in theta.  Returns (value, d value/d c).
    """
    cos_m = math.cos(m)
    sin_m = math.sin(m)
    val = c * cos_m - sin_t * sin_m
    with np.errstate(divide="ignore"):
        dc = cos_m + c * sin_m / sin_t
    if m > 0.0:
        overflow = c < math.cos(math.pi - m)
        if np.any(overflow):
            theta = np.arccos(np.clip(c, -1.0, 1.0))
            val = np.where(overflow, -1.0 - (theta + m - math.pi) * sin_m, val)
            with np.errstate(divide="ignore"):
                dc = np.where(overflow, sin_m / sin_t, dc)
    return val, dc


def _aml_target_general(c, sin_t, m1: float, m2: float):
    """cos(m1*theta + m2) with the same linear fallback past pi."""
    theta = np.arccos(np.clip(c, -1.0, 1.0))
    u = m1 * theta + m2
    sin_m2 = math.sin(m2)
    overflow = u > math.pi
    val = np.where(overflow, -1.0 - (u - math.pi) * sin_m2, np.cos(u))
    with np.errstate(divide="ignore"):
        dc = np.where(overflow, m1 * sin_m2, m1 * np.sin(u)) / sin_t
    return val, dc


def _additive_nontarget(c, sin_t, f):
    """cos(theta - f) for non-target cosines via the angle identity.

    No clamp on theta - f: cos is even and smooth through 0 (and mirrors
    at pi), and |f| stays small for any sane alpha.  Returns
    (value, d value/d c at fixed f, d value/d f).
    """
    cos_f = np.cos(f)
    sin_f = np.sin(f)
    val = c * cos_f + sin_t * sin_f
    with np.errstate(divide="ignore", invalid="ignore"):
        dc = cos_f - c * sin_f / sin_t
    df = sin_t * cos_f - c * sin_f  # = sin(theta - f)
    return val, dc, df


def aml_target_logit(cos_theta, m1_mult: float, m2_add: float, m3_sub: float):
    """Unified fixed-margin target logit cos(m1*theta + m2) - m3."""
    c = np.asarray(cos_theta, dtype=np.float64)
    sin_t = _sin_from_cos(c)
    if m1_mult == 1.0:
        val, _ = _additive_target(c, sin_t, m2_add)
    else:
        val, _ = _aml_target_general(c, sin_t, m1_mult, m2_add)
    out = val - m3_sub
    return float(out) if np.ndim(cos_theta) == 0 else out


def _as_logit_inputs(cosines, labels):
    c = np.asarray(cosines, dtype=np.float64)
    lab = np.asarray(labels, dtype=np.int64)
    if c.ndim != 2:
        raise DimensionMismatch(f"cosines must be N x C, got shape {c.shape}")
    if lab.shape != (c.shape[0],):
        raise DimensionMismatch(f"labels shape {lab.shape} does not match N={c.shape[0]}")
    if lab.size and (lab.min() < 0 or lab.max() >= c.shape[1]):
        raise DimensionMismatch("labels must lie in [0, C)")
    return c, lab


def aml_logits(cosines, labels, cfg: MarginConfig) -> np.ndarray:
    """Scaled logits with the unified fixed margin applied to target entries."""
    c, lab = _as_logit_inputs(cosines, labels)
    out = c.copy()
    rows = np.arange(c.shape[0])
    out[rows, lab] = aml_target_logit(c[rows, lab], cfg.m1_mult, cfg.m2_add, cfg.m3_sub)
    return cfg.s * out


def rarc_logits(
    cosines,
    labels,
    m_split_1: float,
    m_split_2: float,
    s: float,
    total_margin: float | None = None,
) -> np.ndarray:
    """Scaled logits with the margin split across both boundary sides.

    Target entries become cos(theta_y + m_split_1), non-target entries
    cos(theta_j - m_split_2).  When total_margin is given, the split must
    sum to it within 1e-12.
    """
    if total_margin is not None and abs(m_split_1 + m_split_2 - total_margin) > 1e-12:
        raise SplitMismatch(
            f"{m_split_1} + {m_split_2} != total margin {total_margin}"
        )
    c, lab = _as_logit_inputs(cosines, labels)
    sin_t = _sin_from_cos(c)
    out, _, _ = _additive_nontarget(c, sin_t, m_split_2)
    rows = np.arange(c.shape[0])
    cy = c[rows, lab]
    ty, _ = _additive_target(cy, sin_t[rows, lab], m_split_1)
    out[rows, lab] = ty
    return s * out


def _interface_d_matrix(labels, num_classes, cfg, weights_matrix):
    """Per-(sample, class) inter-class distances D[i, j] = d(y_i, j).

    For cid variants this is the configured constant; for did variants it
    is read off the current inter-center angle matrix.  The target column
    is set to 1.0 (unused, but keeps gamma = theta/D finite there).
    """
    n = labels.shape[0]
    rows = np.arange(n)
    if cfg.variant == "interface-cid-ct":
        d = np.full((n, num_classes), cfg.fixed_d_inter)
        return d, None, None
    kappa_raw = weights_matrix @ weights_matrix.T
    kappa = np.clip(kappa_raw, -1.0 + COS_CLAMP, 1.0 - COS_CLAMP)
    d_full = np.arccos(kappa)
    np.fill_diagonal(d_full, 0.0)
    d = d_full[labels, :].copy()
    d[rows, labels] = 1.0
    off = np.ones_like(d, dtype=bool)
    off[rows, labels] = False
    if np.any(d[off] < DEGENERATE_ANGLE):
        raise DegenerateCenter(
            f"inter-class angle {d[off].min():.3e} below {DEGENERATE_ANGLE:.0e}"
        )
    kappa_active = (kappa_raw > -1.0 + COS_CLAMP) & (kappa_raw < 1.0 - COS_CLAMP)
    return d, kappa, kappa_active


def _interface_margin_matrix(theta_y, labels, num_classes, cfg, weights_matrix):
    """Margin matrix F (zero in the target column) plus gradient caches."""
    d, kappa, kappa_active = _interface_d_matrix(labels, num_classes, cfg, weights_matrix)
    gamma = theta_y[:, None] / d
    t = cfg.a + cfg.b / d
    exp_ng = np.exp(-gamma)
    exp_nt = np.exp(-t)
    f = cfg.alpha * (exp_ng - exp_nt)
    rows = np.arange(labels.shape[0])
    f[rows, labels] = 0.0
    return f, d, exp_ng, exp_nt, gamma, kappa, kappa_active


def interface_logits(cosines, labels, weights: ClassWeights, cfg: MarginConfig):
    """Scaled dynamic-margin logits plus the applied margin matrix.

    Target entries carry the constant margin m; each non-target entry j
    carries f(gamma_ij, t_ij).  Returns (s * modified cosines, margins).
    """
    if not cfg.variant.startswith("interface"):
        raise ConfigInvalid(f"interface_logits called with variant {cfg.variant!r}")
    c, lab = _as_logit_inputs(cosines, labels)
    rows = np.arange(c.shape[0])
    sin_t = _sin_from_cos(c)
    theta_y = np.arccos(np.clip(c[rows, lab], -1.0, 1.0))
    f, _, _, _, _, _, _ = _interface_margin_matrix(
        theta_y, lab, c.shape[1], cfg, weights.matrix
    )
    out, _, _ = _additive_nontarget(c, sin_t, f)
    ty, _ = _additive_target(c[rows, lab], sin_t[rows, lab], cfg.m)
    out[rows, lab] = ty
    margins = f.copy()
    margins[rows, lab] = cfg.m
    return cfg.s * out, margins


def cross_entropy(scaled_logits, labels) -> float:
    """Mean negative log-softmax of the target entries (max-stabilized)."""
    z, lab = _as_logit_inputs(scaled_logits, labels)
    zmax = z.max(axis=1, keepdims=True)
    lse = zmax[:, 0] + np.log(np.exp(z - zmax).sum(axis=1))
    rows = np.arange(z.shape[0])
    return float(np.mean(lse - z[rows, lab]))


# -- loss + analytic gradients ---------------------------------------------


def _loss_core(
    embeddings,
    weights,
    labels,
    cfg: MarginConfig,
    frozen_margins: np.ndarray | None = None,
    compute_grad: bool = True,
):
    """Forward pass and (optionally) analytic gradients on raw arrays.

    Rows are normalized internally, so gradients are taken with respect
    to the arrays as given (chain rule through the normalization).  When
    frozen_margins is passed, the dynamic margin matrix is not recomputed;
    this is the surrogate objective that frozen-mode gradients are
    derivatives of.
    """
    emb = np.asarray(embeddings, dtype=np.float64)
    wts = np.asarray(weights, dtype=np.float64)
    lab = np.asarray(labels, dtype=np.int64)
    if emb.ndim != 2 or wts.ndim != 2 or emb.shape[1] != wts.shape[1]:
        raise DimensionMismatch(
            f"embeddings {emb.shape} and weights {wts.shape} are inconsistent"
        )
    n, _ = emb.shape
    num_classes = wts.shape[0]
    if lab.shape != (n,):
        raise DimensionMismatch(f"labels shape {lab.shape} does not match N={n}")
    if lab.size and (lab.min() < 0 or lab.max() >= num_classes):
        raise DimensionMismatch("labels must lie in [0, C)")

    e_norms = np.linalg.norm(emb, axis=1)
    w_norms = np.linalg.norm(wts, axis=1)
    x = emb / e_norms[:, None]
    w = wts / w_norms[:, None]

    raw_cos = x @ w.T
    c = np.clip(raw_cos, -1.0 + COS_CLAMP, 1.0 - COS_CLAMP)
    active = (raw_cos > -1.0 + COS_CLAMP) & (raw_cos < 1.0 - COS_CLAMP)
    sin_t = _sin_from_cos(c)
    rows = np.arange(n)
    cy = c[rows, lab]
    sy = sin_t[rows, lab]

    is_interface = cfg.variant.startswith("interface")
    caches = None
    df_nt = None
    if cfg.variant == "softmax":
        modified = c.copy()
        d_mod_dc = np.ones_like(c)
    elif cfg.variant == "aml":
        modified = c.copy()
        d_mod_dc = np.ones_like(c)
        if cfg.m1_mult == 1.0:
            tv, td = _additive_target(cy, sy, cfg.m2_add)
        else:
            tv, td = _aml_target_general(cy, sy, cfg.m1_mult, cfg.m2_add)
        modified[rows, lab] = tv - cfg.m3_sub
        d_mod_dc[rows, lab] = td
    elif cfg.variant == "rarc":
        if abs(cfg.m_split_1 + cfg.m_split_2 - cfg.m) > 1e-12:
            raise SplitMismatch(
                f"{cfg.m_split_1} + {cfg.m_split_2} != total margin {cfg.m}"
            )
        modified, d_mod_dc, _ = _additive_nontarget(c, sin_t, cfg.m_split_2)
        tv, td = _additive_target(cy, sy, cfg.m_split_1)
        modified[rows, lab] = tv
        d_mod_dc[rows, lab] = td
    elif is_interface:
        theta_y = np.arccos(np.clip(cy, -1.0, 1.0))
        if frozen_margins is not None:
            f = frozen_margins
        else:
            f, d_mat, exp_ng, exp_nt, gamma, kappa, kappa_active = _interface_margin_matrix(
                theta_y, lab, num_classes, cfg, w
            )
            caches = (d_mat, exp_ng, exp_nt, gamma, kappa, kappa_active)
        modified, d_mod_dc, df_nt = _additive_nontarget(c, sin_t, f)
        tv, td = _additive_target(cy, sy, cfg.m)
        modified[rows, lab] = tv
        d_mod_dc[rows, lab] = td
    else:
        raise ConfigInvalid(f"unknown variant {cfg.variant!r}")

    z = cfg.s * modified
    zmax = z.max(axis=1, keepdims=True)
    ez = np.exp(z - zmax)
    denom = ez.sum(axis=1, keepdims=True)
    loss = float(np.mean(np.log(denom[:, 0]) + zmax[:, 0] - z[rows, lab]))

    if is_interface:
        margins = (f if frozen_margins is None else frozen_margins).copy()
        margins[rows, lab] = cfg.m
    else:
        margins = None

    if not compute_grad:
        return loss, modified, margins, None, None

    p = ez / denom
    q = (cfg.s / n) * p
    q[rows, lab] -= cfg.s / n

    d_loss_dc = q * d_mod_dc

    grad_w_extra = None
    if (
        is_interface
        and cfg.gradient_mode == "full"
        and frozen_margins is None
    ):
        d_mat, exp_ng, exp_nt, gamma, kappa, kappa_active = caches
        d_loss_df = q * df_nt
        d_loss_df[rows, lab] = 0.0
        # f depends on theta_y through gamma = theta_y / D
        d_theta_y = (d_loss_df * (-cfg.alpha * exp_ng / d_mat)).sum(axis=1)
        d_loss_dc[rows, lab] += d_theta_y * (-1.0 / sy)
        if cfg.variant != "interface-cid-ct":
            # f also depends on D through gamma and t = a + b/D
            df_dd = (cfg.alpha / d_mat) * (gamma * exp_ng - (cfg.b / d_mat) * exp_nt)
            per_pair = d_loss_df * df_dd
            g_pair = np.zeros((num_classes, num_classes))
            np.add.at(g_pair, lab, per_pair)
            np.fill_diagonal(g_pair, 0.0)
            with np.errstate(divide="ignore"):
                dd_dkappa = np.where(
                    kappa_active, -1.0 / _sin_from_cos(kappa), 0.0
                )
            g_kappa = g_pair * dd_dkappa
            grad_w_extra = (g_kappa + g_kappa.T) @ w

    d_loss_draw = d_loss_dc * active
    grad_x = d_loss_draw @ w
    grad_w = d_loss_draw.T @ x
    if grad_w_extra is not None:
        grad_w += grad_w_extra

    # chain through row normalization: d(x)/d(e) = (I - x x^T)/||e||
    grad_e = (grad_x - (grad_x * x).sum(axis=1, keepdims=True) * x) / e_norms[:, None]
    grad_v = (grad_w - (grad_w * w).sum(axis=1, keepdims=True) * w) / w_norms[:, None]
    return loss, modified, margins, grad_e, grad_v


def loss_and_grad(batch: EmbeddingBatch, weights: ClassWeights, cfg: MarginConfig) -> LossResult:
    """Loss, modified cosines, and analytic gradients for one batch."""
    cfg.validate()
    loss, modified, _, grad_e, grad_v = _loss_core(
        batch.embeddings, weights.matrix, batch.labels, cfg
    )
    return LossResult(
        loss=loss,
        modified_logits=modified,
        grad_embeddings=grad_e,
        grad_weights=grad_v,
    )


def loss_value(
    embeddings,
    weights,
    labels,
    cfg: MarginConfig,
    frozen_margins: np.ndarray | None = None,
) -> float:
    """Forward-only loss on raw (not necessarily unit) arrays.

    Rows are normalized inside, which makes this the exact objective that
    loss_and_grad differentiates; it is what the finite-difference harness
    perturbs.
    """
    loss, _, _, _, _ = _loss_core(
        embeddings, weights, labels, cfg, frozen_margins=frozen_margins, compute_grad=False
    )
    return loss


def margins_at(embeddings, weights, labels, cfg: MarginConfig) -> np.ndarray | None:
    """Applied margin matrix at a point, exactly as the forward computes it.

    For interface variants: m in target entries, f elsewhere.  Feeding this
    back through loss_value(..., frozen_margins=...) reproduces the frozen
    surrogate objective bitwise.  None for variants without dynamic margins.
    """
    _, _, margins, _, _ = _loss_core(embeddings, weights, labels, cfg, compute_grad=False)
    return margins
