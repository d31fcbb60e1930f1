"""SGD-with-momentum training on the hypersphere, at desk scale.

The model under training is deliberately tiny: either a free per-sample
embedding table (which isolates the loss geometry) or a small two-layer
perceptron.  Emitted embeddings are normalized before the loss; class
weight rows are re-normalized after every optimizer step.  Everything is
deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    ConfigInvalid,
    NonFiniteLoss,
    NotToyShape,
    ShapeMismatch,
    StepOutOfRange,
)
from .geometry import ClassWeights, EmbeddingBatch, normalize_rows
from .losses import MarginConfig, loss_and_grad


@dataclass
class OptimizerState:
    velocity: dict[str, np.ndarray]
    learning_rate: float
    momentum: float = 0.9
    weight_decay: float = 5e-4
    step_count: int = 0


def init_optimizer(
    params: dict[str, np.ndarray],
    learning_rate: float,
    momentum: float = 0.9,
    weight_decay: float = 5e-4,
) -> OptimizerState:
    if learning_rate <= 0:
        raise ConfigInvalid(f"learning_rate must be > 0, got {learning_rate}")
    return OptimizerState(
        velocity={k: np.zeros_like(v) for k, v in params.items()},
        learning_rate=learning_rate,
        momentum=momentum,
        weight_decay=weight_decay,
    )


def sgd_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: OptimizerState,
    unit_row_params: tuple[str, ...] = (),
) -> tuple[dict[str, np.ndarray], OptimizerState]:
    """v <- mu*v + (g + wd*p); p <- p - lr*v; listed params re-normalized row-wise."""
    new_params: dict[str, np.ndarray] = {}
    new_velocity: dict[str, np.ndarray] = {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape or state.velocity[name].shape != p.shape:
            raise ShapeMismatch(f"param {name!r}: shapes {p.shape} vs grad {g.shape}")
        v = state.momentum * state.velocity[name] + (g + state.weight_decay * p)
        p2 = p - state.learning_rate * v
        if name in unit_row_params:
            p2 = normalize_rows(p2)
        new_params[name] = p2
        new_velocity[name] = v
    return new_params, replace(
        state, velocity=new_velocity, step_count=state.step_count + 1
    )


@dataclass(frozen=True)
class Schedule:
    """Step-decay learning-rate schedule: lr / 10 at each milestone."""

    base_lr: float
    milestones: tuple[int, ...]
    total_steps: int
    decay_factor: float = 0.1

    def __post_init__(self):
        ms = tuple(int(m) for m in self.milestones)
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise ConfigInvalid(f"milestones must be strictly ascending, got {ms}")
        if ms and ms[-1] >= self.total_steps:
            raise ConfigInvalid("milestones must all be < total_steps")
        if self.total_steps < 1 or self.base_lr <= 0:
            raise ConfigInvalid("need total_steps >= 1 and base_lr > 0")
        object.__setattr__(self, "milestones", ms)


def lr_at(schedule: Schedule, step: int) -> float:
    """base_lr * decay^(number of milestones <= step)."""
    if not 0 <= step < schedule.total_steps:
        raise StepOutOfRange(f"step {step} outside [0, {schedule.total_steps})")
    decays = sum(1 for m in schedule.milestones if m <= step)
    return schedule.base_lr * schedule.decay_factor**decays


def make_schedule(
    total_steps: int,
    base_lr: float = 0.1,
    milestone_fracs: tuple[float, ...] = (0.6, 0.85),
    decay_factor: float = 0.1,
) -> Schedule:
    ms = tuple(int(f * total_steps) for f in milestone_fracs)
    return Schedule(base_lr=base_lr, milestones=ms, total_steps=total_steps, decay_factor=decay_factor)


# -- toy model ----------------------------------------------------------------


@dataclass
class ToyModel:
    """Learnable sphere-embedding model: a free table or a small MLP.

    ``table``: one learnable row per training sample.  ``mlp``: fixed
    input features mapped through tanh(inputs @ w1 + b1) @ w2 + b2.
    Emitted embeddings are normalized before any loss sees them.
    """

    kind: str
    labels: np.ndarray
    class_weights: np.ndarray
    table: np.ndarray | None = None
    inputs: np.ndarray | None = None
    mlp: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def num_classes(self) -> int:
        return self.class_weights.shape[0]

    @property
    def dim(self) -> int:
        return self.class_weights.shape[1]

    @property
    def num_samples(self) -> int:
        return self.labels.shape[0]

    def raw_embeddings(self, idx=None) -> np.ndarray:
        """Pre-normalization embeddings (with the MLP hidden cache when needed)."""
        if self.kind == "table":
            return self.table if idx is None else self.table[idx]
        x = self.inputs if idx is None else self.inputs[idx]
        hidden = np.tanh(x @ self.mlp["w1"] + self.mlp["b1"])
        return hidden @ self.mlp["w2"] + self.mlp["b2"]

    def unit_embeddings(self, idx=None) -> np.ndarray:
        return normalize_rows(self.raw_embeddings(idx))


def make_toy_model(
    dataset: EmbeddingBatch,
    num_classes: int,
    kind: str = "table",
    seed: int = 0,
    hidden: int = 16,
) -> ToyModel:
    """Model whose weights start at seeded random unit directions.

    The table variant starts at the dataset samples themselves; the MLP
    variant treats the samples as fixed input features.
    """
    rng = np.random.default_rng(seed)
    weights = normalize_rows(rng.standard_normal((num_classes, dataset.dim)))
    if kind == "table":
        return ToyModel(
            kind="table",
            labels=dataset.labels.copy(),
            class_weights=weights,
            table=dataset.embeddings.copy(),
        )
    if kind == "mlp":
        d = dataset.dim
        mlp = {
            "w1": rng.standard_normal((d, hidden)) / math.sqrt(d),
            "b1": np.zeros(hidden),
            "w2": rng.standard_normal((hidden, d)) / math.sqrt(hidden),
            "b2": np.zeros(d),
        }
        return ToyModel(
            kind="mlp",
            labels=dataset.labels.copy(),
            class_weights=weights,
            inputs=dataset.embeddings.copy(),
            mlp=mlp,
        )
    raise ConfigInvalid(f"unknown model kind {kind!r}")


def _model_params(model: ToyModel) -> dict[str, np.ndarray]:
    params = {"weights": model.class_weights}
    if model.kind == "table":
        params["table"] = model.table
    else:
        params.update({f"mlp.{k}": v for k, v in model.mlp.items()})
    return params


def _install_params(model: ToyModel, params: dict[str, np.ndarray]) -> None:
    model.class_weights = params["weights"]
    if model.kind == "table":
        model.table = params["table"]
    else:
        model.mlp = {k.split(".", 1)[1]: v for k, v in params.items() if k.startswith("mlp.")}


def _batch_grads(model: ToyModel, idx: np.ndarray, cfg: MarginConfig):
    """Loss and parameter gradients for one minibatch."""
    raw = model.raw_embeddings(idx)
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    unit = raw / norms
    result = loss_and_grad(
        EmbeddingBatch(unit, model.labels[idx]), ClassWeights(model.class_weights), cfg
    )
    grad_raw = result.grad_embeddings / norms  # chain through the outer normalization
    grads: dict[str, np.ndarray] = {"weights": result.grad_weights}
    if model.kind == "table":
        g = np.zeros_like(model.table)
        g[idx] = grad_raw
        grads["table"] = g
    else:
        x = model.inputs[idx]
        hidden = np.tanh(x @ model.mlp["w1"] + model.mlp["b1"])
        grads["mlp.w2"] = hidden.T @ grad_raw
        grads["mlp.b2"] = grad_raw.sum(axis=0)
        g_hidden = (grad_raw @ model.mlp["w2"].T) * (1.0 - hidden**2)
        grads["mlp.w1"] = x.T @ g_hidden
        grads["mlp.b1"] = g_hidden.sum(axis=0)
    return result.loss, grads


def _epoch_record(model: ToyModel, epoch: int, mean_loss: float) -> dict:
    x = model.unit_embeddings()
    w = normalize_rows(model.class_weights)
    cos_y = np.clip(np.einsum("ij,ij->i", x, w[model.labels]), -1.0, 1.0)
    theta_y = np.arccos(cos_y)
    per_class_std = [
        float(np.std(theta_y[model.labels == j])) for j in range(model.num_classes)
    ]
    gap_std = None
    if model.dim == 2 and model.num_classes >= 2:
        phi = np.sort(np.mod(np.arctan2(w[:, 1], w[:, 0]), 2.0 * math.pi))
        gaps = np.diff(phi, append=phi[0] + 2.0 * math.pi)
        gap_std = float(np.std(gaps))
    return {
        "epoch": epoch,
        "loss": float(mean_loss),
        "mean_target_angle": float(np.mean(theta_y)),
        "gap_std": gap_std,
        "per_class_std": per_class_std,
    }


@dataclass
class TrainResult:
    model: ToyModel
    metrics: list[dict]


def train(
    model: ToyModel,
    cfg: MarginConfig,
    schedule: Schedule,
    epochs: int,
    batch_size: int = 64,
    seed: int = 0,
    momentum: float = 0.9,
    weight_decay: float = 5e-4,
) -> TrainResult:
    """Minibatch SGD with a per-epoch metrics log; deterministic in seed.

    The schedule must cover epochs * ceil(S / batch_size) steps.  Aborts
    with NonFiniteLoss (plus the offending step in the message) if the
    loss leaves the reals.
    """
    cfg.validate()
    n = model.num_samples
    steps_per_epoch = math.ceil(n / batch_size)
    total = epochs * steps_per_epoch
    if total > schedule.total_steps:
        raise StepOutOfRange(
            f"schedule covers {schedule.total_steps} steps but training needs {total}"
        )
    rng = np.random.default_rng(seed)
    params = _model_params(model)
    state = init_optimizer(
        params, lr_at(schedule, 0), momentum=momentum, weight_decay=weight_decay
    )
    metrics: list[dict] = []
    gstep = 0
    for epoch in range(epochs):
        perm = rng.permutation(n)
        losses = []
        for b in range(steps_per_epoch):
            idx = perm[b * batch_size : (b + 1) * batch_size]
            loss, grads = _batch_grads(model, idx, cfg)
            if not math.isfinite(loss):
                raise NonFiniteLoss(f"loss became {loss} at step {gstep}")
            losses.append(loss)
            state.learning_rate = lr_at(schedule, gstep)
            params, state = sgd_step(params, grads, state, unit_row_params=("weights",))
            _install_params(model, params)
            gstep += 1
        metrics.append(_epoch_record(model, epoch, float(np.mean(losses))))
    return TrainResult(model=model, metrics=metrics)


def toy_summary(model: ToyModel) -> dict:
    """Circle-geometry summary for 2-D models.

    Centers are sorted by polar angle; adjacent gaps always sum to 2*pi.
    Per-class angular std is over each sample's angle to its own center,
    indexed by class id.  The boundary margin for an adjacent center pair
    is the gap minus both classes' maximum sample deviation (positive
    means the class supports do not overlap along the circle).
    """
    if model.dim != 2 or model.num_classes < 2:
        raise NotToyShape(
            f"need a 2-D model with >= 2 classes, got d={model.dim}, C={model.num_classes}"
        )
    x = model.unit_embeddings()
    w = normalize_rows(model.class_weights)
    phi = np.mod(np.arctan2(w[:, 1], w[:, 0]), 2.0 * math.pi)
    order = np.argsort(phi, kind="stable")
    sorted_phi = phi[order]
    gaps = np.diff(sorted_phi, append=sorted_phi[0] + 2.0 * math.pi)

    cos_y = np.clip(np.einsum("ij,ij->i", x, w[model.labels]), -1.0, 1.0)
    theta_y = np.arccos(cos_y)
    per_class_std = np.zeros(model.num_classes)
    max_dev = np.zeros(model.num_classes)
    for j in range(model.num_classes):
        mask = model.labels == j
        if mask.any():
            per_class_std[j] = np.std(theta_y[mask])
            max_dev[j] = np.max(theta_y[mask])
    margins = np.array(
        [
            gaps[k] - max_dev[order[k]] - max_dev[order[(k + 1) % len(order)]]
            for k in range(len(order))
        ]
    )
    return {
        "center_order": [int(j) for j in order],
        "center_angles": [float(a) for a in sorted_phi],
        "adjacent_gaps": [float(g) for g in gaps],
        "gap_std": float(np.std(gaps)),
        "per_class_std": [float(v) for v in per_class_std],
        "boundary_margins": [float(v) for v in margins],
    }
