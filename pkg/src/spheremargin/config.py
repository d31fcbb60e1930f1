"""Run configuration: a flat key-value file with dotted section prefixes.

Example::

    # comments and blank lines are ignored
    loss.variant = interface-cid-ct
    loss.m = 0.5
    data.classes = 8
    trainer.seed = 1

Unknown keys are rejected so an archived config always means what it says;
every run writes its resolved configuration next to its outputs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields

from .data import SphereMixtureSpec
from .errors import ConfigInvalid
from .losses import MarginConfig

LOSS_PRESETS = (
    "softmax",
    "aml",
    "arcface",
    "cosface",
    "sphereface",
    "rarc",
    "interface-cid-ct",
    "interface-did-ct",
    "interface-did-dt",
)

# config-file name -> MarginConfig attribute
_LOSS_FIELD_MAP = {
    "s": "s",
    "m": "m",
    "m1": "m1_mult",
    "m2": "m2_add",
    "m3": "m3_sub",
    "split1": "m_split_1",
    "split2": "m_split_2",
    "alpha": "alpha",
    "a": "a",
    "b": "b",
    "fixed_d_inter": "fixed_d_inter",
    "gradient_mode": "gradient_mode",
}


def build_margin_config(variant: str, overrides: dict | None = None) -> MarginConfig:
    """MarginConfig from a preset name plus config-file style overrides.

    `arcface`, `cosface` and `sphereface` are shorthands for the unified
    fixed-margin variant with the matching parameter filled from `m`
    (or `m1` for the multiplicative form).
    """
    ov = dict(overrides or {})
    if variant == "arcface":
        cfg = MarginConfig.arcface(m=float(ov.pop("m", 0.5)), s=float(ov.pop("s", 64.0)))
    elif variant == "cosface":
        cfg = MarginConfig.cosface(m=float(ov.pop("m", 0.35)), s=float(ov.pop("s", 64.0)))
    elif variant == "sphereface":
        cfg = MarginConfig.sphereface(m1=float(ov.pop("m1", 1.35)), s=float(ov.pop("s", 64.0)))
    elif variant == "rarc":
        cfg = MarginConfig.rarc(
            float(ov.pop("split1", 0.5)), float(ov.pop("split2", 0.0)), s=float(ov.pop("s", 64.0))
        )
    elif variant == "softmax":
        cfg = MarginConfig.softmax(s=float(ov.pop("s", 1.0)))
    elif variant == "interface-cid-ct":
        cfg = MarginConfig.interface_cid_ct()
    elif variant == "interface-did-ct":
        cfg = MarginConfig.interface_did_ct()
    elif variant == "interface-did-dt":
        cfg = MarginConfig.interface_did_dt()
    elif variant == "aml":
        cfg = MarginConfig(variant="aml")
    else:
        raise ConfigInvalid(f"unknown loss preset {variant!r}; expected one of {LOSS_PRESETS}")
    for key, value in ov.items():
        attr = _LOSS_FIELD_MAP.get(key)
        if attr is None:
            raise ConfigInvalid(f"unknown loss key {key!r}")
        setattr(cfg, attr, value if key == "gradient_mode" else float(value))
    return cfg.validate()


@dataclass
class TrainerConfig:
    # Desk-scale defaults: the full-scale recipe (lr 0.1, step decays at
    # 60%/85% of ~300k iterations) oscillates badly on the 800-sample toy,
    # so the toy runs use a gentler lr with earlier decays.
    epochs: int = 80
    batch_size: int = 64
    base_lr: float = 0.02
    momentum: float = 0.9
    weight_decay: float = 5e-4
    milestone_fracs: tuple[float, ...] = (0.4, 0.7)
    decay_factor: float = 0.1
    seed: int = 0
    model: str = "table"
    hidden: int = 16

    def validate(self) -> "TrainerConfig":
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigInvalid("epochs and batch_size must be >= 1")
        if self.model not in ("table", "mlp"):
            raise ConfigInvalid(f"trainer.model must be 'table' or 'mlp', got {self.model!r}")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigInvalid("momentum must lie in [0, 1)")
        if self.weight_decay < 0 or self.base_lr <= 0:
            raise ConfigInvalid("need weight_decay >= 0 and base_lr > 0")
        return self


@dataclass
class EvalConfig:
    far_levels: tuple[float, ...] = (0.1, 0.01, 0.001)
    folds: int = 10
    pairs_per_kind: int = 300
    sigmas: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3, 0.4)
    seed: int = 1234

    def validate(self) -> "EvalConfig":
        if any(not 0 < f <= 1 for f in self.far_levels):
            raise ConfigInvalid("eval.far_levels must lie in (0, 1]")
        if self.folds < 2 or self.pairs_per_kind < 1:
            raise ConfigInvalid("need folds >= 2 and pairs_per_kind >= 1")
        if any(s < 0 for s in self.sigmas):
            raise ConfigInvalid("eval.sigmas must be >= 0")
        return self


@dataclass
class RunConfig:
    loss: MarginConfig = field(default_factory=lambda: MarginConfig.arcface())
    data: SphereMixtureSpec = field(
        default_factory=lambda: SphereMixtureSpec(
            num_classes=8, dim=2, samples_per_class=100, noise_sigma=0.2, seed=0,
            uniform_2d_centers=True,
        )
    )
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    output_dir: str = "runs/out"


_DATA_KEYS = {
    "classes": ("num_classes", int),
    "dim": ("dim", int),
    "per_class": ("samples_per_class", int),
    "sigma": ("noise_sigma", float),
    "seed": ("seed", int),
    "uniform_centers": ("uniform_2d_centers", bool),
}

_TRAINER_KEYS = {
    "epochs": int,
    "batch_size": int,
    "base_lr": float,
    "momentum": float,
    "weight_decay": float,
    "milestone_fracs": "float_list",
    "decay_factor": float,
    "seed": int,
    "model": str,
    "hidden": int,
}

_EVAL_KEYS = {
    "far_levels": "float_list",
    "folds": int,
    "pairs_per_kind": int,
    "sigmas": "float_list",
    "seed": int,
}


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ConfigInvalid(f"{key}: expected a boolean, got {raw!r}")


def _convert(raw: str, kind, key: str):
    try:
        if kind == "float_list":
            return tuple(float(v) for v in raw.split(","))
        if kind is bool:
            return _parse_bool(raw, key)
        return kind(raw)
    except ValueError as exc:
        raise ConfigInvalid(f"{key}: cannot parse {raw!r} ({exc})") from exc


def parse_config_text(text: str) -> RunConfig:
    items: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigInvalid(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if key in items:
            raise ConfigInvalid(f"line {lineno}: duplicate key {key!r}")
        items[key] = value.strip()

    loss_items: dict[str, str] = {}
    data_kwargs: dict = {}
    trainer = TrainerConfig()
    eval_cfg = EvalConfig()
    output_dir = RunConfig().output_dir
    variant = "arcface"

    for key, raw in items.items():
        if key == "output.dir":
            output_dir = raw
            continue
        if "." not in key:
            raise ConfigInvalid(f"unknown key {key!r} (keys are section.name)")
        section, name = key.split(".", 1)
        if section == "loss":
            if name == "variant":
                variant = raw
            elif name in _LOSS_FIELD_MAP:
                loss_items[name] = raw if name == "gradient_mode" else _convert(raw, float, key)
            else:
                raise ConfigInvalid(f"unknown key {key!r}")
        elif section == "data":
            if name not in _DATA_KEYS:
                raise ConfigInvalid(f"unknown key {key!r}")
            attr, kind = _DATA_KEYS[name]
            data_kwargs[attr] = _convert(raw, kind, key)
        elif section == "trainer":
            if name not in _TRAINER_KEYS:
                raise ConfigInvalid(f"unknown key {key!r}")
            setattr(trainer, name, _convert(raw, _TRAINER_KEYS[name], key))
        elif section == "eval":
            if name not in _EVAL_KEYS:
                raise ConfigInvalid(f"unknown key {key!r}")
            setattr(eval_cfg, name, _convert(raw, _EVAL_KEYS[name], key))
        else:
            raise ConfigInvalid(f"unknown key {key!r}")

    loss = build_margin_config(variant, loss_items)
    base = RunConfig()
    spec_kwargs = {
        "num_classes": base.data.num_classes,
        "dim": base.data.dim,
        "samples_per_class": base.data.samples_per_class,
        "noise_sigma": base.data.noise_sigma,
        "seed": base.data.seed,
        "uniform_2d_centers": base.data.uniform_2d_centers,
    }
    spec_kwargs.update(data_kwargs)
    if spec_kwargs["dim"] != 2 and "uniform_2d_centers" not in data_kwargs:
        spec_kwargs["uniform_2d_centers"] = False
    data = SphereMixtureSpec(**spec_kwargs)
    return RunConfig(
        loss=loss,
        data=data,
        trainer=trainer.validate(),
        eval=eval_cfg.validate(),
        output_dir=output_dir,
    )


def load_config(path) -> RunConfig:
    if not os.path.exists(path):
        raise ConfigInvalid(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def _loss_lines(cfg: MarginConfig) -> list[str]:
    inverse = {attr: name for name, attr in _LOSS_FIELD_MAP.items()}
    lines = [f"loss.variant = {cfg.variant}"]
    for f in fields(cfg):
        if f.name == "variant":
            continue
        lines.append(f"loss.{inverse[f.name]} = {getattr(cfg, f.name)}")
    return lines


def resolved_config_text(cfg: RunConfig) -> str:
    """Canonical re-parsable dump of a RunConfig (full float precision)."""
    lines = _loss_lines(cfg.loss)
    d = cfg.data
    lines += [
        f"data.classes = {d.num_classes}",
        f"data.dim = {d.dim}",
        f"data.per_class = {d.samples_per_class}",
        f"data.sigma = {d.noise_sigma}",
        f"data.seed = {d.seed}",
        f"data.uniform_centers = {str(d.uniform_2d_centers).lower()}",
    ]
    t = cfg.trainer
    lines += [
        f"trainer.epochs = {t.epochs}",
        f"trainer.batch_size = {t.batch_size}",
        f"trainer.base_lr = {t.base_lr}",
        f"trainer.momentum = {t.momentum}",
        f"trainer.weight_decay = {t.weight_decay}",
        "trainer.milestone_fracs = " + ",".join(str(v) for v in t.milestone_fracs),
        f"trainer.decay_factor = {t.decay_factor}",
        f"trainer.seed = {t.seed}",
        f"trainer.model = {t.model}",
        f"trainer.hidden = {t.hidden}",
    ]
    e = cfg.eval
    lines += [
        "eval.far_levels = " + ",".join(str(v) for v in e.far_levels),
        f"eval.folds = {e.folds}",
        f"eval.pairs_per_kind = {e.pairs_per_kind}",
        "eval.sigmas = " + ",".join(str(v) for v in e.sigmas),
        f"eval.seed = {e.seed}",
        f"output.dir = {cfg.output_dir}",
    ]
    return "\n".join(sorted(lines)) + "\n"
