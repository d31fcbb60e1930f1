"""Command-line entry point.

Subcommands: generate, train, gradcheck, eval, sweep, boundary, toy.
Every run is deterministic given its config and seed, writes its resolved
config next to its outputs, and prints numbers with 9 significant digits.
Exit codes: 0 success, 1 validation error, 2 math-verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import gradcheck as gc
from .config import (
    LOSS_PRESETS,
    RunConfig,
    build_margin_config,
    load_config,
    resolved_config_text,
)
from .data import (
    SphereMixtureSpec,
    generate,
    load_batch_csv,
    load_pairs_csv,
    make_pairs,
    save_batch_csv,
    save_pairs_csv,
)
from .errors import BadGrid, ConfigInvalid, SphereMarginError
from .geometry import EmbeddingBatch, normalize_rows
from .losses import (
    GRADIENT_MODES,
    VARIANTS,
    MarginConfig,
    margin_f,
    threshold_t,
    _additive_nontarget,
    _additive_target,
    _aml_target_general,
    _sin_from_cos,
)
from .metrics import (
    board_count,
    kfold_accuracy,
    pair_accuracy,
    rank1,
    scored_pairs,
    tar_at_far,
    write_accuracy_csv,
    write_board_count,
    AccuracyTable,
)
from .training import TrainResult, make_schedule, make_toy_model, toy_summary, train


def _round9(value):
    """Round floats (recursively) to 9 significant digits for output."""
    if isinstance(value, float):
        return float(f"{value:.9g}")
    if isinstance(value, dict):
        return {k: _round9(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round9(v) for v in value]
    return value


def _write_json(payload: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(_round9(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _prepare_outdir(cfg: RunConfig, out_override: str | None) -> str:
    outdir = out_override or cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    if out_override:
        cfg.output_dir = out_override
    with open(os.path.join(outdir, "config.resolved"), "w", encoding="utf-8") as fh:
        fh.write(resolved_config_text(cfg))
    return outdir


def _run_config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "loss", None):
        cfg.loss = build_margin_config(args.loss)
    if getattr(args, "seed", None) is not None:
        cfg.data = replace(cfg.data, seed=args.seed)
        cfg.trainer.seed = args.seed
    return cfg


def _save_model_csvs(result: TrainResult, outdir: str) -> None:
    model = result.model
    d = model.dim
    coord_names = ["x", "y"] if d == 2 else [f"v{i}" for i in range(d)]
    emb = model.unit_embeddings()
    with open(os.path.join(outdir, "embeddings.csv"), "w") as fh:
        fh.write(",".join(["id", "label"] + coord_names) + "\n")
        for i, (lab, row) in enumerate(zip(model.labels, emb)):
            fh.write(",".join([str(i), str(int(lab))] + ["%.9g" % v for v in row]) + "\n")
    with open(os.path.join(outdir, "centers.csv"), "w") as fh:
        fh.write(",".join(["id", "label"] + coord_names) + "\n")
        for j, row in enumerate(normalize_rows(model.class_weights)):
            fh.write(",".join([str(j), str(j)] + ["%.9g" % v for v in row]) + "\n")
    with open(os.path.join(outdir, "metrics.jsonl"), "w") as fh:
        for record in result.metrics:
            fh.write(json.dumps(_round9(record), sort_keys=True) + "\n")


def _train_from_config(cfg: RunConfig) -> TrainResult:
    dataset = generate(cfg.data)
    model = make_toy_model(
        dataset,
        cfg.data.num_classes,
        kind=cfg.trainer.model,
        seed=cfg.trainer.seed,
        hidden=cfg.trainer.hidden,
    )
    steps_per_epoch = math.ceil(model.num_samples / cfg.trainer.batch_size)
    schedule = make_schedule(
        cfg.trainer.epochs * steps_per_epoch,
        base_lr=cfg.trainer.base_lr,
        milestone_fracs=cfg.trainer.milestone_fracs,
        decay_factor=cfg.trainer.decay_factor,
    )
    return train(
        model,
        cfg.loss,
        schedule,
        epochs=cfg.trainer.epochs,
        batch_size=cfg.trainer.batch_size,
        seed=cfg.trainer.seed,
        momentum=cfg.trainer.momentum,
        weight_decay=cfg.trainer.weight_decay,
    )


# -- subcommands -------------------------------------------------------------


def cmd_generate(args) -> int:
    cfg = _run_config(args)
    outdir = _prepare_outdir(cfg, args.out)
    batch = generate(cfg.data)
    save_batch_csv(batch, os.path.join(outdir, "dataset.csv"))
    pairs = make_pairs(batch, cfg.eval.pairs_per_kind, cfg.eval.seed)
    save_pairs_csv(pairs, os.path.join(outdir, "pairs.csv"))
    print(f"wrote dataset.csv ({batch.n} samples) and pairs.csv ({len(pairs)} pairs) to {outdir}")
    return 0


def cmd_train(args) -> int:
    cfg = _run_config(args)
    outdir = _prepare_outdir(cfg, args.out)
    result = _train_from_config(cfg)
    _save_model_csvs(result, outdir)
    summary = {
        "final_loss": result.metrics[-1]["loss"],
        "mean_target_angle": result.metrics[-1]["mean_target_angle"],
    }
    if result.model.dim == 2:
        summary.update(toy_summary(result.model))
    _write_json(summary, os.path.join(outdir, "summary.json"))
    print(
        f"trained {cfg.loss.variant} for {cfg.trainer.epochs} epochs; "
        f"final loss {result.metrics[-1]['loss']:.9g}; outputs in {outdir}"
    )
    return 0


def cmd_gradcheck(args) -> int:
    variants = [args.variant] if args.variant else list(VARIANTS)
    modes = [args.mode] if args.mode in GRADIENT_MODES else list(GRADIENT_MODES)
    seeds = range(args.seed, args.seed + args.instances)
    rows = gc.run_suite(
        variants=variants, modes=modes, seeds=seeds, rel_tol=args.rel_tol, s=args.scale
    )
    header = f"{'variant':<18} {'mode':<7} {'instances':>9} {'failures':>8} {'max_rel':>12} {'max_abs':>12}"
    print(header)
    for r in rows:
        print(
            f"{r.variant:<18} {r.mode:<7} {r.instances:>9} {r.failures:>8} "
            f"{r.max_rel_error:>12.9g} {r.max_abs_error:>12.9g}"
        )
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(
            {
                "rel_tol": args.rel_tol,
                "rows": [
                    {
                        "variant": r.variant,
                        "mode": r.mode,
                        "instances": r.instances,
                        "failures": r.failures,
                        "max_rel_error": r.max_rel_error,
                        "max_abs_error": r.max_abs_error,
                    }
                    for r in rows
                ],
            },
            os.path.join(args.out, "gradcheck.json"),
        )
    return 0 if all(r.passed for r in rows) else 2


def cmd_eval(args) -> int:
    cfg = _run_config(args)
    outdir = _prepare_outdir(cfg, args.out)
    if args.data:
        batch = load_batch_csv(args.data)
        pairs = load_pairs_csv(args.pairs) if args.pairs else make_pairs(
            batch, cfg.eval.pairs_per_kind, cfg.eval.seed
        )
    else:
        batch = generate(cfg.data)
        pairs = make_pairs(batch, cfg.eval.pairs_per_kind, cfg.eval.seed)
    scores = scored_pairs(batch, pairs)
    acc, tau = pair_accuracy(scores)
    flat = np.einsum(
        "ij,ij->i", batch.embeddings[pairs.idx_a], batch.embeddings[pairs.idx_b]
    )
    # gallery = per-class mean directions from the batch itself
    classes = np.unique(batch.labels)
    centroids = normalize_rows(
        np.vstack([batch.embeddings[batch.labels == c].mean(axis=0) for c in classes])
    )
    gallery = EmbeddingBatch(centroids, classes)
    payload = {
        "pair_accuracy": acc,
        "best_threshold": tau,
        "kfold_accuracy": kfold_accuracy(flat, pairs.same, folds=cfg.eval.folds),
        "tar_at_far": {str(f): tar_at_far(scores, f) for f in cfg.eval.far_levels},
        "rank1": rank1(batch, gallery),
    }
    _write_json(payload, os.path.join(outdir, "eval.json"))
    print(json.dumps(_round9(payload), sort_keys=True))
    return 0


def _boundary_margin(cfg: MarginConfig, theta_y: np.ndarray, d_inter: float) -> np.ndarray:
    if cfg.variant.startswith("interface"):
        gamma = theta_y / d_inter
        t = threshold_t(d_inter, cfg.a, cfg.b)
        return margin_f(gamma, t, cfg.alpha)
    if cfg.variant == "rarc":
        return np.full_like(theta_y, cfg.m_split_2)
    return np.zeros_like(theta_y)


def _boundary_target(cfg: MarginConfig, cos_y: np.ndarray, sin_y: np.ndarray) -> np.ndarray:
    if cfg.variant == "softmax":
        return cos_y.copy()
    if cfg.variant == "aml":
        if cfg.m1_mult == 1.0:
            val, _ = _additive_target(cos_y, sin_y, cfg.m2_add)
        else:
            val, _ = _aml_target_general(cos_y, sin_y, cfg.m1_mult, cfg.m2_add)
        return val - cfg.m3_sub
    m = cfg.m_split_1 if cfg.variant == "rarc" else cfg.m
    val, _ = _additive_target(cos_y, sin_y, m)
    return val


def cmd_boundary(args) -> int:
    cfg = _run_config(args)
    loss = cfg.loss
    if args.theta_min >= args.theta_max or args.step <= 0:
        raise BadGrid(
            f"need theta_min < theta_max and step > 0, got "
            f"[{args.theta_min}, {args.theta_max}] step {args.step}"
        )
    d_inter = args.d_inter
    if d_inter is None:
        d_inter = loss.fixed_d_inter if loss.variant == "interface-cid-ct" else math.pi / 2
    outdir = _prepare_outdir(cfg, args.out)
    grid = np.arange(args.theta_min, args.theta_max + 0.5 * args.step, args.step)
    path = os.path.join(outdir, "boundary.csv")
    with open(path, "w") as fh:
        fh.write("theta_y,theta_j,margin_f,target_logit,nontarget_logit,sign\n")
        for ty in grid:
            cy = np.cos(ty)
            sy = _sin_from_cos(np.asarray(cy))
            f = float(_boundary_margin(loss, np.asarray(ty, dtype=float), d_inter))
            target = float(_boundary_target(loss, np.asarray(cy), sy))
            for tj in grid:
                cj = np.asarray(np.cos(tj))
                nontarget, _, _ = _additive_nontarget(cj, _sin_from_cos(cj), f)
                diff = target - float(nontarget)
                sign = 0 if diff == 0 else (1 if diff > 0 else -1)
                fh.write(
                    "%.9g,%.9g,%.9g,%.9g,%.9g,%d\n"
                    % (ty, tj, f, target, float(nontarget), sign)
                )
    print(f"wrote {path} ({grid.size * grid.size} grid points)")
    return 0


def cmd_sweep(args) -> int:
    cfg = _run_config(args)
    values = [float(v) for v in args.values.split(",")]
    if len(values) < 2:
        raise ConfigInvalid("sweep needs at least 2 values to compare")
    outdir = _prepare_outdir(cfg, args.out)
    rows = []
    row_labels = []
    for value in values:
        loss = build_margin_config(args.base_loss or cfg.loss.variant, {args.param: value})
        run_cfg = RunConfig(
            loss=loss, data=cfg.data, trainer=cfg.trainer, eval=cfg.eval, output_dir=outdir
        )
        result = _train_from_config(run_cfg)
        rows.append(_benchmark_accuracies(result.model, cfg.eval))
        row_labels.append(f"{args.param}={value:g}")
    table = AccuracyTable(
        tuple(row_labels),
        tuple(f"sigma={s:g}" for s in cfg.eval.sigmas),
        np.asarray(rows),
    )
    bc = board_count(table)
    write_accuracy_csv(table, os.path.join(outdir, "accuracy.csv"))
    write_board_count(
        bc, table, os.path.join(outdir, "board_count.csv"), os.path.join(outdir, "board_count.json")
    )
    print(
        f"swept {args.param} over {values}; best row {table.row_labels[bc.best_row]!r} "
        f"(bc sum {int(bc.row_sums[bc.best_row])}); outputs in {outdir}"
    )
    return 0


def _benchmark_accuracies(model, eval_cfg) -> list[float]:
    """Pair accuracy (in percent) on noise-perturbed copies of the trained
    embeddings; one column per noise level."""
    emb = model.unit_embeddings()
    base = EmbeddingBatch(emb, model.labels)
    pairs = make_pairs(base, eval_cfg.pairs_per_kind, eval_cfg.seed)
    accs = []
    for bench_index, sigma in enumerate(eval_cfg.sigmas):
        if sigma > 0:
            rng = np.random.default_rng([eval_cfg.seed, bench_index])
            noisy = normalize_rows(emb + sigma * rng.standard_normal(emb.shape))
        else:
            noisy = emb
        batch = EmbeddingBatch(noisy, model.labels)
        acc, _ = pair_accuracy(scored_pairs(batch, pairs))
        accs.append(100.0 * acc)
    return accs


def cmd_toy(args) -> int:
    cfg = _run_config(args)
    if not getattr(args, "config", None):
        # canned 8-class 2-D protocol; the constant-distance variant uses
        # the uniform 8-class adjacent angle pi/4
        overrides = {"fixed_d_inter": math.pi / 4} if args.loss == "interface-cid-ct" else {}
        cfg.loss = build_margin_config(args.loss or "arcface", overrides)
        cfg.data = SphereMixtureSpec(
            num_classes=8,
            dim=2,
            samples_per_class=100,
            noise_sigma=args.sigma,
            seed=cfg.trainer.seed,
            uniform_2d_centers=True,
        )
    outdir = _prepare_outdir(cfg, args.out)
    result = _train_from_config(cfg)
    _save_model_csvs(result, outdir)
    summary = toy_summary(result.model)
    summary["final_loss"] = result.metrics[-1]["loss"]
    summary["variant"] = cfg.loss.variant
    _write_json(summary, os.path.join(outdir, "summary.json"))
    print(
        f"toy {cfg.loss.variant}: gap_std {summary['gap_std']:.9g}, "
        f"final loss {summary['final_loss']:.9g}; outputs in {outdir}"
    )
    return 0


# -- wiring ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 for misuse, not argparse's default 2
        raise ConfigInvalid(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spheremargin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, loss_flag=True):
        p.add_argument("-c", "--config", help="run-config file (key = value lines)")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--seed", type=int, help="override data and trainer seeds")
        if loss_flag:
            p.add_argument("--loss", choices=LOSS_PRESETS, help="loss preset override")

    p = sub.add_parser("generate", help="write a synthetic dataset and pair list")
    common(p, loss_flag=False)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train a sphere-embedding model per config")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gradcheck", help="certify analytic gradients against finite differences")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--mode", choices=list(GRADIENT_MODES) + ["both"], default="both")
    p.add_argument("--rel-tol", type=float, default=gc.REL_TOL)
    p.add_argument("--scale", type=float, default=4.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("eval", help="verification metrics for a dataset + pair list")
    common(p, loss_flag=False)
    p.add_argument("--data", help="dataset CSV (default: generate from config)")
    p.add_argument("--pairs", help="pairs CSV (default: sample from config)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="train/evaluate a grid of one loss parameter")
    common(p, loss_flag=False)
    p.add_argument("--param", required=True, help="loss parameter name (config-file style)")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--base-loss", choices=LOSS_PRESETS, help="preset the sweep modifies")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="decision-boundary grid CSV for a loss")
    common(p)
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=float(np.pi))
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--d-inter", type=float, help="inter-class angle context")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("toy", help="canned 8-class 2-D training run")
    common(p)
    p.add_argument("--sigma", type=float, default=0.2, help="dataset noise level")
    p.set_defaults(func=cmd_toy)

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    except SphereMarginError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1
    except FileNotFoundError as exc:
        print(
            json.dumps({"error": "FileNotFound", "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
