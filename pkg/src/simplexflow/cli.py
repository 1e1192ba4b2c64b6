"""Command-line front end.

Subcommands: ``gen`` (synthetic datasets), ``train`` (fit a model),
``verify`` (replicator-vs-readout equivalence report), ``trace``
(trajectory export with optional simplex SVG), and ``demo-game``
(constant-payoff replicator games).

Exit codes are a stable contract: 0 success, 2 usage or validation error,
3 training divergence, 4 verification tolerance exceeded, 5 integration
divergence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import datasets, replicator, ternary, training
from .config import GridConfig, RunConfig, load_run_config
from .errors import (
    ConfigError,
    DimensionError,
    DivergenceError,
    DomainError,
    FormatError,
    InteriorViolationError,
)
from .network import TimeGrid, load_model, save_model
from .odeflow import hidden_flow, output_trace
from .training import ArchConfig, TrainConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TRAIN_DIVERGED = 3
EXIT_TOLERANCE = 4
EXIT_INTEGRATION_DIVERGED = 5

_GAMES = {
    "dominant": np.diag([1.0, 0.0, 0.0]),
    "rps": np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]]),
}


class UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad vector {text!r}: {exc}") from exc


def _load_config(args) -> RunConfig:
    if getattr(args, "config", None):
        return load_run_config(args.config)
    return RunConfig()


def _pick(flag_value, config_value):
    return config_value if flag_value is None else flag_value


def _grid_from_args(args, cfg: GridConfig) -> tuple[TimeGrid, str]:
    step = _pick(getattr(args, "step", None), cfg.step)
    horizon = _pick(getattr(args, "horizon", None), cfg.horizon)
    method = _pick(getattr(args, "method", None), cfg.method)
    return TimeGrid.from_horizon(horizon, step), method


def _input_vector(args, model_dim: int) -> np.ndarray:
    if getattr(args, "input", None) is not None:
        x = _parse_vector(args.input)
    elif getattr(args, "data", None) is not None:
        ds = datasets.load_csv(args.data)
        index = getattr(args, "index", 0) or 0
        if not 0 <= index < ds.n_points:
            raise UsageError(f"--index {index} outside dataset of {ds.n_points} points")
        x = ds.inputs[index]
    else:
        raise UsageError("provide an input via --input or --data/--index")
    if x.shape[0] != model_dim:
        raise UsageError(
            f"input has length {x.shape[0]} but the model expects {model_dim}"
        )
    return x


# --- subcommands -----------------------------------------------------------

def cmd_gen(args) -> int:
    seed = args.seed
    if args.generator == "blobs":
        centers = datasets.default_centers(args.classes)
        ds = datasets.gen_blobs(args.per_class, centers, args.sigma, seed)
    elif args.generator == "rings":
        ds = datasets.gen_two_class("concentric_rings", args.n, args.noise, seed)
    else:
        ds = datasets.gen_two_class("interleaved_arcs", args.n, args.noise, seed)
    datasets.save_csv(ds, args.output)
    print(f"wrote {args.output}: D={ds.n_points} M={ds.input_dim} N={ds.n_labels}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _load_config(args)
    arch = cfg.arch
    tc = cfg.train
    overrides = {
        "learning_rate": args.lr,
        "epochs": args.epochs,
        "batch_size": args.batch_size,
        "seed": args.seed,
        "optimizer": args.optimizer,
    }
    tc_kwargs = {k: v for k, v in overrides.items() if v is not None}
    if tc_kwargs:
        tc = TrainConfig(**{**tc.__dict__, **tc_kwargs})
    arch_overrides = {
        "state_dim": args.state_dim,
        "tau": args.tau,
        "n_steps": args.steps,
    }
    if args.widths is not None:
        arch_overrides["hidden_widths"] = tuple(
            int(w) for w in args.widths.split(",") if w
        )
    arch_kwargs = {k: v for k, v in arch_overrides.items() if v is not None}
    if arch_kwargs:
        arch = ArchConfig(**{**arch.__dict__, **arch_kwargs})

    ds = datasets.load_csv(args.data)
    result = training.train(tc, ds, arch)
    save_model(result.spec, args.output)
    if args.history:
        training.save_history_csv(result.history, args.history)
    final = result.history[-1]
    print(f"final loss {_fmt(final.loss)}")
    print(f"final train error {_fmt(final.train_error)}")
    if result.diverged:
        print("training diverged; wrote last finite model", file=sys.stderr)
        return EXIT_TRAIN_DIVERGED
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    spec = load_model(args.model)
    grid, method = _grid_from_args(args, cfg.grid)
    x = _input_vector(args, spec.input_dim)
    report = replicator.verify_equivalence(spec, x, grid, method)
    csv_path = args.deviation_csv
    if csv_path:
        report.save_deviation_csv(csv_path)
    doc = report.to_json_dict(per_time_csv_path=csv_path)
    doc["tolerance"] = args.tol
    doc["passed"] = report.passed(args.tol)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
            fh.write("\n")
    print(f"sup deviation {_fmt(report.sup_deviation)}")
    print(f"mean deviation {_fmt(report.mean_deviation)}")
    print(f"simplex drift max {_fmt(report.simplex_drift_max)}")
    if report.augmented_sup_deviation is not None:
        print(f"augmented sup deviation {_fmt(report.augmented_sup_deviation)}")
    if not report.passed(args.tol):
        print(
            f"deviation exceeds tolerance {_fmt(args.tol)}",
            file=sys.stderr,
        )
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_trace(args) -> int:
    cfg = _load_config(args)
    spec = load_model(args.model)
    grid, method = _grid_from_args(args, cfg.grid)
    x = _input_vector(args, spec.input_dim)
    hidden = hidden_flow(spec, x, grid, method)
    outputs = output_trace(spec, hidden)
    hidden_path = f"{args.output}_hidden.csv"
    output_path = f"{args.output}_output.csv"
    hidden.to_csv(hidden_path)
    outputs.to_csv(output_path)
    print(f"wrote {hidden_path} and {output_path} ({len(grid)} rows each)")
    if args.svg:
        if spec.n_labels != 3:
            raise UsageError(
                f"simplex SVG plots need exactly 3 labels, model has {spec.n_labels}"
            )
        ternary.save_trajectory_svg(outputs.states, args.svg, title="readout trajectory")
        print(f"wrote {args.svg}")
    return EXIT_OK


def cmd_demo_game(args) -> int:
    payoff = _GAMES[args.game]
    p0 = (
        _parse_vector(args.p0)
        if args.p0 is not None
        else np.full(3, 1.0 / 3.0)
    )
    try:
        replicator.validate_simplex(p0)
    except (DomainError, DimensionError) as exc:
        raise UsageError(f"--p0 must be a distribution over 3 strategies: {exc}") from exc
    if p0.shape[0] != 3:
        raise UsageError("--p0 must have 3 components")
    grid = TimeGrid.from_horizon(args.horizon, args.step)
    traj = replicator.integrate_constant_game(payoff, p0, grid, args.method)
    csv_path = f"{args.output}_trajectory.csv"
    traj.to_csv(csv_path)
    print(f"wrote {csv_path} ({len(grid)} rows)")
    final = traj.final()
    print("final state " + ",".join(_fmt(v) for v in final))
    if args.svg:
        ternary.save_trajectory_svg(traj.states, args.svg, title=args.game)
        print(f"wrote {args.svg}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexflow",
        description="Recurrent ODE classifier with a replicator readout.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    gen_sub = gen.add_subparsers(dest="generator", required=True)
    blobs = gen_sub.add_parser("blobs", help="Gaussian clusters, one label each")
    blobs.add_argument("--per-class", type=int, default=1000)
    blobs.add_argument("--classes", type=int, default=3)
    blobs.add_argument("--sigma", type=float, default=0.45)
    rings = gen_sub.add_parser("rings", help="two concentric noisy circles")
    rings.add_argument("--n", type=int, default=1000)
    rings.add_argument("--noise", type=float, default=0.1)
    arcs = gen_sub.add_parser("arcs", help="two interleaved half-moon arcs")
    arcs.add_argument("--n", type=int, default=1000)
    arcs.add_argument("--noise", type=float, default=0.1)
    for p in (blobs, rings, arcs):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("-o", "--output", required=True)
        p.set_defaults(func=cmd_gen)

    tr = sub.add_parser("train", help="train a model on a dataset CSV")
    tr.add_argument("--data", required=True)
    tr.add_argument("-o", "--output", required=True, help="model JSON path")
    tr.add_argument("--history", help="per-epoch loss/error CSV path")
    tr.add_argument("--config", help="JSON run config")
    tr.add_argument("--lr", type=float)
    tr.add_argument("--epochs", type=int)
    tr.add_argument("--batch-size", type=int)
    tr.add_argument("--seed", type=int)
    tr.add_argument("--optimizer", choices=["sgd", "sgd_momentum"])
    tr.add_argument("--state-dim", type=int)
    tr.add_argument("--widths", help="comma-separated hidden widths")
    tr.add_argument("--tau", type=float)
    tr.add_argument("--steps", type=int)
    tr.set_defaults(func=cmd_train)

    def add_grid_flags(p):
        p.add_argument("--step", type=float)
        p.add_argument("--horizon", "-T", type=float)
        p.add_argument("--method", choices=["euler", "rk4"])
        p.add_argument("--config", help="JSON run config")

    def add_input_flags(p):
        p.add_argument("--input", help="comma-separated input vector")
        p.add_argument("--data", help="dataset CSV to draw the input from")
        p.add_argument("--index", type=int, default=0)

    ver = sub.add_parser("verify", help="check the replicator form of the readout")
    ver.add_argument("--model", required=True)
    add_input_flags(ver)
    add_grid_flags(ver)
    ver.add_argument("--tol", type=float, default=1e-6)
    ver.add_argument("--report", help="verification report JSON path")
    ver.add_argument("--deviation-csv", help="per-time deviation CSV path")
    ver.set_defaults(func=cmd_verify)

    trc = sub.add_parser("trace", help="export hidden/output trajectories")
    trc.add_argument("--model", required=True)
    add_input_flags(trc)
    add_grid_flags(trc)
    trc.add_argument("-o", "--output", required=True, help="output path prefix")
    trc.add_argument("--svg", help="simplex plot path (3-label models only)")
    trc.set_defaults(func=cmd_trace)

    game = sub.add_parser("demo-game", help="integrate a constant-payoff game")
    game.add_argument("game", choices=sorted(_GAMES))
    game.add_argument("--p0", help="comma-separated starting distribution")
    game.add_argument("--horizon", "-T", type=float, default=50.0)
    game.add_argument("--step", type=float, default=1e-3)
    game.add_argument("--method", choices=["euler", "rk4"], default="rk4")
    game.add_argument("-o", "--output", required=True, help="output path prefix")
    game.add_argument("--svg", help="simplex plot path")
    game.set_defaults(func=cmd_demo_game)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, FormatError, DomainError, DimensionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DivergenceError, InteriorViolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
