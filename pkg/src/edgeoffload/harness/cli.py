"""Command line interface.

Exit codes: 0 success, 2 configuration problems, 3 numerical failures,
4 I/O and checkpoint problems, 1 anything else the package raises.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from ..config import POLICY_TAGS, ExperimentConfig, parse_config
from ..errors import (CheckpointError, ConfigError, EdgeOffloadError,
                      NumericalError)
from . import experiment
from .figures import render_report
from .gradsuite import gradient_suite, write_gradcheck_report


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE",
                        help="experiment config file")
    common.add_argument("--seed", type=int, metavar="N",
                        help="override the system and training seeds")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--episodes", type=int, metavar="N",
                        help="episode count override")
    common.add_argument("--policy", metavar="TAG", choices=POLICY_TAGS,
                        help="one of " + ", ".join(POLICY_TAGS))

    parser = argparse.ArgumentParser(
        prog="edgeoffload",
        description="Edge-offloading simulator, learner, and experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)
    train = sub.add_parser("train", parents=[common],
                           help="train the learned offloading policy")
    train.add_argument("--resume", metavar="DIR",
                       help="checkpoint directory to continue from")
    sub.add_parser("simulate", parents=[common],
                   help="run a fixed policy through the simulator")
    evaluate = sub.add_parser("evaluate", parents=[common],
                              help="greedy-rollout evaluation of a policy")
    evaluate.add_argument("--checkpoint", metavar="DIR",
                          help="trained weights for learned policies")
    sub.add_parser("sweep", parents=[common],
                   help="sweep one scenario axis over seeds")
    grad = sub.add_parser("gradcheck",
                          help="verify analytic gradients numerically")
    grad.add_argument("--seeds", type=int, default=3, metavar="N",
                      help="number of probe seeds per case")
    grad.add_argument("--tolerance", type=float, default=1e-4, metavar="X",
                      help="max allowed relative error")
    grad.add_argument("--out", metavar="DIR", help="output directory")
    report = sub.add_parser("report",
                            help="render figures for an existing run")
    report.add_argument("--run", required=True, metavar="DIR",
                        help="run directory holding episodes.csv or sweep output")
    return parser


def _load_config(args: argparse.Namespace, default_policy: str | None = None
                 ) -> ExperimentConfig:
    cfg = parse_config(args.config) if args.config else ExperimentConfig()
    if args.policy:
        cfg.policy = args.policy
    elif args.config is None and default_policy:
        cfg.policy = default_policy
    if args.seed is not None:
        cfg.system = dataclasses.replace(cfg.system, seed=args.seed)
        cfg.train = dataclasses.replace(cfg.train, seed=args.seed)
    cfg.validate()
    return cfg


def _dispatch(args: argparse.Namespace) -> None:
    if args.command == "train":
        cfg = _load_config(args)
        summary = experiment.run_training(cfg, args.out, args.episodes,
                                          resume=args.resume)
    elif args.command == "simulate":
        cfg = _load_config(args, default_policy="greedy")
        summary = experiment.run_simulation(cfg, args.out, args.episodes)
    elif args.command == "evaluate":
        cfg = _load_config(args)
        summary = experiment.run_evaluation(cfg, args.out, args.checkpoint,
                                            args.episodes)
    elif args.command == "sweep":
        cfg = _load_config(args, default_policy="greedy")
        summary = experiment.run_sweep(cfg, args.out, args.episodes)
    elif args.command == "gradcheck":
        out_dir = experiment.resolve_out_dir(args.out, "runs/gradcheck")
        passed, rows = gradient_suite(range(args.seeds), args.tolerance)
        write_gradcheck_report(os.path.join(out_dir, "gradcheck.txt"),
                               rows, args.tolerance, passed)
        if not passed:
            worst = max(rows, key=lambda r: r["max_rel_error"])
            raise NumericalError(
                f"gradient check failed: {worst['case']} seed {worst['seed']} "
                f"rel error {worst['max_rel_error']:.3e}")
        print(f"gradcheck pass ({len(rows)} cases), report in {out_dir}")
        return
    elif args.command == "report":
        paths = render_report(args.run)
        for path in paths:
            print(path)
        if not paths:
            print(f"nothing to render in {args.run}", file=sys.stderr)
        return
    else:  # pragma: no cover - argparse enforces the choices
        raise ConfigError(f"unknown command {args.command!r}")
    print(f"{summary.command}: {summary.rows} rows -> {summary.out_dir} "
          f"({summary.wall_s:.1f}s)")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except (CheckpointError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except EdgeOffloadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
