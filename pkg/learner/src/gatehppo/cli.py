"""Command line entry points.

    gatehppo train --scenario s.json --config cfg.json --out runs/exp1
    gatehppo train --connect 127.0.0.1:7777 --iterations 50
    gatehppo eval  --scenario s.json --checkpoint runs/exp1/checkpoint.pt --episodes 10

The simulator is reached over its wire protocol: either connect to a running
server or name a scenario file to spawn `satedge serve --listen stdio` as a
child process.
"""

from __future__ import annotations

import argparse
import json
import sys

from .client import SimulatorClient
from .training import Trainer, load_train_config, trainer_from_checkpoint


def _add_transport_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--connect", help="host:port of a running simulator server")
    group.add_argument("--scenario", help="scenario file; spawns a stdio server")
    parser.add_argument("--command", default="satedge", help="simulator executable for --scenario")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gatehppo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command_name", required=True)

    train = sub.add_parser("train", help="train a policy against the simulator")
    _add_transport_args(train)
    train.add_argument("--config", default=None, help="JSON training/encoder config")
    train.add_argument("--iterations", type=int, default=None, help="override config iterations")
    train.add_argument("--seed", type=int, default=None, help="override config seed")
    train.add_argument("--out", default="runs/latest", help="output directory (checkpoint + curves)")
    train.add_argument("--log-every", type=int, default=10, help="print progress every n iterations")

    evaluate = sub.add_parser("eval", help="evaluate a checkpoint")
    _add_transport_args(evaluate)
    evaluate.add_argument("--checkpoint", required=True)
    evaluate.add_argument("--episodes", type=int, default=10)
    evaluate.add_argument("--seed", type=int, default=10_000)
    evaluate.add_argument("--stochastic", action="store_true", help="sample instead of taking the mode")
    return parser


def _open_client(args: argparse.Namespace) -> SimulatorClient:
    if args.connect:
        host, _, port = args.connect.rpartition(":")
        return SimulatorClient.connect(host or "127.0.0.1", int(port))
    return SimulatorClient.spawn(args.scenario, command=args.command)


def _cmd_train(args: argparse.Namespace) -> int:
    train_cfg, encoder_cfg, policy_cfg = load_train_config(args.config)
    if args.seed is not None:
        train_cfg = type(train_cfg)(**{**train_cfg.__dict__, "seed": args.seed})
    with _open_client(args) as client:
        trainer = Trainer(client, train_cfg, encoder_cfg, policy_cfg)
        curves = trainer.train(iterations=args.iterations, out_dir=args.out, log_every=args.log_every)
    tail = curves[-1]
    print(f"final iteration {tail.iteration}: reward {tail.reward:.3f}, migrations {tail.migrations}")
    print(f"checkpoint and curves -> {args.out}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    with _open_client(args) as client:
        trainer = trainer_from_checkpoint(client, args.checkpoint)
        report = trainer.evaluate(args.episodes, seed=args.seed, deterministic=not args.stochastic)
    print(json.dumps(report, indent=2))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command_name == "train":
        return _cmd_train(args)
    return _cmd_eval(args)


if __name__ == "__main__":
    sys.exit(main())
