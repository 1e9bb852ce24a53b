"""Command line entry points.

    satedge run      --scenario s.json --policy greedy --episodes 3 --seed 0 --metrics out.csv
    satedge serve    --scenario s.json --listen 127.0.0.1:7777   (or --listen stdio)
    satedge validate --scenario s.json

Exit codes: 0 success, 2 configuration error, 3 protocol error.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..errors import ConfigurationError, ProtocolError
from . import metrics as metrics_mod
from . import protocol, scenario as scenario_mod

EXIT_OK = protocol.EXIT_OK
EXIT_CONFIG = protocol.EXIT_CONFIG
EXIT_PROTOCOL = protocol.EXIT_PROTOCOL


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="satedge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run episodes with a baseline policy and write metrics")
    run.add_argument("--scenario", required=True, help="scenario JSON file")
    run.add_argument("--policy", required=True, help="random, greedy or sticky")
    run.add_argument("--episodes", type=int, default=1, help="number of episodes (seeds seed..seed+n-1)")
    run.add_argument("--seed", type=int, default=0, help="seed of the first episode")
    run.add_argument("--metrics", default=None, help="metrics CSV path (summary lands next to it)")

    serve = sub.add_parser("serve", help="serve the wire protocol over stdio or TCP")
    serve.add_argument("--scenario", required=True, help="scenario JSON file")
    serve.add_argument("--listen", required=True, help="'stdio' or host:port")

    validate = sub.add_parser("validate", help="validate a scenario file and print a summary")
    validate.add_argument("--scenario", required=True, help="scenario JSON file")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    sc = scenario_mod.load_scenario(args.scenario)
    if args.episodes < 1:
        raise ConfigurationError("--episodes must be >= 1")
    if args.policy == "external":
        raise ConfigurationError("policy 'external' is driven over the protocol; use serve")
    all_rows = []
    summaries = []
    for episode in range(args.episodes):
        rows, summary = metrics_mod.run_episode(
            sc, args.policy, seed=args.seed + episode, episode=episode
        )
        all_rows.extend(rows)
        summaries.append(summary)
        print(
            f"episode {episode} seed {summary.seed}: reward {summary.total_reward:.3f}, "
            f"failure rate {summary.failure_rate:.3f}, migrations {summary.total_migrations}"
        )
    if args.metrics:
        metrics_mod.write_metrics_csv(all_rows, args.metrics)
        summary_path = metrics_mod.summary_path_for(args.metrics)
        metrics_mod.write_summaries(summaries, summary_path)
        print(f"metrics -> {args.metrics}")
        print(f"summary -> {summary_path}")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    sc = scenario_mod.load_scenario(args.scenario)
    if args.listen == "stdio":
        return protocol.serve(sys.stdin, sys.stdout, sc)
    host, port = protocol.parse_listen_address(args.listen)
    server = protocol.ProtocolServer(sc, host, port)
    bound_host, bound_port = server.address
    print(f"serving {args.scenario} on {bound_host}:{bound_port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:  # clean shutdown on Ctrl-C
        pass
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    sc = scenario_mod.load_scenario(args.scenario)
    info = {
        "satellites": sc.constellation.num_satellites,
        "clusters": len(sc.clusters),
        "flights": len(sc.flights),
        "slots": sc.env.num_slots,
        "slot_seconds": sc.env.slot_seconds,
        "theta_min_deg": sc.env.theta_min_deg,
    }
    print(json.dumps(info, indent=2))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "serve":
            return _cmd_serve(args)
        return _cmd_validate(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
