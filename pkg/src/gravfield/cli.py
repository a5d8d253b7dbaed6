"""Command line entry point.

Subcommands: serve (live session), simulate (scripted scenario),
replay (re-run a session log), hash (final state hash of a log).
Exit codes: 0 ok, 2 config error, 3 log corruption, 4 runtime failure.
"""

from __future__ import annotations

import argparse
import asyncio
import dataclasses
import sys

from .replay.runner import replay, simulate
from .replay.scenario import load_scenario
from .replay.sessionlog import LogCorruptionError
from .server.config import ConfigError, ServerConfig, load_server_config
from .server.service import LiveServer

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CORRUPT = 3
EXIT_RUNTIME = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravfield",
        description="Live digital-physics orchestration engine")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the live session server")
    serve.add_argument("--config", help="server config JSON (defaults apply if omitted)")
    serve.add_argument("--record", help="record accepted inputs to this session log")
    serve.add_argument("--seed", type=int, help="override the PRNG seed")
    serve.add_argument("--ticks", type=int,
                       help="stop after N ticks (default: run until interrupted)")
    serve.add_argument("--json-snapshots", action="store_true",
                       help="debug: publish snapshots as JSON text instead of GFS1")

    sim = sub.add_parser("simulate", help="run a scenario deterministically")
    sim.add_argument("--scenario", required=True)
    sim.add_argument("--out-trace", help="write the per-tick signal trace CSV here")
    sim.add_argument("--out-hash", nargs="?", const="-",
                     help="print the final state hash, or write it to a file")
    sim.add_argument("--record", help="also record a replayable session log")
    sim.add_argument("--seed", type=int, help="override the scenario seed")
    sim.add_argument("--ticks", type=int, help="override the scenario duration")

    rep = sub.add_parser("replay", help="re-run a recorded session log")
    rep.add_argument("--log", required=True)
    rep.add_argument("--out-trace", help="write the per-tick signal trace CSV here")
    rep.add_argument("--ticks", type=int, help="override the replayed duration")

    hsh = sub.add_parser("hash", help="print the final state hash of a log")
    hsh.add_argument("--log", required=True)
    return parser


def _emit_hash(value: str, target):
    if target == "-" or target is None:
        print(value)
    else:
        with open(target, "w") as fh:
            fh.write(value + "\n")


def _cmd_serve(args) -> int:
    config = load_server_config(args.config) if args.config else ServerConfig()
    if args.seed is not None:
        config = dataclasses.replace(
            config, engine=dataclasses.replace(config.engine, seed=args.seed))
    if args.record:
        config = dataclasses.replace(config, record_path=args.record)
    if args.json_snapshots:
        config = dataclasses.replace(config, json_snapshots=True)
    server = LiveServer(config)

    def announce(s: LiveServer):
        print(f"listening: poses udp/{s.pose_port}, control udp/{s.control_port}, "
              f"stream ws://host:{s.stream_port}/ws", flush=True)

    try:
        asyncio.run(server.run(ready=announce, max_ticks=args.ticks))
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = dataclasses.replace(
            scenario, engine=dataclasses.replace(scenario.engine, seed=args.seed))
    result = simulate(scenario, record_path=args.record,
                      trace_path=args.out_trace, ticks_override=args.ticks)
    if args.out_hash is not None:
        _emit_hash(result.final_hash, args.out_hash)
    print(f"simulated {result.ticks} ticks, state hash {result.final_hash}",
          file=sys.stderr)
    return EXIT_OK


def _cmd_replay(args) -> int:
    result = replay(args.log, trace_path=args.out_trace,
                    ticks_override=args.ticks)
    print(result.final_hash)
    return EXIT_OK


def _cmd_hash(args) -> int:
    result = replay(args.log)
    print(result.final_hash)
    return EXIT_OK


COMMANDS = {"serve": _cmd_serve, "simulate": _cmd_simulate,
            "replay": _cmd_replay, "hash": _cmd_hash}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LogCorruptionError as exc:
        print(f"log corruption: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except OSError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
