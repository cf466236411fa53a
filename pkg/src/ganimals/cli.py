"""Command line entry points: serve, simulate, stats."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import GanimalsError
from .service.config import load_config
from .service.simulate import report_json, run_simulation


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ganimals")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", default=None, help="path to a JSON config file")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    simulate = sub.add_parser("simulate", help="run a synthetic-user simulation")
    simulate.add_argument("--config", default=None)
    simulate.add_argument("--users", type=int, default=20)
    simulate.add_argument("--steps", type=int, default=50)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument(
        "--preference", default="mixed", choices=("mixed", "uniform", "dog")
    )
    simulate.add_argument("--out", default=None, help="write the report here (default stdout)")

    stats = sub.add_parser("stats", help="group comparison over a simulated corpus")
    stats.add_argument("--config", default=None)
    stats.add_argument("--metric", default="cute")
    stats.add_argument("--predicate", default="contains_dog")
    stats.add_argument("--users", type=int, default=20)
    stats.add_argument("--steps", type=int, default=50)
    stats.add_argument("--seed", type=int, default=0)

    return parser


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.api import create_app
    from .service.state import Service

    config = load_config(args.config)
    service = Service(config)
    app = create_app(service)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    report = run_simulation(
        config, n_users=args.users, n_steps=args.steps, seed=args.seed,
        preference=args.preference,
    )
    text = report_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_stats(args) -> int:
    from pathlib import Path

    from .service.simulate import simulate_service
    from .service.state import Service

    config = load_config(args.config)
    has_corpus = config.data_dir and (Path(config.data_dir) / "events.jsonl").exists()
    if has_corpus:
        service = Service(config)  # replay the recorded corpus
    else:
        service = simulate_service(config, args.users, args.steps, args.seed)
    try:
        comparison = service.stats(args.metric, args.predicate)
    finally:
        service.close()
    sys.stdout.write(json.dumps(comparison.to_dict(), sort_keys=True, indent=2) + "\n")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        return _cmd_stats(args)
    except GanimalsError as exc:
        parser.exit(2, f"error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
