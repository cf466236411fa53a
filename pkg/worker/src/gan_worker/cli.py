"""Entry point: gan-worker [--model NAME] [--host H] [--port P]."""

from __future__ import annotations

import argparse
import os

import uvicorn

from .app import create_app
from .model import DEFAULT_MODEL


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gan-worker",
                                     description="serve the render protocol")
    parser.add_argument("--model",
                        default=os.environ.get("GANWORKER_MODEL", DEFAULT_MODEL),
                        help="model name (env GANWORKER_MODEL)")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=9000)
    args = parser.parse_args(argv)
    uvicorn.run(create_app(model_name=args.model), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
