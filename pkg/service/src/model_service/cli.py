"""Service entry point."""

from __future__ import annotations

import argparse
import sys

from .app import serve
from .backends import REAL, STUB, ServiceConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="model-service")
    parser.add_argument("--mode", choices=[STUB, REAL], default=STUB)
    parser.add_argument("--seed", type=int, default=0, help="stub determinism seed")
    parser.add_argument("--embed-dim", type=int, default=32, help="stub embedding width")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8091)
    parser.add_argument(
        "--model", action="append", default=[], metavar="KIND=NAME",
        help="real-mode model override (embed|generate|entail|qa2d)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = ServiceConfig(
        mode=args.mode, seed=args.seed, embed_dim=args.embed_dim,
        host=args.host, port=args.port,
    )
    for spec in args.model:
        kind, sep, name = spec.partition("=")
        if not sep or kind not in config.models:
            print(f"bad --model {spec!r}; expected KIND=NAME", file=sys.stderr)
            return 2
        config.models[kind] = name
    try:
        server = serve(config)
    except Exception as exc:
        print(f"startup failed: {exc}", file=sys.stderr)
        return 1
    print(f"model-service ({config.mode}) listening on {server.url}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
    return 0


if __name__ == "__main__":
    sys.exit(main())
