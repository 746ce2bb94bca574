"""Command-line entry point for the transcriber adapter."""

from __future__ import annotations

import argparse
import sys

from .adapter import AdapterConfig, AdapterError, serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lion-adapter",
        description="Transcriber adapter speaking the lion-transcribe protocol on stdin/stdout",
    )
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--echo", action="store_true", help="answer with the audio file stem")
    mode.add_argument("--model", metavar="ID", help="speech-recognition checkpoint to load")
    mode.add_argument(
        "--command", metavar="TEMPLATE", help="external command; {audio} expands to the path"
    )
    parser.add_argument("--device", metavar="HINT", help="device hint for model mode")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.echo:
        config = AdapterConfig(mode="echo")
    elif args.command:
        config = AdapterConfig(mode="command", command_template=args.command)
    else:
        config = AdapterConfig(mode="model", model_id=args.model, device=args.device)
    try:
        return serve(config)
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
