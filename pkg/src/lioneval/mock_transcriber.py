"""Zero-dependency echo transcriber for harness tests and overhead budgets.

Speaks the lion-transcribe protocol and answers each request with the
audio file's base name without extension. Run as a module:

    python -m lioneval.mock_transcriber [--sleep 0.05] [--fail-id ID]
        [--crash-after N]
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, ensure_ascii=False) + "\n")
    sys.stdout.flush()


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="echo transcriber (test double)")
    parser.add_argument("--sleep", type=float, default=0.0, help="seconds to sleep per request")
    parser.add_argument(
        "--fail-id", action="append", default=[], help="respond with an error for this id"
    )
    parser.add_argument(
        "--crash-after", type=int, default=None, help="exit abruptly after N responses"
    )
    args = parser.parse_args(argv)

    _emit({"protocol": "lion-transcribe", "version": 1})

    answered = 0
    malformed = 0
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise ValueError("request must be an object")
            rid = request["id"]
            audio_path = request["audio_path"]
        except Exception:
            malformed += 1
            _emit({"id": f"malformed-{malformed}", "error": "unparseable request line"})
            continue
        if args.sleep > 0:
            time.sleep(args.sleep)
        if rid in args.fail_id:
            _emit({"id": rid, "error": "simulated transcription failure"})
        else:
            _emit({"id": rid, "text": Path(audio_path).stem})
        answered += 1
        if args.crash_after is not None and answered >= args.crash_after:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
