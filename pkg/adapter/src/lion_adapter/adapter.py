"""Transcriber adapter: reads requests from stdin, answers on stdout.

The wire protocol is newline-delimited JSON. The first emitted line is
the handshake ``{"protocol": "lion-transcribe", "version": 1}``; every
request ``{"id": ..., "audio_path": ...}`` is answered in arrival order
with ``{"id": ..., "text": ...}`` or ``{"id": ..., "error": ...}``.

Requests carry no language information and none is inferred from file
names or side channels; whatever backend is plugged in sees only the
audio path.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, TextIO

PROTOCOL_NAME = "lion-transcribe"
PROTOCOL_VERSION = 1

MODES = ("echo", "command", "model")


class AdapterError(Exception):
    """Configuration or backend construction problem."""


@dataclass(frozen=True)
class AdapterConfig:
    mode: str
    model_id: str | None = None
    command_template: str | None = None
    device: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise AdapterError(f"unknown mode {self.mode!r}")
        if self.mode == "model" and not self.model_id:
            raise AdapterError("model mode requires a model identifier")
        if self.mode == "command" and not self.command_template:
            raise AdapterError("command mode requires a command template")


def _require_readable(audio_path: str) -> Path:
    path = Path(audio_path)
    if not path.is_file():
        raise FileNotFoundError(f"audio file not readable: {audio_path}")
    return path


def echo_transcribe(audio_path: str) -> str:
    """Base name without extension; needs no backend and reads no files."""
    return Path(audio_path).stem


def make_command_backend(template: str) -> Callable[[str], str]:
    """Run an external command per request; {audio} expands to the path."""
    if "{audio}" not in template:
        raise AdapterError("command template must contain {audio}")

    def transcribe(audio_path: str) -> str:
        _require_readable(audio_path)
        argv = [part.replace("{audio}", audio_path) for part in shlex.split(template)]
        proc = subprocess.run(argv, capture_output=True, text=True)
        if proc.returncode != 0:
            raise RuntimeError(
                f"command exited {proc.returncode}: {proc.stderr.strip()[:200]}"
            )
        return proc.stdout.strip()

    return transcribe


def make_model_backend(model_id: str, device: str | None = None) -> Callable[[str], str]:
    """Wrap a speech-recognition pipeline around a local/cached checkpoint."""
    try:
        from transformers import pipeline
    except ImportError as exc:
        raise AdapterError(
            "model mode needs the 'transformers' package (pip install lion-adapter[model])"
        ) from exc
    try:
        asr = pipeline("automatic-speech-recognition", model=model_id, device=device)
    except Exception as exc:
        raise AdapterError(f"could not load model {model_id!r}: {exc}") from exc

    def transcribe(audio_path: str) -> str:
        _require_readable(audio_path)
        result = asr(audio_path)
        return result["text"] if isinstance(result, dict) else str(result)

    return transcribe


def build_backend(config: AdapterConfig) -> Callable[[str], str]:
    if config.mode == "echo":
        return echo_transcribe
    if config.mode == "command":
        return make_command_backend(config.command_template or "")
    return make_model_backend(config.model_id or "", config.device)


def _emit(stream: TextIO, obj: dict) -> None:
    stream.write(json.dumps(obj, ensure_ascii=False) + "\n")
    stream.flush()


def run_loop(
    backend: Callable[[str], str],
    stdin: TextIO,
    stdout: TextIO,
) -> int:
    """Handshake, then answer requests one at a time until stdin closes.

    A malformed line gets an error response with a synthetic id; a backend
    failure gets an error response for that request's id. Neither stops
    the loop.
    """
    _emit(stdout, {"protocol": PROTOCOL_NAME, "version": PROTOCOL_VERSION})
    malformed = 0
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise ValueError("request must be a JSON object")
            rid = str(request["id"])
        except Exception:
            malformed += 1
            _emit(stdout, {"id": f"malformed-{malformed}", "error": "unparseable request line"})
            continue
        audio_path = request.get("audio_path")
        if not isinstance(audio_path, str):
            _emit(stdout, {"id": rid, "error": "request has no audio_path"})
            continue
        try:
            text = backend(audio_path)
        except Exception as exc:
            _emit(stdout, {"id": rid, "error": str(exc)})
            continue
        _emit(stdout, {"id": rid, "text": text})
    return 0


def serve(config: AdapterConfig, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    """Build the backend (before the handshake, so load cost lands in the
    caller's warmup window), then run the request loop."""
    backend = build_backend(config)
    return run_loop(backend, stdin or sys.stdin, stdout or sys.stdout)
