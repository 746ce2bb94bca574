"""Benchmark harness: drive a transcriber child process over a manifest.

The child speaks newline-delimited JSON on stdin/stdout. It must emit
``{"protocol": "lion-transcribe", "version": 1}`` as its first line, then
answer each request ``{"id": ..., "audio_path": ...}`` with either
``{"id": ..., "text": ...}`` or ``{"id": ..., "error": ...}``, flushing
per line. Requests never carry a language or locale field; a schema check
on every outgoing message enforces this.
"""

from __future__ import annotations

import json
import os
import queue
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from statistics import fmean, pstdev
from typing import Sequence

from .errors import HarnessError, ProtocolError
from .manifest import Utterance

PROTOCOL_NAME = "lion-transcribe"
PROTOCOL_VERSION = 1

_REQUEST_KEYS = frozenset({"id", "audio_path"})


@dataclass(frozen=True)
class TranscribeRequest:
    id: str
    audio_path: str

    def to_json_dict(self) -> dict:
        return {"id": self.id, "audio_path": self.audio_path}


@dataclass(frozen=True)
class TranscribeResponse:
    id: str
    text: str | None = None
    error: str | None = None


def assert_request_schema(obj: dict) -> None:
    """Reject any outgoing request that is not exactly {id, audio_path}."""
    keys = set(obj)
    if keys != _REQUEST_KEYS:
        raise ProtocolError(
            f"request must contain exactly {sorted(_REQUEST_KEYS)}, got {sorted(keys)}"
        )


def parse_response(line: str) -> TranscribeResponse:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"response is not valid JSON: {line!r}") from exc
    if not isinstance(obj, dict) or "id" not in obj:
        raise ProtocolError(f"response missing id: {line!r}")
    has_text = "text" in obj
    has_error = "error" in obj
    if has_text == has_error:
        raise ProtocolError(f"response must carry exactly one of text/error: {line!r}")
    return TranscribeResponse(str(obj["id"]), obj.get("text"), obj.get("error"))


@dataclass(frozen=True)
class LatencyStats:
    n: int
    mean_s: float
    std_s: float
    warmup_excluded: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean_s": self.mean_s,
            "std_s": self.std_s,
            "warmup_excluded": self.warmup_excluded,
        }


def latency_stats(latencies: Sequence[float], warmup: int) -> LatencyStats:
    """Mean and population standard deviation over post-warmup samples."""
    if warmup < 0:
        raise HarnessError(f"warmup must be >= 0, got {warmup}")
    if len(latencies) <= warmup:
        raise HarnessError(
            f"need more than {warmup} samples to exclude {warmup} warmup measurements, "
            f"got {len(latencies)}"
        )
    window = list(latencies[warmup:])
    return LatencyStats(len(window), fmean(window), pstdev(window), warmup)


@dataclass(frozen=True)
class HarnessConfig:
    warmup: int = 3
    request_timeout_s: float = 120.0
    start_timeout_s: float = 30.0
    pipelined: bool = False

    def to_dict(self) -> dict:
        return {
            "warmup": self.warmup,
            "request_timeout_s": self.request_timeout_s,
            "start_timeout_s": self.start_timeout_s,
            "pipelined": self.pipelined,
        }


@dataclass
class RunResult:
    model_label: str
    benchmark: str
    started_at: str
    finished_at: str
    hypotheses: dict[str, str]
    errors: dict[str, str]
    latencies: dict[str, float]
    stats: LatencyStats | None
    config: HarnessConfig
    aborted: bool = False

    def to_dict(self) -> dict:
        return {
            "model_label": self.model_label,
            "benchmark": self.benchmark,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "hypotheses": self.hypotheses,
            "errors": self.errors,
            "latencies": self.latencies,
            "stats": None if self.stats is None else self.stats.to_dict(),
            "config": self.config.to_dict(),
            "aborted": self.aborted,
        }


class ProtocolChild:
    """A transcriber child process plus a reader thread draining its stdout.

    The reader timestamps every line on arrival so latency covers exactly
    the request-write to response-read interval.
    """

    _CLOSED = object()

    def __init__(self, cmd: str | Sequence[str], start_timeout_s: float = 30.0):
        argv = shlex.split(cmd) if isinstance(cmd, str) else list(cmd)
        try:
            self.proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise HarnessError(f"could not start transcriber {argv!r}: {exc}") from exc
        self._lines: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._drain, daemon=True)
        self._reader.start()
        try:
            self._handshake(start_timeout_s)
        except (TimeoutError, EOFError, ProtocolError) as exc:
            self.proc.kill()
            self.proc.wait()
            raise HarnessError(f"handshake failed: {exc}") from exc

    def _drain(self) -> None:
        assert self.proc.stdout is not None
        for line in self.proc.stdout:
            self._lines.put((time.perf_counter(), line.rstrip("\n")))
        self._lines.put(self._CLOSED)

    def _handshake(self, timeout_s: float) -> None:
        item = self._next_line(timeout_s, "handshake")
        _, line = item
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"handshake line is not JSON: {line!r}") from exc
        if obj != {"protocol": PROTOCOL_NAME, "version": PROTOCOL_VERSION}:
            raise ProtocolError(f"unexpected handshake: {line!r}")

    def _next_line(self, timeout_s: float | None, what: str) -> tuple[float, str]:
        try:
            item = self._lines.get(timeout=timeout_s)
        except queue.Empty:
            raise TimeoutError(f"timed out waiting for {what}") from None
        if item is self._CLOSED:
            raise EOFError(f"transcriber exited while waiting for {what}")
        return item

    def send_raw(self, line: str) -> float:
        assert self.proc.stdin is not None
        t0 = time.perf_counter()
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise EOFError(f"transcriber closed stdin pipe: {exc}") from exc
        return t0

    def send_request(self, request: TranscribeRequest) -> float:
        obj = request.to_json_dict()
        assert_request_schema(obj)
        return self.send_raw(json.dumps(obj, ensure_ascii=False))

    def recv_raw(self, timeout_s: float | None, what: str = "response") -> tuple[float, str]:
        return self._next_line(timeout_s, what)

    def recv_response(self, timeout_s: float | None) -> tuple[float, TranscribeResponse]:
        t_read, line = self._next_line(timeout_s, "response")
        return t_read, parse_response(line)

    def close(self, grace_s: float = 2.0) -> None:
        if self.proc.stdin is not None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
        try:
            self.proc.wait(timeout=grace_s)
        except subprocess.TimeoutExpired:
            self.proc.terminate()
            try:
                self.proc.wait(timeout=grace_s)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def run_benchmark(
    utterances: Sequence[Utterance],
    transcriber_cmd: str | Sequence[str],
    config: HarnessConfig = HarnessConfig(),
    model_label: str = "unknown",
    benchmark: str = "unknown",
    out_dir: str | Path | None = None,
) -> RunResult:
    """Issue every utterance once, in manifest order, and collect responses.

    Per-request timeouts are recorded as errors and the run continues; a
    child crash aborts the run and persists partial results with the
    aborted flag set.
    """
    started_at = _now()
    child = ProtocolChild(transcriber_cmd, config.start_timeout_s)
    hypotheses: dict[str, str] = {}
    errors: dict[str, str] = {}
    latencies: dict[str, float] = {}
    ordered_latencies: list[float] = []
    aborted = False
    try:
        if config.pipelined:
            aborted = _run_pipelined(child, utterances, config, hypotheses, errors)
        else:
            aborted = _run_serial(
                child, utterances, config, hypotheses, errors, latencies, ordered_latencies
            )
    finally:
        child.close()

    stats: LatencyStats | None = None
    if not config.pipelined and len(ordered_latencies) > config.warmup:
        stats = latency_stats(ordered_latencies, config.warmup)

    result = RunResult(
        model_label=model_label,
        benchmark=benchmark,
        started_at=started_at,
        finished_at=_now(),
        hypotheses=hypotheses,
        errors=errors,
        latencies=latencies,
        stats=stats,
        config=config,
        aborted=aborted,
    )
    if out_dir is not None:
        save_run(result, out_dir)
    return result


def _record(response: TranscribeResponse, hypotheses: dict, errors: dict) -> None:
    if response.text is not None:
        hypotheses[response.id] = response.text
    else:
        errors[response.id] = response.error or "unknown error"


def _run_serial(child, utterances, config, hypotheses, errors, latencies, ordered) -> bool:
    stale: set[str] = set()
    for utt in utterances:
        request = TranscribeRequest(utt.id, utt.audio_path)
        try:
            t0 = child.send_request(request)
        except EOFError:
            errors[utt.id] = "transcriber exited before request could be sent"
            return True
        deadline = t0 + config.request_timeout_s
        while True:
            remaining = deadline - time.perf_counter()
            try:
                t_read, response = child.recv_response(max(0.0, remaining))
            except TimeoutError:
                errors[utt.id] = f"timeout after {config.request_timeout_s}s"
                stale.add(utt.id)
                break
            except EOFError:
                errors[utt.id] = "transcriber exited before responding"
                return True
            if response.id in stale:
                stale.discard(response.id)  # late answer to a timed-out request
                continue
            if response.id != utt.id:
                raise ProtocolError(
                    f"response id {response.id!r} does not match pending request {utt.id!r}"
                )
            _record(response, hypotheses, errors)
            elapsed = t_read - t0
            latencies[utt.id] = elapsed
            ordered.append(elapsed)
            break
    return False


def _run_pipelined(child, utterances, config, hypotheses, errors) -> bool:
    pending: list[str] = []
    for utt in utterances:
        try:
            child.send_request(TranscribeRequest(utt.id, utt.audio_path))
        except EOFError:
            errors[utt.id] = "transcriber exited before request could be sent"
            for left in pending:
                errors.setdefault(left, "transcriber exited before responding")
            return True
        pending.append(utt.id)
    for expected in pending:
        try:
            _, response = child.recv_response(config.request_timeout_s)
        except (TimeoutError, EOFError) as exc:
            errors[expected] = str(exc)
            if isinstance(exc, EOFError):
                for left in pending[pending.index(expected) :]:
                    errors.setdefault(left, "transcriber exited before responding")
                return True
            continue
        if response.id != expected:
            raise ProtocolError(
                f"response id {response.id!r} does not match pending request {expected!r}"
            )
        _record(response, hypotheses, errors)
    return False


# --- Run persistence ----------------------------------------------------------


def _safe_name(label: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-._" else "_" for ch in label)


def save_run(result: RunResult, out_dir: str | Path) -> Path:
    """Persist a run atomically (write to temp, then rename)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    name = f"{_safe_name(result.model_label)}__{_safe_name(result.benchmark)}.json"
    path = out_dir / name
    tmp = path.with_suffix(".json.tmp")
    tmp.write_text(json.dumps(result.to_dict(), indent=2, ensure_ascii=False) + "\n", "utf-8")
    os.replace(tmp, path)
    return path


def load_run(path: str | Path) -> RunResult:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    stats = None
    if obj.get("stats") is not None:
        stats = LatencyStats(**obj["stats"])
    return RunResult(
        model_label=obj["model_label"],
        benchmark=obj["benchmark"],
        started_at=obj["started_at"],
        finished_at=obj["finished_at"],
        hypotheses=obj["hypotheses"],
        errors=obj["errors"],
        latencies=obj["latencies"],
        stats=stats,
        config=HarnessConfig(**obj["config"]),
        aborted=obj["aborted"],
    )


# --- Latency report rendering -------------------------------------------------


def _latency_rows(runs: Sequence[RunResult]) -> list[tuple[str, LatencyStats]]:
    rows = [(r.model_label, r.stats) for r in runs if r.stats is not None]
    rows.sort(key=lambda item: (-item[1].mean_s, item[0]))
    return rows


def render_latency_markdown(runs: Sequence[RunResult]) -> str:
    lines = ["| Model | Time (s/sample) |", "|---|---|"]
    for label, stats in _latency_rows(runs):
        lines.append(f"| {label} | {stats.mean_s:.4f} ± {stats.std_s:.4f} |")
    return "\n".join(lines) + "\n"


def render_latency_csv(runs: Sequence[RunResult]) -> str:
    lines = ["model,mean_s,std_s,n"]
    for label, stats in _latency_rows(runs):
        lines.append(f"{label},{stats.mean_s:.4f},{stats.std_s:.4f},{stats.n}")
    return "\n".join(lines) + "\n"


def emit_run_report(runs: Sequence[RunResult], out_dir: str | Path) -> tuple[Path, Path]:
    """Write latency tables (Markdown + CSV) sorted descending by mean."""
    if not runs:
        raise HarnessError("emit_run_report requires at least one run")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    md_path = out_dir / "latency_report.md"
    csv_path = out_dir / "latency_report.csv"
    md_path.write_text(render_latency_markdown(runs), encoding="utf-8")
    csv_path.write_text(render_latency_csv(runs), encoding="utf-8")
    return md_path, csv_path
