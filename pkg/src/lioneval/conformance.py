"""Protocol conformance suite for transcriber adapters.

Runs a sequence of checks against any command implementing the
lion-transcribe wire protocol: handshake shape, order-preserving replay,
response schema (no language metadata), and per-request error isolation
after a malformed line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .harness import PROTOCOL_NAME, PROTOCOL_VERSION, ProtocolChild, TranscribeRequest

_ALLOWED_RESPONSE_KEYS = {"id", "text", "error"}
_FORBIDDEN_KEY_PARTS = ("lang", "locale", "tag")


@dataclass(frozen=True)
class ConformanceCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ConformanceReport:
    checks: list[ConformanceCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        lines = [
            f"[{'PASS' if c.passed else 'FAIL'}] {c.name}" + (f": {c.detail}" if c.detail else "")
            for c in self.checks
        ]
        return "\n".join(lines)


def _response_shape_issue(line: str) -> str | None:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError:
        return f"not valid JSON: {line!r}"
    if not isinstance(obj, dict):
        return f"not a JSON object: {line!r}"
    keys = set(obj)
    if "id" not in keys:
        return f"missing id: {line!r}"
    if ("text" in keys) == ("error" in keys):
        return f"must carry exactly one of text/error: {line!r}"
    extra = keys - _ALLOWED_RESPONSE_KEYS
    if extra:
        return f"unexpected keys {sorted(extra)}: {line!r}"
    for key in keys:
        lowered = key.lower()
        if any(part in lowered for part in _FORBIDDEN_KEY_PARTS):
            return f"language-like key {key!r}: {line!r}"
    return None


def run_conformance(
    transcriber_cmd: str | Sequence[str],
    n_requests: int = 100,
    start_timeout_s: float = 30.0,
    request_timeout_s: float = 30.0,
) -> ConformanceReport:
    """Drive one child session through the full conformance sequence."""
    checks: list[ConformanceCheck] = []

    try:
        child = ProtocolChild(transcriber_cmd, start_timeout_s)
    except Exception as exc:
        checks.append(ConformanceCheck("handshake", False, str(exc)))
        return ConformanceReport(checks)
    checks.append(
        ConformanceCheck("handshake", True, f"{PROTOCOL_NAME} v{PROTOCOL_VERSION}")
    )

    try:
        # Replay: write everything first so reordering would be observable.
        ids = [f"utt-{i:04d}" for i in range(n_requests)]
        for uid in ids:
            child.send_request(TranscribeRequest(uid, f"/audio/{uid}.wav"))
        got: list[str] = []
        shape_issue: str | None = None
        for _ in ids:
            _, line = child.recv_raw(request_timeout_s, "replay response")
            issue = _response_shape_issue(line)
            if issue is not None and shape_issue is None:
                shape_issue = issue
            try:
                got.append(str(json.loads(line).get("id")))
            except json.JSONDecodeError:
                got.append("<unparseable>")
        ordered = got == ids
        checks.append(
            ConformanceCheck(
                "order_preservation",
                ordered,
                f"{n_requests} requests answered in order" if ordered else f"got {got[:5]}...",
            )
        )
        checks.append(
            ConformanceCheck(
                "response_schema",
                shape_issue is None,
                shape_issue or "only {id, text|error} keys observed",
            )
        )

        # Error isolation: a malformed line must produce an error response
        # with a synthetic id, and the next real request must still work.
        child.send_raw("this is not json")
        _, line = child.recv_raw(request_timeout_s, "malformed-line response")
        obj = json.loads(line) if line.startswith("{") else {}
        isolated = isinstance(obj, dict) and "error" in obj and "id" in obj
        child.send_request(TranscribeRequest("after-malformed", "/audio/after.wav"))
        _, line2 = child.recv_raw(request_timeout_s, "post-malformed response")
        obj2 = json.loads(line2) if line2.startswith("{") else {}
        survived = isinstance(obj2, dict) and obj2.get("id") == "after-malformed" and "text" in obj2
        checks.append(
            ConformanceCheck(
                "error_isolation",
                isolated and survived,
                "malformed line answered with error response, loop continued"
                if isolated and survived
                else f"malformed reply {line!r}, follow-up {line2!r}",
            )
        )
    except Exception as exc:
        checks.append(ConformanceCheck("session", False, f"{type(exc).__name__}: {exc}"))
    finally:
        child.close()

    return ConformanceReport(checks)
