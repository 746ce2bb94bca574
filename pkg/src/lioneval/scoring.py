"""Edit-distance alignment, WER/CER computation, and benchmark aggregation.

WER = 100 * (S + D + I) / N over word tokens; CER is the same formula
over character tokens and is the default metric for Mandarin. Both
strings pass through the normalization pipeline before tokenization.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ScoringError
from .textnorm import DEFAULT_PROFILE, NormProfile, normalize, tokenize_chars, tokenize_words

METRICS = ("wer", "cer")


@dataclass(frozen=True)
class EditOps:
    """Minimum-edit-distance operation counts against a reference of length N."""

    substitutions: int
    deletions: int
    insertions: int
    ref_len: int

    @property
    def total(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def align(ref: Sequence[str], hyp: Sequence[str]) -> EditOps:
    """Align hypothesis to reference under unit costs.

    The S/D/I split is made deterministic by backtrace priority
    substitution, then deletion, then insertion; the total S+D+I is the
    Levenshtein distance and does not depend on the tie-break.
    """
    n, m = len(ref), len(hyp)
    # dist[i][j] = distance between ref[:i] and hyp[:j]
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row = dist[i]
        prev = dist[i - 1]
        ref_tok = ref[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ref_tok == hyp[j - 1] else 1
            row[j] = min(prev[j - 1] + cost, prev[j] + 1, row[j - 1] + 1)

    subs = dels = ins = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            if dist[i][j] == dist[i - 1][j - 1] + cost:
                subs += cost
                i -= 1
                j -= 1
                continue
        if i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            dels += 1
            i -= 1
            continue
        ins += 1
        j -= 1
    return EditOps(subs, dels, ins, n)


def default_metric(language: str) -> str:
    """CER for Mandarin (implicit word boundaries), WER otherwise."""
    return "cer" if language == "mandarin" else "wer"


def _tokenize(text: str, metric: str) -> list[str]:
    return tokenize_chars(text) if metric == "cer" else tokenize_words(text)


@dataclass(frozen=True)
class ScoredPair:
    metric: str
    value: float
    ops: EditOps


def score(
    ref_text: str,
    hyp_text: str,
    language: str,
    profile: NormProfile = DEFAULT_PROFILE,
    metric: str | None = None,
) -> ScoredPair:
    """Normalize, tokenize, and score one reference/hypothesis pair.

    Raises ScoringError when the reference normalizes to nothing (the
    error rate is undefined for N = 0). Values are percentages and may
    exceed 100.
    """
    chosen = metric or default_metric(language)
    if chosen not in METRICS:
        raise ScoringError(f"unknown metric {chosen!r}")
    ref_tokens = _tokenize(normalize(ref_text, profile), chosen)
    hyp_tokens = _tokenize(normalize(hyp_text, profile), chosen)
    if not ref_tokens:
        raise ScoringError("reference normalizes to an empty token list; error rate undefined")
    ops = align(ref_tokens, hyp_tokens)
    return ScoredPair(chosen, 100.0 * ops.total / ops.ref_len, ops)


@dataclass(frozen=True)
class ScoreRow:
    """One per-benchmark error rate for one model."""

    model: str
    benchmark: str
    language: str
    metric: str
    value: float


def score_benchmark(
    model: str,
    benchmark: str,
    language: str,
    refs: dict[str, str],
    hyps: dict[str, str],
    profile: NormProfile = DEFAULT_PROFILE,
    metric: str | None = None,
) -> tuple[ScoreRow, list[tuple[str, ScoredPair]]]:
    """Corpus-level error rate over a benchmark plus per-utterance detail.

    Utterances missing from ``hyps`` (or whose transcription failed) are
    scored against the empty hypothesis, which counts every reference
    token as a deletion. Per-utterance results are sorted by id.
    """
    chosen = metric or default_metric(language)
    per_utt: list[tuple[str, ScoredPair]] = []
    total_edits = 0
    total_ref = 0
    for uid in sorted(refs):
        pair = score(refs[uid], hyps.get(uid, ""), language, profile, chosen)
        per_utt.append((uid, pair))
        total_edits += pair.ops.total
        total_ref += pair.ops.ref_len
    if total_ref == 0:
        raise ScoringError(f"benchmark {benchmark!r} has no scorable references")
    row = ScoreRow(model, benchmark, language, chosen, 100.0 * total_edits / total_ref)
    return row, per_utt


def round_half_up(value: float, places: int = 2) -> float:
    """Decimal half-up rounding of the shortest repr of ``value``."""
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def _mean_decimal(values: Iterable[float]) -> Decimal:
    decimals = [Decimal(str(v)) for v in values]
    return sum(decimals, Decimal(0)) / Decimal(len(decimals))


@dataclass
class AggregateReport:
    """Rows entering an average, rows excluded by the threshold, and the mean."""

    rows: list[ScoreRow]
    excluded: list[ScoreRow]
    exclusion_threshold: float | None

    @property
    def average(self) -> float:
        return float(_mean_decimal(r.value for r in self.rows))

    @property
    def average_2dp(self) -> float:
        quantum = Decimal("0.01")
        return float(_mean_decimal(r.value for r in self.rows).quantize(quantum, ROUND_HALF_UP))


def aggregate(rows: Sequence[ScoreRow], threshold: float | None = None) -> AggregateReport:
    """Average per-benchmark values, optionally excluding anomalous rows.

    With a threshold, rows whose value exceeds it are listed but left out
    of the mean. All rows excluded (or no rows at all) is an error.
    """
    if not rows:
        raise ScoringError("aggregate requires at least one score row")
    ordered = sorted(rows, key=lambda r: (r.model, r.benchmark, r.language, r.metric))
    if threshold is None:
        kept, dropped = list(ordered), []
    else:
        kept = [r for r in ordered if r.value <= threshold]
        dropped = [r for r in ordered if r.value > threshold]
    if not kept:
        raise ScoringError(f"all {len(rows)} rows exceed the exclusion threshold {threshold}")
    return AggregateReport(kept, dropped, threshold)


# --- ScoreRow CSV + table rendering -----------------------------------------

_SCORE_FIELDS = ("model", "benchmark", "language", "metric", "value")


def write_score_rows(rows: Iterable[ScoreRow], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_SCORE_FIELDS)
        for r in rows:
            writer.writerow([r.model, r.benchmark, r.language, r.metric, f"{r.value:.2f}"])


def read_score_rows(path: str | Path) -> list[ScoreRow]:
    rows = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        for record in csv.DictReader(fh):
            rows.append(
                ScoreRow(
                    model=record["model"],
                    benchmark=record["benchmark"],
                    language=record["language"],
                    metric=record["metric"],
                    value=float(record["value"]),
                )
            )
    return rows


def format_value(value: float) -> str:
    return f"{round_half_up(value):.2f}"


def render_score_table(rows: Sequence[ScoreRow], threshold: float | None = None, markdown: bool = False) -> str:
    """Model-by-benchmark table with an Avg column, one report per model.

    Cells excluded by the threshold render as '-' and stay out of the
    model's average.
    """
    models: list[str] = []
    benchmarks: list[str] = []
    for r in rows:
        if r.model not in models:
            models.append(r.model)
        if r.benchmark not in benchmarks:
            benchmarks.append(r.benchmark)

    lines = []
    header = ["Model", *benchmarks, "Avg"]
    if markdown:
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
    else:
        lines.append(",".join(header))
    for model in models:
        model_rows = [r for r in rows if r.model == model]
        report = aggregate(model_rows, threshold)
        excluded = {(r.benchmark) for r in report.excluded}
        by_bench = {r.benchmark: r for r in model_rows}
        cells = [model]
        for bench in benchmarks:
            row = by_bench.get(bench)
            if row is None:
                cells.append("")
            elif bench in excluded:
                cells.append("-")
            else:
                cells.append(format_value(row.value))
        cells.append(format_value(report.average_2dp))
        if markdown:
            lines.append("| " + " | ".join(cells) + " |")
        else:
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
