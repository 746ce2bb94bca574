"""Dataset manifests: loading, validation, filtering, and summary statistics.

A manifest is a UTF-8 JSON-lines file, one utterance per line, with the
fields ``id, audio_path, duration_s, text, language, dataset, split``.
Unknown fields are preserved and round-tripped. A corpus config (JSON)
lists manifest paths per (language, dataset).
"""

from __future__ import annotations

import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .errors import ConfigError, ManifestError

# Canonical language order, used for all deterministic orderings.
LANGUAGES = ("english", "mandarin", "tamil", "malay")
SPLITS = ("train", "valid", "test")

_MANIFEST_FIELDS = ("id", "audio_path", "duration_s", "text", "language", "dataset", "split")


@dataclass(frozen=True, slots=True)
class Utterance:
    """One audio/transcript pair as described by a manifest line."""

    id: str
    audio_path: str
    duration_s: float
    transcript_raw: str
    language: str
    dataset: str
    split: str
    extras: tuple[tuple[str, object], ...] = ()

    def to_json_dict(self) -> dict:
        out = {
            "id": self.id,
            "audio_path": self.audio_path,
            "duration_s": self.duration_s,
            "text": self.transcript_raw,
            "language": self.language,
            "dataset": self.dataset,
            "split": self.split,
        }
        out.update(dict(self.extras))
        return out


def _parse_utterance(obj: dict, path: str, line_no: int) -> Utterance:
    for name in _MANIFEST_FIELDS:
        if name not in obj:
            raise ManifestError(f"missing field {name!r}", path, line_no)
    duration = obj["duration_s"]
    if not isinstance(duration, (int, float)) or isinstance(duration, bool):
        raise ManifestError("duration_s must be a number", path, line_no)
    if duration <= 0:
        raise ManifestError(f"duration_s must be > 0, got {duration}", path, line_no)
    language = obj["language"]
    if language not in LANGUAGES:
        raise ManifestError(f"unknown language {language!r}", path, line_no)
    split = obj["split"]
    if split not in SPLITS:
        raise ManifestError(f"unknown split {split!r}", path, line_no)
    uid = obj["id"]
    if not isinstance(uid, str) or not uid:
        raise ManifestError("id must be a non-empty string", path, line_no)
    dataset = obj["dataset"]
    if not isinstance(dataset, str) or not dataset:
        raise ManifestError("dataset must be a non-empty string", path, line_no)
    extras = tuple(sorted((k, v) for k, v in obj.items() if k not in _MANIFEST_FIELDS))
    return Utterance(
        id=uid,
        audio_path=str(obj["audio_path"]),
        duration_s=float(duration),
        transcript_raw=str(obj["text"]),
        language=sys.intern(language),
        dataset=sys.intern(dataset),
        split=sys.intern(split),
        extras=extras,
    )


class CorpusSpec:
    """Utterances grouped by (language, dataset) and split.

    Invariants enforced at construction: every utterance sits under the key
    matching its own language/dataset fields, and ids are unique within
    (dataset, split).
    """

    def __init__(self) -> None:
        self.datasets: dict[tuple[str, str], dict[str, list[Utterance]]] = {}
        self._seen_ids: set[tuple[str, str, str]] = set()

    def add(self, utt: Utterance, path: str | None = None, line_no: int | None = None) -> None:
        key = (utt.dataset, utt.split, utt.id)
        if key in self._seen_ids:
            raise ManifestError(
                f"duplicate id {utt.id!r} within dataset {utt.dataset!r} split {utt.split!r}",
                path,
                line_no,
            )
        self._seen_ids.add(key)
        splits = self.datasets.setdefault((utt.language, utt.dataset), {s: [] for s in SPLITS})
        splits[utt.split].append(utt)

    @property
    def languages(self) -> list[str]:
        present = {lang for lang, _ in self.datasets}
        return [lang for lang in LANGUAGES if lang in present]

    def dataset_names(self, language: str) -> list[str]:
        return sorted(name for lang, name in self.datasets if lang == language)

    def split_utterances(self, language: str, dataset: str, split: str) -> list[Utterance]:
        return self.datasets.get((language, dataset), {}).get(split, [])

    def iter_utterances(self, split: str | None = None) -> Iterator[Utterance]:
        for language in self.languages:
            for dataset in self.dataset_names(language):
                for s in SPLITS if split is None else (split,):
                    yield from self.datasets[(language, dataset)][s]

    def size(self, split: str | None = None) -> int:
        return sum(1 for _ in self.iter_utterances(split))

    def keys(self) -> list[tuple[str, str]]:
        out = []
        for language in self.languages:
            for dataset in self.dataset_names(language):
                out.append((language, dataset))
        return out


def load_manifest(path: str | Path, corpus: CorpusSpec | None = None) -> CorpusSpec:
    """Parse one JSON-lines manifest into a (possibly shared) CorpusSpec.

    Raises ManifestError with the offending line number on parse errors,
    invariant violations, and duplicate ids. An empty file loads fine and
    only emits a warning.
    """
    path = Path(path)
    if not path.exists():
        raise ManifestError("manifest file not found", str(path))
    spec = corpus if corpus is not None else CorpusSpec()
    n_lines = 0
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            n_lines += 1
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"invalid JSON: {exc.msg}", str(path), line_no) from exc
            if not isinstance(obj, dict):
                raise ManifestError("manifest line must be a JSON object", str(path), line_no)
            spec.add(_parse_utterance(obj, str(path), line_no), str(path), line_no)
    if n_lines == 0:
        warnings.warn(f"manifest {path} is empty", stacklevel=2)
    return spec


def load_manifest_utterances(path: str | Path) -> list[Utterance]:
    """Load one manifest preserving file order (the order requests are issued)."""
    path = Path(path)
    if not path.exists():
        raise ManifestError("manifest file not found", str(path))
    dedup = CorpusSpec()
    ordered: list[Utterance] = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"invalid JSON: {exc.msg}", str(path), line_no) from exc
            utt = _parse_utterance(obj, str(path), line_no)
            dedup.add(utt, str(path), line_no)
            ordered.append(utt)
    return ordered


def save_manifest(corpus: CorpusSpec, path: str | Path) -> None:
    """Write every utterance back out as JSON lines (LF-terminated)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for utt in corpus.iter_utterances():
            fh.write(json.dumps(utt.to_json_dict(), ensure_ascii=False))
            fh.write("\n")


def load_corpus_config(config_path: str | Path) -> CorpusSpec:
    """Load and merge every manifest listed in a corpus config file.

    Each entry declares the (language, dataset) its manifest must contain;
    mismatching lines are rejected.
    """
    config_path = Path(config_path)
    if not config_path.exists():
        raise ConfigError(f"corpus config not found: {config_path}")
    try:
        config = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"corpus config is not valid JSON: {exc}") from exc
    entries = config.get("manifests")
    if not isinstance(entries, list):
        raise ConfigError("corpus config must contain a 'manifests' list")
    spec = CorpusSpec()
    base = config_path.parent
    for entry in entries:
        language, dataset = entry.get("language"), entry.get("dataset")
        manifest_path = base / entry["path"]
        part = load_manifest(manifest_path)
        for lang, name in part.keys():
            if language is not None and lang != language:
                raise ConfigError(
                    f"{manifest_path}: declared language {language!r} but found {lang!r}"
                )
            if dataset is not None and name != dataset:
                raise ConfigError(
                    f"{manifest_path}: declared dataset {dataset!r} but found {name!r}"
                )
        for utt in part.iter_utterances():
            spec.add(utt, str(manifest_path))
    return spec


def filter_by_duration(corpus: CorpusSpec, max_s: float = 30.0) -> tuple[CorpusSpec, int]:
    """Keep utterances with duration_s <= max_s; the boundary is inclusive.

    Returns the filtered corpus (relative order preserved) and the number
    of dropped utterances.
    """
    if max_s <= 0:
        raise ValueError(f"max_s must be > 0, got {max_s}")
    out = CorpusSpec()
    dropped = 0
    for utt in corpus.iter_utterances():
        if utt.duration_s <= max_s:
            out.add(utt)
        else:
            dropped += 1
    return out, dropped


@dataclass(frozen=True)
class StatsRow:
    language: str
    dataset: str
    split: str
    sample_count: int
    hours: float


@dataclass
class StatsTable:
    """Per-(language, dataset, split) sample counts and hours, plus totals.

    Hours are kept at full precision; rounding to 2 decimals happens only
    when rendering.
    """

    rows: list[StatsRow] = field(default_factory=list)
    split_totals: dict[str, tuple[int, float]] = field(default_factory=dict)
    grand_total: tuple[int, float] = (0, 0.0)

    def row(self, language: str, dataset: str, split: str) -> StatsRow | None:
        for r in self.rows:
            if (r.language, r.dataset, r.split) == (language, dataset, split):
                return r
        return None


def compute_stats(corpus: CorpusSpec) -> StatsTable:
    """One row per (language, dataset, split) in canonical order, with totals."""
    table = StatsTable()
    split_counts = {s: 0 for s in SPLITS}
    split_hours = {s: 0.0 for s in SPLITS}
    for language in corpus.languages:
        for dataset in corpus.dataset_names(language):
            for split in SPLITS:
                utts = corpus.split_utterances(language, dataset, split)
                if not utts:
                    continue
                hours = sum(u.duration_s for u in utts) / 3600.0
                table.rows.append(StatsRow(language, dataset, split, len(utts), hours))
                split_counts[split] += len(utts)
                split_hours[split] += hours
    table.split_totals = {s: (split_counts[s], split_hours[s]) for s in SPLITS}
    table.grand_total = (sum(split_counts.values()), sum(split_hours.values()))
    return table


def _fmt_hours(hours: float) -> str:
    return f"{hours:.2f}"


def stats_to_csv(table: StatsTable) -> str:
    lines = ["language,dataset,split,samples,hours"]
    for r in table.rows:
        lines.append(f"{r.language},{r.dataset},{r.split},{r.sample_count},{_fmt_hours(r.hours)}")
    for split in SPLITS:
        count, hours = table.split_totals.get(split, (0, 0.0))
        lines.append(f"total,,{split},{count},{_fmt_hours(hours)}")
    count, hours = table.grand_total
    lines.append(f"total,,all,{count},{_fmt_hours(hours)}")
    return "\n".join(lines) + "\n"


def stats_to_markdown(table: StatsTable) -> str:
    """Wide-format table: one row per (language, dataset), split columns."""
    by_key: dict[tuple[str, str], dict[str, StatsRow]] = {}
    for r in table.rows:
        by_key.setdefault((r.language, r.dataset), {})[r.split] = r
    header = (
        "| Lang. | Dataset | Train S | Train H | Valid S | Valid H "
        "| Test S | Test H | Total S | Total H |"
    )
    sep = "|" + "---|" * 10
    lines = [header, sep]
    for (language, dataset), splits in by_key.items():
        cells = [language, dataset]
        total_s, total_h = 0, 0.0
        for split in SPLITS:
            row = splits.get(split)
            if row is None:
                cells += ["0", "0.00"]
            else:
                cells += [f"{row.sample_count:,}", _fmt_hours(row.hours)]
                total_s += row.sample_count
                total_h += row.hours
        cells += [f"{total_s:,}", _fmt_hours(total_h)]
        lines.append("| " + " | ".join(cells) + " |")
    cells = ["Total", "-"]
    for split in SPLITS:
        count, hours = table.split_totals.get(split, (0, 0.0))
        cells += [f"{count:,}", _fmt_hours(hours)]
    count, hours = table.grand_total
    cells += [f"{count:,}", _fmt_hours(hours)]
    lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
