"""Published reference figures for the supported corpora and benchmark systems.

These constants drive the regression fixtures: per-corpus sample counts
and hours, per-benchmark error rates of public ASR systems, and their
measured inference latencies. ``synthesize_corpus`` fabricates manifests
whose statistics match the corpus table exactly (uniform durations, so
per-split hours are reproduced to float precision).
"""

from __future__ import annotations

import json
from pathlib import Path

from .manifest import CorpusSpec, Utterance
from .scoring import ScoreRow

# (language, dataset) -> {split: (samples, hours)}
DATASET_STATS: dict[tuple[str, str], dict[str, tuple[int, float]]] = {
    ("english", "Librispeech"): {
        "train": (28539, 100.59),
        "valid": (2700, 5.36),
        "test": (2619, 5.39),
    },
    ("english", "NSC"): {
        "train": (100000, 147.97),
        "valid": (2997, 4.90),
        "test": (3000, 4.95),
    },
    ("mandarin", "AISHELL-1"): {
        "train": (120098, 150.85),
        "valid": (14326, 18.09),
        "test": (7176, 10.03),
    },
    ("mandarin", "AISHELL-3"): {
        "train": (56936, 56.86),
        "valid": (6326, 6.31),
        "test": (24773, 22.45),
    },
    ("mandarin", "Fleurs"): {
        "train": (3246, 9.73),
        "valid": (409, 1.27),
        "test": (945, 3.07),
    },
    ("mandarin", "Common Voice 23"): {
        "train": (29473, 42.43),
        "valid": (10635, 15.95),
        "test": (9999, 16.43),
    },
    ("tamil", "Fleurs"): {
        "train": (2366, 8.68),
        "valid": (376, 1.25),
        "test": (591, 2.13),
    },
    ("tamil", "SLR127"): {
        "train": (69575, 119.86),
        "valid": (7731, 13.41),
        "test": (12086, 16.80),
    },
    ("tamil", "SLR65"): {
        "train": (3427, 5.66),
        "valid": (428, 0.72),
        "test": (429, 0.69),
    },
    ("tamil", "Common Voice 23"): {
        "train": (45186, 81.38),
        "valid": (9964, 15.71),
        "test": (7907, 12.28),
    },
    ("malay", "Mesolitica"): {
        "train": (17851, 49.43),
        "valid": (992, 2.71),
        "test": (993, 2.75),
    },
    ("malay", "Fleurs"): {
        "train": (2667, 9.55),
        "valid": (324, 0.93),
        "test": (749, 2.26),
    },
}

TRAIN_TOTAL_SAMPLES = 479364
TRAIN_TOTAL_HOURS = 782.99
GRAND_TOTAL_SAMPLES = 607839
GRAND_TOTAL_HOURS = 968.83

# Benchmark columns: (name, language, metric)
BENCHMARKS: tuple[tuple[str, str, str], ...] = (
    ("en-LS", "english", "wer"),
    ("en-NSC", "english", "wer"),
    ("zh-CV", "mandarin", "cer"),
    ("zh-AISH1", "mandarin", "cer"),
    ("zh-AISH3", "mandarin", "cer"),
    ("zh-Fleurs", "mandarin", "cer"),
    ("ta-CV", "tamil", "wer"),
    ("ta-SLR65", "tamil", "wer"),
    ("ta-SLR127", "tamil", "wer"),
    ("ta-Fleurs", "tamil", "wer"),
    ("ms-Meso", "malay", "wer"),
    ("ms-Fleurs", "malay", "wer"),
)

# Per-system error rates in BENCHMARKS column order, plus the average each
# system reports. Averages were published after the systems averaged at
# their own internal precision, hence the +-0.05 comparison tolerance.
REFERENCE_SCORES: dict[str, tuple[float, ...]] = {
    "Whisper-large-v3-turbo": (3.04, 32.02, 17.91, 9.64, 16.81, 10.63, 74.50, 58.13, 69.56, 66.90, 28.47, 8.88),
    "SeaLLMs-Audio-7B": (94.74, 9.53, 8.68, 9.65, 9.76, 37.09, 126.70, 127.24, 138.65, 105.31, 71.34, 26.25),
    "Qwen2.5-Omni-3B": (29.21, 34.79, 46.36, 28.25, 44.55, 54.74, 318.36, 465.58, 448.82, 311.67, 211.90, 74.69),
    "Qwen2.5-Omni-7B": (13.80, 22.96, 14.49, 7.33, 22.58, 16.68, 252.06, 239.15, 303.96, 326.43, 158.06, 43.92),
    "Qwen3-ASR-0.6B": (2.74, 7.64, 10.06, 2.08, 2.59, 9.75, 121.10, 127.00, 129.12, 130.09, 47.29, 18.71),
    "Qwen3-ASR-1.7B": (2.31, 6.22, 7.50, 1.52, 2.08, 9.33, 139.96, 134.63, 144.49, 147.23, 39.00, 10.87),
    "MERaLiON-2-10B-ASR": (2.54, 4.62, 8.83, 3.09, 4.07, 11.99, 31.78, 19.29, 22.42, 28.68, 25.90, 8.55),
    "Polyglot-Lion-0.6B": (2.67, 6.09, 6.16, 1.93, 2.32, 9.19, 42.16, 23.07, 28.14, 37.68, 24.33, 14.45),
    "Polyglot-Lion-1.7B": (2.10, 5.28, 4.91, 1.45, 1.86, 8.00, 39.19, 19.75, 26.83, 37.28, 21.51, 9.98),
}

REFERENCE_AVERAGES: dict[str, float] = {
    "Whisper-large-v3-turbo": 33.04,
    "SeaLLMs-Audio-7B": 63.75,
    "Qwen2.5-Omni-3B": 172.37,
    "Qwen2.5-Omni-7B": 118.45,
    "Qwen3-ASR-0.6B": 50.68,
    "Qwen3-ASR-1.7B": 53.76,
    "MERaLiON-2-10B-ASR": 14.32,
    "Polyglot-Lion-0.6B": 16.52,
    "Polyglot-Lion-1.7B": 14.85,
}

# (model, mean seconds/sample, population std)
REFERENCE_LATENCIES: tuple[tuple[str, float, float], ...] = (
    ("MERaLiON-2-10B-ASR", 2.0152, 0.8846),
    ("Qwen2.5-Omni-3B", 1.7838, 1.0431),
    ("Qwen2.5-Omni-7B", 1.3414, 0.6572),
    ("SeaLLMs-Audio-7B", 0.6422, 0.0000),
    ("Whisper-large-v3-turbo", 0.2822, 0.0230),
    ("Qwen3-ASR-1.7B", 0.0809, 0.0290),
    ("Qwen3-ASR-0.6B", 0.0686, 0.0251),
    ("Polyglot-Lion-0.6B", 0.0999, 0.0561),
    ("Polyglot-Lion-1.7B", 0.1038, 0.0621),
)


def reference_score_rows() -> list[ScoreRow]:
    rows = []
    for model, values in REFERENCE_SCORES.items():
        for (bench, language, metric), value in zip(BENCHMARKS, values):
            rows.append(ScoreRow(model, bench, language, metric, value))
    return rows


def _slug(name: str) -> str:
    return "".join(ch.lower() if ch.isalnum() else "-" for ch in name)


def synthesize_corpus(
    stats: dict[tuple[str, str], dict[str, tuple[int, float]]] | None = None,
    splits: tuple[str, ...] = ("train", "valid", "test"),
) -> CorpusSpec:
    """Build an in-memory corpus matching the given statistics table.

    Each (language, dataset, split) cell gets its exact sample count with
    uniform durations summing to the stated hours.
    """
    stats = DATASET_STATS if stats is None else stats
    spec = CorpusSpec()
    for (language, dataset), per_split in stats.items():
        slug = _slug(dataset)
        for split in splits:
            if split not in per_split:
                continue
            samples, hours = per_split[split]
            duration = hours * 3600.0 / samples
            for i in range(samples):
                spec.add(
                    Utterance(
                        id=f"{language}-{slug}-{split}-{i:06d}",
                        audio_path=f"audio/{language}/{slug}/{split}/{i:06d}.wav",
                        duration_s=duration,
                        transcript_raw=f"utt {i}",
                        language=language,
                        dataset=dataset,
                        split=split,
                    )
                )
    return spec


def write_corpus_fixture(
    out_dir: str | Path,
    stats: dict[tuple[str, str], dict[str, tuple[int, float]]] | None = None,
    splits: tuple[str, ...] = ("train", "valid", "test"),
) -> Path:
    """Write one manifest per (language, dataset) plus a corpus config.

    Returns the config path; manifests land next to it.
    """
    stats = DATASET_STATS if stats is None else stats
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for (language, dataset), per_split in stats.items():
        slug = _slug(dataset)
        name = f"{language}_{slug}.jsonl"
        part = synthesize_corpus({(language, dataset): per_split}, splits)
        with (out_dir / name).open("w", encoding="utf-8", newline="\n") as fh:
            for utt in part.iter_utterances():
                fh.write(json.dumps(utt.to_json_dict(), ensure_ascii=False))
                fh.write("\n")
        entries.append({"language": language, "dataset": dataset, "path": name})
    config = {"config_version": 1, "manifests": entries}
    config_path = out_dir / "corpus.json"
    config_path.write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    return config_path
