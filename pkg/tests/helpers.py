"""Shared construction helpers for the test suite."""

from __future__ import annotations

from lioneval.manifest import CorpusSpec, Utterance


def make_utterance(
    uid: str,
    language: str = "english",
    dataset: str = "toy",
    split: str = "train",
    duration_s: float = 2.5,
    text: str = "hello world",
    audio_path: str | None = None,
) -> Utterance:
    return Utterance(
        id=uid,
        audio_path=audio_path or f"audio/{dataset}/{uid}.wav",
        duration_s=duration_s,
        transcript_raw=text,
        language=language,
        dataset=dataset,
        split=split,
    )


def make_corpus(layout: dict[str, dict[str, int]], split: str = "train") -> CorpusSpec:
    """layout maps language -> dataset -> utterance count."""
    spec = CorpusSpec()
    for language, datasets in layout.items():
        for dataset, count in datasets.items():
            for i in range(count):
                spec.add(
                    make_utterance(
                        f"{language}-{dataset}-{i:04d}",
                        language=language,
                        dataset=dataset,
                        split=split,
                        duration_s=1.0 + (i % 7),
                    )
                )
    return spec
