"""Acceptance suite: one test per release criterion, each printing a
pass/fail line. Tolerances are fixed here and must not be loosened."""

from __future__ import annotations

import itertools
import random
import sys
import time
from collections import Counter
from contextlib import contextmanager

from helpers import make_corpus, make_utterance
from lioneval import refdata
from lioneval.balancer import balance, export_balanced, plan
from lioneval.cost import TrainingSetup, cost_ratio, estimate_cost
from lioneval.harness import HarnessConfig, latency_stats, run_benchmark
from lioneval.manifest import compute_stats
from lioneval.scoring import ScoreRow, aggregate, align
from lioneval.textnorm import normalize
from oracles import brute_force_balance, recursive_edit_distance

MOCK = [sys.executable, "-m", "lioneval.mock_transcriber"]


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def test_corpus_statistics_reproduction(fullsize_corpus):
    with criterion("corpus statistics table reproduced from fixture manifests"):
        t0 = time.perf_counter()
        table = compute_stats(fullsize_corpus)
        elapsed = time.perf_counter() - t0
        assert elapsed < 5.0, f"compute_stats took {elapsed:.2f}s"

        for (language, dataset), per_split in refdata.DATASET_STATS.items():
            for split, (samples, hours) in per_split.items():
                row = table.row(language, dataset, split)
                assert row is not None, (language, dataset, split)
                assert row.sample_count == samples, (language, dataset, split)
                assert abs(row.hours - hours) <= 0.01, (language, dataset, split)

        train_samples, train_hours = table.split_totals["train"]
        assert train_samples == refdata.TRAIN_TOTAL_SAMPLES
        assert abs(train_hours - refdata.TRAIN_TOTAL_HOURS) <= 0.05


def test_two_stage_upsampling_on_published_counts(fullsize_corpus):
    with criterion("two-stage upsampling targets and parity on published train counts"):
        t0 = time.perf_counter()
        sampling_plan = plan(fullsize_corpus)
        assert sampling_plan.global_target == 120098
        assert sampling_plan.language_target("english") == 100000
        assert sampling_plan.language_target("mandarin") == 120098
        assert sampling_plan.language_target("tamil") == 69575
        assert sampling_plan.language_target("malay") == 17851
        assert sampling_plan.replication("english", "Librispeech") == 4
        assert sampling_plan.replication("english", "NSC") == 1

        bc = balance(fullsize_corpus, 20260809)
        elapsed = time.perf_counter() - t0
        assert elapsed < 30.0, f"plan + balance took {elapsed:.2f}s"
        for language in ("english", "mandarin", "tamil", "malay"):
            assert len(bc.per_language[language]) == 120098
        assert bc.total() == 480392


def test_balancer_determinism(tmp_path):
    with criterion("balancer determinism: seed 42 byte-identical, seed 43 differs"):
        corpus = make_corpus({"english": {"read": 120, "talks": 250}, "tamil": {"news": 400}})
        exports = []
        for name in ("r1", "r2", "r3"):
            export_balanced(balance(corpus, 42), tmp_path / name)
            exports.append((tmp_path / name / "balanced.jsonl").read_bytes())
        assert exports[0] == exports[1] == exports[2]
        export_balanced(balance(corpus, 43), tmp_path / "other")
        assert (tmp_path / "other" / "balanced.jsonl").read_bytes() != exports[0]


def test_balancer_brute_force_oracle():
    with criterion("balancer equals brute-force re-implementation on 200 random corpora"):
        rnd = random.Random(42)
        languages = ["english", "mandarin", "tamil", "malay"]
        for trial in range(200):
            layout: dict[str, dict[str, int]] = {}
            budget = 20
            for lang in rnd.sample(languages, rnd.randint(1, 4)):
                datasets = {}
                for d in range(rnd.randint(1, 3)):
                    if budget == 0:
                        break
                    size = rnd.randint(1, min(7, budget))
                    budget -= size
                    datasets[f"ds{d}"] = size
                if datasets:
                    layout[lang] = datasets
            if not layout:
                layout = {"english": {"ds0": 1}}
            corpus = make_corpus(layout)
            seed = rnd.getrandbits(64)

            expected = brute_force_balance(
                {
                    lang: {
                        ds: [u.id for u in corpus.split_utterances(lang, ds, "train")]
                        for ds in corpus.dataset_names(lang)
                    }
                    for lang in corpus.languages
                },
                seed,
            )
            bc = balance(corpus, seed)
            assert set(bc.per_language) == set(expected), f"trial {trial}"
            for language, ids in expected.items():
                got = Counter(e.utterance.id for e in bc.per_language[language])
                assert got == Counter(ids), f"trial {trial}, {language}"


def test_alignment_matches_exhaustive_oracle():
    with criterion("alignment equals recursive edit distance on >= 10,000 token pairs"):
        alphabet = ("a", "b", "c")
        short: list[tuple[str, ...]] = [()]
        for length in (1, 2, 3):
            short.extend(tuple(seq) for seq in itertools.product(alphabet, repeat=length))
        cases = [(r, h) for r in short for h in short]  # 40 x 40 = 1,600 exhaustive
        rnd = random.Random(99)
        while len(cases) < 10000:
            ref = tuple(rnd.choice(alphabet) for _ in range(rnd.randint(0, 6)))
            hyp = tuple(rnd.choice(alphabet) for _ in range(rnd.randint(0, 6)))
            cases.append((ref, hyp))
        assert len(cases) >= 10000
        for ref, hyp in cases:
            ops = align(list(ref), list(hyp))
            assert ops.total == recursive_edit_distance(ref, hyp), (ref, hyp)
            assert ops.substitutions + ops.deletions <= ops.ref_len


def test_benchmark_table_averages():
    with criterion("benchmark table averages reproduced from per-cell fixtures"):
        t0 = time.perf_counter()
        rows = refdata.reference_score_rows()
        by_model: dict[str, list[ScoreRow]] = {}
        for row in rows:
            by_model.setdefault(row.model, []).append(row)
        assert len(by_model) == 9
        assert aggregate(by_model["Polyglot-Lion-1.7B"]).average_2dp == 14.85
        assert aggregate(by_model["Polyglot-Lion-0.6B"]).average_2dp == 16.52
        assert aggregate(by_model["Whisper-large-v3-turbo"]).average_2dp == 33.04
        assert abs(aggregate(by_model["MERaLiON-2-10B-ASR"]).average_2dp - 14.32) <= 0.05
        for model, published in refdata.REFERENCE_AVERAGES.items():
            assert abs(aggregate(by_model[model]).average_2dp - published) <= 0.05, model
        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0, f"aggregation took {elapsed:.2f}s"


def test_exclusion_rule():
    with criterion("threshold 200 excludes the 300 row and averages to 100.0"):
        rows = [
            ScoreRow("m", "b1", "english", "wer", 100.0),
            ScoreRow("m", "b2", "english", "wer", 300.0),
        ]
        report = aggregate(rows, threshold=200.0)
        assert report.average == 100.0
        assert len(report.excluded) == 1


def test_latency_measurement():
    with criterion("latency: sleep child within 20%, constant std 0, echo overhead < 5 ms"):
        utts = [make_utterance(f"u{i}", audio_path=f"/a/c{i}.wav") for i in range(8)]
        slow = run_benchmark(
            utts,
            MOCK + ["--sleep", "0.05"],
            HarnessConfig(warmup=2, request_timeout_s=10, start_timeout_s=30),
        )
        assert slow.stats is not None
        assert abs(slow.stats.mean_s - 0.050) <= 0.010  # +-20%

        assert latency_stats([2.0, 2.0, 2.0], warmup=0).std_s == 0.0

        many = [make_utterance(f"e{i}", audio_path=f"/a/e{i}.wav") for i in range(50)]
        fast = run_benchmark(
            many, MOCK, HarnessConfig(warmup=3, request_timeout_s=10, start_timeout_s=30)
        )
        assert fast.stats is not None
        assert fast.stats.mean_s < 0.005, f"overhead {fast.stats.mean_s * 1000:.2f} ms/sample"


def test_training_cost_reproduction():
    with criterion("training cost table and cost ratio reproduced"):
        big = TrainingSetup("baseline", 128, 48.0, 3.07)
        small = TrainingSetup("single-gpu", 1, 48.0, 1.6875)
        assert abs(estimate_cost(big) - 18862) <= 1.0
        assert estimate_cost(small) == 81.00
        ratio = cost_ratio(big, small)
        assert abs(ratio - 232.9) <= 0.05
        assert round(ratio) == 233


def test_normalization_properties():
    with criterion("normalization idempotent and non-growing on 10,000 random strings"):
        assert normalize("Hello, World!") == "hello world"
        rnd = random.Random(123)
        ranges = [(0x20, 0xD7FF), (0xE000, 0x10FFFF), (0x0, 0x2F)]
        for _ in range(10000):
            lo, hi = rnd.choice(ranges)
            text = "".join(chr(rnd.randint(lo, hi)) for _ in range(rnd.randint(0, 40)))
            once = normalize(text)
            assert normalize(once) == once
            assert len(once) <= len(text)
