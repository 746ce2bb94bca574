"""Two-stage balanced multilingual upsampling.

Stage 1 equalizes every dataset within a language to that language's
largest dataset; stage 2 equalizes the pooled per-language lists to the
largest language. Replication factors are ceilings, replication is by
(utterance, copy_index) pairs, and subsampling is a partial Fisher-Yates
over the replicated index range, so the result is bit-exact for a fixed
(corpus, seed) regardless of platform or execution order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import PlanError, SamplingError
from .manifest import LANGUAGES, CorpusSpec, Utterance, _parse_utterance
from .rng import SeededRng, substream

# Stage labels used in substream seed derivation.
_STAGE1 = "stage1"
_STAGE2 = "stage2"
_POOLED = ""  # pseudo dataset name for the per-language pooled list


@dataclass(frozen=True)
class Stage1Row:
    language: str
    dataset: str
    source_count: int
    replication: int
    target: int


@dataclass(frozen=True)
class Stage2Row:
    language: str
    pooled_count: int
    replication: int
    target: int


@dataclass(frozen=True)
class SamplingPlan:
    stage1: tuple[Stage1Row, ...]
    stage2: tuple[Stage2Row, ...]

    @property
    def global_target(self) -> int:
        return self.stage2[0].target

    def language_target(self, language: str) -> int:
        for row in self.stage1:
            if row.language == language:
                return row.target
        raise KeyError(language)

    def replication(self, language: str, dataset: str) -> int:
        for row in self.stage1:
            if (row.language, row.dataset) == (language, dataset):
                return row.replication
        raise KeyError((language, dataset))

    def to_dict(self) -> dict:
        return {
            "stage1": [vars(r) for r in self.stage1],
            "stage2": [vars(r) for r in self.stage2],
            "global_target": self.global_target,
        }


@dataclass(frozen=True, slots=True)
class BalancedEntry:
    """A sampled utterance occurrence; copy_index distinguishes duplicates."""

    utterance: Utterance
    copy_index: int


@dataclass
class BalancedCorpus:
    per_language: dict[str, list[BalancedEntry]]
    seed: int
    plan: SamplingPlan
    stratified: bool = False

    def total(self) -> int:
        return sum(len(v) for v in self.per_language.values())


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def plan(corpus: CorpusSpec) -> SamplingPlan:
    """Compute replication factors and targets from train-split sizes."""
    stage1: list[Stage1Row] = []
    language_targets: dict[str, int] = {}
    pooled_counts: dict[str, int] = {}
    for language in corpus.languages:
        counts: dict[str, int] = {}
        for dataset in corpus.dataset_names(language):
            n = len(corpus.split_utterances(language, dataset, "train"))
            if n == 0:
                raise PlanError(f"empty train split for dataset {dataset!r} ({language})")
            counts[dataset] = n
        target = max(counts.values())
        language_targets[language] = target
        pooled_counts[language] = target * len(counts)
        for dataset in sorted(counts):
            stage1.append(
                Stage1Row(language, dataset, counts[dataset], _ceil_div(target, counts[dataset]), target)
            )
    if not language_targets:
        raise PlanError("corpus has no datasets")
    global_target = max(language_targets.values())
    stage2 = tuple(
        Stage2Row(
            language,
            pooled_counts[language],
            _ceil_div(global_target, language_targets[language]),
            global_target,
        )
        for language in corpus.languages
    )
    return SamplingPlan(tuple(stage1), stage2)


def _partial_fisher_yates(total: int, target: int, rng: SeededRng) -> list[int]:
    """First ``target`` positions of a Fisher-Yates shuffle of range(total).

    Displaced positions are tracked sparsely, so memory is O(target) even
    when total is much larger.
    """
    displaced: dict[int, int] = {}
    out: list[int] = []
    for j in range(target):
        k = j + rng.randbelow(total - j)
        vk = displaced.get(k, k)
        out.append(vk)
        displaced[k] = displaced.get(j, j)
    return out


def replicate_subsample(
    items: list, factor: int, target: int, rng: SeededRng
) -> list:
    """Uniform size-``target`` subset of ``factor`` concatenated copies of ``items``.

    Each source item appears at most ``factor`` times in the output.
    """
    if factor < 1:
        raise SamplingError(f"replication factor must be >= 1, got {factor}")
    total = factor * len(items)
    if target > total:
        raise SamplingError(
            f"target {target} exceeds replicated size {total} ({len(items)} items x {factor})"
        )
    n = len(items)
    return [items[i % n] for i in _partial_fisher_yates(total, target, rng)]


def _stage1_entries(
    utts: list[Utterance], factor: int, target: int, rng: SeededRng
) -> list[tuple[Utterance, int]]:
    n = len(utts)
    total = factor * n
    if target > total:
        raise SamplingError(f"target {target} exceeds replicated size {total}")
    return [(utts[i % n], i // n) for i in _partial_fisher_yates(total, target, rng)]


def balance(corpus: CorpusSpec, seed: int, stratified: bool = False) -> BalancedCorpus:
    """Run both stages over the train split; deterministic for fixed (corpus, seed).

    With ``stratified`` set, stage 2 subsamples each dataset's pooled
    contribution separately (equal quotas, remainder to the first dataset
    names) instead of subsampling the pooled list as a whole.
    """
    sampling_plan = plan(corpus)
    global_target = sampling_plan.global_target

    per_language: dict[str, list[BalancedEntry]] = {}
    for language in corpus.languages:
        datasets = corpus.dataset_names(language)
        target = sampling_plan.language_target(language)
        r2 = _ceil_div(global_target, target)

        pooled: list[tuple[Utterance, int, int]] = []  # (utt, stage1 copy, stage1 factor)
        per_dataset: list[list[tuple[Utterance, int, int]]] = []
        for dataset in datasets:
            utts = corpus.split_utterances(language, dataset, "train")
            factor = sampling_plan.replication(language, dataset)
            rng = substream(seed, language, dataset, _STAGE1)
            picked = [(u, c, factor) for u, c in _stage1_entries(utts, factor, target, rng)]
            per_dataset.append(picked)
            pooled.extend(picked)

        entries: list[BalancedEntry] = []
        if stratified:
            quota, rem = divmod(global_target, len(datasets))
            for rank, (dataset, contribution) in enumerate(zip(datasets, per_dataset)):
                want = quota + (1 if rank < rem else 0)
                rng = substream(seed, language, dataset, _STAGE2)
                size = len(contribution)
                for i in _partial_fisher_yates(r2 * size, want, rng):
                    utt, c1, factor = contribution[i % size]
                    entries.append(BalancedEntry(utt, c1 + (i // size) * factor))
        else:
            rng = substream(seed, language, _POOLED, _STAGE2)
            size = len(pooled)
            for i in _partial_fisher_yates(r2 * size, global_target, rng):
                utt, c1, factor = pooled[i % size]
                entries.append(BalancedEntry(utt, c1 + (i // size) * factor))

        if len(entries) != global_target:
            raise SamplingError(
                f"internal error: {language} produced {len(entries)} entries, wanted {global_target}"
            )
        per_language[language] = entries

    return BalancedCorpus(per_language, seed, sampling_plan, stratified)


def export_balanced(bc: BalancedCorpus, out_dir: str | Path) -> tuple[Path, Path]:
    """Write balanced.jsonl plus a plan.json sidecar; returns both paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "balanced.jsonl"
    plan_path = out_dir / "plan.json"

    with manifest_path.open("w", encoding="utf-8", newline="\n") as fh:
        for language in bc.per_language:
            for entry in bc.per_language[language]:
                obj = entry.utterance.to_json_dict()
                obj["copy_index"] = entry.copy_index
                fh.write(json.dumps(obj, ensure_ascii=False))
                fh.write("\n")

    sidecar = {"seed": bc.seed, "stratified": bc.stratified}
    sidecar.update(bc.plan.to_dict())
    plan_path.write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    return manifest_path, plan_path


def load_balanced(out_dir: str | Path) -> BalancedCorpus:
    """Reload an exported balanced corpus together with its plan sidecar."""
    out_dir = Path(out_dir)
    sidecar = json.loads((out_dir / "plan.json").read_text(encoding="utf-8"))
    sampling_plan = SamplingPlan(
        tuple(Stage1Row(**row) for row in sidecar["stage1"]),
        tuple(Stage2Row(**row) for row in sidecar["stage2"]),
    )
    per_language: dict[str, list[BalancedEntry]] = {}
    with (out_dir / "balanced.jsonl").open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            obj = json.loads(line)
            copy_index = obj.pop("copy_index")
            utt = _parse_utterance(obj, str(out_dir / "balanced.jsonl"), line_no)
            per_language.setdefault(utt.language, []).append(BalancedEntry(utt, copy_index))
    ordered = {lang: per_language[lang] for lang in LANGUAGES if lang in per_language}
    for lang in per_language:
        if lang not in ordered:
            ordered[lang] = per_language[lang]
    return BalancedCorpus(ordered, sidecar["seed"], sampling_plan, sidecar.get("stratified", False))
