"""Single entry point exposing every module as a subcommand.

Exit codes: 0 success, 1 domain error, 2 usage error. Diagnostics go to
stderr; data goes to stdout or to files. Machine output defaults to
CSV/JSON lines; ``--markdown`` switches table rendering.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import balancer, cost, harness, manifest, scoring, textnorm
from .errors import ConfigError, LionEvalError

SEED_ENV_VAR = "LION_SEED"
CONFIG_VERSION = 1


@dataclass
class BenchmarkEntry:
    name: str
    manifest: Path
    language: str
    metric: str | None = None


@dataclass
class ToolConfig:
    """Shared JSON config: corpus location plus per-run settings."""

    corpus_config: Path | None = None
    profile: textnorm.NormProfile = field(default_factory=textnorm.NormProfile)
    seed: int | None = None
    benchmarks: list[BenchmarkEntry] = field(default_factory=list)
    output_dir: Path | None = None
    exclusion_threshold: float | None = None


def load_tool_config(path: str | Path) -> ToolConfig:
    """Parse and validate a tool config; every referenced path must exist."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    version = raw.get("config_version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config_version {version}, expected {CONFIG_VERSION}")
    base = path.parent
    cfg = ToolConfig()
    if "manifests" in raw:
        cfg.corpus_config = path  # corpus entries are inline
    elif "corpus_config" in raw:
        cfg.corpus_config = base / raw["corpus_config"]
        if not cfg.corpus_config.exists():
            raise ConfigError(f"corpus config not found: {cfg.corpus_config}")
    if "normalization" in raw:
        cfg.profile = textnorm.NormProfile.from_dict(raw["normalization"])
    cfg.seed = raw.get("seed")
    for entry in raw.get("benchmarks", []):
        bench_manifest = base / entry["manifest"]
        if not bench_manifest.exists():
            raise ConfigError(f"benchmark manifest not found: {bench_manifest}")
        cfg.benchmarks.append(
            BenchmarkEntry(entry["name"], bench_manifest, entry["language"], entry.get("metric"))
        )
    if "output_dir" in raw:
        cfg.output_dir = base / raw["output_dir"]
    cfg.exclusion_threshold = raw.get("exclusion_threshold")
    return cfg


def _load_profile(spec: str) -> textnorm.NormProfile:
    if spec == "default":
        return textnorm.DEFAULT_PROFILE
    profile_path = Path(spec)
    if not profile_path.exists():
        raise ConfigError(f"normalization profile not found: {spec}")
    return textnorm.NormProfile.from_dict(json.loads(profile_path.read_text(encoding="utf-8")))


def _read_jsonl_texts(path: Path) -> dict[str, str]:
    out: dict[str, str] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out[str(obj["id"])] = str(obj["text"])
    return out


# --- subcommand handlers ------------------------------------------------------


def _cmd_stats(args) -> int:
    corpus = manifest.load_corpus_config(args.config)
    table = manifest.compute_stats(corpus)
    render = manifest.stats_to_markdown if args.markdown else manifest.stats_to_csv
    sys.stdout.write(render(table))
    return 0


def _cmd_filter(args) -> int:
    corpus = manifest.load_corpus_config(args.config)
    filtered, dropped = manifest.filter_by_duration(corpus, args.max_seconds)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for language, dataset in filtered.keys():
        name = f"{language}_{_slug(dataset)}.jsonl"
        part = manifest.CorpusSpec()
        for split in manifest.SPLITS:
            for utt in filtered.split_utterances(language, dataset, split):
                part.add(utt)
        manifest.save_manifest(part, out_dir / name)
        entries.append({"language": language, "dataset": dataset, "path": name})
    (out_dir / "corpus.json").write_text(
        json.dumps({"config_version": CONFIG_VERSION, "manifests": entries}, indent=2) + "\n",
        encoding="utf-8",
    )
    print(dropped)
    return 0


def _slug(name: str) -> str:
    return "".join(ch.lower() if ch.isalnum() else "-" for ch in name)


def _cmd_normalize(args) -> int:
    profile = _load_profile(args.profile)
    if args.text is not None:
        print(textnorm.normalize(args.text, profile))
        return 0
    for line in sys.stdin:
        print(textnorm.normalize(line.rstrip("\n"), profile))
    return 0


def _resolve_seed(args, cfg: ToolConfig | None) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    if cfg is not None and cfg.seed is not None:
        return cfg.seed
    raise ConfigError(f"no seed given: pass --seed, set {SEED_ENV_VAR}, or add 'seed' to the config")


def _cmd_balance(args) -> int:
    cfg = load_tool_config(args.config)
    if cfg.corpus_config is None:
        raise ConfigError("config has neither inline 'manifests' nor a 'corpus_config' path")
    corpus = manifest.load_corpus_config(cfg.corpus_config)
    seed = _resolve_seed(args, cfg)
    bc = balancer.balance(corpus, seed, stratified=args.stratified)
    manifest_path, plan_path = balancer.export_balanced(bc, args.out)
    print(manifest_path)
    print(plan_path)
    return 0


def _cmd_score(args) -> int:
    refs_list = manifest.load_manifest_utterances(Path(args.ref))
    refs = {u.id: u.transcript_raw for u in refs_list}
    hyps = _read_jsonl_texts(Path(args.hyp))
    profile = _load_profile(args.profile)
    row, per_utt = scoring.score_benchmark(
        model=args.model,
        benchmark=args.benchmark or Path(args.ref).stem,
        language=args.language,
        refs=refs,
        hyps=hyps,
        profile=profile,
        metric=args.metric,
    )
    if args.per_utterance:
        with Path(args.per_utterance).open("w", encoding="utf-8", newline="") as fh:
            fh.write("id,metric,value,substitutions,deletions,insertions,ref_len\n")
            for uid, pair in per_utt:
                ops = pair.ops
                fh.write(
                    f"{uid},{pair.metric},{pair.value:.4f},{ops.substitutions},"
                    f"{ops.deletions},{ops.insertions},{ops.ref_len}\n"
                )
    sys.stdout.write("model,benchmark,language,metric,value\n")
    sys.stdout.write(
        f"{row.model},{row.benchmark},{row.language},{row.metric},{row.value:.2f}\n"
    )
    return 0


def _cmd_aggregate(args) -> int:
    rows = scoring.read_score_rows(Path(args.scores))
    sys.stdout.write(scoring.render_score_table(rows, args.threshold, markdown=args.markdown))
    return 0


def _cmd_bench(args) -> int:
    utterances = manifest.load_manifest_utterances(Path(args.manifest))
    config = harness.HarnessConfig(
        warmup=args.warmup,
        request_timeout_s=args.timeout,
        start_timeout_s=args.start_timeout,
        pipelined=args.pipelined,
    )
    result = harness.run_benchmark(
        utterances,
        args.cmd,
        config,
        model_label=args.model,
        benchmark=args.benchmark or Path(args.manifest).stem,
        out_dir=args.out,
    )
    if result.stats is not None:
        print(f"{result.stats.mean_s:.4f} ± {result.stats.std_s:.4f}")
    print(f"{len(result.hypotheses)} hypotheses, {len(result.errors)} errors", file=sys.stderr)
    return 1 if result.aborted else 0


def _cmd_report(args) -> int:
    run_dir = Path(args.runs)
    runs = [harness.load_run(p) for p in sorted(run_dir.glob("*.json")) if p.name != "plan.json"]
    if not runs:
        raise ConfigError(f"no run files found under {run_dir}")
    if args.out:
        harness.emit_run_report(runs, args.out)
    render = harness.render_latency_markdown if args.markdown else harness.render_latency_csv
    sys.stdout.write(render(runs))
    return 0


def _cmd_cost(args) -> int:
    first = cost.TrainingSetup(args.label, args.gpus, args.hours, args.rate, args.data_hours)
    if args.gpus2 is None:
        print(cost.format_currency(cost.estimate_cost(first)))
        return 0
    second = cost.TrainingSetup(
        args.label2, args.gpus2, args.hours2, args.rate2, args.data_hours2
    )
    sys.stdout.write(cost.render_comparison(first, second))
    return 0


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lioneval",
        description="Multilingual ASR data and evaluation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="corpus statistics table")
    p.add_argument("--config", required=True, help="corpus config JSON")
    p.add_argument("--markdown", action="store_true", help="render Markdown instead of CSV")
    p.set_defaults(handler=_cmd_stats)

    p = sub.add_parser("filter", help="drop utterances above a duration cutoff")
    p.add_argument("--config", required=True, help="corpus config JSON")
    p.add_argument("--max-seconds", type=float, default=30.0, help="inclusive duration cutoff")
    p.add_argument("--out", required=True, help="output directory for filtered manifests")
    p.set_defaults(handler=_cmd_filter)

    p = sub.add_parser("normalize", help="normalize text from --text or stdin")
    p.add_argument("--profile", default="default", help="'default' or a profile JSON path")
    p.add_argument("--text", help="normalize this string instead of reading stdin")
    p.set_defaults(handler=_cmd_normalize)

    p = sub.add_parser("balance", help="two-stage balanced upsampling of the train split")
    p.add_argument("--config", required=True, help="corpus or tool config JSON")
    p.add_argument("--seed", type=int, help=f"master seed (falls back to ${SEED_ENV_VAR})")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--stratified", action="store_true", help="stage-2 subsampling stratified by dataset"
    )
    p.set_defaults(handler=_cmd_balance)

    p = sub.add_parser("score", help="score a hypothesis file against a reference manifest")
    p.add_argument("--ref", required=True, help="reference manifest (JSON lines with id, text)")
    p.add_argument("--hyp", required=True, help="hypothesis file (JSON lines with id, text)")
    p.add_argument("--language", required=True, choices=manifest.LANGUAGES)
    p.add_argument("--metric", choices=scoring.METRICS, help="override the per-language default")
    p.add_argument("--profile", default="default", help="'default' or a profile JSON path")
    p.add_argument("--model", default="unknown", help="model label for the output row")
    p.add_argument("--benchmark", help="benchmark label (default: reference file stem)")
    p.add_argument("--per-utterance", help="write per-utterance CSV here")
    p.set_defaults(handler=_cmd_score)

    p = sub.add_parser("aggregate", help="average score rows into a benchmark table")
    p.add_argument("--scores", required=True, help="CSV of score rows")
    p.add_argument("--threshold", type=float, help="exclude rows with value above this")
    p.add_argument("--markdown", action="store_true", help="render Markdown instead of CSV")
    p.set_defaults(handler=_cmd_aggregate)

    p = sub.add_parser("bench", help="run a transcriber command over a manifest")
    p.add_argument("--manifest", required=True, help="utterance manifest (JSON lines)")
    p.add_argument("--cmd", required=True, help="transcriber command line")
    p.add_argument("--warmup", type=int, default=3, help="responses excluded from stats")
    p.add_argument("--timeout", type=float, default=120.0, help="per-request timeout seconds")
    p.add_argument("--start-timeout", type=float, default=30.0, help="handshake timeout seconds")
    p.add_argument("--pipelined", action="store_true", help="throughput mode; no latency stats")
    p.add_argument("--model", default="unknown", help="model label for the run")
    p.add_argument("--benchmark", help="benchmark label (default: manifest stem)")
    p.add_argument("--out", required=True, help="directory for the persisted run")
    p.set_defaults(handler=_cmd_bench)

    p = sub.add_parser("report", help="latency report over persisted runs")
    p.add_argument("--runs", required=True, help="directory of run JSON files")
    p.add_argument("--out", help="also write report files here")
    p.add_argument("--markdown", action="store_true", help="render Markdown instead of CSV")
    p.set_defaults(handler=_cmd_report)

    p = sub.add_parser("cost", help="training cost estimate (one setup or a comparison)")
    p.add_argument("--gpus", type=int, required=True)
    p.add_argument("--hours", type=float, required=True)
    p.add_argument("--rate", type=float, required=True, help="currency per GPU-hour")
    p.add_argument("--label", default="setup-a")
    p.add_argument("--data-hours", type=float, default=None)
    p.add_argument("--gpus2", type=int, help="second setup for a comparison")
    p.add_argument("--hours2", type=float)
    p.add_argument("--rate2", type=float)
    p.add_argument("--label2", default="setup-b")
    p.add_argument("--data-hours2", type=float, default=None)
    p.set_defaults(handler=_cmd_cost)

    return parser


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except LionEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
