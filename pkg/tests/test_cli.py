from __future__ import annotations

import argparse
import json
import subprocess
import sys

import pytest

from helpers import make_corpus
from lioneval import manifest, refdata
from lioneval.cli import SEED_ENV_VAR, build_parser, dispatch, load_tool_config
from lioneval.errors import ConfigError
from lioneval.scoring import write_score_rows

MOCK_CMD = f"{sys.executable} -m lioneval.mock_transcriber"


def write_toy_corpus(tmp_path, layout=None):
    spec = make_corpus(layout or {"english": {"a": 6, "b": 9}, "malay": {"m": 12}})
    manifest.save_manifest(spec, tmp_path / "toy.jsonl")
    config = {"config_version": 1, "manifests": [{"path": "toy.jsonl"}]}
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    return path


def test_no_arguments_is_usage_error(capsys):
    assert dispatch([]) == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_unknown_subcommand_is_usage_error(capsys):
    assert dispatch(["frobnicate"]) == 2


def test_every_subcommand_help_exits_zero_and_mentions_flags(capsys):
    parser = build_parser()
    subparsers = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    )
    for name, sub in subparsers.choices.items():
        assert dispatch([name, "--help"]) == 0
        help_text = capsys.readouterr().out
        for action in sub._actions:
            for option in action.option_strings:
                if option.startswith("--"):
                    assert option in help_text, f"{name} help missing {option}"


def test_stats_csv_and_markdown(tmp_path, capsys):
    config = write_toy_corpus(tmp_path)
    assert dispatch(["stats", "--config", str(config)]) == 0
    csv_out = capsys.readouterr().out
    assert csv_out.startswith("language,dataset,split,samples,hours")
    assert dispatch(["stats", "--config", str(config), "--markdown"]) == 0
    md_out = capsys.readouterr().out
    assert md_out.startswith("| Lang. |")
    assert "| Total |" in md_out


def test_stats_deterministic_output(tmp_path, capsys):
    config = write_toy_corpus(tmp_path)
    dispatch(["stats", "--config", str(config)])
    first = capsys.readouterr().out
    dispatch(["stats", "--config", str(config)])
    assert capsys.readouterr().out == first


def test_filter_writes_manifests_and_prints_dropped(tmp_path, capsys):
    config = write_toy_corpus(tmp_path)
    out_dir = tmp_path / "filtered"
    assert dispatch(["filter", "--config", str(config), "--max-seconds", "3", "--out", str(out_dir)]) == 0
    dropped = int(capsys.readouterr().out.strip())
    corpus = manifest.load_corpus_config(out_dir / "corpus.json")
    assert dropped > 0
    assert corpus.size() + dropped == 27
    assert max(u.duration_s for u in corpus.iter_utterances()) <= 3


def test_normalize_text_flag(capsys):
    assert dispatch(["normalize", "--text", "Hello, World!"]) == 0
    assert capsys.readouterr().out == "hello world\n"


def test_normalize_custom_profile(tmp_path, capsys):
    profile = tmp_path / "profile.json"
    profile.write_text(json.dumps({"lowercase": False}), encoding="utf-8")
    assert dispatch(["normalize", "--profile", str(profile), "--text", "Hello, World!"]) == 0
    assert capsys.readouterr().out == "Hello World\n"


def test_balance_cli_determinism_and_seed_env(tmp_path, capsys, monkeypatch):
    config = write_toy_corpus(tmp_path, {"english": {"a": 30, "b": 45}, "tamil": {"t": 60}})
    for name in ("one", "two"):
        assert dispatch(["balance", "--config", str(config), "--seed", "42", "--out", str(tmp_path / name)]) == 0
        capsys.readouterr()
    assert (tmp_path / "one" / "balanced.jsonl").read_bytes() == (
        tmp_path / "two" / "balanced.jsonl"
    ).read_bytes()

    monkeypatch.setenv(SEED_ENV_VAR, "42")
    assert dispatch(["balance", "--config", str(config), "--out", str(tmp_path / "env")]) == 0
    capsys.readouterr()
    assert (tmp_path / "env" / "balanced.jsonl").read_bytes() == (
        tmp_path / "one" / "balanced.jsonl"
    ).read_bytes()

    monkeypatch.delenv(SEED_ENV_VAR)
    assert dispatch(["balance", "--config", str(config), "--out", str(tmp_path / "none")]) == 1
    assert "seed" in capsys.readouterr().err


def test_score_cli_cer_row(tmp_path, capsys):
    ref = tmp_path / "ref.jsonl"
    hyp = tmp_path / "hyp.jsonl"
    with ref.open("w", encoding="utf-8") as fh:
        for i, text in enumerate(["你好世界", "早上好"]):
            fh.write(
                json.dumps(
                    {
                        "id": f"u{i}",
                        "audio_path": f"a{i}.wav",
                        "duration_s": 1.0,
                        "text": text,
                        "language": "mandarin",
                        "dataset": "toy",
                        "split": "test",
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    with hyp.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps({"id": "u0", "text": "你好世界"}, ensure_ascii=False) + "\n")
        fh.write(json.dumps({"id": "u1", "text": "早上好"}, ensure_ascii=False) + "\n")
    per_utt = tmp_path / "per_utt.csv"
    code = dispatch(
        [
            "score",
            "--ref", str(ref),
            "--hyp", str(hyp),
            "--language", "mandarin",
            "--per-utterance", str(per_utt),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "cer" in out
    assert ",0.00" in out
    assert per_utt.read_text(encoding="utf-8").count("\n") == 3  # header + 2 rows


def test_aggregate_cli_reference_table(tmp_path, capsys):
    rows_path = tmp_path / "rows.csv"
    write_score_rows(refdata.reference_score_rows(), rows_path)
    assert dispatch(["aggregate", "--scores", str(rows_path), "--markdown"]) == 0
    out = capsys.readouterr().out
    assert "| Polyglot-Lion-1.7B |" in out and "14.85" in out


def test_bench_and_report_cli(tmp_path, capsys):
    spec = make_corpus({"english": {"bench": 6}}, split="test")
    manifest_path = tmp_path / "bench.jsonl"
    manifest.save_manifest(spec, manifest_path)
    runs_dir = tmp_path / "runs"
    code = dispatch(
        [
            "bench",
            "--manifest", str(manifest_path),
            "--cmd", MOCK_CMD,
            "--warmup", "2",
            "--timeout", "10",
            "--model", "echo",
            "--out", str(runs_dir),
        ]
    )
    assert code == 0
    capsys.readouterr()
    assert dispatch(["report", "--runs", str(runs_dir)]) == 0
    report = capsys.readouterr().out
    assert report.startswith("model,mean_s,std_s,n")
    assert "echo," in report


def test_cost_cli_comparison(capsys):
    code = dispatch(
        [
            "cost",
            "--gpus", "128", "--hours", "48", "--rate", "3.07",
            "--gpus2", "1", "--hours2", "48", "--rate2", "1.6875",
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "$18,862" in out and "$81.00" in out


def test_domain_error_exit_code(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    assert dispatch(["stats", "--config", str(missing)]) == 1
    assert "error:" in capsys.readouterr().err


def test_tool_config_validation(tmp_path):
    config = tmp_path / "tool.json"
    config.write_text(
        json.dumps({"config_version": 1, "corpus_config": "missing.json"}), encoding="utf-8"
    )
    with pytest.raises(ConfigError, match="corpus config not found"):
        load_tool_config(config)
    config.write_text(json.dumps({"config_version": 99}), encoding="utf-8")
    with pytest.raises(ConfigError, match="config_version"):
        load_tool_config(config)


def test_tool_config_full_shape(tmp_path):
    corpus = write_toy_corpus(tmp_path)
    bench_manifest = tmp_path / "toy.jsonl"
    config = tmp_path / "tool.json"
    config.write_text(
        json.dumps(
            {
                "config_version": 1,
                "corpus_config": "corpus.json",
                "normalization": {"lowercase": False},
                "seed": 7,
                "benchmarks": [
                    {"name": "toy", "manifest": "toy.jsonl", "language": "english"},
                    {"name": "toy-cer", "manifest": "toy.jsonl", "language": "english", "metric": "cer"},
                ],
                "output_dir": "out",
                "exclusion_threshold": 200.0,
            }
        ),
        encoding="utf-8",
    )
    cfg = load_tool_config(config)
    assert cfg.corpus_config == corpus
    assert cfg.seed == 7
    assert not cfg.profile.lowercase
    assert [b.name for b in cfg.benchmarks] == ["toy", "toy-cer"]
    assert cfg.benchmarks[1].metric == "cer"
    assert cfg.exclusion_threshold == 200.0
    assert bench_manifest.exists()


def test_console_entry_point_runs():
    out = subprocess.run(
        [sys.executable, "-m", "lioneval.cli", "cost", "--gpus", "1", "--hours", "2", "--rate", "3.0"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert out.stdout.strip() == "$6.00"
