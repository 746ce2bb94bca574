"""Multilingual ASR data and evaluation toolkit.

Corpus manifests and statistics, duration filtering, text normalization,
two-stage balanced upsampling, WER/CER scoring and aggregation, a
subprocess benchmark harness with latency measurement, and training-cost
estimation. See the ``lioneval`` CLI for the command-line surface.
"""

from .balancer import (
    BalancedCorpus,
    BalancedEntry,
    SamplingPlan,
    balance,
    export_balanced,
    load_balanced,
    plan,
    replicate_subsample,
)
from .conformance import ConformanceReport, run_conformance
from .cost import TrainingSetup, cost_ratio, estimate_cost
from .errors import (
    ConfigError,
    HarnessError,
    LionEvalError,
    ManifestError,
    PlanError,
    ProtocolError,
    SamplingError,
    ScoringError,
)
from .harness import (
    HarnessConfig,
    LatencyStats,
    RunResult,
    TranscribeRequest,
    TranscribeResponse,
    emit_run_report,
    latency_stats,
    run_benchmark,
)
from .manifest import (
    LANGUAGES,
    SPLITS,
    CorpusSpec,
    StatsTable,
    Utterance,
    compute_stats,
    filter_by_duration,
    load_corpus_config,
    load_manifest,
    load_manifest_utterances,
    save_manifest,
)
from .rng import SeededRng, fnv1a64, splitmix64_mix, substream, substream_seed
from .scoring import (
    AggregateReport,
    EditOps,
    ScoreRow,
    aggregate,
    align,
    default_metric,
    score,
    score_benchmark,
)
from .textnorm import DEFAULT_PROFILE, NormProfile, normalize, tokenize_chars, tokenize_words

__version__ = "0.1.0"
