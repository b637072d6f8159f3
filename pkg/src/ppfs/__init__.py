"""Predictive permutation feature selection.

A Markov-blanket wrapper feature selector for classification and regression
on mixed continuous/categorical data. Feature relevance is judged by a
permutation conditional-independence test: a supervised model is trained on
a feature plus its conditioning set over B resampled train/test copies, the
feature's test column is shuffled, and the paired original/knockoff risks
are compared with a one-tailed Wilcoxon signed-rank test.
"""

from ._kernels import BACKEND, BACKEND_ENV
from .dataset import (
    Dataset,
    DatasetError,
    FeatureKind,
    SplitPair,
    TaskKind,
    decode_column,
    decode_target,
    k_fold_indices,
    k_fold_partition,
    load_csv,
    permute_column,
    project_columns,
    take_rows,
    train_test_split,
)
from .ppi import ConfigError, PpiConfig, PpiCopy, PpiError, RiskPair, min_copies, ppi_test
from .seeding import derive_seed
from .selection import (
    BlanketEnsemble,
    BlanketEntry,
    CandidateBlanket,
    PpfsConfig,
    SelectionReport,
    aggregate,
    growth_phase,
    importance_score,
    score_blankets,
    select,
    shrink_phase,
    sort_by_importance,
)
from .stats import StatsError, WilcoxonResult, wilcoxon_one_sided
from .synth import (
    BenchReport,
    BnSpec,
    RecoveryScore,
    SynthError,
    benchmark,
    generate_bn,
    recovery_trials,
    score_recovery,
)
from .tree import (
    EPS_CLIP,
    FittedModel,
    LearnerSpec,
    ModelError,
    empirical_risk,
    fit,
    per_sample_loss,
    predict,
    render_tree,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BACKEND_ENV",
    "BenchReport",
    "BlanketEnsemble",
    "BlanketEntry",
    "BnSpec",
    "CandidateBlanket",
    "ConfigError",
    "Dataset",
    "DatasetError",
    "EPS_CLIP",
    "FeatureKind",
    "FittedModel",
    "LearnerSpec",
    "ModelError",
    "PpfsConfig",
    "PpiConfig",
    "PpiCopy",
    "PpiError",
    "RecoveryScore",
    "RiskPair",
    "SelectionReport",
    "SplitPair",
    "StatsError",
    "SynthError",
    "TaskKind",
    "WilcoxonResult",
    "aggregate",
    "benchmark",
    "decode_column",
    "decode_target",
    "derive_seed",
    "empirical_risk",
    "fit",
    "generate_bn",
    "growth_phase",
    "importance_score",
    "k_fold_indices",
    "k_fold_partition",
    "load_csv",
    "min_copies",
    "per_sample_loss",
    "permute_column",
    "ppi_test",
    "predict",
    "project_columns",
    "recovery_trials",
    "render_tree",
    "score_blankets",
    "score_recovery",
    "select",
    "shrink_phase",
    "sort_by_importance",
    "take_rows",
    "train_test_split",
    "wilcoxon_one_sided",
]
