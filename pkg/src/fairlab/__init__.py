"""Synthetic group-disparity datasets, pre-processing fairness repairers, and
the measurement tools to quantify what repairs cost in accuracy."""

from .datasets import (
    Dataset,
    DatasetSpec,
    GroupSpec,
    Record,
    SplitPair,
    generate,
    read_csv,
    read_spec,
    resample_by_weight,
    split,
    write_csv,
    write_spec,
)
from .errors import (
    DegenerateVarianceError,
    DegenerateWeightsError,
    DivergenceError,
    FairlabError,
    InvalidSpecError,
    ParseError,
    UndefinedMetricError,
    UndefinedRepairError,
)
from .harness import (
    ExperimentConfig,
    ReportRow,
    default_repairs,
    derive_seed,
    per_group_distortion,
    reference_specs,
    reproduce,
    run_tradeoff_sweep,
)
from .metrics import (
    HistogramData,
    MetricsReport,
    accuracy,
    dataset_report,
    disparate_impact_ratio,
    equalized_odds_gap,
    favorable_rate,
    group_histograms,
    group_skew,
    histogram,
    phi_coefficient,
    statistical_parity_difference,
    wasserstein_1d,
)
from .model import FitConfig, LogisticModel, decision_scores, fit_logistic, predict
from .repairers import (
    LfrModel,
    LfrParams,
    RepairConfig,
    apply_repair,
    dir_repair,
    fair_balance,
    lfr_fit,
    lfr_transform,
    reweigh,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetSpec",
    "GroupSpec",
    "Record",
    "SplitPair",
    "generate",
    "read_csv",
    "read_spec",
    "resample_by_weight",
    "split",
    "write_csv",
    "write_spec",
    "FairlabError",
    "InvalidSpecError",
    "ParseError",
    "DegenerateWeightsError",
    "DegenerateVarianceError",
    "UndefinedMetricError",
    "UndefinedRepairError",
    "DivergenceError",
    "ExperimentConfig",
    "ReportRow",
    "default_repairs",
    "derive_seed",
    "per_group_distortion",
    "reference_specs",
    "reproduce",
    "run_tradeoff_sweep",
    "HistogramData",
    "MetricsReport",
    "accuracy",
    "dataset_report",
    "disparate_impact_ratio",
    "equalized_odds_gap",
    "favorable_rate",
    "group_histograms",
    "group_skew",
    "histogram",
    "phi_coefficient",
    "statistical_parity_difference",
    "wasserstein_1d",
    "FitConfig",
    "LogisticModel",
    "decision_scores",
    "fit_logistic",
    "predict",
    "LfrModel",
    "LfrParams",
    "RepairConfig",
    "apply_repair",
    "dir_repair",
    "fair_balance",
    "lfr_fit",
    "lfr_transform",
    "reweigh",
]
