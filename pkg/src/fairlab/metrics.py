"""Group-skew, fairness, and distribution-distance metrics.

All functions are pure. Dataset-level metrics take a :class:`Dataset`;
prediction-level metrics (accuracy, equalized-odds gap) take parallel binary
sequences so they can score any classifier's output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .errors import DegenerateVarianceError, UndefinedMetricError


@dataclass
class MetricsReport:
    """Scalar metrics of a dataset or prediction set; absent values are None."""

    group_skew: float | None = None
    spd: float | None = None
    di: float | None = None
    eo_gap: float | None = None
    phi: float | None = None
    accuracy: float | None = None

    def as_dict(self) -> dict:
        return {
            "group_skew": self.group_skew,
            "spd": self.spd,
            "di": self.di,
            "eo_gap": self.eo_gap,
            "phi": self.phi,
            "accuracy": self.accuracy,
        }


@dataclass(frozen=True)
class HistogramData:
    """Counts per bin; edges have one more entry than counts."""

    group_id: int | None
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]

    def as_dict(self) -> dict:
        return {
            "group_id": self.group_id,
            "bin_edges": list(self.bin_edges),
            "counts": list(self.counts),
        }


def group_skew(data: Dataset) -> float:
    """Ratio of between-group to within-group sums of squared deviations of v.

    Defined for two or more groups with positive within-group variation.
    Weights are ignored; materialize weighted data first if needed.
    """
    gids = data.group_ids()
    if len(gids) < 2:
        raise UndefinedMetricError("group skew needs at least two groups")
    grand = float(data.v.mean())
    ssb = 0.0
    ssw = 0.0
    for gid in gids:
        vals = data.v[data.g == gid]
        mu = float(vals.mean())
        ssb += len(vals) * (mu - grand) ** 2
        ssw += float(((vals - mu) ** 2).sum())
    if ssw <= 0.0:
        raise DegenerateVarianceError("within-group variation is zero")
    return ssb / ssw


def favorable_rate(data: Dataset, group_id: int, weighted: bool = False) -> float:
    """Pr(Y=1 | G=group_id), by record count or by weight total."""
    mask = data.g == group_id
    if not mask.any():
        raise UndefinedMetricError(f"group {group_id} has no records")
    if weighted:
        total = float(data.w[mask].sum())
        if total <= 0.0:
            raise UndefinedMetricError(f"group {group_id} has zero total weight")
        return float(data.w[mask & (data.y == 1)].sum()) / total
    return float((data.y[mask] == 1).mean())


def statistical_parity_difference(data: Dataset, weighted: bool = False) -> float:
    """Pr(Y=1|G=0) - Pr(Y=1|G=1); zero means demographic parity."""
    return favorable_rate(data, 0, weighted) - favorable_rate(data, 1, weighted)


def disparate_impact_ratio(data: Dataset, weighted: bool = False) -> float:
    """Pr(Y=1|G=0) / Pr(Y=1|G=1); one means parity, below 0.8 flags impact."""
    denom = favorable_rate(data, 1, weighted)
    if denom == 0.0:
        raise UndefinedMetricError("group 1 has no favorable outcomes")
    return favorable_rate(data, 0, weighted) / denom


def equalized_odds_gap(truth, pred, groups) -> float:
    """Worst absolute gap between groups in predicted-favorable rate,
    conditioned on each true outcome (TPR gap and FPR gap)."""
    truth = np.asarray(truth, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    groups = np.asarray(groups, dtype=np.int64)
    if not (len(truth) == len(pred) == len(groups)) or len(truth) == 0:
        raise ValueError("truth, pred, groups must be equal-length and nonempty")
    gap = 0.0
    for out in (0, 1):
        rates = []
        for gid in (0, 1):
            cell = (groups == gid) & (truth == out)
            if not cell.any():
                raise UndefinedMetricError(f"empty cell (group={gid}, truth={out})")
            rates.append(float((pred[cell] == 1).mean()))
        gap = max(gap, abs(rates[1] - rates[0]))
    return gap


def phi_coefficient(data: Dataset) -> float:
    """Pearson correlation of the two binary columns g and y."""
    n11 = int(((data.g == 1) & (data.y == 1)).sum())
    n10 = int(((data.g == 1) & (data.y == 0)).sum())
    n01 = int(((data.g == 0) & (data.y == 1)).sum())
    n00 = int(((data.g == 0) & (data.y == 0)).sum())
    marginals = (n11 + n10, n01 + n00, n11 + n01, n10 + n00)
    if any(m == 0 for m in marginals):
        raise UndefinedMetricError("phi needs both groups and both outcomes present")
    num = n11 * n00 - n10 * n01
    denom = np.sqrt(np.prod([float(m) for m in marginals]))
    return float(num / denom)


def accuracy(truth, pred) -> float:
    """Fraction of positions where pred equals truth."""
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    if len(truth) != len(pred) or len(truth) == 0:
        raise ValueError("truth and pred must be equal-length and nonempty")
    return float((truth == pred).mean())


def wasserstein_1d(a, b) -> float:
    """Earth-mover distance between two empirical distributions on the line.

    Integrates |CDF_a - CDF_b| over the merged support; for equal-length
    samples this equals the mean absolute difference of sorted values.
    """
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("wasserstein_1d needs nonempty samples")
    support = np.sort(np.concatenate([a, b]))
    deltas = np.diff(support)
    cdf_a = np.searchsorted(a, support[:-1], side="right") / len(a)
    cdf_b = np.searchsorted(b, support[:-1], side="right") / len(b)
    return float(np.sum(np.abs(cdf_a - cdf_b) * deltas))


def histogram(values, bins: int, value_range, group_id: int | None = None) -> HistogramData:
    """Fixed-range histogram with right-open bins (last bin closed).

    Values outside the range are clamped into the end bins, so counts always
    sum to the input length.
    """
    lo, hi = float(value_range[0]), float(value_range[1])
    if not lo < hi:
        raise ValueError(f"range must satisfy lo < hi, got ({lo}, {hi})")
    if int(bins) < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    values = np.asarray(values, dtype=np.float64)
    counts, edges = np.histogram(np.clip(values, lo, hi), bins=int(bins), range=(lo, hi))
    return HistogramData(
        group_id=group_id,
        bin_edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
    )


def group_histograms(data: Dataset, bins: int, value_range) -> list[HistogramData]:
    """One histogram of v per group present, in group-id order."""
    return [
        histogram(data.v[data.g == gid], bins, value_range, group_id=int(gid))
        for gid in data.group_ids()
    ]


def dataset_report(data: Dataset, weighted: bool = False) -> MetricsReport:
    """All dataset-level metrics; metrics undefined for this data are None."""

    def _try(fn):
        try:
            return fn()
        except UndefinedMetricError:
            return None

    return MetricsReport(
        group_skew=_try(lambda: group_skew(data)),
        spd=_try(lambda: statistical_parity_difference(data, weighted)),
        di=_try(lambda: disparate_impact_ratio(data, weighted)),
        phi=_try(lambda: phi_coefficient(data)),
    )
