"""Weighted binary logistic regression on the feature column (optionally the
group column), fit by full-batch gradient descent.

The fit is deliberately simple and fully deterministic: zero initialization,
fixed step count, and a gradient normalized by total weight so the step size
is unaffected by rescaling all weights. Features are centered internally for
conditioning; returned coefficients are in raw units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .errors import DivergenceError


@dataclass(frozen=True)
class FitConfig:
    include_g: bool = False
    steps: int = 5000
    step_size: float = 0.1
    l2: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if not self.step_size > 0:
            raise ValueError(f"step_size must be > 0, got {self.step_size}")
        if self.l2 < 0:
            raise ValueError(f"l2 must be >= 0, got {self.l2}")

    def to_dict(self) -> dict:
        return {
            "include_g": self.include_g,
            "steps": self.steps,
            "step_size": self.step_size,
            "l2": self.l2,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "FitConfig":
        base = cls()
        return cls(
            include_g=bool(obj.get("include_g", base.include_g)),
            steps=int(obj.get("steps", base.steps)),
            step_size=float(obj.get("step_size", base.step_size)),
            l2=float(obj.get("l2", base.l2)),
            seed=int(obj.get("seed", base.seed)),
        )


@dataclass(frozen=True)
class LogisticModel:
    """Fitted coefficients; ``coef_g`` is None when the group column was
    excluded from the features."""

    bias: float
    coef_v: float
    coef_g: float | None
    config: FitConfig

    def as_dict(self) -> dict:
        return {
            "bias": self.bias,
            "coef_v": self.coef_v,
            "coef_g": self.coef_g,
            "config": self.config.to_dict(),
        }


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log1p_exp(z: np.ndarray) -> np.ndarray:
    """log(1 + exp(z)), stable for large |z|."""
    return np.logaddexp(0.0, z)


def nll_loss_and_gradient(bias, coef, features, y, w, l2):
    """Weighted negative log-likelihood (normalized by total weight) plus an
    l2 penalty on the coefficients (bias excluded), and its gradient.

    ``features`` is (n, d); ``coef`` is (d,). Returns (loss, grad_bias,
    grad_coef).
    """
    total_w = float(w.sum())
    z = bias + features @ coef
    # per-record NLL: log(1 + e^z) - y z
    loss = float((w * (_log1p_exp(z) - y * z)).sum() / total_w)
    loss += l2 * float(coef @ coef)
    residual = w * (_sigmoid(z) - y)
    grad_bias = float(residual.sum() / total_w)
    grad_coef = features.T @ residual / total_w + 2.0 * l2 * coef
    return loss, grad_bias, grad_coef


def fit_logistic(train: Dataset, cfg: FitConfig | None = None) -> LogisticModel:
    """Fit by gradient descent; deterministic given the config.

    Record weights multiply each example's contribution to the loss; the
    gradient is divided by total weight, so scaling all weights by a common
    constant leaves the trajectory unchanged. A single-class training set is
    allowed: the bias simply saturates toward that class.
    """
    cfg = cfg or FitConfig()
    if len(train) == 0:
        raise ValueError("cannot fit on an empty dataset")
    if float(train.w.sum()) <= 0.0:
        raise ValueError("cannot fit: total weight is zero")
    if cfg.include_g and len(train.group_ids()) < 2:
        raise ValueError("include_g requires both groups in the training data")

    cols = [train.v.astype(np.float64)]
    if cfg.include_g:
        cols.append(train.g.astype(np.float64))
    raw = np.column_stack(cols)
    w = train.w.astype(np.float64)
    total_w = float(w.sum())
    means = (w @ raw) / total_w
    features = raw - means  # centering only remaps the bias
    y = train.y.astype(np.float64)

    bias = 0.0
    coef = np.zeros(features.shape[1])
    with np.errstate(over="ignore", invalid="ignore"):  # divergence handled below
        for step in range(cfg.steps):
            loss, grad_bias, grad_coef = nll_loss_and_gradient(
                bias, coef, features, y, w, cfg.l2
            )
            if not np.isfinite(loss):
                raise DivergenceError("non-finite training loss", iteration=step)
            bias -= cfg.step_size * grad_bias
            coef -= cfg.step_size * grad_coef

    raw_bias = bias - float(means @ coef)
    return LogisticModel(
        bias=raw_bias,
        coef_v=float(coef[0]),
        coef_g=float(coef[1]) if cfg.include_g else None,
        config=cfg,
    )


def decision_scores(model: LogisticModel, data: Dataset) -> np.ndarray:
    """Probability scores in the same order as the records."""
    z = model.bias + model.coef_v * data.v
    if model.coef_g is not None:
        z = z + model.coef_g * data.g
    return _sigmoid(np.asarray(z, dtype=np.float64))


def predict(model: LogisticModel, data: Dataset, threshold: float = 0.5) -> np.ndarray:
    """Binary predictions: 1 where the score is at or above the threshold."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    return (decision_scores(model, data) >= threshold).astype(np.int64)
