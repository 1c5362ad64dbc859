"""Pre-processing repairers: quantile value repair, cell reweighters, and a
prototype-based statistical-disparity remover trained by gradient descent.

Three families:

* :func:`dir_repair` moves feature values toward the cross-group median
  distribution by a repair level in [0, 1], preserving within-group ranks.
* :func:`reweigh` and :func:`fair_balance` assign per-(group, outcome) cell
  weights; values never change.
* :func:`lfr_fit` / :func:`lfr_transform` learn a set of feature-space
  prototypes with soft assignments whose group-conditional distributions are
  pushed to match, then rewrite both the feature and the outcome.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .errors import DivergenceError, InvalidSpecError, UndefinedRepairError

PROB_CLAMP = 1e-6  # keeps the cross-entropy term finite

REPAIR_METHODS = ("dir", "reweigh", "fairbalance", "lfr")


@dataclass(frozen=True)
class LfrParams:
    """Hyperparameters of the statistical-disparity remover."""

    k: int = 5
    a_x: float = 0.01
    a_y: float = 1.0
    a_z: float = 50.0
    steps: int = 2000
    step_size: float = 0.01
    seed: int = 0
    threshold: float = 0.5

    def __post_init__(self):
        if self.k < 1:
            raise InvalidSpecError(f"k must be >= 1, got {self.k}")
        if min(self.a_x, self.a_y, self.a_z) < 0:
            raise InvalidSpecError("loss weights must be >= 0")
        if self.steps < 1:
            raise InvalidSpecError(f"steps must be >= 1, got {self.steps}")
        if not self.step_size > 0:
            raise InvalidSpecError(f"step_size must be > 0, got {self.step_size}")
        if not 0.0 < self.threshold < 1.0:
            raise InvalidSpecError(f"threshold must be in (0, 1), got {self.threshold}")


@dataclass
class LfrModel:
    """Learned prototypes, their label scores in [0, 1], and the loss trace.

    ``trace`` has one row per iteration plus the final state, with columns
    (total, reconstruction, prediction, parity).
    """

    prototypes: np.ndarray
    prototype_labels: np.ndarray
    params: LfrParams
    trace: np.ndarray

    def as_dict(self) -> dict:
        final = self.trace[-1]
        return {
            "prototypes": [float(p) for p in self.prototypes],
            "labels": [float(w) for w in self.prototype_labels],
            "params": {
                "k": self.params.k,
                "a_x": self.params.a_x,
                "a_y": self.params.a_y,
                "a_z": self.params.a_z,
                "steps": self.params.steps,
                "step_size": self.params.step_size,
                "seed": self.params.seed,
                "threshold": self.params.threshold,
            },
            "final_losses": {
                "total": float(final[0]),
                "reconstruction": float(final[1]),
                "prediction": float(final[2]),
                "parity": float(final[3]),
            },
        }


@dataclass(frozen=True)
class RepairConfig:
    """Tagged choice of repair method plus its parameters.

    JSON form: ``{"method": "dir", "lambda": 0.5}``, ``{"method": "reweigh"}``,
    ``{"method": "fairbalance", "variant": true}``, or
    ``{"method": "lfr", "k": 5, ...}``.
    """

    method: str
    level: float | None = None
    variant: bool = False
    lfr: LfrParams | None = None

    def __post_init__(self):
        if self.method not in REPAIR_METHODS:
            raise InvalidSpecError(f"unknown repair method {self.method!r}")
        if self.method == "dir":
            if self.level is None or not 0.0 <= self.level <= 1.0:
                raise InvalidSpecError(
                    f"dir repair level must be in [0, 1], got {self.level}"
                )
        if self.method == "lfr" and self.lfr is None:
            object.__setattr__(self, "lfr", LfrParams())

    @classmethod
    def dir_level(cls, level: float) -> "RepairConfig":
        return cls(method="dir", level=level)

    @classmethod
    def reweighing(cls) -> "RepairConfig":
        return cls(method="reweigh")

    @classmethod
    def balance(cls, variant: bool = False) -> "RepairConfig":
        return cls(method="fairbalance", variant=variant)

    @classmethod
    def disparity_remover(cls, params: LfrParams | None = None) -> "RepairConfig":
        return cls(method="lfr", lfr=params or LfrParams())

    def describe(self) -> str:
        if self.method == "dir":
            return f"dir({self.level:g})"
        if self.method == "fairbalance":
            return "fairbalance_variant" if self.variant else "fairbalance"
        if self.method == "lfr":
            return f"lfr(k={self.lfr.k})"
        return self.method

    @property
    def reweights(self) -> bool:
        """True for methods that change weights rather than values."""
        return self.method in ("reweigh", "fairbalance")

    def to_dict(self) -> dict:
        if self.method == "dir":
            return {"method": "dir", "lambda": self.level}
        if self.method == "reweigh":
            return {"method": "reweigh"}
        if self.method == "fairbalance":
            return {"method": "fairbalance", "variant": self.variant}
        p = self.lfr
        return {
            "method": "lfr",
            "k": p.k,
            "a_x": p.a_x,
            "a_y": p.a_y,
            "a_z": p.a_z,
            "steps": p.steps,
            "step_size": p.step_size,
            "seed": p.seed,
            "threshold": p.threshold,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RepairConfig":
        try:
            method = obj["method"]
        except (KeyError, TypeError) as exc:
            raise InvalidSpecError("repair config needs a 'method' key") from exc
        if method == "dir":
            if "lambda" not in obj:
                raise InvalidSpecError("dir repair config needs 'lambda'")
            return cls.dir_level(float(obj["lambda"]))
        if method == "reweigh":
            return cls.reweighing()
        if method == "fairbalance":
            return cls.balance(bool(obj.get("variant", False)))
        if method == "lfr":
            defaults = LfrParams()
            params = LfrParams(
                k=int(obj.get("k", defaults.k)),
                a_x=float(obj.get("a_x", defaults.a_x)),
                a_y=float(obj.get("a_y", defaults.a_y)),
                a_z=float(obj.get("a_z", defaults.a_z)),
                steps=int(obj.get("steps", defaults.steps)),
                step_size=float(obj.get("step_size", defaults.step_size)),
                seed=int(obj.get("seed", defaults.seed)),
                threshold=float(obj.get("threshold", defaults.threshold)),
            )
            return cls.disparity_remover(params)
        raise InvalidSpecError(f"unknown repair method {method!r}")


def _midrank_quantiles(values: np.ndarray) -> np.ndarray:
    """Mid-rank quantile (rank - 0.5)/n of each value within its own sample;
    ties share their average rank."""
    _, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
    upper = np.cumsum(counts)
    mid = upper - (counts - 1) / 2.0  # average rank of each tied block
    return (mid[inverse] - 0.5) / len(values)


def dir_repair(data: Dataset, level: float) -> Dataset:
    """Quantile repair of the feature column at the given repair level.

    Each value is mapped to its mid-rank quantile within its group; the full
    repair target is the median across groups of the group quantile functions
    at that point (mean of the two, for two groups). The output value
    interpolates linearly between original and target, so level 0 is the
    identity and level 1 aligns the group distributions. Group, outcome and
    weight columns are untouched, and within-group rank order is preserved.
    """
    if not 0.0 <= level <= 1.0:
        raise ValueError(f"repair level must be in [0, 1], got {level}")
    gids = data.group_ids()
    if len(gids) < 2:
        raise UndefinedRepairError("dir repair needs both groups present")
    repaired = np.array(data.v, dtype=np.float64)
    group_values = {int(gid): data.v[data.g == gid] for gid in gids}
    for gid, values in group_values.items():
        q = _midrank_quantiles(values)
        targets = np.median(
            [np.quantile(other, q, method="hazen") for other in group_values.values()],
            axis=0,
        )
        repaired[data.g == gid] = (1.0 - level) * values + level * targets
    return data.replace(v=repaired, provenance=f"{data.provenance}-dir-{level:g}")


def _cell_weight_totals(data: Dataset) -> dict[tuple[int, int], float]:
    return {
        (gid, out): float(data.w[(data.g == gid) & (data.y == out)].sum())
        for gid in (0, 1)
        for out in (0, 1)
    }


def reweigh(data: Dataset) -> Dataset:
    """Scale each (group, outcome) cell's weight so group and outcome become
    independent under the weighted measure.

    The multiplier for cell (g, y) is expected/observed mass,
    ``W_g * W_y / (W * W_gy)``, computed from weight totals (plain counts when
    all input weights are 1). Values and labels never change.
    """
    if len(data) == 0:
        raise ValueError("cannot reweigh an empty dataset")
    cells = _cell_weight_totals(data)
    total = sum(cells.values())
    group_tot = {gid: cells[(gid, 0)] + cells[(gid, 1)] for gid in (0, 1)}
    out_tot = {out: cells[(0, out)] + cells[(1, out)] for out in (0, 1)}
    w = np.array(data.w, dtype=np.float64)
    for (gid, out), mass in cells.items():
        if mass == 0.0:
            continue  # empty cells contribute no records
        factor = group_tot[gid] * out_tot[out] / (total * mass)
        w[(data.g == gid) & (data.y == out)] *= factor
    return data.replace(w=w, provenance=f"{data.provenance}-reweighed")


def fair_balance(data: Dataset, variant: bool = False) -> Dataset:
    """Balance outcome classes within each group by cell weighting.

    Base form: cell (g, y) weight multiplier is ``W_g / W_gy``, so each
    outcome class carries equal weight within its group. Variant form uses
    ``1 / W_gy``, additionally equalizing total weight across all four cells.
    Every group present must contain both outcome classes.
    """
    cells = _cell_weight_totals(data)
    present = [gid for gid in (0, 1) if (data.g == gid).any()]
    if not present:
        raise UndefinedRepairError("cannot balance an empty dataset")
    for gid in present:
        for out in (0, 1):
            if cells[(gid, out)] == 0.0:
                raise UndefinedRepairError(
                    f"group {gid} has no weight in outcome class {out}"
                )
    w = np.array(data.w, dtype=np.float64)
    for gid in present:
        group_total = cells[(gid, 0)] + cells[(gid, 1)]
        for out in (0, 1):
            numer = 1.0 if variant else group_total
            w[(data.g == gid) & (data.y == out)] *= numer / cells[(gid, out)]
    tag = "fairbalance-variant" if variant else "fairbalance"
    return data.replace(w=w, provenance=f"{data.provenance}-{tag}")


class _LfrWorkspace:
    """Per-dataset constants and scratch buffers reused across training steps.

    Assignment matrices are held prototype-major, shape (k, n), so every
    in-place update runs over contiguous rows.
    """

    def __init__(self, data: Dataset):
        self.x = data.v.astype(np.float64)
        self.y = data.y.astype(np.float64)
        self.n = len(data)
        mask1 = data.g == 1
        mask0 = data.g == 0
        # signed group-mean operator: (M @ coeff)_k = mean_1(M_k.) - mean_0(M_k.)
        self.group_coeff = mask1 / max(mask1.sum(), 1) - mask0 / max(mask0.sum(), 1)
        self.diff = None  # (k, n): x - prototype, per prototype
        self.m = None  # (k, n): soft assignments

    def _ensure(self, k: int):
        if self.m is None or self.m.shape[0] != k:
            self.diff = np.empty((k, self.n))
            self.m = np.empty((k, self.n))


def _forward(ws: _LfrWorkspace, prototypes: np.ndarray, labels: np.ndarray):
    """Soft assignments (softmax of negative squared distance) and the
    blended reconstruction and label score per record."""
    ws._ensure(len(prototypes))
    diff, m = ws.diff, ws.m
    np.subtract(ws.x[None, :], prototypes[:, None], out=diff)
    np.multiply(diff, diff, out=m)
    np.negative(m, out=m)
    m -= m.max(axis=0)[None, :]
    np.exp(m, out=m)
    m /= m.sum(axis=0)[None, :]
    return m, diff, prototypes @ m, labels @ m


def _losses(ws: _LfrWorkspace, m, v_hat, y_raw):
    y_hat = np.clip(y_raw, PROB_CLAMP, 1.0 - PROB_CLAMP)
    recon = float(((ws.x - v_hat) ** 2).mean())
    pred = float(-(ws.y * np.log(y_hat) + (1.0 - ws.y) * np.log(1.0 - y_hat)).mean())
    parity = float(np.abs(m @ ws.group_coeff).sum())
    return recon, pred, parity


def _gradients(ws, params, prototypes, labels, m, diff, v_hat, y_raw):
    y_hat = np.clip(y_raw, PROB_CLAMP, 1.0 - PROB_CLAMP)
    # dL/d v_hat and dL/d y_raw (zero where the clamp is active)
    d_vhat = params.a_x * 2.0 * (v_hat - ws.x) / ws.n
    interior = (y_raw > PROB_CLAMP) & (y_raw < 1.0 - PROB_CLAMP)
    d_yraw = np.where(
        interior, params.a_y * (y_hat - ws.y) / (y_hat * (1.0 - y_hat) * ws.n), 0.0
    )
    gap_sign = np.sign(m @ ws.group_coeff)

    # total dL/dM, then backprop through the softmax to the distances
    d_m = prototypes[:, None] * d_vhat[None, :]
    d_m += labels[:, None] * d_yraw[None, :]
    d_m += (params.a_z * gap_sign)[:, None] * ws.group_coeff[None, :]
    d_m -= np.einsum("kn,kn->n", d_m, m)[None, :]
    d_m *= m  # now dL/d distance

    grad_prototypes = m @ d_vhat + 2.0 * np.einsum("kn,kn->k", d_m, diff)
    grad_labels = m @ d_yraw
    return grad_prototypes, grad_labels


def lfr_objective(prototypes, labels, data: Dataset):
    """Loss components of the disparity remover at the given parameters.

    Returns (reconstruction, prediction, parity) where, with soft
    assignments M over prototypes:

    * reconstruction: mean squared error between v and its prototype blend;
    * prediction: mean cross-entropy of y against the blended label score,
      clamped away from 0 and 1;
    * parity: summed absolute gap between the two groups' mean assignment to
      each prototype.

    The per-record terms are averages so that a fixed gradient step size is
    independent of dataset size; the parity term is already group-averaged.
    The loss-weight coefficients are applied by the caller.
    """
    prototypes = np.asarray(prototypes, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    ws = _LfrWorkspace(data)
    m, _, v_hat, y_raw = _forward(ws, prototypes, labels)
    return _losses(ws, m, v_hat, y_raw)


def lfr_gradients(prototypes, labels, data: Dataset, params: LfrParams):
    """Analytic gradients of the weighted objective
    ``a_x * reconstruction + a_y * prediction + a_z * parity``
    with respect to prototypes and labels."""
    prototypes = np.asarray(prototypes, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    ws = _LfrWorkspace(data)
    m, diff, v_hat, y_raw = _forward(ws, prototypes, labels)
    return _gradients(ws, params, prototypes, labels, m, diff, v_hat, y_raw)


def lfr_fit(data: Dataset, params: LfrParams | None = None) -> LfrModel:
    """Train the disparity remover by full-batch gradient descent.

    Prototypes start uniformly at random between the smallest and largest
    feature value (seeded); label scores start at 0.5 and are clipped back
    into [0, 1] after each step. The returned model carries the full loss
    trace, one row per iteration plus the final state.
    """
    params = params or LfrParams()
    if len(data) == 0 or len(data.group_ids()) < 2:
        raise UndefinedRepairError("disparity remover needs both groups present")
    rng = np.random.default_rng(params.seed)
    prototypes = rng.uniform(float(data.v.min()), float(data.v.max()), params.k)
    labels = np.full(params.k, 0.5)
    ws = _LfrWorkspace(data)

    trace = np.empty((params.steps + 1, 4))
    with np.errstate(over="ignore", invalid="ignore"):  # divergence handled below
        for step in range(params.steps + 1):
            m, diff, v_hat, y_raw = _forward(ws, prototypes, labels)
            recon, pred, parity = _losses(ws, m, v_hat, y_raw)
            total = params.a_x * recon + params.a_y * pred + params.a_z * parity
            trace[step] = (total, recon, pred, parity)
            if not np.isfinite(total):
                raise DivergenceError("non-finite training loss", iteration=step)
            if step == params.steps:
                break
            grad_p, grad_w = _gradients(
                ws, params, prototypes, labels, m, diff, v_hat, y_raw
            )
            prototypes = prototypes - params.step_size * grad_p
            labels = np.clip(labels - params.step_size * grad_w, 0.0, 1.0)

    return LfrModel(prototypes=prototypes, prototype_labels=labels, params=params, trace=trace)


def lfr_transform(model: LfrModel, data: Dataset, threshold: float = 0.5) -> Dataset:
    """Rewrite each record through the learned prototypes: the feature becomes
    its prototype blend and the outcome is the thresholded label score."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    _, _, v_hat, y_raw = _forward(
        _LfrWorkspace(data), np.asarray(model.prototypes), np.asarray(model.prototype_labels)
    )
    y_hat = np.clip(y_raw, PROB_CLAMP, 1.0 - PROB_CLAMP)
    return data.replace(
        v=v_hat,
        y=(y_hat >= threshold).astype(np.int64),
        provenance=f"{data.provenance}-lfr",
    )


def apply_repair(data: Dataset, config: RepairConfig) -> Dataset:
    """Run one repair config on a dataset, treating it as self-contained
    (the disparity remover is fit on the data it transforms).

    Weight-based methods return the same records with new weights; call
    :func:`fairlab.datasets.resample_by_weight` to materialize them.
    """
    if config.method == "dir":
        return dir_repair(data, config.level)
    if config.method == "reweigh":
        return reweigh(data)
    if config.method == "fairbalance":
        return fair_balance(data, config.variant)
    model = lfr_fit(data, config.lfr)
    return lfr_transform(model, data, config.lfr.threshold)
