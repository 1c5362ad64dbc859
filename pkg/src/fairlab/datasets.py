"""Dataset model, synthetic generation, splitting, resampling, and CSV/JSON I/O.

A dataset is a column store of four parallel arrays: binary group id ``g``,
real-valued feature ``v``, binary outcome ``y`` (1 = favorable), and a
nonnegative sample weight ``w``. All operations in this module are pure and
deterministic given their seed; arrays are locked after construction so
datasets can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeightsError, InvalidSpecError, ParseError

CSV_HEADER = "g,v,y,w"


@dataclass(frozen=True)
class Record:
    """One observation: group id, feature value, outcome, weight."""

    g: int
    v: float
    y: int
    w: float = 1.0


@dataclass(frozen=True)
class GroupSpec:
    """Generation parameters for one group.

    ``size`` records are drawn with feature values from a normal distribution
    with the given mean and standard deviation, and favorable outcomes with
    probability ``p_favorable``.
    """

    group_id: int
    size: int
    mean: float
    std: float
    p_favorable: float

    def __post_init__(self):
        if self.group_id not in (0, 1):
            raise InvalidSpecError(f"group_id must be 0 or 1, got {self.group_id}")
        if self.size < 1:
            raise InvalidSpecError(f"group size must be >= 1, got {self.size}")
        if not self.std > 0:
            raise InvalidSpecError(f"group std must be > 0, got {self.std}")
        if not 0.0 <= self.p_favorable <= 1.0:
            raise InvalidSpecError(
                f"p_favorable must be in [0, 1], got {self.p_favorable}"
            )


@dataclass(frozen=True)
class DatasetSpec:
    """Named two-group generation spec with its own seed."""

    name: str
    groups: tuple[GroupSpec, ...]
    seed: int

    def __post_init__(self):
        groups = tuple(self.groups)
        object.__setattr__(self, "groups", groups)
        if len(groups) != 2 or {g.group_id for g in groups} != {0, 1}:
            raise InvalidSpecError("spec needs exactly two groups with ids {0, 1}")
        if self.seed < 0:
            raise InvalidSpecError("seed must be a nonnegative integer")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "groups": [
                {
                    "group_id": g.group_id,
                    "size": g.size,
                    "mean": g.mean,
                    "std": g.std,
                    "p_favorable": g.p_favorable,
                }
                for g in self.groups
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "DatasetSpec":
        try:
            groups = tuple(
                GroupSpec(
                    group_id=int(g["group_id"]),
                    size=int(g["size"]),
                    mean=float(g["mean"]),
                    std=float(g["std"]),
                    p_favorable=float(g["p_favorable"]),
                )
                for g in obj["groups"]
            )
            return cls(name=str(obj["name"]), groups=groups, seed=int(obj["seed"]))
        except (KeyError, TypeError) as exc:
            raise InvalidSpecError(f"malformed dataset spec: {exc}") from exc


class Dataset:
    """Immutable column store of records plus a free-text provenance tag."""

    __slots__ = ("g", "v", "y", "w", "provenance")

    def __init__(self, g, v, y, w=None, provenance: str = ""):
        g = np.asarray(g, dtype=np.int64).copy()
        v = np.asarray(v, dtype=np.float64).copy()
        y = np.asarray(y, dtype=np.int64).copy()
        w = (
            np.ones(len(g), dtype=np.float64)
            if w is None
            else np.asarray(w, dtype=np.float64).copy()
        )
        n = len(g)
        if not (len(v) == len(y) == len(w) == n):
            raise InvalidSpecError("columns g, v, y, w must have equal length")
        if n:
            if not np.isin(g, (0, 1)).all():
                raise InvalidSpecError("group ids must be 0 or 1")
            if not np.isin(y, (0, 1)).all():
                raise InvalidSpecError("outcomes must be 0 or 1")
            if not np.isfinite(v).all():
                raise InvalidSpecError("feature values must be finite")
            if not (np.isfinite(w).all() and (w >= 0).all()):
                raise InvalidSpecError("weights must be finite and >= 0")
        for arr in (g, v, y, w):
            arr.setflags(write=False)
        self.g = g
        self.v = v
        self.y = y
        self.w = w
        self.provenance = provenance

    @classmethod
    def from_records(cls, records, provenance: str = "") -> "Dataset":
        recs = list(records)
        return cls(
            g=[r.g for r in recs],
            v=[r.v for r in recs],
            y=[r.y for r in recs],
            w=[r.w for r in recs],
            provenance=provenance,
        )

    @property
    def records(self) -> list[Record]:
        return [
            Record(int(g), float(v), int(y), float(w))
            for g, v, y, w in zip(self.g, self.v, self.y, self.w)
        ]

    def __len__(self) -> int:
        return len(self.g)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            len(self) == len(other)
            and np.array_equal(self.g, other.g)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.w, other.w)
        )

    def __repr__(self) -> str:
        return f"Dataset(n={len(self)}, provenance={self.provenance!r})"

    def group_ids(self) -> np.ndarray:
        return np.unique(self.g)

    def subset(self, index, provenance: str | None = None) -> "Dataset":
        return Dataset(
            self.g[index],
            self.v[index],
            self.y[index],
            self.w[index],
            self.provenance if provenance is None else provenance,
        )

    def replace(self, *, v=None, y=None, w=None, provenance=None) -> "Dataset":
        """Copy with one or more columns substituted."""
        return Dataset(
            self.g,
            self.v if v is None else v,
            self.y if y is None else y,
            self.w if w is None else w,
            self.provenance if provenance is None else provenance,
        )


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset


def generate(spec: DatasetSpec) -> Dataset:
    """Generate a synthetic two-group dataset from ``spec``.

    Feature values are produced by the Box-Muller transform (cosine branch)
    over PCG64 uniforms, so the output is fully determined by ``spec.seed``.
    Outcomes are Bernoulli draws, independent of the feature value within
    each group.
    """
    rng = np.random.default_rng(spec.seed)
    gs, vs, ys = [], [], []
    for group in spec.groups:
        n = group.size
        u1 = 1.0 - rng.random(n)  # (0, 1]: keeps log finite
        u2 = rng.random(n)
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        vs.append(group.mean + group.std * z)
        ys.append((rng.random(n) < group.p_favorable).astype(np.int64))
        gs.append(np.full(n, group.group_id, dtype=np.int64))
    return Dataset(
        np.concatenate(gs),
        np.concatenate(vs),
        np.concatenate(ys),
        provenance=f"{spec.name}-original",
    )


def split(data: Dataset, test_fraction: float, seed: int) -> SplitPair:
    """Stratified train/test split by (group, outcome) cell.

    Each cell sends ``round(test_fraction * cell_size)`` records to the test
    partition, clamped so the training partition keeps at least one record
    from every cell present in the source.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    test_mask = np.zeros(len(data), dtype=bool)
    for gid in (0, 1):
        for out in (0, 1):
            cell = np.flatnonzero((data.g == gid) & (data.y == out))
            if len(cell) == 0:
                continue
            n_test = int(math.floor(test_fraction * len(cell) + 0.5))
            n_test = min(n_test, len(cell) - 1)
            picked = rng.permutation(len(cell))[:n_test]
            test_mask[cell[picked]] = True
    return SplitPair(
        train=data.subset(~test_mask, provenance=f"{data.provenance}-train"),
        test=data.subset(test_mask, provenance=f"{data.provenance}-test"),
    )


def resample_by_weight(data: Dataset, seed: int) -> Dataset:
    """Materialize weights: bootstrap ``len(data)`` records with probability
    proportional to weight. Output weights are all 1.0."""
    total = float(data.w.sum())
    if not total > 0.0:
        raise DegenerateWeightsError("cannot resample: total weight is zero")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(data), size=len(data), replace=True, p=data.w / total)
    return Dataset(
        data.g[idx],
        data.v[idx],
        data.y[idx],
        provenance=f"{data.provenance}-resampled",
    )


def write_csv(data: Dataset, path) -> None:
    """Write ``g,v,y,w`` rows; floats use shortest exact round-trip text."""
    lines = [CSV_HEADER]
    for g, v, y, w in zip(data.g, data.v, data.y, data.w):
        lines.append(f"{g},{float(v)!r},{y},{float(w)!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path) -> Dataset:
    """Read a ``g,v,y,w`` CSV written by :func:`write_csv`.

    Raises :class:`ParseError` naming the offending line on any malformed
    row, non-binary g or y, or negative weight.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ParseError(f"expected header {CSV_HEADER!r}", line=1)
    gs, vs, ys, ws = [], [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError(f"expected 4 fields, got {len(parts)}", line=lineno)
        g_txt, v_txt, y_txt, w_txt = parts
        if g_txt not in ("0", "1"):
            raise ParseError(f"g must be 0 or 1, got {g_txt!r}", line=lineno)
        if y_txt not in ("0", "1"):
            raise ParseError(f"y must be 0 or 1, got {y_txt!r}", line=lineno)
        try:
            v = float(v_txt)
            w = float(w_txt)
        except ValueError:
            raise ParseError(f"malformed number in {line!r}", line=lineno) from None
        if not math.isfinite(v):
            raise ParseError(f"v must be finite, got {v_txt!r}", line=lineno)
        if not (math.isfinite(w) and w >= 0):
            raise ParseError(f"w must be finite and >= 0, got {w_txt!r}", line=lineno)
        gs.append(int(g_txt))
        vs.append(v)
        ys.append(int(y_txt))
        ws.append(w)
    name = os.path.splitext(os.path.basename(str(path)))[0]
    return Dataset(gs, vs, ys, ws, provenance=name)


def read_spec(path) -> DatasetSpec:
    """Load a :class:`DatasetSpec` from its JSON file form."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return DatasetSpec.from_dict(obj)


def write_spec(spec: DatasetSpec, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n")
