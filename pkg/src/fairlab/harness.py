"""Experiment harness: built-in benchmark datasets, the skew/histogram report
run, and the fairness-accuracy trade-off sweep.

Everything here is deterministic given a master seed. Per-task seeds are
derived from the master seed and stable string salts, so adding or reordering
work cannot silently change results.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .datasets import (
    Dataset,
    DatasetSpec,
    GroupSpec,
    generate,
    resample_by_weight,
    split,
)
from .errors import InvalidSpecError
from .metrics import (
    MetricsReport,
    accuracy,
    dataset_report,
    equalized_odds_gap,
    group_histograms,
    wasserstein_1d,
)
from .model import FitConfig, fit_logistic, predict
from .repairers import LfrParams, RepairConfig, apply_repair

DIR_LEVELS = (0.3, 0.5, 1.0)
DEFAULT_BINS = 50


def derive_seed(master_seed: int, *salts) -> int:
    """Stable sub-seed from a master seed and any string/int salts."""
    entropy = [int(master_seed)] + [zlib.crc32(str(s).encode()) for s in salts]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def reference_specs(master_seed: int = 0) -> list[DatasetSpec]:
    """The three built-in benchmark datasets.

    D1 and D3 are balanced in size; D2 is imbalanced in both size and base
    rate. In all three the groups differ in feature location and spread, so
    the feature always carries group information.
    """

    def _spec(name, g1, g0):
        return DatasetSpec(
            name=name,
            groups=(GroupSpec(1, *g1), GroupSpec(0, *g0)),
            seed=derive_seed(master_seed, "dataset", name),
        )

    return [
        _spec("D1", (10000, 5.5, 0.6, 0.7), (10000, 6.0, 0.4, 0.5)),
        _spec("D2", (20000, 5.5, 0.3, 0.8), (9000, 6.0, 0.6, 0.2)),
        _spec("D3", (10000, 5.5, 0.6, 0.5), (10000, 6.0, 0.3, 0.5)),
    ]


def default_repairs(master_seed: int = 0) -> list[RepairConfig]:
    """One config per implemented repair method and level."""
    return [
        *(RepairConfig.dir_level(level) for level in DIR_LEVELS),
        RepairConfig.reweighing(),
        RepairConfig.balance(variant=False),
        RepairConfig.balance(variant=True),
        RepairConfig.disparity_remover(LfrParams(seed=derive_seed(master_seed, "lfr"))),
    ]


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of a trade-off sweep."""

    datasets: tuple[DatasetSpec, ...]
    repairs: tuple[RepairConfig, ...]
    master_seed: int = 0
    test_fraction: float = 0.2
    bins: int = DEFAULT_BINS
    fit: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "repairs", tuple(self.repairs))
        if not self.datasets:
            raise InvalidSpecError("experiment config needs at least one dataset")
        if not self.repairs:
            raise InvalidSpecError("experiment config needs at least one repair")
        if not 0.0 < self.test_fraction < 1.0:
            raise InvalidSpecError(
                f"test_fraction must be in (0, 1), got {self.test_fraction}"
            )
        if self.bins < 1:
            raise InvalidSpecError(f"bins must be >= 1, got {self.bins}")

    @classmethod
    def default(cls, master_seed: int = 0) -> "ExperimentConfig":
        return cls(
            datasets=tuple(reference_specs(master_seed)),
            repairs=tuple(default_repairs(master_seed)),
            master_seed=master_seed,
        )

    def to_dict(self) -> dict:
        return {
            "datasets": [s.to_dict() for s in self.datasets],
            "repairs": [r.to_dict() for r in self.repairs],
            "master_seed": self.master_seed,
            "test_fraction": self.test_fraction,
            "bins": self.bins,
            "fit": self.fit.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        master_seed = int(obj.get("master_seed", 0))
        if "datasets" in obj:
            datasets = tuple(DatasetSpec.from_dict(d) for d in obj["datasets"])
        else:
            datasets = tuple(reference_specs(master_seed))
        if "repairs" in obj:
            repairs = tuple(RepairConfig.from_dict(r) for r in obj["repairs"])
        else:
            repairs = tuple(default_repairs(master_seed))
        return cls(
            datasets=datasets,
            repairs=repairs,
            master_seed=master_seed,
            test_fraction=float(obj.get("test_fraction", 0.2)),
            bins=int(obj.get("bins", DEFAULT_BINS)),
            fit=FitConfig.from_dict(obj.get("fit", {})),
        )


@dataclass
class ReportRow:
    """One (dataset, repair) result of the trade-off sweep.

    ``repair`` is ``"none"`` for the per-dataset baseline row, whose model is
    trained on the untouched training partition. ``error`` flags rows whose
    repair or fit failed; all other fields are then None.
    """

    dataset: str
    repair: str
    metrics_original: MetricsReport | None = None
    metrics_transformed: MetricsReport | None = None
    distortion: float | None = None
    accuracy_on_original_test: float | None = None
    accuracy_on_transformed_test: float | None = None
    eo_gap_of_predictions: float | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "repair": self.repair,
            "metrics_original": (
                self.metrics_original.as_dict() if self.metrics_original else None
            ),
            "metrics_transformed": (
                self.metrics_transformed.as_dict() if self.metrics_transformed else None
            ),
            "distortion": self.distortion,
            "accuracy_on_original_test": self.accuracy_on_original_test,
            "accuracy_on_transformed_test": self.accuracy_on_transformed_test,
            "eo_gap_of_predictions": self.eo_gap_of_predictions,
            "error": self.error,
        }


def _write_json(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_csv_table(path: Path, header: list[str], rows: list[list]) -> None:
    def _cell(value):
        if isinstance(value, float):
            return repr(value)
        return str(value)

    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _derived_lfr(config: RepairConfig, seed: int) -> RepairConfig:
    """A copy of an lfr config with its training seed pinned."""
    if config.method != "lfr":
        return config
    return RepairConfig.disparity_remover(replace(config.lfr, seed=seed))


def _materialize(data: Dataset, config: RepairConfig, seed: int) -> Dataset:
    """Weight-based repairs rendered as plain data for skew and histograms."""
    if config.reweights:
        return resample_by_weight(data, seed)
    return data


def per_group_distortion(original: Dataset, transformed: Dataset) -> float:
    """Summed per-group earth-mover distance between feature distributions."""
    total = 0.0
    for gid in original.group_ids():
        total += wasserstein_1d(
            original.v[original.g == gid], transformed.v[transformed.g == gid]
        )
    return total


def _dataset_transforms(data: Dataset, master_seed: int) -> dict[str, Dataset]:
    """Every implemented transform of one dataset, materialized."""
    name = data.provenance
    out = {"original": data}
    for level in DIR_LEVELS:
        out[f"dir_{level}"] = apply_repair(data, RepairConfig.dir_level(level))
    for tag, config in (
        ("reweighing", RepairConfig.reweighing()),
        ("fairbalance", RepairConfig.balance(variant=False)),
        ("fairbalance_variant", RepairConfig.balance(variant=True)),
    ):
        repaired = apply_repair(data, config)
        out[tag] = resample_by_weight(repaired, derive_seed(master_seed, name, tag))
    lfr_cfg = RepairConfig.disparity_remover(
        LfrParams(seed=derive_seed(master_seed, name, "lfr"))
    )
    out["lfr"] = apply_repair(data, lfr_cfg)
    return out


def reproduce(master_seed: int, out_dir) -> dict:
    """Run the full benchmark and write its report tree.

    Generates the three reference datasets, applies every repair (weighted
    repairs are materialized by seeded resampling), and writes:

    * ``table1.json``: per-dataset group summaries and fairness metrics;
    * ``table2_dir.json``: group skew for the quantile repair at each level;
    * ``table3_eo.json``: group skew for the three weighting repairs;
    * ``table4_sp.json``: group skew for the disparity remover;
    * ``hist/<dataset>/<transform>/<group>.json``: histogram data with a
      shared bin range per dataset;
    * a CSV mirror of each table.

    Byte-identical output for equal seeds.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    specs = reference_specs(master_seed)

    table1, table2, table3, table4 = {}, {}, {}, {}
    for spec in specs:
        data = generate(spec)
        report = dataset_report(data)
        groups = {}
        for g in sorted(spec.groups, key=lambda s: -s.group_id):
            mask = data.g == g.group_id
            groups[str(g.group_id)] = {
                "size": int(mask.sum()),
                "mean": float(data.v[mask].mean()),
                "std": float(data.v[mask].std(ddof=1)),
                "p_favorable": float(data.y[mask].mean()),
            }
        table1[spec.name] = {
            "groups": groups,
            "spd": report.spd,
            "di": report.di,
            "group_skew": report.group_skew,
            "phi": report.phi,
        }

        transforms = _dataset_transforms(data, master_seed)
        skews = {tag: dataset_report(ds).group_skew for tag, ds in transforms.items()}
        table2[spec.name] = {
            tag: skews[tag] for tag in ("original", "dir_0.3", "dir_0.5", "dir_1.0")
        }
        table3[spec.name] = {
            tag: skews[tag]
            for tag in ("reweighing", "fairbalance", "fairbalance_variant")
        }
        table4[spec.name] = {"lfr": skews["lfr"]}

        lo = min(float(ds.v.min()) for ds in transforms.values())
        hi = max(float(ds.v.max()) for ds in transforms.values())
        for tag, ds in transforms.items():
            for hd in group_histograms(ds, DEFAULT_BINS, (lo, hi)):
                _write_json(
                    hd.as_dict(),
                    out / "hist" / spec.name / tag / f"{hd.group_id}.json",
                )

    _write_json(table1, out / "table1.json")
    _write_json(table2, out / "table2_dir.json")
    _write_json(table3, out / "table3_eo.json")
    _write_json(table4, out / "table4_sp.json")

    names = [spec.name for spec in specs]
    _write_csv_table(
        out / "table1.csv",
        ["dataset", "group", "size", "mean", "std", "p_favorable", "spd", "di", "group_skew"],
        [
            [
                name,
                gid,
                table1[name]["groups"][gid]["size"],
                table1[name]["groups"][gid]["mean"],
                table1[name]["groups"][gid]["std"],
                table1[name]["groups"][gid]["p_favorable"],
                table1[name]["spd"],
                table1[name]["di"],
                table1[name]["group_skew"],
            ]
            for name in names
            for gid in ("1", "0")
        ],
    )
    _write_csv_table(
        out / "table2_dir.csv",
        ["dataset", "original", "dir_0.3", "dir_0.5", "dir_1.0"],
        [
            [name, *(table2[name][tag] for tag in ("original", "dir_0.3", "dir_0.5", "dir_1.0"))]
            for name in names
        ],
    )
    _write_csv_table(
        out / "table3_eo.csv",
        ["dataset", "reweighing", "fairbalance", "fairbalance_variant"],
        [
            [
                name,
                *(
                    table3[name][tag]
                    for tag in ("reweighing", "fairbalance", "fairbalance_variant")
                ),
            ]
            for name in names
        ],
    )
    _write_csv_table(
        out / "table4_sp.csv",
        ["dataset", "lfr"],
        [[name, table4[name]["lfr"]] for name in names],
    )
    return {
        "table1": table1,
        "table2_dir": table2,
        "table3_eo": table3,
        "table4_sp": table4,
    }


def _sweep_one(
    spec: DatasetSpec, config: RepairConfig, cfg: ExperimentConfig, row_index: int
) -> ReportRow:
    data = generate(spec)
    pair = split(data, cfg.test_fraction, derive_seed(cfg.master_seed, spec.name, "split"))
    metrics_original = dataset_report(data)

    if config is None:  # baseline: train on the untouched partition
        model = fit_logistic(pair.train, cfg.fit)
        preds = predict(model, pair.test)
        acc = accuracy(pair.test.y, preds)
        return ReportRow(
            dataset=spec.name,
            repair="none",
            metrics_original=metrics_original,
            metrics_transformed=dataset_report(pair.train),
            distortion=0.0,
            accuracy_on_original_test=acc,
            accuracy_on_transformed_test=acc,
            eo_gap_of_predictions=equalized_odds_gap(pair.test.y, preds, pair.test.g),
        )

    train_cfg = _derived_lfr(config, derive_seed(cfg.master_seed, row_index, "train"))
    test_cfg = _derived_lfr(config, derive_seed(cfg.master_seed, row_index, "test"))
    repaired_train = apply_repair(pair.train, train_cfg)
    # weighted repairs feed weights straight into the fit; skew, histograms
    # and distortion use a materialized copy instead
    model = fit_logistic(repaired_train, cfg.fit)
    preds_original = predict(model, pair.test)
    repaired_test = apply_repair(pair.test, test_cfg)
    preds_transformed = predict(model, repaired_test)

    shown = _materialize(
        repaired_train, config, derive_seed(cfg.master_seed, row_index, "resample")
    )
    return ReportRow(
        dataset=spec.name,
        repair=config.describe(),
        metrics_original=metrics_original,
        metrics_transformed=dataset_report(shown),
        distortion=per_group_distortion(pair.train, shown),
        accuracy_on_original_test=accuracy(pair.test.y, preds_original),
        accuracy_on_transformed_test=accuracy(repaired_test.y, preds_transformed),
        eo_gap_of_predictions=equalized_odds_gap(
            pair.test.y, preds_original, pair.test.g
        ),
    )


def run_tradeoff_sweep(cfg: ExperimentConfig, out_dir=None) -> list[ReportRow]:
    """Train-on-repaired / test-on-original sweep over all (dataset, repair)
    pairs, plus one baseline row per dataset.

    A failing repair or fit flags its own row and leaves the rest of the
    sweep intact. When ``out_dir`` is given, writes ``sweep.json`` there.
    """
    rows: list[ReportRow] = []
    row_index = 0
    for spec in cfg.datasets:
        for config in (None, *cfg.repairs):
            repair_name = "none" if config is None else config.describe()
            try:
                rows.append(_sweep_one(spec, config, cfg, row_index))
            except Exception as exc:  # noqa: BLE001 - row isolation is the contract
                rows.append(
                    ReportRow(dataset=spec.name, repair=repair_name, error=str(exc))
                )
            row_index += 1
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(
            {"config": cfg.to_dict(), "rows": [r.to_dict() for r in rows]},
            out / "sweep.json",
        )
    return rows
