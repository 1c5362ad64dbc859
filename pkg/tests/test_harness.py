import json

import numpy as np
import pytest

from fairlab import (
    DatasetSpec,
    ExperimentConfig,
    FitConfig,
    GroupSpec,
    InvalidSpecError,
    LfrParams,
    RepairConfig,
    default_repairs,
    derive_seed,
    generate,
    per_group_distortion,
    reference_specs,
    run_tradeoff_sweep,
)


def small_imbalanced_spec(seed=0):
    """Downsized analog of the imbalanced benchmark dataset."""
    return DatasetSpec(
        "small-imbalanced",
        (GroupSpec(1, 3000, 5.5, 0.3, 0.8), GroupSpec(0, 1200, 6.0, 0.6, 0.2)),
        seed=seed,
    )


def quick_config(repairs, master_seed=7):
    return ExperimentConfig(
        datasets=(small_imbalanced_spec(seed=derive_seed(master_seed, "ds")),),
        repairs=tuple(repairs),
        master_seed=master_seed,
        fit=FitConfig(steps=1200),
    )


def test_reference_specs_shape():
    specs = reference_specs(0)
    assert [s.name for s in specs] == ["D1", "D2", "D3"]
    assert [sum(g.size for g in s.groups) for s in specs] == [20000, 29000, 20000]
    seeds = {s.seed for s in specs}
    assert len(seeds) == 3  # distinct derived seeds


def test_derive_seed_stable_and_salted():
    assert derive_seed(42, "a", 1) == derive_seed(42, "a", 1)
    assert derive_seed(42, "a") != derive_seed(42, "b")
    assert derive_seed(42, "a") != derive_seed(43, "a")


def test_default_repairs_cover_all_methods():
    methods = [r.method for r in default_repairs(0)]
    assert methods.count("dir") == 3
    assert "reweigh" in methods and "lfr" in methods
    assert methods.count("fairbalance") == 2


def test_experiment_config_validation():
    with pytest.raises(InvalidSpecError):
        ExperimentConfig(datasets=(), repairs=(RepairConfig.reweighing(),))
    with pytest.raises(InvalidSpecError):
        ExperimentConfig(datasets=(small_imbalanced_spec(),), repairs=())
    with pytest.raises(InvalidSpecError):
        ExperimentConfig(
            datasets=(small_imbalanced_spec(),),
            repairs=(RepairConfig.reweighing(),),
            test_fraction=1.5,
        )


def test_experiment_config_json_roundtrip_and_defaults():
    cfg = ExperimentConfig.default(master_seed=5)
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg
    bare = ExperimentConfig.from_dict({"master_seed": 5})
    assert bare == cfg
    with pytest.raises(InvalidSpecError):
        ExperimentConfig.from_dict({"repairs": []})


def test_benchmark_report_layout(benchmark_run):
    out = benchmark_run.out
    for name in ("table1", "table2_dir", "table3_eo", "table4_sp"):
        assert (out / f"{name}.json").is_file()
        assert (out / f"{name}.csv").is_file()
    for dataset in ("D1", "D2", "D3"):
        for tag in (
            "original",
            "dir_0.3",
            "dir_0.5",
            "dir_1.0",
            "reweighing",
            "fairbalance",
            "fairbalance_variant",
            "lfr",
        ):
            for gid in ("0", "1"):
                path = out / "hist" / dataset / tag / f"{gid}.json"
                assert path.is_file()
                hist = json.loads(path.read_text())
                assert len(hist["bin_edges"]) == len(hist["counts"]) + 1
    table1 = json.loads((out / "table1.json").read_text())
    assert table1["D1"]["groups"]["1"]["size"] == 10000
    assert table1["D2"]["groups"]["0"]["size"] == 9000


def test_benchmark_histograms_share_range_and_count_everything(benchmark_run):
    base = json.loads(
        (benchmark_run.out / "hist" / "D1" / "original" / "1.json").read_text()
    )
    other = json.loads(
        (benchmark_run.out / "hist" / "D1" / "dir_1.0" / "0.json").read_text()
    )
    assert base["bin_edges"] == other["bin_edges"]
    assert sum(base["counts"]) == 10000


def test_sweep_rows_structure(tmp_path):
    cfg = quick_config([RepairConfig.dir_level(1.0), RepairConfig.reweighing()])
    rows = run_tradeoff_sweep(cfg, tmp_path)
    assert [r.repair for r in rows] == ["none", "dir(1)", "reweigh"]
    for row in rows:
        assert row.error is None
        assert 0.0 <= row.accuracy_on_original_test <= 1.0
        assert 0.0 <= row.accuracy_on_transformed_test <= 1.0
        assert row.metrics_original.phi is not None
        assert row.distortion >= 0.0
    assert rows[0].distortion == 0.0
    payload = json.loads((tmp_path / "sweep.json").read_text())
    assert len(payload["rows"]) == 3
    assert payload["rows"][1]["repair"] == "dir(1)"


def test_sweep_is_deterministic(tmp_path):
    cfg = quick_config([RepairConfig.dir_level(0.5)])
    run_tradeoff_sweep(cfg, tmp_path / "a")
    run_tradeoff_sweep(cfg, tmp_path / "b")
    assert (tmp_path / "a" / "sweep.json").read_bytes() == (
        tmp_path / "b" / "sweep.json"
    ).read_bytes()


def test_sweep_isolates_failing_rows():
    # a diverging remover config flags its own row; the others still run
    diverging = RepairConfig.disparity_remover(
        LfrParams(k=2, steps=30, step_size=1e12)
    )
    cfg = quick_config([diverging, RepairConfig.dir_level(1.0)])
    rows = run_tradeoff_sweep(cfg)
    by_repair = {r.repair: r for r in rows}
    assert by_repair["lfr(k=2)"].error is not None
    assert "non-finite" in by_repair["lfr(k=2)"].error
    assert by_repair["dir(1)"].error is None
    assert by_repair["none"].error is None


def test_sweep_weighted_methods_keep_test_accuracy():
    # weight-only repairs leave the test records untouched, so the two
    # accuracy columns agree; the disparity remover rewrites test labels
    # into something the repaired-trained model finds easier
    cfg = quick_config(
        [
            RepairConfig.reweighing(),
            RepairConfig.balance(),
            RepairConfig.disparity_remover(LfrParams(steps=400)),
        ]
    )
    rows = {r.repair: r for r in run_tradeoff_sweep(cfg)}
    for tag in ("reweigh", "fairbalance"):
        assert rows[tag].accuracy_on_transformed_test == pytest.approx(
            rows[tag].accuracy_on_original_test
        )
    lfr_row = rows["lfr(k=5)"]
    assert lfr_row.error is None
    assert lfr_row.accuracy_on_transformed_test >= lfr_row.accuracy_on_original_test


def test_per_group_distortion_zero_on_identity():
    data = generate(small_imbalanced_spec(seed=9))
    assert per_group_distortion(data, data) == 0.0
