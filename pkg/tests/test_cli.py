import json
import subprocess
import sys

import pytest

from fairlab import read_csv, write_csv, write_spec
from fairlab.cli import main
from fairlab.datasets import DatasetSpec, GroupSpec


@pytest.fixture
def hand_csv(tmp_path, hand_dataset):
    path = tmp_path / "S.csv"
    write_csv(hand_dataset, path)
    return path


def test_metrics_command_prints_report(hand_csv, capsys):
    assert main(["metrics", "--in", str(hand_csv)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["group_skew"] == pytest.approx(6.0)
    assert report["spd"] == pytest.approx(-1 / 3)
    assert report["di"] == pytest.approx(0.5)
    assert report["phi"] == pytest.approx(1 / 3)
    assert report["eo_gap"] is None


def test_repair_identity_roundtrip(hand_csv, tmp_path):
    out = tmp_path / "T.csv"
    code = main(
        [
            "repair",
            "--in",
            str(hand_csv),
            "--config",
            '{"method":"dir","lambda":0.0}',
            "--out",
            str(out),
        ]
    )
    assert code == 0
    assert out.read_bytes() == hand_csv.read_bytes()


def test_repair_with_resampling_materializes_weights(hand_csv, tmp_path):
    out = tmp_path / "R.csv"
    code = main(
        [
            "repair",
            "--in",
            str(hand_csv),
            "--config",
            '{"method":"reweigh"}',
            "--out",
            str(out),
            "--resample-seed",
            "3",
        ]
    )
    assert code == 0
    data = read_csv(out)
    assert set(data.w) == {1.0}


def test_repair_config_from_file(hand_csv, tmp_path):
    cfg_path = tmp_path / "repair.json"
    cfg_path.write_text('{"method": "fairbalance", "variant": true}\n')
    out = tmp_path / "F.csv"
    assert main(["repair", "--in", str(hand_csv), "--config", str(cfg_path), "--out", str(out)]) == 0
    assert sorted(set(read_csv(out).w)) == [0.5, 1.0]


def test_gen_roundtrip_and_determinism(tmp_path, capsys):
    spec = DatasetSpec(
        "tiny",
        (GroupSpec(1, 50, 5.5, 0.6, 0.7), GroupSpec(0, 50, 6.0, 0.4, 0.5)),
        seed=4,
    )
    spec_path = tmp_path / "spec.json"
    write_spec(spec, spec_path)
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["gen", "--spec", str(spec_path), "--out", str(out_a)]) == 0
    assert main(["gen", "--spec", str(spec_path), "--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    assert len(read_csv(out_a)) == 100


def test_gen_missing_spec_fails_with_diagnostic(tmp_path, capsys):
    code = main(["gen", "--spec", str(tmp_path / "missing.json"), "--out", str(tmp_path / "x.csv")])
    assert code != 0
    assert "missing.json" in capsys.readouterr().err


def test_hist_command(hand_csv, capsys):
    assert main(["hist", "--in", str(hand_csv), "--bins", "3", "--range", "1,7"]) == 0
    hists = json.loads(capsys.readouterr().out)
    assert [h["group_id"] for h in hists] == [0, 1]
    assert all(sum(h["counts"]) == 3 for h in hists)


def test_hist_bad_range(hand_csv, capsys):
    assert main(["hist", "--in", str(hand_csv), "--bins", "3", "--range", "oops"]) != 0
    assert "lo,hi" in capsys.readouterr().err


def test_sweep_command(tmp_path, capsys):
    config = {
        "datasets": [
            {
                "name": "tiny",
                "seed": 5,
                "groups": [
                    {"group_id": 1, "size": 400, "mean": 5.5, "std": 0.3, "p_favorable": 0.8},
                    {"group_id": 0, "size": 200, "mean": 6.0, "std": 0.6, "p_favorable": 0.2},
                ],
            }
        ],
        "repairs": [{"method": "dir", "lambda": 1.0}],
        "master_seed": 6,
        "fit": {"steps": 300},
    }
    cfg_path = tmp_path / "experiment.json"
    cfg_path.write_text(json.dumps(config))
    assert main(["sweep", "--config", str(cfg_path), "--out", str(tmp_path / "rep")]) == 0
    payload = json.loads((tmp_path / "rep" / "sweep.json").read_text())
    assert [row["repair"] for row in payload["rows"]] == ["none", "dir(1)"]


def test_unknown_subcommand_usage_error(capsys):
    assert main(["frobnicate"]) == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_invalid_repair_config_is_reported(hand_csv, tmp_path, capsys):
    code = main(
        [
            "repair",
            "--in",
            str(hand_csv),
            "--config",
            '{"method":"dir","lambda":1.5}',
            "--out",
            str(tmp_path / "x.csv"),
        ]
    )
    assert code == 1
    assert "repair level" in capsys.readouterr().err


def test_console_entrypoint_subprocess(hand_csv):
    result = subprocess.run(
        [sys.executable, "-m", "fairlab.cli", "metrics", "--in", str(hand_csv)],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["di"] == pytest.approx(0.5)
