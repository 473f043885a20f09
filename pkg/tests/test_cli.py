"""Command line surface: exit codes, printed results and written files."""

import json
from pathlib import Path

import pandas as pd
import pytest

from src.cli import build_parser, main

ROOT = Path(__file__).resolve().parent.parent
EXAMPLES = ROOT / "data" / "examples"


def _write_json(path: Path, data: dict) -> Path:
    path.write_text(json.dumps(data))
    return path


def _series_csv(path: Path, k: float, b: float, centers=None) -> Path:
    centers = centers if centers is not None else [4.5 + i for i in range(12)]
    lines = ["center_freq_ghz,pl_db"] + [f"{f:.6f},{k * f + b:.6f}" for f in centers]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def concrete_manifest(tmp_path):
    config = _write_json(tmp_path / "synth.json", {"specimen": "Concrete Slab", "model": "Concrete Slab", "repeats": 2})
    out = tmp_path / "concrete"
    assert main(["synth", "--synth-config", str(config), "--out", str(out)]) == 0
    return out / "manifest.json"


# ----- fit -----

def test_fit_prints_rounded_parameters(tmp_path, capsys):
    series = _series_csv(tmp_path / "loss.csv", 0.95, 9.83)
    assert main(["fit", "--series", str(series), "--out", str(tmp_path / "model.json")]) == 0
    assert capsys.readouterr().out.strip() == "k=0.95 b=9.83"
    model = json.loads((tmp_path / "model.json").read_text())
    assert model["source"] == "fitted"
    assert model["slope_db_per_ghz"] == pytest.approx(0.95, abs=1e-6)


def test_fit_flat_series(tmp_path, capsys):
    series = _series_csv(tmp_path / "loss.csv", 0.0, 2.0)
    assert main(["fit", "--series", str(series), "--out", str(tmp_path / "model.json")]) == 0
    assert capsys.readouterr().out.strip() == "k=0.00 b=2.00"


def test_fit_single_point_fails(tmp_path, capsys):
    series = _series_csv(tmp_path / "loss.csv", 1.0, 1.0, centers=[10.0])
    assert main(["fit", "--series", str(series), "--out", str(tmp_path / "model.json")]) == 1
    assert "at least 2" in capsys.readouterr().err
    assert not (tmp_path / "model.json").exists()


def test_fit_writes_residuals(tmp_path):
    series = _series_csv(tmp_path / "loss.csv", 0.3, 2.3)
    residuals = tmp_path / "residuals.csv"
    main(["fit", "--series", str(series), "--out", str(tmp_path / "m.json"), "--residuals", str(residuals)])
    frame = pd.read_csv(residuals)
    assert list(frame.columns) == ["freq_ghz", "residual_db"]
    assert len(frame) == 12


# ----- compare -----

@pytest.mark.parametrize(
    "a,b,expected",
    [
        ("Concrete Slab", "TR 38.901 Concrete Model", "RMSE 27.75 dB"),
        ("Frost Glass", "TR 38.901 Glass Model", "RMSE 1.11 dB"),
        ("Frost Glass", "Frost Glass", "RMSE 0.00 dB"),
    ],
)
def test_compare_catalog_names(a, b, expected, capsys):
    assert main(["compare", a, b]) == 0
    assert capsys.readouterr().out.strip() == expected


def test_compare_writes_outputs(tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", "Concrete Slab", "TR 38.901 Concrete Model", "--out", str(out)]) == 0
    diff = pd.read_csv(out / "diff.csv")
    assert len(diff) == 12
    assert diff["diff_db"].iloc[-1] == pytest.approx(-42.445, abs=1e-6)
    assert json.loads((out / "summary.json").read_text())["rmse_db"] == pytest.approx(27.745, abs=1e-3)


def test_compare_with_model_file_and_grid(tmp_path, capsys):
    series = _series_csv(tmp_path / "loss.csv", 0.95, 9.83)
    model = tmp_path / "model.json"
    main(["fit", "--series", str(series), "--out", str(model)])
    capsys.readouterr()
    assert main(["compare", str(model), "TR 38.901 Concrete Model", "--grid", "4.5:1:15.5"]) == 0
    assert capsys.readouterr().out.strip() == "RMSE 27.75 dB"


def test_compare_unknown_name(capsys):
    assert main(["compare", "Brick Wall", "Frost Glass"]) == 1
    assert "unknown catalog model" in capsys.readouterr().err


def test_compare_bad_grid(capsys):
    assert main(["compare", "Frost Glass", "Frost Glass", "--grid", "1:2"]) == 1


# ----- synth / process -----

def test_synth_writes_full_manifest(tmp_path):
    out = tmp_path / "out"
    assert main(["synth", "--synth-config", str(EXAMPLES / "concrete_line.json"), "--out", str(out)]) == 0
    assert len(list((out / "sweeps").glob("*.csv"))) == 240
    assert (out / "manifest.json").is_file()


def test_synth_seed_rerun_is_identical(tmp_path):
    config = EXAMPLES / "wooden_board_1.json"
    for name in ("a", "b"):
        assert main(["synth", "--synth-config", str(config), "--out", str(tmp_path / name), "--seed", "5"]) == 0
    for path in sorted((tmp_path / "a" / "sweeps").glob("*.csv"))[:20]:
        assert path.read_bytes() == (tmp_path / "b" / "sweeps" / path.name).read_bytes()


def test_synth_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["synth", "--synth-config", str(EXAMPLES / "air_slab.json"), "--out", str(blocker / "sub")]) == 1


def test_process_concrete(concrete_manifest, tmp_path):
    out = tmp_path / "loss.csv"
    assert main(["process", "--manifest", str(concrete_manifest), "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["center_freq_ghz", "pl_db"]
    assert len(frame) == 12
    assert frame["pl_db"].iloc[0] == pytest.approx(0.95 * 4.5 + 9.83, abs=0.05)


def test_process_air_slab(tmp_path):
    assert main(["synth", "--synth-config", str(EXAMPLES / "air_slab.json"), "--out", str(tmp_path / "air")]) == 0
    out = tmp_path / "loss.csv"
    assert main(["process", "--manifest", str(tmp_path / "air" / "manifest.json"), "--out", str(out)]) == 0
    assert pd.read_csv(out)["pl_db"].abs().max() < 1e-6


def test_process_missing_segment(concrete_manifest, tmp_path, capsys):
    victim = sorted((concrete_manifest.parent / "sweeps").glob("*.csv"))[0]
    victim.unlink()
    assert main(["process", "--manifest", str(concrete_manifest), "--out", str(tmp_path / "loss.csv")]) == 1
    assert victim.name in capsys.readouterr().err


def test_process_with_hann_window(concrete_manifest, tmp_path):
    out = tmp_path / "loss.csv"
    assert main(["process", "--manifest", str(concrete_manifest), "--out", str(out), "--window", "hann"]) == 0
    assert pd.read_csv(out)["pl_db"].iloc[-1] == pytest.approx(0.95 * 15.5 + 9.83, abs=0.05)


def test_process_undetectable_names_center(concrete_manifest, tmp_path, capsys):
    code = main(["process", "--manifest", str(concrete_manifest), "--out", str(tmp_path / "l.csv"),
                 "--gate-threshold-db", "400"])
    assert code == 1
    assert "center 4.5 GHz" in capsys.readouterr().err


# ----- report -----

def test_report_outputs(concrete_manifest, tmp_path, capsys):
    out = tmp_path / "report"
    assert main(["report", "--manifest", str(concrete_manifest), "--out", str(out)]) == 0
    for name in ("summary.md", "loss.csv", "diff.csv", "model.json", "summary.json", "curves.csv"):
        assert (out / name).is_file(), name
    assert (out / "pipeline_logs" / "pipeline_summary.json").is_file()
    printed = capsys.readouterr().out
    assert "k=0.95 b=9.83" in printed
    assert "RMSE 27.75 dB" in printed
    summary = (out / "summary.md").read_text()
    assert "Concrete Slab" in summary and "TR 38.901 Concrete Model" in summary
    curves = pd.read_csv(out / "curves.csv")
    assert list(curves.columns) == ["freq_ghz", "measured_db", "fitted_db", "reference_db"]


def test_report_matches_process_then_fit(concrete_manifest, tmp_path):
    report = tmp_path / "report"
    main(["report", "--manifest", str(concrete_manifest), "--out", str(report)])
    main(["process", "--manifest", str(concrete_manifest), "--out", str(tmp_path / "loss.csv")])
    main(["fit", "--series", str(tmp_path / "loss.csv"), "--out", str(tmp_path / "model.json"),
          "--residuals", str(tmp_path / "residuals.csv"), "--name", "Concrete Slab", "--category", "concrete"])
    main(["compare", str(tmp_path / "model.json"), "TR 38.901 Concrete Model", "--out", str(tmp_path / "cmp")])
    for report_file, composed in [
        ("loss.csv", tmp_path / "loss.csv"),
        ("model.json", tmp_path / "model.json"),
        ("residuals.csv", tmp_path / "residuals.csv"),
        ("diff.csv", tmp_path / "cmp" / "diff.csv"),
        ("summary.json", tmp_path / "cmp" / "summary.json"),
    ]:
        assert (report / report_file).read_bytes() == composed.read_bytes(), report_file


def test_report_air_slab(tmp_path, capsys):
    main(["synth", "--synth-config", str(EXAMPLES / "air_slab.json"), "--out", str(tmp_path / "air")])
    capsys.readouterr()
    assert main(["report", "--manifest", str(tmp_path / "air" / "manifest.json"), "--out", str(tmp_path / "r")]) == 0
    model = json.loads((tmp_path / "r" / "model.json").read_text())
    assert model["slope_db_per_ghz"] == pytest.approx(0.0, abs=1e-6)
    assert model["intercept_db"] == pytest.approx(0.0, abs=1e-5)
    assert not (tmp_path / "r" / "diff.csv").exists()


def test_report_unknown_reference_names_stage(concrete_manifest, tmp_path, capsys):
    code = main(["report", "--manifest", str(concrete_manifest), "--out", str(tmp_path / "r"),
                 "--reference", "Brick Wall"])
    assert code == 1
    assert "compare stage failed" in capsys.readouterr().err


# ----- catalog / parser -----

def test_catalog_command(tmp_path, capsys):
    out = tmp_path / "catalog.md"
    assert main(["catalog", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "TR 38.901 Concrete Model" in printed
    assert "27.75" in printed
    assert out.read_text() == printed


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["fit", "--series", "x.csv", "--out", "m.json", "--bogus"])
    assert excinfo.value.code == 2


def test_missing_command_exits_2():
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


# ----- undecodable input / config plan -----

def test_fit_invalid_utf8_series(tmp_path, capsys):
    series = tmp_path / "loss.csv"
    series.write_bytes(b"center_freq_ghz,pl_db\n4.5,1.0\n5.5,\xff\xfe\n")
    assert main(["fit", "--series", str(series), "--out", str(tmp_path / "model.json")]) == 1
    err = capsys.readouterr().err
    assert "not UTF-8" in err and "loss.csv" in err


def test_fit_records_category(tmp_path):
    series = _series_csv(tmp_path / "loss.csv", 0.23, 1.75)
    main(["fit", "--series", str(series), "--out", str(tmp_path / "model.json"), "--category", "wood"])
    assert json.loads((tmp_path / "model.json").read_text())["category"] == "wood"


def test_synth_uses_config_plan(tmp_path):
    run_config = tmp_path / "run.yaml"
    run_config.write_text("plan:\n  start_ghz: 5.5\n  step_ghz: 2.0\n  stop_ghz: 7.5\n")
    out = tmp_path / "out"
    code = main(["--config", str(run_config), "synth", "--synth-config", str(EXAMPLES / "air_slab.json"),
                 "--out", str(out)])
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["plan"]["centers_ghz"] == [5.5, 7.5]
    assert len(list((out / "sweeps").glob("*.csv"))) == 2 * 2 * 2
