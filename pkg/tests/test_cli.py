import os

import numpy as np
import pytest

from sspcast import Profile, read_layered_csv, read_series_csv, write_series_csv
from sspcast.cli import Config, build_parser, main

SCHED = ["--schedule", "0,500,1975"]
SMALL_SYNTH = SCHED + ["--months", "30"]
SMALL_TRAIN = SCHED + ["--hidden-size", "4", "--epochs", "5", "--n-cycles", "1"]
SMALL_EVAL = SMALL_TRAIN + ["--months", "30"]


def _cfg(argv):
    return Config(build_parser().parse_args(argv))


def test_config_precedence(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("epochs = 9\nhidden_size = 9\n# comment\n")
    cfg = _cfg(["train", "--config", str(f), "--epochs", "7"])
    assert cfg.int("epochs") == 7  # flag beats file
    assert cfg.int("hidden_size") == 9  # file beats default
    assert cfg.int("cycle_length") == 12  # built-in default


def test_config_rejects_unknown_keys(tmp_path, capsys):
    f = tmp_path / "run.cfg"
    f.write_text("epoches = 9\n")
    assert main(["synth", "--config", str(f), "--out", str(tmp_path)]) == 2
    assert "epoches" in capsys.readouterr().err


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SSPCAST_OUT", str(tmp_path / "envout"))
    assert main(["synth"] + SMALL_SYNTH) == 0
    assert (tmp_path / "envout" / "synth.csv").is_file()


def test_synth_deterministic_bytes(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for p in (a, b):
        assert main(["synth", "--out-file", str(p)] + SMALL_SYNTH) == 0
    assert a.read_bytes() == b.read_bytes()


def test_synth_ingest_round_trip(tmp_path, capsys):
    src = tmp_path / "ocean.csv"
    assert main(["synth", "--out-file", str(src)] + SMALL_SYNTH) == 0
    canon = tmp_path / "canon.csv"
    assert main(["ingest", str(src), "--canonical", str(canon),
                 "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "30 months, 2017-01..2019-06" in out
    assert "depth span 0..1975 m" in out
    assert canon.read_bytes() == src.read_bytes()


def test_ingest_rejects_month_gaps(tmp_path, capsys):
    z = np.array([0.0, 1975.0])
    profiles = [
        Profile(24204, z, np.array([1500.0, 1520.0]), speed_band=None),
        Profile(24206, z, np.array([1500.0, 1520.0]), speed_band=None),
    ]
    path = tmp_path / "gap.csv"
    write_series_csv(profiles, str(path))
    assert main(["ingest", str(path), "--out", str(tmp_path)]) == 2
    assert "gap between 2017-01 and 2017-03" in capsys.readouterr().err


def test_train_predict_round_trip(tmp_path, capsys):
    src = tmp_path / "ocean.csv"
    main(["synth", "--out-file", str(src)] + SMALL_SYNTH)
    out = tmp_path / "run"
    rc = main(["train", "--data", str(src), "--target", "2018-01",
               "--out", str(out)] + SMALL_TRAIN)
    assert rc == 0
    text = capsys.readouterr().out
    assert "layer 000 depth" in text
    ckpt = out / "bank_2018-01_0"
    assert f"checkpoint: {ckpt}" in text
    assert (ckpt / "manifest.txt").is_file()

    rc = main(["predict", "--checkpoint", str(ckpt), "--k", "2",
               "--out", str(out)])
    assert rc == 0
    for label in ("2018-01", "2018-02"):
        layered = out / f"predicted_{label}_layered.csv"
        depths, vals = read_layered_csv(str(layered))
        assert vals.shape == (3,) and np.all(np.isfinite(vals))
        assert list(depths) == [0.0, 500.0, 1975.0]
        [prof] = read_series_csv(str(out / f"predicted_{label}_profile.csv"))
        assert prof.n_samples == 1976


def test_train_rerun_byte_identical(tmp_path):
    src = tmp_path / "ocean.csv"
    main(["synth", "--out-file", str(src)] + SMALL_SYNTH)
    banks = []
    for name in ("one", "two"):
        out = tmp_path / name
        assert main(["train", "--data", str(src), "--target", "2018-01",
                     "--out", str(out)] + SMALL_TRAIN) == 0
        banks.append(out / "bank_2018-01_0")
    files = sorted(os.listdir(banks[0]))
    assert files == sorted(os.listdir(banks[1]))
    for name in files:
        assert (banks[0] / name).read_bytes() == (banks[1] / name).read_bytes()


def test_train_retrain_reports_rounds(tmp_path, capsys):
    src = tmp_path / "ocean.csv"
    main(["synth", "--out-file", str(src)] + SMALL_SYNTH)
    rc = main(["train", "--data", str(src), "--target", "2018-01",
               "--out", str(tmp_path / "rt"), "--retrain", "1",
               "--delta", "1.0"] + SMALL_TRAIN)
    assert rc == 0
    assert "retrain: 1 round(s), stable" in capsys.readouterr().out


def test_missing_inputs_exit_2(tmp_path, capsys):
    assert main(["train", "--target", "2018-01", "--out", str(tmp_path)]) == 2
    assert main(["predict", "--out", str(tmp_path)]) == 2
    assert main(["evaluate", "monthly", "--out", str(tmp_path)] + SMALL_EVAL) == 2
    missing = tmp_path / "nope.csv"
    assert main(["train", "--data", str(missing), "--target", "2018-01",
                 "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "--data" in err and "--checkpoint" in err and "--year" in err
    assert "nope.csv" in err


@pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
@pytest.mark.filterwarnings("ignore:invalid value:RuntimeWarning")
def test_divergence_exit_3(tmp_path, capsys):
    src = tmp_path / "ocean.csv"
    main(["synth", "--out-file", str(src)] + SMALL_SYNTH)
    rc = main(["train", "--data", str(src), "--target", "2018-01",
               "--out", str(tmp_path), "--optimizer", "sgd",
               "--lr", "1e200"] + SMALL_TRAIN)
    assert rc == 3
    assert "diverged" in capsys.readouterr().err


def test_evaluate_compare_on_builtin_synthetic(tmp_path, capsys):
    out = tmp_path / "ev"
    rc = main(["evaluate", "compare", "--target", "2019-06", "--out", str(out),
               "--mlp-window", "6", "--mlp-hidden", "4", "--poly-degree", "2",
               "--seed", "3"] + SMALL_EVAL)
    assert rc == 0
    text = capsys.readouterr().out
    for name in ("hlstm", "polynomial", "mean", "mlp"):
        assert f"{name}: rmse " in text
    csv_path = out / "compare_2019-06_3.csv"
    svg_path = out / "compare_2019-06_3.svg"
    assert f"reports: {csv_path} {svg_path}" in text
    assert csv_path.is_file() and svg_path.is_file()
    assert svg_path.read_text().startswith("<svg")


def test_evaluate_rerun_byte_identical(tmp_path):
    args = ["evaluate", "window_ablation", "--target", "2019-06",
            "--n-values", "1,2", "--seed", "1"] + SMALL_EVAL
    outs = []
    for name in ("one", "two"):
        out = tmp_path / name
        assert main(args + ["--out", str(out)]) == 0
        outs.append(out)
    for name in ("window_ablation_2019-06_1.csv", "window_ablation_2019-06_1.svg"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_evaluate_assert_failure_exit_4(tmp_path, capsys):
    rc = main(["evaluate", "cycle_tracking", "--assert", "--min-corr", "1.5",
               "--depth-indices", "0", "--k", "3", "--out", str(tmp_path)]
              + SMALL_EVAL)
    assert rc == 4
    captured = capsys.readouterr()
    assert "assertion failed:" in captured.err
    assert "reports:" in captured.out  # reports still written on failure
