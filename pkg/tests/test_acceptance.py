"""Acceptance gate: one test and one printed PASS/FAIL line per criterion.

Criteria 1-10 are self-contained (seeded synthetic data, desk-scale model
sizes chosen so the whole module stays well under ten minutes). Criteria
11-13 need an externally supplied 2017-2021 monthly series CSV; point
SSPCAST_OBSERVED_DATA at one to enable them, otherwise they are skipped.
"""

import os

import numpy as np
import pytest

from sspcast import (
    DepthSchedule,
    Hyperparams,
    MlpHyperparams,
    WindowSpec,
    apply_norm,
    assemble_series,
    build_depth_schedule,
    denorm,
    experiment_compare,
    experiment_cycle_tracking,
    experiment_monthly,
    experiment_window_ablation,
    fit_norm,
    interpolate_full_depth,
    mean_predict,
    parse_month,
    predict_one_step,
    read_series_csv,
    rmse,
    rmse_full_depth,
    train_bank,
)
from sspcast.cli import main
from sspcast.nn import (
    LstmState,
    forward_sequence,
    grad_check,
    init_params,
    lstm_step,
)

from conftest import DESK_DEPTHS, desk_series, record_criterion

DATA_ENV = "SSPCAST_OBSERVED_DATA"

# Desk-scale training setup for the statistical criteria: small enough to
# keep 10-seed sweeps fast, big enough to clear the baselines comfortably.
ACC_HP = Hyperparams(hidden_size=16, epochs=200)


def report(n: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"criterion {n:02d} {status}  {name}"
    if detail:
        line += f" [{detail}]"
    print(line)
    record_criterion(line)
    assert ok, line


def skip(n: int, name: str, reason: str) -> None:
    line = f"criterion {n:02d} SKIP  {name} [{reason}]"
    print(line)
    record_criterion(line)
    pytest.skip(reason)


def _full_depth(series, pred, target):
    sched = series.schedule
    return rmse_full_depth(
        interpolate_full_depth(pred, sched, 1.0, month=target),
        interpolate_full_depth(series.column_for(target), sched, 1.0, month=target),
    )


def test_criterion_01_gradient_correctness():
    # Targets are drawn near the forward pass so the loss stays small; FD
    # rounding noise scales with the loss, and with O(1) losses it exceeds
    # the 1e-8 denominator floor on structurally tiny gradient entries,
    # which would measure float64 cancellation rather than the backward pass.
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(20):
        hidden = int(rng.integers(1, 9))
        length = int(rng.integers(2, 13))
        params, head = init_params(hidden, 1, seed=int(rng.integers(0, 2**31)))
        params.b_f[:] = rng.uniform(-1.0, 1.0, hidden)
        xs = rng.uniform(-1.0, 1.0, length)
        preds, _ = forward_sequence(params, head, xs)
        targets = preds + rng.uniform(-0.1, 0.1, length)
        errs = grad_check(params, head, xs, targets, eps=1e-5)
        worst = max(worst, max(errs.values()))
    report(
        1, "analytic BPTT gradients match central differences",
        worst < 1e-4, f"worst block rel err {worst:.3e}",
    )


def test_criterion_02_cell_state_conservation():
    rng = np.random.default_rng(2)
    params, _ = init_params(4, 1, seed=2)
    params.W_f[:] = 0.0
    params.W_i[:] = 0.0
    params.b_f[:] = 30.0   # forget gate saturated open
    params.b_i[:] = -30.0  # input gate saturated shut
    c0 = rng.uniform(-2.0, 2.0, 4)
    state = LstmState(np.zeros(4), c0.copy())
    drift = 0.0
    for _ in range(100):
        state, _ = lstm_step(params, state, rng.uniform(-1.0, 1.0, 1))
        drift = max(drift, float(np.max(np.abs(state.c - c0))))
    report(
        2, "saturated cell state drifts < 1e-8 over 100 steps",
        drift < 1e-8, f"max drift {drift:.3e}",
    )


def test_criterion_03_normalization_round_trip():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        rows = int(rng.integers(1, 12))
        cols = int(rng.integers(2, 30))
        t = rng.uniform(1400.0, 1600.0, (rows, cols))
        if rng.random() < 0.5:
            t[int(rng.integers(0, rows))] = rng.uniform(1400.0, 1600.0)
        norm = fit_norm(t)
        back = np.stack([denorm(apply_norm(t, norm)[:, i], norm)
                         for i in range(cols)], axis=1)
        worst = max(worst, float(np.max(np.abs(back - t))))
    report(
        3, "denorm-after-norm identity on 100 matrices with constant rows",
        worst < 1e-9, f"max abs err {worst:.3e}",
    )


def test_criterion_04_depth_schedule():
    sched = build_depth_schedule("paper58")
    ok = (
        sched.n_levels == 58
        and sched.levels[0] == 0.0
        and sched.levels[-1] == 1975.0
    )
    report(
        4, "standard schedule has 58 levels spanning 0-1975 m",
        ok, f"{sched.n_levels} levels, {sched.levels[0]:g}..{sched.levels[-1]:g} m",
    )


def test_criterion_05_rmse_path_consistency():
    sched = DepthSchedule(np.arange(0.0, 101.0, 10.0))
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(25):
        pred = rng.uniform(1400.0, 1600.0, sched.n_levels)
        truth = rng.uniform(1400.0, 1600.0, sched.n_levels)
        dense = rmse_full_depth(
            interpolate_full_depth(pred, sched, 10.0),
            interpolate_full_depth(truth, sched, 10.0),
            step=10.0,
        )
        worst = max(worst, abs(dense - rmse(pred, truth)))
    report(
        5, "layered RMSE equals full-depth RMSE on schedule-aligned grids",
        worst < 1e-9, f"max |diff| {worst:.3e}",
    )


def test_criterion_06_constancy_oracle():
    series = desk_series(amplitude=0.0, noise_sigma=0.0, trend=0.0, months=60)
    hp = Hyperparams(hidden_size=8, epochs=50)
    mlp_hp = MlpHyperparams(window=6, hidden=8, epochs=30)
    worst_name, worst = "", 0.0
    for target in range(series.end_month - 11, series.end_month + 1):
        rows = experiment_compare(
            series, target, hp=hp, mlp_hp=mlp_hp, seed=0, n_cycles=2
        )
        for name, score in rows:
            if score > worst:
                worst_name, worst = name, score
    report(
        6, "constant ocean: every method under 0.1 m/s for all 12 months",
        worst < 0.1, f"worst {worst_name} {worst:.4f} m/s",
    )


def test_criterion_07_periodicity_oracle():
    series = desk_series(noise_sigma=0.0, trend=0.0, months=60)
    tracks = experiment_cycle_tracking(
        series, [0, 1, 2], k=12, hp=ACC_HP, seed=0, n_cycles=4
    )
    worst = min(t.correlation for t in tracks)
    report(
        7, "sinusoidal ocean: 12-step rollout correlation > 0.95 per depth",
        worst > 0.95, f"min correlation {worst:.4f}",
    )


def test_criterion_08_ordering_oracle():
    wins = 0
    margins = []
    for seed in range(10):
        series = desk_series(seed=seed, months=60)
        target = series.end_month
        w = WindowSpec(12, 4, target)
        bank = train_bank(series, w, ACC_HP, seed)
        hl = _full_depth(series, predict_one_step(bank), target)
        mn = _full_depth(series, mean_predict(series, w, "same_month"), target)
        wins += hl < mn
        margins.append(mn - hl)
    report(
        8, "noisy ocean: model beats mean baseline for >= 9 of 10 seeds",
        wins >= 9, f"{wins}/10 wins, median margin {np.median(margins):.3f} m/s",
    )


def test_criterion_09_window_ablation_trend():
    wins = 0
    for seed in range(10):
        series = desk_series(seed=seed, months=60)
        target = series.start_month + 48
        rows = experiment_window_ablation(
            series, [target], [1, 4], hp=ACC_HP, seed=seed
        )
        by_n = {r.n_cycles: r.rmse for r in rows}
        wins += by_n[4] < by_n[1]
    report(
        9, "four training cycles beat one for >= 9 of 10 seeds",
        wins >= 9, f"{wins}/10 wins",
    )


def test_criterion_10_determinism(tmp_path):
    flags = ["--schedule", "0,500,1975", "--months", "30"]
    train_flags = ["--schedule", "0,500,1975", "--hidden-size", "4",
                   "--epochs", "5", "--n-cycles", "1"]
    runs = []
    for name in ("one", "two"):
        out = tmp_path / name
        src = out / "ocean.csv"
        assert main(["synth", "--out-file", str(src)] + flags) == 0
        assert main(["train", "--data", str(src), "--target", "2018-01",
                     "--out", str(out)] + train_flags) == 0
        assert main(["evaluate", "compare", "--target", "2019-06",
                     "--months", "30", "--mlp-window", "6", "--mlp-hidden", "4",
                     "--poly-degree", "2", "--out", str(out)] + train_flags) == 0
        runs.append(out)
    files = sorted(
        p.relative_to(runs[0]) for p in runs[0].rglob("*") if p.is_file()
    )
    mismatched = [
        str(rel) for rel in files
        if (runs[0] / rel).read_bytes() != (runs[1] / rel).read_bytes()
    ]
    report(
        10, "same config and seed reproduce checkpoints and reports bytewise",
        not mismatched,
        f"{len(files)} files compared, mismatches: {mismatched or 'none'}",
    )


def _supplied_series():
    path = os.environ.get(DATA_ENV, "")
    if not path:
        return None
    profiles = read_series_csv(path)
    return assemble_series(profiles, build_depth_schedule("paper58"), clamp=True)


def test_criterion_11_monthly_rmse_on_supplied_data():
    name = "supplied data: 2021 monthly RMSE mean <= 1.0, each <= 1.5"
    series = _supplied_series()
    if series is None:
        skip(11, name, f"{DATA_ENV} not set")
    res = experiment_monthly(series, 2021, hp=Hyperparams(), seed=0, workers=4)
    worst = max(r for _, r in res.rows)
    ok = res.mean_rmse <= 1.0 and worst <= 1.5
    report(11, name, ok, f"mean {res.mean_rmse:.4f}, worst month {worst:.4f}")


def test_criterion_12_method_ordering_on_supplied_data():
    name = "supplied data: 2021-10 ordering model < poly < mean < mlp"
    series = _supplied_series()
    if series is None:
        skip(12, name, f"{DATA_ENV} not set")
    rows = dict(experiment_compare(
        series, parse_month("2021-10"), hp=Hyperparams(), seed=0, workers=4
    ))
    ok = (
        rows["hlstm"] < rows["polynomial"] < rows["mean"] < rows["mlp"]
        and rows["hlstm"] <= 0.9
    )
    detail = ", ".join(f"{k} {v:.4f}" for k, v in rows.items())
    report(12, name, ok, detail)


def test_criterion_13_ablation_monotone_on_supplied_data():
    name = "supplied data: 2021-01 ablation non-increasing in n (0.1 slack)"
    series = _supplied_series()
    if series is None:
        skip(13, name, f"{DATA_ENV} not set")
    rows = experiment_window_ablation(
        series, [parse_month("2021-01")], [1, 2, 3, 4],
        hp=Hyperparams(), seed=0, workers=4,
    )
    vals = [r.rmse for r in rows]
    ok = all(b <= a + 0.1 for a, b in zip(vals, vals[1:]))
    report(13, name, ok, ", ".join(f"n={r.n_cycles}: {r.rmse:.4f}" for r in rows))
