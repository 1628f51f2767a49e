import math

import numpy as np
import pytest

from sspcast import (
    DepthSchedule,
    Hyperparams,
    MlpHyperparams,
    Profile,
    SynthSpec,
    ValidationError,
    experiment_compare,
    experiment_cycle_tracking,
    experiment_monthly,
    experiment_window_ablation,
    interpolate_full_depth,
    pearson,
    rmse,
    rmse_full_depth,
    score_layered,
    synth_base_profile,
    synth_generate,
)

from conftest import DESK_DEPTHS, desk_series

TINY_HP = Hyperparams(hidden_size=6, epochs=10)
TINY_MLP = MlpHyperparams(window=6, hidden=6, epochs=10)


def test_rmse_examples():
    assert rmse([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert rmse([1.0, 1.0], [0.0, 0.0]) == 1.0
    assert rmse([3.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]) == 1.5
    with pytest.raises(ValidationError):
        rmse([1.0, 2.0], [1.0])


def test_rmse_shift_invariance():
    rng = np.random.default_rng(3)
    x = rng.uniform(1400, 1600, 40)
    assert rmse(x + 0.25, x) == pytest.approx(0.25, abs=1e-12)
    assert rmse(x, x + 0.25) == pytest.approx(0.25, abs=1e-12)


def test_rmse_full_depth_examples():
    z = np.array([0.0, 500.0, 1975.0])
    a = Profile(0, z, np.array([1500.0, 1490.0, 1520.0]), speed_band=None)
    same = Profile(0, z, a.speeds.copy(), speed_band=None)
    off = Profile(0, z, a.speeds + 0.5, speed_band=None)
    assert rmse_full_depth(a, same) == 0.0
    assert rmse_full_depth(a, off) == pytest.approx(0.5, abs=1e-12)
    short = Profile(0, z[:2], a.speeds[:2], speed_band=None)
    with pytest.raises(ValidationError):
        rmse_full_depth(a, short)
    with pytest.raises(ValidationError):
        rmse_full_depth(a, same, step=0.0)


def test_layered_rmse_matches_dense_grid_on_uniform_schedule():
    # With grid nodes identical to schedule levels the two scores coincide.
    sched = DepthSchedule(np.arange(0.0, 101.0, 10.0))
    rng = np.random.default_rng(44)
    for _ in range(25):
        pred = rng.uniform(1400, 1600, 11)
        truth = rng.uniform(1400, 1600, 11)
        dense = rmse_full_depth(
            interpolate_full_depth(pred, sched, 10.0),
            interpolate_full_depth(truth, sched, 10.0),
            step=10.0,
        )
        assert abs(dense - rmse(pred, truth)) < 1e-9


def test_pearson_reference_cases():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    assert pearson(x, 2 * x + 5) == pytest.approx(1.0)
    assert pearson(x, -x) == pytest.approx(-1.0)
    assert math.isnan(pearson(x, np.full(4, 7.0)))
    with pytest.raises(ValidationError):
        pearson(x, x[:2])


def test_score_layered_reports_per_depth():
    sched = DepthSchedule(np.array(DESK_DEPTHS))
    truth = 1500.0 + np.arange(10.0)
    pred = truth + 0.25
    rep = score_layered("mean", pred, truth, sched, 100, window="w")
    assert rep.method == "mean"
    assert rep.aggregate_rmse == pytest.approx(0.25, abs=1e-12)
    assert len(rep.per_depth_abs_err) == 10
    assert rep.per_depth_abs_err[3] == (200.0, pytest.approx(0.25))


def test_synth_validation():
    with pytest.raises(ValidationError):
        SynthSpec(months=12)
    with pytest.raises(ValidationError):
        SynthSpec(cycle=1)
    with pytest.raises(ValidationError):
        SynthSpec(noise_sigma=-0.1)
    with pytest.raises(ValidationError):
        SynthSpec(amp_decay=0.0)


def test_synth_deterministic_per_seed():
    a = synth_generate(SynthSpec(seed=9, months=15))
    b = synth_generate(SynthSpec(seed=9, months=15))
    c = synth_generate(SynthSpec(seed=10, months=15))
    assert all(np.array_equal(x.speeds, y.speeds) for x, y in zip(a, b))
    assert not np.array_equal(a[0].speeds, c[0].speeds)


def test_synth_constant_when_all_drivers_off():
    s = desk_series(amplitude=0.0, noise_sigma=0.0, trend=0.0, months=20)
    base = synth_base_profile(SynthSpec(depths=np.array(DESK_DEPTHS)))
    for i in range(s.n_months):
        assert np.array_equal(s.values[:, i], base)


def test_synth_periodic_without_trend_or_noise():
    s = desk_series(noise_sigma=0.0, trend=0.0, months=36)
    for i in range(24):
        assert np.array_equal(s.values[:, i], s.values[:, i + 12])


def test_synth_speeds_physically_plausible():
    for seed in range(5):
        profiles = synth_generate(SynthSpec(seed=seed))
        speeds = np.stack([p.speeds for p in profiles])
        assert speeds.min() > 1300.0 and speeds.max() < 1700.0
        assert np.all(np.isfinite(speeds))


def test_synth_seasonality_decays_with_depth():
    s = desk_series(noise_sigma=0.0, trend=0.0, months=24)
    swing = s.values[:, :12].max(axis=1) - s.values[:, :12].min(axis=1)
    assert swing[0] == pytest.approx(6.0, abs=0.2)
    assert np.all(np.diff(swing) <= 1e-12)
    assert swing[-1] < 0.01


def test_window_ablation_rows(make_series):
    s = make_series(months=40, noise_sigma=0.0)
    rows = experiment_window_ablation(
        s, [s.end_month], [1, 2], hp=TINY_HP, seed=0
    )
    assert [r.n_cycles for r in rows] == [1, 2]
    assert all(r.rmse >= 0 for r in rows)
    with pytest.raises(ValidationError):
        experiment_window_ablation(s, [], [1], hp=TINY_HP)
    with pytest.raises(ValidationError):
        experiment_window_ablation(s, [s.end_month], [0], hp=TINY_HP)


def test_monthly_rolling_and_fixed(make_series):
    s = make_series(months=60)
    res = experiment_monthly(s, 2021, hp=TINY_HP, seed=0, n_cycles=2)
    assert res.protocol == "rolling"
    assert [m for m, _ in res.rows] == [2021 * 12 + k for k in range(12)]
    assert res.mean_rmse == pytest.approx(np.mean([r for _, r in res.rows]))
    fixed = experiment_monthly(s, 2021, hp=TINY_HP, seed=0, n_cycles=2, protocol="fixed")
    assert len(fixed.rows) == 12
    with pytest.raises(ValidationError):
        experiment_monthly(s, 2021, hp=TINY_HP, protocol="walking")


def test_compare_row_order_and_reuse_of_truth(make_series):
    s = make_series(months=60)
    rows = experiment_compare(
        s, s.end_month, hp=TINY_HP, mlp_hp=TINY_MLP, seed=0, n_cycles=2
    )
    assert [name for name, _ in rows] == ["hlstm", "polynomial", "mean", "mlp"]
    assert all(v >= 0 for _, v in rows)


def test_compare_constant_ocean_all_methods_tight(make_series):
    s = make_series(amplitude=0.0, noise_sigma=0.0, trend=0.0, months=40)
    rows = experiment_compare(
        s, s.end_month, hp=Hyperparams(hidden_size=8, epochs=50),
        mlp_hp=TINY_MLP, seed=0, n_cycles=2,
    )
    for name, v in rows:
        assert v < 0.1, f"{name} rmse {v}"


def test_cycle_tracking_rows_and_errors(make_series):
    s = make_series(months=60, noise_sigma=0.0)
    rows = experiment_cycle_tracking(s, [0, 4], k=6, hp=TINY_HP, seed=0, n_cycles=2)
    assert [r.depth_index for r in rows] == [0, 4]
    assert rows[0].depth_m == 0.0 and rows[1].depth_m == 400.0
    assert rows[0].truth.shape == (6,) and rows[0].pred.shape == (6,)
    assert np.array_equal(rows[0].truth, s.values[0, -6:])
    with pytest.raises(ValidationError):
        experiment_cycle_tracking(s, [0], k=0, hp=TINY_HP)
    with pytest.raises(ValidationError):
        experiment_cycle_tracking(s, [10], hp=TINY_HP)
    with pytest.raises(ValidationError):
        experiment_cycle_tracking(s, [], hp=TINY_HP)


def test_cycle_tracking_follows_seasonal_cycle(make_series):
    s = make_series(months=60, noise_sigma=0.0, trend=0.0)
    rows = experiment_cycle_tracking(
        s, [0], k=12, hp=Hyperparams(hidden_size=16, epochs=200), seed=0
    )
    assert rows[0].correlation > 0.95
