"""Metrics, synthetic ocean generator, and the experiment protocols.

Experiments score predictions on the full-depth grid: layered vectors are
interpolated to a dense 0..max-depth profile (1 m default) before RMSE, so
methods with different layer counts stay comparable. The synthetic ocean
replaces gridded observational data for self-contained runs: a four-segment
depth structure (mixed layer, seasonal and main thermoclines, deep positive
gradient), cyclical seasonality decaying with depth, an optional depth-
decaying linear trend, and seeded Gaussian noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import baselines
from .errors import ValidationError
from .hlstm import Hyperparams, predict_multi_step, predict_one_step, train_bank
from .nn import sigmoid
from .profiles import (
    PAPER58_LEVELS,
    DepthSchedule,
    LayeredSeries,
    Profile,
    WindowSpec,
    interpolate_full_depth,
)

COMPARE_METHODS = ("hlstm", "polynomial", "mean", "mlp")


def rmse(pred: np.ndarray, truth: np.ndarray) -> float:
    """Root mean squared elementwise difference of two equal-length vectors."""
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValidationError(f"rmse shapes differ: {pred.shape} vs {truth.shape}")
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


def rmse_full_depth(pred: Profile, truth: Profile, step: float = 1.0) -> float:
    """RMSE over the dense common grid spanned by both profiles."""
    if step <= 0:
        raise ValidationError("grid step must be > 0")
    if pred.depths[0] != truth.depths[0] or pred.depths[-1] != truth.depths[-1]:
        raise ValidationError(
            f"profile spans differ: [{pred.depths[0]}, {pred.depths[-1]}] vs "
            f"[{truth.depths[0]}, {truth.depths[-1]}]"
        )
    span = truth.depths[-1] - truth.depths[0]
    n = int(np.floor(span / step + 1e-9))
    grid = truth.depths[0] + np.arange(n + 1) * step
    return rmse(
        np.interp(grid, pred.depths, pred.speeds),
        np.interp(grid, truth.depths, truth.speeds),
    )


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation; nan when either trace is constant."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ValidationError("correlation needs two equal-length traces")
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt((da @ da) * (db @ db))
    if denom == 0:
        return float("nan")
    return float((da @ db) / denom)


@dataclass(eq=False)
class RmseReport:
    """One scored prediction: aggregate plus per-depth absolute errors."""

    method: str
    target_month: int
    window: str
    aggregate_rmse: float
    per_depth_abs_err: list[tuple[float, float]]  # (depth m, |err| m/s)

    def __post_init__(self):
        if self.aggregate_rmse < 0:
            raise ValidationError("rmse cannot be negative")


def score_layered(
    method: str,
    pred: np.ndarray,
    truth: np.ndarray,
    sched: DepthSchedule,
    target_month: int,
    window: str = "",
    step: float = 1.0,
) -> RmseReport:
    """Full-depth-score a layered prediction against a layered truth column."""
    pred_prof = interpolate_full_depth(pred, sched, step, month=target_month)
    truth_prof = interpolate_full_depth(truth, sched, step, month=target_month)
    agg = rmse_full_depth(pred_prof, truth_prof, step)
    per_depth = [
        (float(z), float(abs(p - t))) for z, p, t in zip(sched.levels, pred, truth)
    ]
    return RmseReport(method, target_month, window, agg, per_depth)


@dataclass(eq=False)
class SynthSpec:
    """Parameter family for the synthetic monthly ocean."""

    seed: int = 0
    months: int = 60
    start_month: int = 2017 * 12  # 2017-01
    depths: np.ndarray | None = None  # defaults to the 58-level grid
    cycle: int = 12
    surface_speed: float = 1542.0
    seasonal_therm_depth: float = 150.0
    seasonal_therm_drop: float = 30.0
    seasonal_therm_width: float = 80.0
    main_therm_depth: float = 600.0
    main_therm_drop: float = 22.0
    main_therm_width: float = 250.0
    deep_gradient: float = 0.0165  # m/s per m, pressure effect
    amplitude: float = 3.0  # surface seasonal swing, m/s
    amp_decay: float = 120.0  # e-folding depth of seasonality, m
    peak_phase: int = 8  # cycle index of the seasonal maximum
    noise_sigma: float = 0.2
    trend: float = 0.6  # m/s per year at the surface
    trend_decay: float = 300.0  # e-folding depth of the trend, m

    def __post_init__(self):
        if self.depths is None:
            self.depths = PAPER58_LEVELS.copy()
        self.depths = np.asarray(self.depths, dtype=float)
        DepthSchedule(self.depths)  # validates ordering and the 0 m start
        if self.months < 13:
            raise ValidationError("synthetic series needs months >= 13")
        if self.cycle < 2:
            raise ValidationError("cycle length must be >= 2")
        if self.noise_sigma < 0:
            raise ValidationError("noise sigma must be >= 0")
        if self.amplitude < 0:
            raise ValidationError("seasonal amplitude must be >= 0")
        for w in (self.seasonal_therm_width, self.main_therm_width,
                  self.amp_decay, self.trend_decay):
            if w <= 0:
                raise ValidationError("widths and decay scales must be positive")


def synth_base_profile(spec: SynthSpec) -> np.ndarray:
    """Time-mean vertical structure: two logistic declines plus a deep rise."""
    z = spec.depths
    return (
        spec.surface_speed
        - spec.seasonal_therm_drop
        * sigmoid((z - spec.seasonal_therm_depth) / spec.seasonal_therm_width)
        - spec.main_therm_drop
        * sigmoid((z - spec.main_therm_depth) / spec.main_therm_width)
        + spec.deep_gradient * z
    )


def synth_column(spec: SynthSpec, month: int) -> np.ndarray:
    """Noise-free column for one absolute month index."""
    z = spec.depths
    season = np.cos(2.0 * np.pi * ((month - spec.peak_phase) % spec.cycle) / spec.cycle)
    years = (month - spec.start_month) / 12.0
    return (
        synth_base_profile(spec)
        + spec.amplitude * np.exp(-z / spec.amp_decay) * season
        + spec.trend * years * np.exp(-z / spec.trend_decay)
    )


def synth_generate(spec: SynthSpec) -> list[Profile]:
    """Monthly profiles, deterministic per seed; returns spec.months profiles."""
    rng = np.random.default_rng(spec.seed)
    eps = rng.standard_normal((spec.months, spec.depths.size))
    out = []
    for i in range(spec.months):
        m = spec.start_month + i
        speeds = synth_column(spec, m) + spec.noise_sigma * eps[i]
        out.append(Profile(m, spec.depths.copy(), speeds, speed_band=None))
    return out


@dataclass(eq=False)
class AblationRow:
    n_cycles: int
    rmse: float


@dataclass(eq=False)
class MonthlyResult:
    protocol: str
    rows: list[tuple[int, float]]  # (target month, rmse)
    mean_rmse: float


@dataclass(eq=False)
class TrackRow:
    depth_index: int
    depth_m: float
    truth: np.ndarray
    pred: np.ndarray
    correlation: float


def _full_depth_score(series, pred, target, step):
    truth = series.column_for(target)
    sched = series.schedule
    return rmse_full_depth(
        interpolate_full_depth(pred, sched, step, month=target),
        interpolate_full_depth(truth, sched, step, month=target),
        step,
    )


def experiment_window_ablation(
    series: LayeredSeries,
    targets,
    n_values,
    hp: Hyperparams | None = None,
    seed: int = 0,
    cycle: int = 12,
    step: float = 1.0,
    workers: int = 1,
) -> list[AblationRow]:
    """Train with n cycles of history for each n; report mean RMSE over targets."""
    targets = list(targets)
    n_values = list(n_values)
    if not targets or not n_values:
        raise ValidationError("need at least one target month and one n value")
    if any(n < 1 for n in n_values):
        raise ValidationError("cycle counts must be >= 1")
    if hp is None:
        hp = Hyperparams()
    rows = []
    for n in n_values:
        scores = []
        for target in targets:
            w = WindowSpec(cycle, n, target)
            bank = train_bank(series, w, hp, seed, workers=workers)
            scores.append(_full_depth_score(series, predict_one_step(bank), target, step))
        rows.append(AblationRow(n, float(np.mean(scores))))
    return rows


def experiment_monthly(
    series: LayeredSeries,
    year: int,
    hp: Hyperparams | None = None,
    seed: int = 0,
    n_cycles: int = 4,
    cycle: int = 12,
    protocol: str = "rolling",
    step: float = 1.0,
    workers: int = 1,
) -> MonthlyResult:
    """Score all 12 months of a calendar year.

    rolling retrains on the preceding n_cycles window for every month;
    fixed trains once before January and rolls the same bank 12 steps out.
    """
    if protocol not in ("rolling", "fixed"):
        raise ValidationError(f"unknown protocol {protocol!r}")
    if hp is None:
        hp = Hyperparams()
    targets = [year * 12 + k for k in range(12)]
    rows = []
    if protocol == "rolling":
        for target in targets:
            w = WindowSpec(cycle, n_cycles, target)
            bank = train_bank(series, w, hp, seed, workers=workers)
            rows.append((target, _full_depth_score(series, predict_one_step(bank), target, step)))
    else:
        w = WindowSpec(cycle, n_cycles, targets[0])
        bank = train_bank(series, w, hp, seed, workers=workers)
        preds = predict_multi_step(bank, k=12)
        for k, target in enumerate(targets):
            rows.append((target, _full_depth_score(series, preds[:, k], target, step)))
    return MonthlyResult(protocol, rows, float(np.mean([r for _, r in rows])))


def experiment_compare(
    series: LayeredSeries,
    target_month: int,
    hp: Hyperparams | None = None,
    mlp_hp: baselines.MlpHyperparams | None = None,
    poly_degree: int = 8,
    poly_cycles: int = 2,
    mean_mode: str = "same_month",
    seed: int = 0,
    n_cycles: int = 4,
    cycle: int = 12,
    step: float = 1.0,
    workers: int = 1,
) -> list[tuple[str, float]]:
    """All four methods on identical truth; polynomial uses its own shorter
    window per protocol. Rows in fixed order: hlstm, polynomial, mean, mlp."""
    if hp is None:
        hp = Hyperparams()
    w = WindowSpec(cycle, n_cycles, target_month)
    w_poly = WindowSpec(cycle, poly_cycles, target_month)
    bank = train_bank(series, w, hp, seed, workers=workers)
    preds = {
        "hlstm": predict_one_step(bank),
        "polynomial": baselines.poly_predict(series, w_poly, poly_degree),
        "mean": baselines.mean_predict(series, w, mean_mode),
        "mlp": baselines.mlp_train_predict(series, w, mlp_hp, seed),
    }
    return [
        (name, _full_depth_score(series, preds[name], target_month, step))
        for name in COMPARE_METHODS
    ]


def experiment_cycle_tracking(
    series: LayeredSeries,
    depth_indices,
    k: int = 12,
    hp: Hyperparams | None = None,
    seed: int = 0,
    n_cycles: int = 4,
    cycle: int = 12,
    workers: int = 1,
) -> list[TrackRow]:
    """Multi-step rollout over the last k observed months, traced per depth."""
    depth_indices = list(depth_indices)
    if k < 1:
        raise ValidationError("rollout length k must be >= 1")
    if not depth_indices:
        raise ValidationError("need at least one depth index to track")
    j_max = series.schedule.n_levels - 1
    for j in depth_indices:
        if not 0 <= j <= j_max:
            raise ValidationError(f"depth index {j} outside 0..{j_max}")
    if hp is None:
        hp = Hyperparams()
    target = series.end_month - k + 1
    w = WindowSpec(cycle, n_cycles, target)
    bank = train_bank(series, w, hp, seed, workers=workers)
    preds = predict_multi_step(bank, k=k)
    truth = series.values[:, series.n_months - k :]
    return [
        TrackRow(
            j,
            float(series.schedule.levels[j]),
            truth[j].copy(),
            preds[j].copy(),
            pearson(truth[j], preds[j]),
        )
        for j in depth_indices
    ]
