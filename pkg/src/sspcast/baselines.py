"""Comparison predictors: historical mean, polynomial depth fit, shallow MLP.

All three produce the same J-vector layered prediction as the LSTM bank, so
they feed the same evaluation and interpolation paths. The polynomial fits
speed against scaled depth on the window's time-mean profile; the MLP is a
per-layer sliding-window regressor sharing the bank's normalization rules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nn
from .errors import TrainingDivergenceError, ValidationError
from .hlstm import derive_seed
from .profiles import (
    DepthSchedule,
    LayeredSeries,
    WindowSpec,
    apply_norm,
    denorm,
    fit_norm,
    training_matrix,
)

MEAN_MODES = ("same_month", "all_months")


def mean_predict(
    series: LayeredSeries, w: WindowSpec, mode: str = "same_month"
) -> np.ndarray:
    """Per-layer historical average over the training window.

    same_month averages only the columns at the target's cycle phase (the
    same calendar month in each training year); all_months averages every
    window column.
    """
    if mode not in MEAN_MODES:
        raise ValidationError(f"unknown mean mode {mode!r}")
    t = training_matrix(series, w)
    if mode == "all_months":
        return t.mean(axis=1)
    cols = [w.n_train - i * w.cycle_length for i in range(1, w.n_cycles + 1)]
    return t[:, cols].mean(axis=1)


@dataclass(eq=False)
class PolyFit:
    """Least-squares polynomial in scaled depth u = z / depth_scale."""

    degree: int
    coeffs: np.ndarray  # a_0..a_n, ascending powers of u
    depth_scale: float

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.degree < 1:
            raise ValidationError("polynomial degree must be >= 1")
        if self.coeffs.shape != (self.degree + 1,):
            raise ValidationError(
                f"{self.coeffs.size} coefficients for degree {self.degree}"
            )
        if self.depth_scale <= 0:
            raise ValidationError("depth scale must be positive")


def poly_fit(profile_mean: np.ndarray, sched: DepthSchedule, degree: int) -> PolyFit:
    """Fit speed vs scaled depth at the schedule levels.

    Depths are mapped to [0, 1] before building the Vandermonde system;
    an unscaled fit at depths up to 1975 m is numerically hopeless beyond
    degree 3 or so. Solved by lstsq (orthogonal decomposition), which also
    survives rank deficiency.
    """
    profile_mean = np.asarray(profile_mean, dtype=float)
    if degree < 1:
        raise ValidationError("polynomial degree must be >= 1")
    if profile_mean.shape != (sched.n_levels,):
        raise ValidationError(
            f"profile has {profile_mean.shape} values for {sched.n_levels} levels"
        )
    if degree + 1 > sched.n_levels:
        raise ValidationError(
            f"degree {degree} needs {degree + 1} levels, schedule has {sched.n_levels}"
        )
    scale = sched.max_depth
    u = sched.levels / scale
    vand = np.vander(u, degree + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(vand, profile_mean, rcond=None)
    return PolyFit(degree, coeffs, scale)


def poly_eval(fit: PolyFit, depths: np.ndarray) -> np.ndarray:
    """Evaluate the fitted polynomial at depths in meters."""
    u = np.asarray(depths, dtype=float) / fit.depth_scale
    return np.vander(u, fit.degree + 1, increasing=True) @ fit.coeffs


def poly_predict(series: LayeredSeries, w: WindowSpec, degree: int = 8) -> np.ndarray:
    """Fit the window's time-mean profile and read it back at schedule depths."""
    t = training_matrix(series, w)
    fit = poly_fit(t.mean(axis=1), series.schedule, degree)
    return poly_eval(fit, series.schedule.levels)


@dataclass
class MlpHyperparams:
    """Sliding-window regressor knobs: L past months in, next month out."""

    window: int = 12
    hidden: int = 32
    lr: float = 0.01
    epochs: int = 300
    grad_clip: float = 5.0

    def __post_init__(self):
        if self.window < 1 or self.hidden < 1 or self.epochs < 1:
            raise ValidationError("window, hidden and epochs must be positive")
        if self.lr <= 0:
            raise ValidationError("learning rate must be positive")


@dataclass(eq=False)
class MlpParams:
    """Single hidden layer, tanh activation, linear scalar output."""

    W1: np.ndarray  # (H, L)
    b1: np.ndarray  # (H,)
    w2: np.ndarray  # (H,)
    b2: float

    def __post_init__(self):
        h, l = self.W1.shape
        if self.b1.shape != (h,) or self.w2.shape != (h,):
            raise ValidationError("mlp parameter shapes are inconsistent")
        for a in (self.W1, self.b1, self.w2):
            if not np.all(np.isfinite(a)):
                raise ValidationError("mlp parameters must be finite")

    @property
    def window(self) -> int:
        return self.W1.shape[1]

    @property
    def hidden(self) -> int:
        return self.W1.shape[0]


def _mlp_flatten(p: MlpParams) -> np.ndarray:
    return np.concatenate([p.W1.ravel(), p.b1, p.w2, [p.b2]])


def _mlp_unflatten(flat: np.ndarray, hidden: int, window: int) -> MlpParams:
    n1 = hidden * window
    w1 = flat[:n1].reshape(hidden, window)
    b1 = flat[n1 : n1 + hidden]
    w2 = flat[n1 + hidden : n1 + 2 * hidden]
    return MlpParams(w1, b1, w2, float(flat[-1]))


def _mlp_forward(p: MlpParams, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    hid = np.tanh(x @ p.W1.T + p.b1)
    return hid @ p.w2 + p.b2, hid


def _train_mlp_row(
    row: np.ndarray, hp: MlpHyperparams, seed: int, label: str
) -> float:
    """Train on all sliding windows of one normalized row; return the
    one-step forecast from the final L observed months."""
    m = row.size
    n_windows = m - hp.window
    x = np.stack([row[i : i + hp.window] for i in range(n_windows)])
    y = row[hp.window :]
    rng = np.random.default_rng(seed)
    s1 = 1.0 / np.sqrt(hp.window)
    s2 = 1.0 / np.sqrt(hp.hidden)
    params = MlpParams(
        rng.uniform(-s1, s1, (hp.hidden, hp.window)),
        np.zeros(hp.hidden),
        rng.uniform(-s2, s2, hp.hidden),
        0.0,
    )
    flat = _mlp_flatten(params)
    madam = np.zeros_like(flat)
    vadam = np.zeros_like(flat)
    for t in range(1, hp.epochs + 1):
        params = _mlp_unflatten(flat, hp.hidden, hp.window)
        preds, hid = _mlp_forward(params, x)
        err = preds - y
        loss = float(np.mean(err**2))
        if not np.isfinite(loss):
            raise TrainingDivergenceError(f"{label}: loss diverged at epoch {t}")
        dpred = 2.0 * err / n_windows
        dw2 = hid.T @ dpred
        db2 = dpred.sum()
        dhid = np.outer(dpred, params.w2) * (1.0 - hid**2)
        dw1 = dhid.T @ x
        db1 = dhid.sum(axis=0)
        grads = np.concatenate([dw1.ravel(), db1, dw2, [db2]])
        grads = nn.clip_global_norm(grads, hp.grad_clip)
        try:
            flat, madam, vadam = nn.adam_step(flat, grads, madam, vadam, hp.lr, t)
        except TrainingDivergenceError as e:
            raise TrainingDivergenceError(f"{label}: {e} at epoch {t}") from e
    params = _mlp_unflatten(flat, hp.hidden, hp.window)
    pred, _ = _mlp_forward(params, row[-hp.window :][None, :])
    return float(pred[0])


def mlp_train_predict(
    series: LayeredSeries,
    w: WindowSpec,
    hp: MlpHyperparams | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Per-layer MLP one-step forecast for the target month.

    Same normalization rules as the LSTM bank (per-row min-max fitted on the
    training window) and the same per-layer seed derivation, so comparisons
    differ only in the model.
    """
    if hp is None:
        hp = MlpHyperparams()
    t = training_matrix(series, w)
    if hp.window >= t.shape[1]:
        raise ValidationError(
            f"mlp window {hp.window} needs more than {t.shape[1]} training months"
        )
    norm = fit_norm(t)
    tnorm = apply_norm(t, norm)
    raw = np.array([
        _train_mlp_row(tnorm[j], hp, derive_seed(seed, j), f"mlp layer {j}")
        for j in range(tnorm.shape[0])
    ])
    return denorm(raw, norm)
