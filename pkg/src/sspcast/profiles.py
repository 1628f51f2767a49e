"""Sound speed profiles, depth schedules, layering and window handling.

A profile is one month's sound speed as (depth, speed) samples. Profiles are
resampled onto a fixed depth schedule and stacked into a layered series: a
J x I matrix with one row per depth level and one column per month. All month
arithmetic uses an integer months-since-epoch index (year * 12 + month - 1);
calendar strings exist only at the I/O boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ChronologyError, ValidationError, WindowError

# The standard 58-level grid ("paper58"): every 5 m down to 10 m, every 10 m
# to 180 m, every 20 m to 460 m, every 50 m from 500 to 1250 m, every 100 m
# from 1300 to 1900 m, then a single 1975 m level.
PAPER58_LEVELS = np.array(
    [0.0, 5.0, 10.0]
    + [float(z) for z in range(20, 181, 10)]
    + [float(z) for z in range(200, 461, 20)]
    + [float(z) for z in range(500, 1251, 50)]
    + [float(z) for z in range(1300, 1901, 100)]
    + [1975.0]
)

# Sanity band for measured sound speeds, m/s. Values outside are rejected at
# ingestion; pass speed_band=None to skip the check (e.g. model output).
DEFAULT_SPEED_BAND = (1300.0, 1700.0)


@dataclass(eq=False)
class Profile:
    """One month's sound speed samples, ordered by strictly increasing depth."""

    month: int
    depths: np.ndarray
    speeds: np.ndarray
    speed_band: tuple[float, float] | None = DEFAULT_SPEED_BAND

    def __post_init__(self):
        self.depths = np.asarray(self.depths, dtype=float)
        self.speeds = np.asarray(self.speeds, dtype=float)
        if self.depths.ndim != 1 or self.speeds.ndim != 1:
            raise ValidationError("profile depths and speeds must be 1-D")
        if self.depths.size != self.speeds.size:
            raise ValidationError(
                f"profile has {self.depths.size} depths but {self.speeds.size} speeds"
            )
        if self.depths.size < 2:
            raise ValidationError("profile needs at least 2 samples")
        if self.depths[0] < 0:
            raise ValidationError(f"negative depth {self.depths[0]} in profile")
        if np.any(np.diff(self.depths) <= 0):
            raise ValidationError("profile depths must be strictly increasing")
        if not np.all(np.isfinite(self.speeds)):
            raise ValidationError("profile speeds must be finite")
        if self.speed_band is not None:
            lo, hi = self.speed_band
            if np.any(self.speeds < lo) or np.any(self.speeds > hi):
                bad = self.speeds[(self.speeds < lo) | (self.speeds > hi)][0]
                raise ValidationError(
                    f"speed {bad} m/s outside sanity band [{lo}, {hi}]"
                )

    @property
    def n_samples(self) -> int:
        return self.depths.size


@dataclass(eq=False)
class DepthSchedule:
    """Fixed grid of depth levels; strictly increasing, starting at 0 m."""

    levels: np.ndarray

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=float)
        if self.levels.ndim != 1 or self.levels.size < 1:
            raise ValidationError("schedule must be a non-empty 1-D list of depths")
        if self.levels[0] != 0.0:
            raise ValidationError("schedule must start at 0 m")
        if np.any(np.diff(self.levels) <= 0):
            raise ValidationError("schedule depths must be strictly increasing")

    @property
    def n_levels(self) -> int:
        return self.levels.size

    @property
    def max_depth(self) -> float:
        return float(self.levels[-1])


def build_depth_schedule(spec) -> DepthSchedule:
    """Build a schedule from the name "paper58" or an explicit depth list."""
    if isinstance(spec, str):
        if spec == "paper58":
            return DepthSchedule(PAPER58_LEVELS.copy())
        raise ValidationError(f"unknown schedule name {spec!r}")
    return DepthSchedule(np.asarray(list(spec), dtype=float))


@dataclass(eq=False)
class LayeredSeries:
    """J x I matrix of speeds: one row per schedule level, one column per month."""

    schedule: DepthSchedule
    start_month: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValidationError("layered series values must be a 2-D matrix")
        if self.values.shape[0] != self.schedule.n_levels:
            raise ValidationError(
                f"series has {self.values.shape[0]} rows for a "
                f"{self.schedule.n_levels}-level schedule"
            )
        if self.values.shape[1] < 1:
            raise ValidationError("layered series needs at least one month")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("layered series entries must be finite")

    @property
    def n_months(self) -> int:
        return self.values.shape[1]

    @property
    def end_month(self) -> int:
        return self.start_month + self.n_months - 1

    def column_for(self, month: int) -> np.ndarray:
        if not self.start_month <= month <= self.end_month:
            raise WindowError(
                f"month {month} outside series span "
                f"[{self.start_month}, {self.end_month}]"
            )
        return self.values[:, month - self.start_month]


@dataclass
class WindowSpec:
    """Training window of n_cycles * cycle_length months before target_month."""

    cycle_length: int
    n_cycles: int
    target_month: int

    def __post_init__(self):
        if self.cycle_length < 1:
            raise ValidationError("cycle_length must be >= 1")
        if self.n_cycles < 1:
            raise ValidationError("n_cycles must be >= 1")

    @property
    def n_train(self) -> int:
        return self.cycle_length * self.n_cycles

    @property
    def first_train_month(self) -> int:
        return self.target_month - self.n_train


def layer_profile(p: Profile, sched: DepthSchedule, clamp: bool = False) -> np.ndarray:
    """Resample a profile onto schedule levels by linear interpolation.

    Exact sample depths pass through unchanged. Levels outside the profile's
    measured span raise unless clamp=True, which holds the endpoint value.
    """
    levels = sched.levels
    if not clamp:
        if levels[0] < p.depths[0] or levels[-1] > p.depths[-1]:
            raise ValidationError(
                f"schedule spans [{levels[0]}, {levels[-1]}] m but profile for "
                f"month {p.month} covers [{p.depths[0]}, {p.depths[-1]}] m "
                "(pass clamp=True to extend endpoints)"
            )
    return np.interp(levels, p.depths, p.speeds)


def assemble_series(
    profiles, sched: DepthSchedule, clamp: bool = False
) -> LayeredSeries:
    """Stack consecutive monthly profiles into a layered series matrix."""
    profiles = list(profiles)
    if not profiles:
        raise ValidationError("no profiles to assemble")
    months = [p.month for p in profiles]
    for prev, cur in zip(months, months[1:]):
        if cur == prev:
            raise ChronologyError(f"duplicate month {cur}")
        if cur != prev + 1:
            raise ChronologyError(f"gap between month {prev} and month {cur}")
    columns = []
    for p in profiles:
        try:
            columns.append(layer_profile(p, sched, clamp=clamp))
        except ValidationError as e:
            raise ValidationError(f"month {p.month}: {e}") from e
    return LayeredSeries(sched, months[0], np.column_stack(columns))


def _check_window_span(s: LayeredSeries, first: int, last: int) -> None:
    if first < s.start_month or last > s.end_month:
        missing = []
        if first < s.start_month:
            missing.append(f"{first}..{s.start_month - 1}")
        if last > s.end_month:
            missing.append(f"{s.end_month + 1}..{last}")
        raise WindowError(
            f"window needs months {first}..{last} but series covers "
            f"{s.start_month}..{s.end_month} (missing {', '.join(missing)})"
        )


def training_matrix(s: LayeredSeries, w: WindowSpec) -> np.ndarray:
    """The J x nC training columns immediately before the target month.

    Does not require the target month itself to be observed, so it also
    serves pure forecasting (predicting a month that has not happened yet).
    """
    first = w.first_train_month
    _check_window_span(s, first, w.target_month - 1)
    i0 = first - s.start_month
    return s.values[:, i0 : i0 + w.n_train].copy()


def split_train_validation(
    s: LayeredSeries, w: WindowSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Return (T, V): the nC training columns before target and the target column."""
    _check_window_span(s, w.first_train_month, w.target_month)
    t = training_matrix(s, w)
    v = s.values[:, w.target_month - s.start_month].copy()
    return t, v


@dataclass(eq=False)
class NormParams:
    """Per-row min/max fitted on a training matrix."""

    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        self.mins = np.asarray(self.mins, dtype=float)
        self.maxs = np.asarray(self.maxs, dtype=float)
        if self.mins.shape != self.maxs.shape or self.mins.ndim != 1:
            raise ValidationError("norm params must be matching 1-D min/max vectors")
        if np.any(self.maxs < self.mins):
            raise ValidationError("norm max < min")

    @property
    def n_rows(self) -> int:
        return self.mins.size


def fit_norm(t: np.ndarray) -> NormParams:
    """Fit per-row min/max on the training matrix only, never on validation."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 2 or t.size == 0:
        raise ValidationError("cannot fit normalization on an empty matrix")
    return NormParams(t.min(axis=1), t.max(axis=1))


def apply_norm(x: np.ndarray, p: NormParams) -> np.ndarray:
    """Map each row into [0, 1]; constant rows (max == min) map to 0.5."""
    x = np.asarray(x, dtype=float)
    vec = x.ndim == 1
    if vec:
        x = x[:, None]
    if x.shape[0] != p.n_rows:
        raise ValidationError(f"{x.shape[0]} rows vs {p.n_rows} norm rows")
    span = p.maxs - p.mins
    constant = span == 0
    safe = np.where(constant, 1.0, span)
    out = (x - p.mins[:, None]) / safe[:, None]
    out[constant, :] = 0.5
    return out[:, 0] if vec else out


def denorm(values: np.ndarray, p: NormParams) -> np.ndarray:
    """Inverse of apply_norm, row-wise; constant rows return their min."""
    v = np.asarray(values, dtype=float)
    vec = v.ndim == 1
    if vec:
        v = v[:, None]
    if v.shape[0] != p.n_rows:
        raise ValidationError(f"{v.shape[0]} rows vs {p.n_rows} norm rows")
    span = p.maxs - p.mins
    out = v * span[:, None] + p.mins[:, None]
    out[span == 0, :] = p.mins[span == 0, None]
    return out[:, 0] if vec else out


def interpolate_full_depth(
    layered: np.ndarray,
    sched: DepthSchedule,
    step: float = 1.0,
    month: int = 0,
) -> Profile:
    """Expand a layered vector to a dense profile at 0, step, 2*step, ... m.

    Linear between schedule levels; the grid ends at the last multiple of
    step that does not exceed the deepest level.
    """
    layered = np.asarray(layered, dtype=float)
    if layered.shape != (sched.n_levels,):
        raise ValidationError(
            f"layered vector has shape {layered.shape}, expected ({sched.n_levels},)"
        )
    if step <= 0:
        raise ValidationError("interpolation step must be > 0")
    n = int(np.floor(sched.max_depth / step + 1e-9))
    grid = np.arange(n + 1) * step
    speeds = np.interp(grid, sched.levels, layered)
    return Profile(month, grid, speeds, speed_band=None)
