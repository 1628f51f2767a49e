"""Depth-stratified LSTM forecasting of ocean sound speed profiles.

The water column is resampled onto a fixed depth schedule; each depth level
gets its own small LSTM trained on staggered one-step pairs of its monthly
history. Layered predictions are denormalized, stacked, and interpolated
back to a dense full-depth profile. Baselines (historical mean, polynomial
depth fit, shallow MLP) and a seeded synthetic-ocean evaluation harness
share the same data paths, so every comparison is like for like.
"""

from .baselines import (
    MlpHyperparams,
    MlpParams,
    PolyFit,
    mean_predict,
    mlp_train_predict,
    poly_eval,
    poly_fit,
    poly_predict,
)
from .errors import (
    ChronologyError,
    TrainingDivergenceError,
    ValidationError,
    WindowError,
)
from .evaluation import (
    RmseReport,
    SynthSpec,
    experiment_compare,
    experiment_cycle_tracking,
    experiment_monthly,
    experiment_window_ablation,
    pearson,
    rmse,
    rmse_full_depth,
    score_layered,
    synth_base_profile,
    synth_column,
    synth_generate,
)
from .hlstm import (
    Hyperparams,
    LayerModel,
    ModelBank,
    load_bank,
    make_staggered_pairs,
    predict_multi_step,
    predict_one_step,
    retrain_until_stable,
    save_bank,
    train_bank,
    train_layer,
)
from .profiles import (
    DEFAULT_SPEED_BAND,
    PAPER58_LEVELS,
    DepthSchedule,
    LayeredSeries,
    NormParams,
    Profile,
    WindowSpec,
    apply_norm,
    assemble_series,
    build_depth_schedule,
    denorm,
    fit_norm,
    interpolate_full_depth,
    layer_profile,
    split_train_validation,
    training_matrix,
)
from .seriesio import (
    format_month,
    parse_month,
    read_layered_csv,
    read_series_csv,
    write_layered_csv,
    write_series_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ChronologyError",
    "DEFAULT_SPEED_BAND",
    "DepthSchedule",
    "Hyperparams",
    "LayerModel",
    "LayeredSeries",
    "MlpHyperparams",
    "MlpParams",
    "ModelBank",
    "NormParams",
    "PAPER58_LEVELS",
    "PolyFit",
    "Profile",
    "RmseReport",
    "SynthSpec",
    "TrainingDivergenceError",
    "ValidationError",
    "WindowError",
    "WindowSpec",
    "apply_norm",
    "assemble_series",
    "build_depth_schedule",
    "denorm",
    "experiment_compare",
    "experiment_cycle_tracking",
    "experiment_monthly",
    "experiment_window_ablation",
    "fit_norm",
    "format_month",
    "interpolate_full_depth",
    "layer_profile",
    "load_bank",
    "make_staggered_pairs",
    "mean_predict",
    "mlp_train_predict",
    "parse_month",
    "pearson",
    "poly_eval",
    "poly_fit",
    "poly_predict",
    "predict_multi_step",
    "predict_one_step",
    "read_layered_csv",
    "read_series_csv",
    "retrain_until_stable",
    "rmse",
    "rmse_full_depth",
    "save_bank",
    "score_layered",
    "synth_base_profile",
    "synth_column",
    "split_train_validation",
    "synth_generate",
    "train_bank",
    "train_layer",
    "training_matrix",
    "write_layered_csv",
    "write_series_csv",
]
