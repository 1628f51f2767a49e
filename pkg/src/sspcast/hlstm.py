"""Per-depth-layer LSTM bank: staggered pairs, training, prediction, checkpoints.

Each schedule level gets its own independently trained cell plus dense head
(the "hierarchical" part is vertical stratification, not stacked recurrence).
Training pairs are teacher-forced one-step shifts of the normalized window;
prediction replays the whole observed window to warm the hidden state, then
rolls forward autoregressively.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import nn
from .errors import TrainingDivergenceError, ValidationError
from .kvtext import read_kv_file
from .profiles import (
    DepthSchedule,
    LayeredSeries,
    NormParams,
    WindowSpec,
    apply_norm,
    denorm,
    fit_norm,
    split_train_validation,
    training_matrix,
)

CHECKPOINT_VERSION = 1
MANIFEST_NAME = "manifest.txt"


def derive_seed(*parts: int) -> int:
    """Deterministic child seed from integer key parts (order matters)."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1, dtype=np.uint64)[0])


@dataclass
class Hyperparams:
    """Training knobs; per-layer overrides map depth-layer index to a value."""

    hidden_size: int = 128
    lr: float = 0.01
    epochs: int = 300
    stack_depth: int = 1
    optimizer: str = "adam"
    grad_clip: float = 5.0
    tol: float = 0.0  # early-stop when training MSE drops below; 0 disables
    lr_overrides: dict[int, float] = field(default_factory=dict)
    epoch_overrides: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.hidden_size < 1 or self.epochs < 1:
            raise ValidationError("hidden_size and epochs must be positive")
        if self.lr <= 0:
            raise ValidationError("learning rate must be positive")
        if self.stack_depth != 1:
            raise ValidationError("stacked recurrence is not supported; stack_depth must be 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ValidationError(f"unknown optimizer {self.optimizer!r}")
        if any(v <= 0 for v in self.lr_overrides.values()):
            raise ValidationError("lr overrides must be positive")
        if any(v < 1 for v in self.epoch_overrides.values()):
            raise ValidationError("epoch overrides must be positive")


@dataclass(eq=False)
class LayerModel:
    """Trained network plus the owning row's normalization range."""

    depth_index: int
    lstm: nn.LstmParams
    head: nn.DenseParams
    norm_min: float
    norm_max: float
    final_loss: float
    epochs_run: int
    seed: int


@dataclass(eq=False)
class ModelBank:
    """One trained LayerModel per schedule level, plus the training window."""

    schedule: DepthSchedule
    window: WindowSpec
    hyperparams: Hyperparams
    models: list[LayerModel]
    master_seed: int
    train_norm: np.ndarray  # normalized training matrix, kept for replay
    rounds_run: int = 1
    stable: bool = True
    validation_rmse: float | None = None

    def __post_init__(self):
        if len(self.models) != self.schedule.n_levels:
            raise ValidationError(
                f"{len(self.models)} models for {self.schedule.n_levels} levels"
            )

    @property
    def norm(self) -> NormParams:
        return NormParams(
            np.array([m.norm_min for m in self.models]),
            np.array([m.norm_max for m in self.models]),
        )


def make_staggered_pairs(tnorm: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-row one-step pairs: inputs = columns 1..M-1, targets = columns 2..M."""
    tnorm = np.asarray(tnorm, dtype=float)
    if tnorm.ndim != 2 or tnorm.shape[1] < 2:
        raise ValidationError("staggered pairs need a matrix with at least 2 columns")
    return [(row[:-1].copy(), row[1:].copy()) for row in tnorm]


def train_layer(
    j: int,
    pairs: tuple[np.ndarray, np.ndarray],
    hp: Hyperparams,
    seed: int,
    norm_row: tuple[float, float] = (0.0, 1.0),
) -> LayerModel:
    """Full-sequence BPTT for one depth layer; deterministic given seed."""
    xs, ys = pairs
    lr = hp.lr_overrides.get(j, hp.lr)
    epochs = hp.epoch_overrides.get(j, hp.epochs)
    params, head = nn.init_params(hp.hidden_size, 1, seed=seed)
    flat = nn.flatten_params(params, head)
    m = np.zeros_like(flat)
    v = np.zeros_like(flat)
    updates = 0
    for t in range(1, epochs + 1):
        params, head = nn.unflatten_params(flat, hp.hidden_size, 1)
        preds, tape = nn.forward_sequence(params, head, xs)
        loss = nn.sequence_loss(preds, ys)
        if not np.isfinite(loss):
            raise TrainingDivergenceError(f"layer {j}: loss diverged at epoch {t}")
        if hp.tol > 0 and loss < hp.tol:
            break
        grads = nn.flatten_params(*nn.backward_sequence(tape, params, head, xs, ys))
        grads = nn.clip_global_norm(grads, hp.grad_clip)
        try:
            if hp.optimizer == "adam":
                flat, m, v = nn.adam_step(flat, grads, m, v, lr, t)
            else:
                flat = nn.sgd_step(flat, grads, lr)
        except TrainingDivergenceError as e:
            raise TrainingDivergenceError(f"layer {j}: {e} at epoch {t}") from e
        updates = t
    params, head = nn.unflatten_params(flat, hp.hidden_size, 1)
    preds, _ = nn.forward_sequence(params, head, xs)
    final_loss = nn.sequence_loss(preds, ys)
    return LayerModel(j, params, head, norm_row[0], norm_row[1], final_loss, updates, seed)


def train_bank(
    series: LayeredSeries,
    w: WindowSpec,
    hp: Hyperparams,
    seed: int,
    workers: int = 1,
) -> ModelBank:
    """Normalize the window and train every layer; layer seeds derive from
    (seed, layer index) so results are independent of execution order."""
    t = training_matrix(series, w)
    norm = fit_norm(t)
    tnorm = apply_norm(t, norm)
    pairs = make_staggered_pairs(tnorm)

    def job(j):
        return train_layer(
            j, pairs[j], hp, derive_seed(seed, j), (norm.mins[j], norm.maxs[j])
        )

    indices = range(series.schedule.n_levels)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            models = list(pool.map(job, indices))
    else:
        models = [job(j) for j in indices]
    return ModelBank(series.schedule, w, hp, models, seed, tnorm)


def _layer_rollout(model: LayerModel, row: np.ndarray, k: int) -> np.ndarray:
    """Replay the observed row to warm state, then feed predictions back."""
    state = nn.LstmState.zeros(model.lstm.hidden_size)
    for x in row:
        state, _ = nn.lstm_step(model.lstm, state, [x])
    out = np.empty(k)
    y = float(model.head.w @ state.h + model.head.b)
    out[0] = y
    for s in range(1, k):
        state, _ = nn.lstm_step(model.lstm, state, [y])
        y = float(model.head.w @ state.h + model.head.b)
        out[s] = y
    return out


def predict_multi_step(bank: ModelBank, tnorm: np.ndarray | None = None, k: int = 1) -> np.ndarray:
    """Autoregressive k-step forecast, denormalized; J x k in m/s."""
    if k < 1:
        raise ValidationError("prediction steps k must be >= 1")
    if tnorm is None:
        tnorm = bank.train_norm
    tnorm = np.asarray(tnorm, dtype=float)
    if tnorm.ndim != 2 or tnorm.shape[0] != len(bank.models):
        raise ValidationError(
            f"normalized window shape {tnorm.shape} vs {len(bank.models)} layers"
        )
    raw = np.vstack([
        _layer_rollout(model, tnorm[j], k) for j, model in enumerate(bank.models)
    ])
    return denorm(raw, bank.norm)


def predict_one_step(bank: ModelBank, tnorm: np.ndarray | None = None) -> np.ndarray:
    """Next-month layered forecast; equals the first column of the rollout."""
    return predict_multi_step(bank, tnorm, k=1)[:, 0]


def retrain_until_stable(
    series: LayeredSeries,
    w: WindowSpec,
    hp: Hyperparams,
    seed: int,
    delta: float = 0.05,
    max_rounds: int = 5,
    workers: int = 1,
    eval_fn=None,
) -> ModelBank:
    """Retrain from fresh seeds until the validation RMSE stops moving.

    Round 1 uses the given seed, later rounds a seed derived from (seed,
    round). The first round's relative change counts as 1.0, so delta >= 1
    disables the loop. Returns the round with the lowest validation RMSE;
    bank.stable is False when max_rounds ran out before settling.
    """
    if max_rounds < 1:
        raise ValidationError("max_rounds must be >= 1")
    _, v = split_train_validation(series, w)
    if eval_fn is None:
        def eval_fn(bank):
            pred = predict_one_step(bank)
            return float(np.sqrt(np.mean((pred - v) ** 2)))

    best = None
    best_rmse = np.inf
    prev = None
    stable = False
    rounds = 0
    for r in range(1, max_rounds + 1):
        round_seed = seed if r == 1 else derive_seed(seed, r)
        bank = train_bank(series, w, hp, round_seed, workers=workers)
        cur = float(eval_fn(bank))
        rounds = r
        if cur < best_rmse:
            best, best_rmse = bank, cur
        change = 1.0 if prev is None else abs(cur - prev) / max(prev, 1e-12)
        prev = cur
        if change <= delta:
            stable = True
            break
    best.rounds_run = rounds
    best.stable = stable
    best.validation_rmse = best_rmse
    return best


def save_bank(bank: ModelBank, path) -> None:
    """Write one npz per layer plus a flat key-value manifest."""
    os.makedirs(path, exist_ok=True)
    hp = bank.hyperparams
    lines = [
        f"format_version = {CHECKPOINT_VERSION}",
        f"schedule = {','.join(repr(float(z)) for z in bank.schedule.levels)}",
        f"cycle_length = {bank.window.cycle_length}",
        f"n_cycles = {bank.window.n_cycles}",
        f"target_month = {bank.window.target_month}",
        f"hidden_size = {hp.hidden_size}",
        f"lr = {hp.lr!r}",
        f"epochs = {hp.epochs}",
        f"optimizer = {hp.optimizer}",
        f"grad_clip = {hp.grad_clip!r}",
        f"tol = {hp.tol!r}",
        f"lr_overrides = {_format_overrides(hp.lr_overrides)}",
        f"epoch_overrides = {_format_overrides(hp.epoch_overrides)}",
        f"master_seed = {bank.master_seed}",
        f"rounds_run = {bank.rounds_run}",
        f"stable = {int(bank.stable)}",
        f"validation_rmse = {'none' if bank.validation_rmse is None else repr(bank.validation_rmse)}",
        f"n_layers = {len(bank.models)}",
    ]
    for model in bank.models:
        lines.append(f"seed_{model.depth_index:03d} = {model.seed}")
    for model in bank.models:
        lines.append(f"loss_{model.depth_index:03d} = {model.final_loss!r}")
    with open(os.path.join(path, MANIFEST_NAME), "w") as f:
        f.write("\n".join(lines) + "\n")
    for j, model in enumerate(bank.models):
        np.savez(
            os.path.join(path, f"layer_{j:03d}.npz"),
            version=CHECKPOINT_VERSION,
            depth_index=model.depth_index,
            depth_m=bank.schedule.levels[j],
            W_f=model.lstm.W_f,
            W_i=model.lstm.W_i,
            W_c=model.lstm.W_c,
            W_o=model.lstm.W_o,
            b_f=model.lstm.b_f,
            b_i=model.lstm.b_i,
            b_c=model.lstm.b_c,
            b_o=model.lstm.b_o,
            head_w=model.head.w,
            head_b=model.head.b,
            norm_min=model.norm_min,
            norm_max=model.norm_max,
            final_loss=model.final_loss,
            epochs_run=model.epochs_run,
            seed=model.seed,
            train_row=bank.train_norm[j],
        )


def load_bank(path) -> ModelBank:
    manifest = read_kv_file(os.path.join(path, MANIFEST_NAME))
    version = int(manifest["format_version"])
    if version != CHECKPOINT_VERSION:
        raise ValidationError(f"unsupported checkpoint version {version}")
    schedule = DepthSchedule(np.array([float(x) for x in manifest["schedule"].split(",")]))
    window = WindowSpec(
        int(manifest["cycle_length"]),
        int(manifest["n_cycles"]),
        int(manifest["target_month"]),
    )
    hp = Hyperparams(
        hidden_size=int(manifest["hidden_size"]),
        lr=float(manifest["lr"]),
        epochs=int(manifest["epochs"]),
        optimizer=manifest["optimizer"],
        grad_clip=float(manifest["grad_clip"]),
        tol=float(manifest["tol"]),
        lr_overrides=_parse_overrides(manifest["lr_overrides"], float),
        epoch_overrides=_parse_overrides(manifest["epoch_overrides"], int),
    )
    n_layers = int(manifest["n_layers"])
    if n_layers != schedule.n_levels:
        raise ValidationError("manifest layer count does not match schedule")
    models = []
    rows = []
    for j in range(n_layers):
        fname = os.path.join(path, f"layer_{j:03d}.npz")
        if not os.path.exists(fname):
            raise ValidationError(f"missing checkpoint file {fname}")
        with np.load(fname) as d:
            lstm = nn.LstmParams(
                d["W_f"], d["W_i"], d["W_c"], d["W_o"],
                d["b_f"], d["b_i"], d["b_c"], d["b_o"],
            )
            head = nn.DenseParams(d["head_w"], float(d["head_b"]))
            models.append(
                LayerModel(
                    int(d["depth_index"]), lstm, head,
                    float(d["norm_min"]), float(d["norm_max"]),
                    float(d["final_loss"]), int(d["epochs_run"]), int(d["seed"]),
                )
            )
            rows.append(d["train_row"])
    rmse_text = manifest["validation_rmse"]
    return ModelBank(
        schedule,
        window,
        hp,
        models,
        int(manifest["master_seed"]),
        np.vstack(rows),
        rounds_run=int(manifest["rounds_run"]),
        stable=bool(int(manifest["stable"])),
        validation_rmse=None if rmse_text == "none" else float(rmse_text),
    )


def _format_overrides(d: dict) -> str:
    return ",".join(f"{k}:{v!r}" for k, v in sorted(d.items())) if d else "-"


def _parse_overrides(text: str, cast):
    if text == "-":
        return {}
    out = {}
    for item in text.split(","):
        k, v = item.split(":")
        out[int(k)] = cast(v)
    return out
