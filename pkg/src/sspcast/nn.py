"""From-scratch LSTM numerics: forward, backpropagation through time, Adam.

Everything is plain numpy on float64. One cell, one dense head producing a
scalar per step; the recurrent input is the hidden vector h concatenated
with the per-step input x, in that order: z = [h, x].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TrainingDivergenceError, ValidationError

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def sigmoid(z: np.ndarray) -> np.ndarray:
    # clip keeps exp() in range; sigma(|60|) is saturated to ~1e-26 anyway
    return 1.0 / (1.0 + np.exp(-np.clip(z, -60.0, 60.0)))


@dataclass(eq=False)
class LstmParams:
    """Gate weights over [h, x] and per-gate biases for one cell."""

    W_f: np.ndarray
    W_i: np.ndarray
    W_c: np.ndarray
    W_o: np.ndarray
    b_f: np.ndarray
    b_i: np.ndarray
    b_c: np.ndarray
    b_o: np.ndarray

    def __post_init__(self):
        n, m = self.W_f.shape
        for name in ("W_i", "W_c", "W_o"):
            if getattr(self, name).shape != (n, m):
                raise ValidationError(f"{name} shape differs from W_f {(n, m)}")
        for name in ("b_f", "b_i", "b_c", "b_o"):
            if getattr(self, name).shape != (n,):
                raise ValidationError(f"{name} must have shape ({n},)")
        if m <= n:
            raise ValidationError("weight columns must cover hidden + input")

    @property
    def hidden_size(self) -> int:
        return self.W_f.shape[0]

    @property
    def input_size(self) -> int:
        return self.W_f.shape[1] - self.W_f.shape[0]


@dataclass(eq=False)
class DenseParams:
    """Linear head mapping the hidden vector to one scalar."""

    w: np.ndarray
    b: float

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float)
        if self.w.ndim != 1:
            raise ValidationError("dense weight must be a vector over hidden units")
        self.b = float(self.b)


@dataclass(eq=False)
class LstmState:
    """Hidden and cell vectors; zeros at sequence start."""

    h: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, hidden_size: int) -> "LstmState":
        return cls(np.zeros(hidden_size), np.zeros(hidden_size))


@dataclass(eq=False)
class TapeEntry:
    """Everything the backward pass needs for one timestep."""

    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    f: np.ndarray
    i: np.ndarray
    g: np.ndarray  # candidate cell value, tanh pre-gate
    o: np.ndarray
    c: np.ndarray
    tanh_c: np.ndarray


def lstm_step(
    params: LstmParams, state: LstmState, x_t: np.ndarray
) -> tuple[LstmState, TapeEntry]:
    """Advance one timestep.

    f = sig(W_f [h,x] + b_f), i = sig(W_i [h,x] + b_i),
    g = tanh(W_c [h,x] + b_c), c' = f*c + i*g,
    o = sig(W_o [h,x] + b_o), h' = o * tanh(c').
    """
    x_t = np.asarray(x_t, dtype=float).ravel()
    if x_t.size != params.input_size:
        raise ValidationError(
            f"input has {x_t.size} entries, expected {params.input_size}"
        )
    if not np.all(np.isfinite(x_t)):
        raise ValidationError("non-finite input to lstm_step")
    z = np.concatenate([state.h, x_t])
    f = sigmoid(params.W_f @ z + params.b_f)
    i = sigmoid(params.W_i @ z + params.b_i)
    g = np.tanh(params.W_c @ z + params.b_c)
    c = f * state.c + i * g
    o = sigmoid(params.W_o @ z + params.b_o)
    tanh_c = np.tanh(c)
    h = o * tanh_c
    entry = TapeEntry(x_t, state.h, state.c, f, i, g, o, c, tanh_c)
    return LstmState(h, c), entry


def forward_sequence(
    params: LstmParams, head: DenseParams, xs: np.ndarray
) -> tuple[np.ndarray, list[TapeEntry]]:
    """Run a whole sequence from a zero state.

    Returns per-step scalar predictions head.w @ h_t + head.b and the tape
    for the backward pass.
    """
    xs = _as_steps(xs, params.input_size)
    if not np.all(np.isfinite(xs)):
        raise ValidationError("non-finite entries in input sequence")
    state = LstmState.zeros(params.hidden_size)
    preds = np.empty(xs.shape[0])
    tape: list[TapeEntry] = []
    for t in range(xs.shape[0]):
        state, entry = lstm_step(params, state, xs[t])
        tape.append(entry)
        preds[t] = head.w @ state.h + head.b
    return preds, tape


def sequence_loss(preds: np.ndarray, targets: np.ndarray) -> float:
    """Mean squared error over the sequence."""
    targets = np.asarray(targets, dtype=float)
    if preds.shape != targets.shape:
        raise ValidationError(f"{preds.shape} predictions vs {targets.shape} targets")
    d = preds - targets
    return float(d @ d / d.size)


def backward_sequence(
    tape: list[TapeEntry],
    params: LstmParams,
    head: DenseParams,
    xs: np.ndarray,
    targets: np.ndarray,
) -> tuple[LstmParams, DenseParams]:
    """Exact gradients of the sequence MSE by backpropagation through time.

    Returns containers shaped like (params, head) holding d(loss)/d(param).
    """
    xs = _as_steps(xs, params.input_size)
    targets = np.asarray(targets, dtype=float)
    steps = len(tape)
    if xs.shape[0] != steps or targets.shape != (steps,):
        raise ValidationError("tape, inputs and targets must have equal length")

    n = params.hidden_size
    dW = {k: np.zeros_like(getattr(params, "W_" + k)) for k in "fico"}
    db = {k: np.zeros_like(getattr(params, "b_" + k)) for k in "fico"}
    dhead_w = np.zeros_like(head.w)
    dhead_b = 0.0

    dh_next = np.zeros(n)
    dc_next = np.zeros(n)
    for t in range(steps - 1, -1, -1):
        e = tape[t]
        h_t = e.o * e.tanh_c
        dpred = 2.0 * ((head.w @ h_t + head.b) - targets[t]) / steps
        dhead_w += dpred * h_t
        dhead_b += dpred

        dh = dpred * head.w + dh_next
        do = dh * e.tanh_c
        dc = dh * e.o * (1.0 - e.tanh_c**2) + dc_next
        df = dc * e.c_prev
        di = dc * e.g
        dg = dc * e.i
        dc_next = dc * e.f

        da_f = df * e.f * (1.0 - e.f)
        da_i = di * e.i * (1.0 - e.i)
        da_o = do * e.o * (1.0 - e.o)
        da_c = dg * (1.0 - e.g**2)

        z = np.concatenate([e.h_prev, e.x])
        dW["f"] += np.outer(da_f, z)
        dW["i"] += np.outer(da_i, z)
        dW["c"] += np.outer(da_c, z)
        dW["o"] += np.outer(da_o, z)
        db["f"] += da_f
        db["i"] += da_i
        db["c"] += da_c
        db["o"] += da_o

        dz = (
            params.W_f.T @ da_f
            + params.W_i.T @ da_i
            + params.W_c.T @ da_c
            + params.W_o.T @ da_o
        )
        dh_next = dz[:n]

    grads = LstmParams(
        dW["f"], dW["i"], dW["c"], dW["o"], db["f"], db["i"], db["c"], db["o"]
    )
    return grads, DenseParams(dhead_w, dhead_b)


def init_params(
    hidden_size: int, input_size: int = 1, seed=0
) -> tuple[LstmParams, DenseParams]:
    """Seeded uniform init in [-1/sqrt(N), 1/sqrt(N)]; forget bias starts at 1."""
    if hidden_size < 1:
        raise ValidationError("hidden_size must be >= 1")
    if input_size < 1:
        raise ValidationError("input_size must be >= 1")
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(hidden_size)
    shape = (hidden_size, hidden_size + input_size)
    w_f, w_i, w_c, w_o = (rng.uniform(-scale, scale, shape) for _ in range(4))
    params = LstmParams(
        w_f,
        w_i,
        w_c,
        w_o,
        np.ones(hidden_size),  # open forget gate aids early memory retention
        np.zeros(hidden_size),
        np.zeros(hidden_size),
        np.zeros(hidden_size),
    )
    head = DenseParams(rng.uniform(-scale, scale, hidden_size), 0.0)
    return params, head


PARAM_BLOCKS = ("W_f", "W_i", "W_c", "W_o", "b_f", "b_i", "b_c", "b_o", "head_w", "head_b")


def flatten_params(params: LstmParams, head: DenseParams) -> np.ndarray:
    return np.concatenate(
        [
            params.W_f.ravel(),
            params.W_i.ravel(),
            params.W_c.ravel(),
            params.W_o.ravel(),
            params.b_f,
            params.b_i,
            params.b_c,
            params.b_o,
            head.w,
            [head.b],
        ]
    )


def unflatten_params(
    flat: np.ndarray, hidden_size: int, input_size: int
) -> tuple[LstmParams, DenseParams]:
    n, m = hidden_size, hidden_size + input_size
    w_n = n * m
    expected = 4 * w_n + 4 * n + n + 1
    flat = np.asarray(flat, dtype=float)
    if flat.shape != (expected,):
        raise ValidationError(f"flat vector has {flat.size} entries, expected {expected}")
    pos = 0

    def take(count):
        nonlocal pos
        out = flat[pos : pos + count]
        pos += count
        return out

    ws = [take(w_n).reshape(n, m).copy() for _ in range(4)]
    bs = [take(n).copy() for _ in range(4)]
    head = DenseParams(take(n).copy(), float(take(1)[0]))
    return LstmParams(*ws, *bs), head


def block_slices(hidden_size: int, input_size: int) -> dict[str, slice]:
    """Flat-vector slice per named parameter block."""
    n, m = hidden_size, hidden_size + input_size
    sizes = [n * m] * 4 + [n] * 4 + [n, 1]
    out = {}
    pos = 0
    for name, size in zip(PARAM_BLOCKS, sizes):
        out[name] = slice(pos, pos + size)
        pos += size
    return out


def clip_global_norm(grads: np.ndarray, max_norm: float) -> np.ndarray:
    """Scale the flat gradient down to max_norm if it exceeds it."""
    norm = float(np.linalg.norm(grads))
    if max_norm > 0 and norm > max_norm:
        return grads * (max_norm / norm)
    return grads


def adam_step(
    params_flat: np.ndarray,
    grads_flat: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    lr: float,
    t: int,
    beta1: float = ADAM_BETA1,
    beta2: float = ADAM_BETA2,
    eps: float = ADAM_EPS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One bias-corrected adaptive-moment update on flat vectors; t counts from 1."""
    if params_flat.shape != grads_flat.shape:
        raise ValidationError("params and grads must have equal shapes")
    if t < 1:
        raise ValidationError("adam timestep counts from 1")
    if not np.all(np.isfinite(grads_flat)):
        raise TrainingDivergenceError("non-finite gradient in adam_step")
    m = beta1 * m + (1.0 - beta1) * grads_flat
    v = beta2 * v + (1.0 - beta2) * grads_flat**2
    m_hat = m / (1.0 - beta1**t)
    v_hat = v / (1.0 - beta2**t)
    params = params_flat - lr * m_hat / (np.sqrt(v_hat) + eps)
    return params, m, v


def sgd_step(params_flat: np.ndarray, grads_flat: np.ndarray, lr: float) -> np.ndarray:
    if not np.all(np.isfinite(grads_flat)):
        raise TrainingDivergenceError("non-finite gradient in sgd_step")
    return params_flat - lr * grads_flat


def grad_check(
    params: LstmParams,
    head: DenseParams,
    xs: np.ndarray,
    targets: np.ndarray,
    eps: float = 1e-5,
    analytic: tuple[LstmParams, DenseParams] | None = None,
) -> dict[str, float]:
    """Max relative error per parameter block, analytic vs central differences.

    Relative error is |a - n| / max(|a|, |n|, 1e-8). Intended for small
    instances (hidden <= 8, sequence <= 12); cost is O(params * length).
    """
    xs = _as_steps(xs, params.input_size)
    targets = np.asarray(targets, dtype=float)
    if analytic is None:
        _, tape = forward_sequence(params, head, xs)
        analytic = backward_sequence(tape, params, head, xs, targets)
    analytic_flat = flatten_params(*analytic)

    flat = flatten_params(params, head)
    n, d = params.hidden_size, params.input_size
    numeric = np.empty_like(flat)
    for k in range(flat.size):
        bumped = flat.copy()
        bumped[k] = flat[k] + eps
        hi = sequence_loss(forward_sequence(*unflatten_params(bumped, n, d), xs)[0], targets)
        bumped[k] = flat[k] - eps
        lo = sequence_loss(forward_sequence(*unflatten_params(bumped, n, d), xs)[0], targets)
        numeric[k] = (hi - lo) / (2.0 * eps)

    rel = np.abs(analytic_flat - numeric) / np.maximum(
        np.maximum(np.abs(analytic_flat), np.abs(numeric)), 1e-8
    )
    return {
        name: float(rel[sl].max()) for name, sl in block_slices(n, d).items()
    }


def _as_steps(xs: np.ndarray, input_size: int) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    if xs.ndim != 2 or xs.shape[1] != input_size:
        raise ValidationError(
            f"sequence shape {xs.shape} incompatible with input size {input_size}"
        )
    if xs.shape[0] == 0:
        raise ValidationError("empty input sequence")
    return xs
