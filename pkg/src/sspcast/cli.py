"""Command-line surface: ingest, synth, train, predict, evaluate.

Configuration is a flat ``key = value`` file plus ``--key value`` flag
overrides; precedence is flag > file > built-in default. Exit codes are
scriptable: 0 success, 2 validation error, 3 training divergence, 4 failed
``--assert`` checks. Every command is deterministic given inputs, config
and seed; reruns produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import os
import shutil
import sys

from . import baselines, evaluation, reports
from .errors import ChronologyError, TrainingDivergenceError, ValidationError
from .hlstm import (
    Hyperparams,
    load_bank,
    predict_multi_step,
    retrain_until_stable,
    save_bank,
    train_bank,
)
from .kvtext import read_kv_file
from .profiles import (
    LayeredSeries,
    WindowSpec,
    assemble_series,
    build_depth_schedule,
    interpolate_full_depth,
)
from .seriesio import (
    format_month,
    parse_month,
    read_series_csv,
    write_layered_csv,
    write_series_csv,
)

OUT_ENV = "SSPCAST_OUT"

DEFAULTS = {
    "data": "",
    "out": "",
    "schedule": "paper58",
    "cycle_length": "12",
    "n_cycles": "4",
    "target": "",
    "hidden_size": "128",
    "lr": "0.01",
    "epochs": "300",
    "optimizer": "adam",
    "grad_clip": "5.0",
    "tol": "0.0",
    "stack_depth": "1",
    "seed": "0",
    "workers": "1",
    "step": "1.0",
    "clamp": "0",
    "retrain": "0",
    "delta": "0.05",
    "max_rounds": "5",
    "k": "12",
    "checkpoint": "",
    "poly_degree": "8",
    "poly_cycles": "2",
    "mean_mode": "same_month",
    "mlp_window": "12",
    "mlp_hidden": "32",
    "protocol": "rolling",
    "year": "",
    "targets": "",
    "n_values": "1,2,3,4",
    "depth_indices": "1,2,3",
    "min_corr": "0.95",
    "max_rmse": "1.0",
    "canonical": "",
    # synthetic family
    "months": "60",
    "start": "2017-01",
    "surface_speed": "1542.0",
    "seasonal_therm_depth": "150.0",
    "seasonal_therm_drop": "30.0",
    "seasonal_therm_width": "80.0",
    "main_therm_depth": "600.0",
    "main_therm_drop": "22.0",
    "main_therm_width": "250.0",
    "deep_gradient": "0.0165",
    "amplitude": "3.0",
    "amp_decay": "120.0",
    "peak_phase": "8",
    "noise_sigma": "0.2",
    "trend": "0.6",
    "trend_decay": "300.0",
    "out_file": "",
}

EXPERIMENTS = ("window_ablation", "monthly", "compare", "cycle_tracking")


class Config:
    """Merged string-valued settings with typed accessors."""

    def __init__(self, args: argparse.Namespace):
        file_vals = {}
        if args.config:
            file_vals = read_kv_file(args.config)
            unknown = set(file_vals) - set(DEFAULTS)
            if unknown:
                raise ValidationError(
                    f"{args.config}: unknown config keys {sorted(unknown)}"
                )
        merged = dict(DEFAULTS)
        merged.update(file_vals)
        for key in DEFAULTS:
            flag = getattr(args, key, None)
            if flag is not None:
                merged[key] = str(flag)
        if not merged["out"]:
            merged["out"] = os.environ.get(OUT_ENV, "out")
        self.values = merged

    def raw(self, key: str) -> str:
        return self.values[key]

    def _typed(self, key: str, cast, what: str):
        text = self.values[key]
        try:
            return cast(text)
        except (ValueError, ValidationError) as e:
            raise ValidationError(f"config {key}={text!r}: not a valid {what} ({e})")

    def int(self, key: str) -> int:
        return self._typed(key, int, "integer")

    def float(self, key: str) -> float:
        return self._typed(key, float, "number")

    def bool(self, key: str) -> bool:
        text = self.values[key].lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ValidationError(f"config {key}={text!r}: not a valid boolean")

    def month(self, key: str) -> int:
        text = self.values[key]
        if not text:
            raise ValidationError(f"config {key} is required (YYYY-MM)")
        return self._typed(key, parse_month, "month")

    def int_list(self, key: str) -> list[int]:
        return self._typed(
            key, lambda t: [int(x) for x in t.split(",") if x.strip() != ""], "integer list"
        )

    def schedule(self):
        text = self.values["schedule"]
        if text == "paper58":
            return build_depth_schedule("paper58")
        return self._typed(
            "schedule",
            lambda t: build_depth_schedule([float(x) for x in t.split(",")]),
            "schedule (paper58 or comma-separated depths)",
        )

    def hyperparams(self) -> Hyperparams:
        return Hyperparams(
            hidden_size=self.int("hidden_size"),
            lr=self.float("lr"),
            epochs=self.int("epochs"),
            stack_depth=self.int("stack_depth"),
            optimizer=self.raw("optimizer"),
            grad_clip=self.float("grad_clip"),
            tol=self.float("tol"),
        )

    def mlp_hyperparams(self) -> baselines.MlpHyperparams:
        return baselines.MlpHyperparams(
            window=self.int("mlp_window"), hidden=self.int("mlp_hidden")
        )

    def synth_spec(self) -> evaluation.SynthSpec:
        return evaluation.SynthSpec(
            seed=self.int("seed"),
            months=self.int("months"),
            start_month=self.month("start"),
            depths=self.schedule().levels,
            cycle=self.int("cycle_length"),
            surface_speed=self.float("surface_speed"),
            seasonal_therm_depth=self.float("seasonal_therm_depth"),
            seasonal_therm_drop=self.float("seasonal_therm_drop"),
            seasonal_therm_width=self.float("seasonal_therm_width"),
            main_therm_depth=self.float("main_therm_depth"),
            main_therm_drop=self.float("main_therm_drop"),
            main_therm_width=self.float("main_therm_width"),
            deep_gradient=self.float("deep_gradient"),
            amplitude=self.float("amplitude"),
            amp_decay=self.float("amp_decay"),
            peak_phase=self.int("peak_phase"),
            noise_sigma=self.float("noise_sigma"),
            trend=self.float("trend"),
            trend_decay=self.float("trend_decay"),
        )

    def load_series(self) -> LayeredSeries:
        """Series from --data, or the synthetic ocean when no path is given."""
        sched = self.schedule()
        if self.raw("data"):
            profiles = read_series_csv(self.raw("data"))
            return assemble_series(profiles, sched, clamp=self.bool("clamp"))
        profiles = evaluation.synth_generate(self.synth_spec())
        return assemble_series(profiles, sched)


def _add_keys(p: argparse.ArgumentParser, keys) -> None:
    for key in keys:
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)


def _common(p: argparse.ArgumentParser, keys) -> None:
    p.add_argument("--config", default=None, help="flat key = value settings file")
    _add_keys(p, keys)


_WINDOW_KEYS = ("schedule", "cycle_length", "n_cycles", "target", "clamp")
_HP_KEYS = ("hidden_size", "lr", "epochs", "optimizer", "grad_clip", "tol", "stack_depth")
_SYNTH_KEYS = (
    "months", "start", "surface_speed", "seasonal_therm_depth", "seasonal_therm_drop",
    "seasonal_therm_width", "main_therm_depth", "main_therm_drop", "main_therm_width",
    "deep_gradient", "amplitude", "amp_decay", "peak_phase", "noise_sigma",
    "trend", "trend_decay",
)
_BASELINE_KEYS = ("poly_degree", "poly_cycles", "mean_mode", "mlp_window", "mlp_hidden")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sspcast",
        description="Depth-stratified LSTM forecasting of ocean sound speed profiles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a series CSV and write a canonical copy")
    p.add_argument("csv", help="series file (month,depth_m,speed_mps)")
    _common(p, ("out", "canonical"))
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="generate a synthetic monthly ocean CSV")
    _common(p, ("out", "out_file", "seed", "schedule", "cycle_length") + _SYNTH_KEYS)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train the per-depth model bank")
    _common(
        p,
        ("data", "out", "checkpoint", "seed", "workers", "retrain", "delta", "max_rounds")
        + _WINDOW_KEYS + _HP_KEYS + _SYNTH_KEYS,
    )
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="forecast k months from a checkpoint")
    _common(p, ("out", "checkpoint", "k", "step"))
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="run an experiment and write reports")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument(
        "--assert", dest="assert_", action="store_true",
        help="exit 4 unless the experiment's acceptance checks pass",
    )
    _common(
        p,
        ("data", "out", "seed", "workers", "step", "year", "targets", "n_values",
         "depth_indices", "k", "protocol", "min_corr", "max_rmse")
        + _WINDOW_KEYS + _HP_KEYS + _BASELINE_KEYS + _SYNTH_KEYS,
    )
    p.set_defaults(func=cmd_evaluate)
    return parser


def cmd_ingest(args) -> int:
    cfg = Config(args)
    profiles = read_series_csv(args.csv)
    months = [p.month for p in profiles]
    for prev, cur in zip(months, months[1:]):
        if cur != prev + 1:
            raise ChronologyError(
                f"{args.csv}: gap between {format_month(prev)} and {format_month(cur)}"
            )
    print(f"{len(profiles)} months, {format_month(months[0])}..{format_month(months[-1])}")
    shallowest = min(p.depths[0] for p in profiles)
    deepest = max(p.depths[-1] for p in profiles)
    print(f"depth span {shallowest:g}..{deepest:g} m")
    counts = sorted({p.n_samples for p in profiles})
    if len(counts) == 1:
        print(f"{counts[0]} samples per month")
    else:
        for p in profiles:
            print(f"{format_month(p.month)}: {p.n_samples} samples")
    canonical = cfg.raw("canonical") or os.path.join(cfg.raw("out"), "canonical.csv")
    os.makedirs(os.path.dirname(canonical) or ".", exist_ok=True)
    write_series_csv(profiles, canonical)
    print(f"canonical copy: {canonical}")
    return 0


def cmd_synth(args) -> int:
    cfg = Config(args)
    spec = cfg.synth_spec()
    profiles = evaluation.synth_generate(spec)
    path = cfg.raw("out_file") or os.path.join(cfg.raw("out"), "synth.csv")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    write_series_csv(profiles, path)
    print(
        f"wrote {spec.months} months ({format_month(spec.start_month)}.."
        f"{format_month(spec.start_month + spec.months - 1)}), "
        f"{spec.depths.size} levels: {path}"
    )
    return 0


def _checkpoint_path(cfg: Config, target: int) -> str:
    explicit = cfg.raw("checkpoint")
    if explicit:
        return explicit
    name = f"bank_{format_month(target)}_{cfg.int('seed')}"
    return os.path.join(cfg.raw("out"), name)


def cmd_train(args) -> int:
    cfg = Config(args)
    if not cfg.raw("data"):
        raise ValidationError("train needs --data (run `sspcast synth` to make one)")
    series = cfg.load_series()
    target = cfg.month("target")
    w = WindowSpec(cfg.int("cycle_length"), cfg.int("n_cycles"), target)
    hp = cfg.hyperparams()
    seed = cfg.int("seed")
    workers = cfg.int("workers")
    if cfg.bool("retrain"):
        bank = retrain_until_stable(
            series, w, hp, seed,
            delta=cfg.float("delta"), max_rounds=cfg.int("max_rounds"),
            workers=workers,
        )
        flag = "stable" if bank.stable else "NOT stable (max rounds hit)"
        print(f"retrain: {bank.rounds_run} round(s), {flag}, "
              f"validation rmse {bank.validation_rmse:.6f}")
    else:
        bank = train_bank(series, w, hp, seed, workers=workers)
    ckpt = _checkpoint_path(cfg, target)
    tmp = ckpt.rstrip("/\\") + ".tmp"
    shutil.rmtree(tmp, ignore_errors=True)
    try:
        save_bank(bank, tmp)
        shutil.rmtree(ckpt, ignore_errors=True)
        os.rename(tmp, ckpt)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    for model in bank.models:
        depth = bank.schedule.levels[model.depth_index]
        print(f"layer {model.depth_index:03d} depth {depth:7.1f} m "
              f"loss {model.final_loss:.3e}")
    print(f"checkpoint: {ckpt}")
    return 0


def cmd_predict(args) -> int:
    cfg = Config(args)
    ckpt = cfg.raw("checkpoint")
    if not ckpt:
        raise ValidationError("predict needs --checkpoint")
    bank = load_bank(ckpt)
    k = cfg.int("k")
    step = cfg.float("step")
    preds = predict_multi_step(bank, k=k)
    out_dir = cfg.raw("out")
    os.makedirs(out_dir, exist_ok=True)
    for i in range(k):
        month = bank.window.target_month + i
        label = format_month(month)
        layered_path = os.path.join(out_dir, f"predicted_{label}_layered.csv")
        write_layered_csv(preds[:, i], bank.schedule, layered_path)
        prof = interpolate_full_depth(preds[:, i], bank.schedule, step, month=month)
        profile_path = os.path.join(out_dir, f"predicted_{label}_profile.csv")
        write_series_csv([prof], profile_path)
        print(f"{label}: {layered_path} {profile_path}")
    return 0


def _eval_common(cfg: Config):
    series = cfg.load_series()
    hp = cfg.hyperparams()
    seed = cfg.int("seed")
    return series, hp, seed, cfg.int("workers"), cfg.float("step"), cfg.int("cycle_length")


def cmd_evaluate(args) -> int:
    cfg = Config(args)
    series, hp, seed, workers, step, cycle = _eval_common(cfg)
    out_dir = cfg.raw("out")
    failures: list[str] = []

    if args.experiment == "window_ablation":
        if cfg.raw("targets"):
            targets = [parse_month(t) for t in cfg.raw("targets").split(",")]
        else:
            targets = [cfg.month("target")]
        n_values = cfg.int_list("n_values")
        rows = evaluation.experiment_window_ablation(
            series, targets, n_values, hp=hp, seed=seed, cycle=cycle,
            step=step, workers=workers,
        )
        for r in rows:
            print(f"n={r.n_cycles}: rmse {r.rmse:.6f}")
        label = format_month(targets[0])
        paths = reports.write_ablation_report(rows, out_dir, label, seed)
        by_n = {r.n_cycles: r.rmse for r in rows}
        if args.assert_ and by_n[max(by_n)] >= by_n[min(by_n)]:
            failures.append(
                f"rmse(n={max(by_n)})={by_n[max(by_n)]:.6f} not below "
                f"rmse(n={min(by_n)})={by_n[min(by_n)]:.6f}"
            )

    elif args.experiment == "monthly":
        if not cfg.raw("year"):
            raise ValidationError("monthly needs --year")
        result = evaluation.experiment_monthly(
            series, cfg.int("year"), hp=hp, seed=seed,
            n_cycles=cfg.int("n_cycles"), cycle=cycle,
            protocol=cfg.raw("protocol"), step=step, workers=workers,
        )
        for m, r in result.rows:
            print(f"{format_month(m)}: rmse {r:.6f}")
        print(f"mean: {result.mean_rmse:.6f}")
        paths = reports.write_monthly_report(result, out_dir, cfg.raw("year"), seed)
        if args.assert_ and result.mean_rmse > cfg.float("max_rmse"):
            failures.append(
                f"mean rmse {result.mean_rmse:.6f} above {cfg.float('max_rmse')}"
            )

    elif args.experiment == "compare":
        target = cfg.month("target")
        rows = evaluation.experiment_compare(
            series, target, hp=hp, mlp_hp=cfg.mlp_hyperparams(),
            poly_degree=cfg.int("poly_degree"), poly_cycles=cfg.int("poly_cycles"),
            mean_mode=cfg.raw("mean_mode"), seed=seed,
            n_cycles=cfg.int("n_cycles"), cycle=cycle, step=step, workers=workers,
        )
        for name, r in rows:
            print(f"{name}: rmse {r:.6f}")
        paths = reports.write_compare_report(rows, out_dir, format_month(target), seed)
        by_name = dict(rows)
        if args.assert_ and by_name["hlstm"] >= by_name["mean"]:
            failures.append(
                f"hlstm rmse {by_name['hlstm']:.6f} not below mean baseline "
                f"{by_name['mean']:.6f}"
            )

    else:  # cycle_tracking
        k = cfg.int("k")
        tracks = evaluation.experiment_cycle_tracking(
            series, cfg.int_list("depth_indices"), k=k, hp=hp, seed=seed,
            n_cycles=cfg.int("n_cycles"), cycle=cycle, workers=workers,
        )
        for t in tracks:
            print(f"depth {t.depth_m:g} m: correlation {t.correlation:.4f}")
        label = format_month(series.end_month - k + 1)
        paths = reports.write_tracking_report(tracks, out_dir, label, seed)
        if args.assert_:
            for t in tracks:
                if not t.correlation > cfg.float("min_corr"):
                    failures.append(
                        f"depth {t.depth_m:g} m correlation {t.correlation:.4f} "
                        f"not above {cfg.float('min_corr')}"
                    )

    print(f"reports: {paths[0]} {paths[1]}")
    if failures:
        for f in failures:
            print(f"assertion failed: {f}", file=sys.stderr)
        return 4
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TrainingDivergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
