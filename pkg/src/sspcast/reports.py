"""CSV and SVG report writers for the experiment protocols.

File naming follows <experiment>_<target>_<seed>.csv|svg inside an output
directory. All numeric columns use fixed 6-decimal formatting and newline
line endings so reruns produce byte-identical files.
"""

from __future__ import annotations

import os

import numpy as np

from . import svgplot
from .evaluation import AblationRow, MonthlyResult, TrackRow
from .profiles import DepthSchedule, interpolate_full_depth
from .seriesio import format_month


def _write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(text)


def _csv(lines) -> str:
    return "\n".join(lines) + "\n"


def report_paths(out_dir: str, experiment: str, target: str, seed: int) -> tuple[str, str]:
    base = os.path.join(out_dir, f"{experiment}_{target}_{seed}")
    return base + ".csv", base + ".svg"


def write_ablation_report(
    rows: list[AblationRow], out_dir: str, target: str, seed: int
) -> tuple[str, str]:
    csv_path, svg_path = report_paths(out_dir, "window_ablation", target, seed)
    lines = ["n_cycles,rmse_mps"]
    lines += [f"{r.n_cycles},{r.rmse:.6f}" for r in rows]
    _write(csv_path, _csv(lines))
    svg = svgplot.line_chart(
        [("rmse", [r.n_cycles for r in rows], [r.rmse for r in rows])],
        title=f"Window ablation, target {target}",
        x_label="training cycles n",
        y_label="RMSE (m/s)",
    )
    _write(svg_path, svg)
    return csv_path, svg_path


def write_monthly_report(
    result: MonthlyResult, out_dir: str, target: str, seed: int
) -> tuple[str, str]:
    csv_path, svg_path = report_paths(out_dir, "monthly", target, seed)
    lines = ["month,rmse_mps"]
    lines += [f"{format_month(m)},{r:.6f}" for m, r in result.rows]
    lines.append(f"mean,{result.mean_rmse:.6f}")
    _write(csv_path, _csv(lines))
    svg = svgplot.line_chart(
        [(result.protocol, range(1, len(result.rows) + 1), [r for _, r in result.rows])],
        title=f"Monthly RMSE, {target}",
        x_label="month",
        y_label="RMSE (m/s)",
    )
    _write(svg_path, svg)
    return csv_path, svg_path


def write_compare_report(
    rows: list[tuple[str, float]], out_dir: str, target: str, seed: int
) -> tuple[str, str]:
    csv_path, svg_path = report_paths(out_dir, "compare", target, seed)
    lines = ["method,rmse_mps"]
    lines += [f"{name},{r:.6f}" for name, r in rows]
    _write(csv_path, _csv(lines))
    svg = svgplot.bar_chart(
        rows, title=f"Method comparison, target {target}", y_label="RMSE (m/s)"
    )
    _write(svg_path, svg)
    return csv_path, svg_path


def write_tracking_report(
    tracks: list[TrackRow], out_dir: str, target: str, seed: int
) -> tuple[str, str]:
    csv_path, svg_path = report_paths(out_dir, "cycle_tracking", target, seed)
    lines = ["depth_index,depth_m,step,truth_mps,pred_mps,correlation"]
    for t in tracks:
        for s, (tr, pr) in enumerate(zip(t.truth, t.pred), start=1):
            lines.append(
                f"{t.depth_index},{t.depth_m:.6f},{s},{tr:.6f},{pr:.6f},"
                f"{t.correlation:.6f}"
            )
    _write(csv_path, _csv(lines))
    series = []
    for t in tracks:
        steps = range(1, t.truth.size + 1)
        series.append((f"truth {t.depth_m:.0f} m", steps, t.truth))
        series.append((f"pred {t.depth_m:.0f} m", steps, t.pred))
    svg = svgplot.line_chart(
        series,
        title=f"Cycle tracking, {target}",
        x_label="prediction step",
        y_label="speed (m/s)",
    )
    _write(svg_path, svg)
    return csv_path, svg_path


def write_profile_plot(
    layered: np.ndarray,
    sched: DepthSchedule,
    path: str,
    title: str,
    step: float = 1.0,
    truth: np.ndarray | None = None,
) -> str:
    """Full-depth profile chart, depth increasing downward."""
    prof = interpolate_full_depth(layered, sched, step)
    series = [("predicted", prof.speeds, prof.depths)]
    if truth is not None:
        tprof = interpolate_full_depth(truth, sched, step)
        series.append(("truth", tprof.speeds, tprof.depths))
    svg = svgplot.line_chart(
        series,
        title=title,
        x_label="speed (m/s)",
        y_label="depth (m)",
        invert_y=True,
    )
    _write(path, svg)
    return path
