"""
How much history does the bank need?
====================================

Retrains the bank with one to four years of history before a fixed target
month and reports the full-depth RMSE for each window length. More cycles
give the per-layer models more seasonal repetitions to average over, so
the error should fall as n grows.
"""

import os

import numpy as np

from sspcast import (
    DepthSchedule,
    Hyperparams,
    SynthSpec,
    assemble_series,
    experiment_window_ablation,
    format_month,
    synth_generate,
)
from sspcast.reports import write_ablation_report

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

depths = np.array([0.0, 50.0, 100.0, 200.0, 400.0, 700.0,
                   1000.0, 1300.0, 1600.0, 1975.0])
series = assemble_series(
    synth_generate(SynthSpec(seed=1, depths=depths)), DepthSchedule(depths)
)

# The target sits four full cycles after the series start so every window
# length from n=1 to n=4 has enough observed history.
target = series.start_month + 48
rows = experiment_window_ablation(
    series, [target], [1, 2, 3, 4],
    hp=Hyperparams(hidden_size=16, epochs=200), seed=1,
)
print(f"training-window ablation, target {format_month(target)}:")
for r in rows:
    print(f"  n={r.n_cycles} cycles: rmse {r.rmse:.4f} m/s")

csv_path, svg_path = write_ablation_report(rows, OUT, format_month(target), 1)
print(f"reports: {csv_path} {svg_path}")
