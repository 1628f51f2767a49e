"""CSV formats and calendar-month parsing.

Series files carry one row per (month, depth) sample with header
``month,depth_m,speed_mps``, months as YYYY-MM, rows grouped by month with
depth ascending. Values are written with 6 decimal places so that a
write/read/write cycle is byte-identical.
"""

from __future__ import annotations

import csv
import re

import numpy as np

from .errors import ChronologyError, ValidationError
from .profiles import DEFAULT_SPEED_BAND, DepthSchedule, Profile

SERIES_HEADER = ["month", "depth_m", "speed_mps"]
LAYERED_HEADER = ["layer_index", "depth_m", "speed_mps"]

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def parse_month(text: str) -> int:
    """YYYY-MM -> integer months-since-epoch index."""
    m = _MONTH_RE.match(text.strip())
    if not m:
        raise ValidationError(f"bad month {text!r}, expected YYYY-MM")
    year, month = int(m.group(1)), int(m.group(2))
    if not 1 <= month <= 12:
        raise ValidationError(f"bad month number in {text!r}")
    return year * 12 + (month - 1)


def format_month(index: int) -> str:
    """Inverse of parse_month."""
    return f"{index // 12:04d}-{index % 12 + 1:02d}"


def write_series_csv(profiles, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(SERIES_HEADER)
        for p in profiles:
            label = format_month(p.month)
            for depth, speed in zip(p.depths, p.speeds):
                w.writerow([label, f"{depth:.6f}", f"{speed:.6f}"])


def read_series_csv(path, speed_band=DEFAULT_SPEED_BAND) -> list[Profile]:
    """Read a series file into profiles, in file order.

    Malformed rows are reported with their line number; a month appearing in
    two separate groups is fatal. Chronology (no gaps) is checked later, at
    series assembly.
    """
    groups: list[tuple[int, list[float], list[float]]] = []
    seen: set[int] = set()
    with open(path, newline="") as f:
        rows = csv.reader(f)
        header = next(rows, None)
        if header is None:
            raise ValidationError(f"{path}: empty file")
        if [h.strip() for h in header] != SERIES_HEADER:
            raise ValidationError(
                f"{path}: bad header {header!r}, expected {','.join(SERIES_HEADER)}"
            )
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValidationError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                month = parse_month(row[0])
                depth = float(row[1])
                speed = float(row[2])
            except (ValidationError, ValueError) as e:
                raise ValidationError(f"{path}:{lineno}: {e}") from e
            if not groups or groups[-1][0] != month:
                if month in seen:
                    raise ChronologyError(
                        f"{path}:{lineno}: month {format_month(month)} appears twice"
                    )
                seen.add(month)
                groups.append((month, [], []))
            groups[-1][1].append(depth)
            groups[-1][2].append(speed)
    if not groups:
        raise ValidationError(f"{path}: no data rows")
    profiles = []
    for month, depths, speeds in groups:
        try:
            profiles.append(Profile(month, depths, speeds, speed_band=speed_band))
        except ValidationError as e:
            raise ValidationError(f"{path}: month {format_month(month)}: {e}") from e
    return profiles


def write_layered_csv(vector, sched: DepthSchedule, path) -> None:
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (sched.n_levels,):
        raise ValidationError(
            f"layered vector has shape {vector.shape}, expected ({sched.n_levels},)"
        )
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(LAYERED_HEADER)
        for j, (depth, speed) in enumerate(zip(sched.levels, vector)):
            w.writerow([j, f"{depth:.6f}", f"{speed:.6f}"])


def read_layered_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Return (depths, speeds) from a layered-vector file."""
    depths, speeds = [], []
    with open(path, newline="") as f:
        rows = csv.reader(f)
        header = next(rows, None)
        if header is None or [h.strip() for h in header] != LAYERED_HEADER:
            raise ValidationError(f"{path}: bad layered header {header!r}")
        for lineno, row in enumerate(rows, start=2):
            if not row:
                continue
            try:
                depths.append(float(row[1]))
                speeds.append(float(row[2]))
            except (IndexError, ValueError) as e:
                raise ValidationError(f"{path}:{lineno}: {e}") from e
    return np.asarray(depths), np.asarray(speeds)
