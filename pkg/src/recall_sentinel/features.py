"""Per-(drug, state, day) time-series attributes and recall censoring.

Twenty attributes per row: OLS slopes of daily counts over trailing
windows of 1..7 weeks for the total and the symptom channel (14), and
smoothed short/long mean-rate ratios for the window pairs (1,7), (1,30)
and (7,30) on both channels (6). All windows end at the row's day,
inclusive. Days 0..WARMUP_DAYS-1 produce no row.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .ingest import CountCube, RecallRecord, StudyWindow

WARMUP_DAYS = 49
N_ATTRS = 20
SLOPE_WEEKS = range(1, 8)
RATIO_PAIRS = ((1, 7), (1, 30), (7, 30))
RATIO_ALPHA = 1.0

FEATURE_NAMES = (
    [f"slope_t_w{k}" for k in SLOPE_WEEKS]
    + [f"slope_s_w{k}" for k in SLOPE_WEEKS]
    + [f"rt_{a}_{b}" for a, b in RATIO_PAIRS]
    + [f"rs_{a}_{b}" for a, b in RATIO_PAIRS]
)


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureRow:
    drug: str
    state: str
    day: int
    attrs: np.ndarray  # shape (20,)

    def key(self) -> tuple[str, str, int]:
        return (self.drug, self.state, self.day)


def _slope_coefficients(length: int) -> np.ndarray:
    # OLS slope of y vs x=0..length-1 is a fixed linear functional of y
    x = np.arange(length, dtype=float)
    xc = x - x.mean()
    return xc / (xc ** 2).sum()


def window_slope(counts, k_weeks: int) -> float:
    """OLS slope (queries/day) of a trailing 7*k_weeks-day series."""
    if not 1 <= k_weeks <= 7:
        raise FeatureError(f"k_weeks must be in [1, 7], got {k_weeks}")
    y = np.asarray(counts, dtype=float)
    length = 7 * k_weeks
    if y.shape != (length,):
        raise FeatureError(f"expected series of length {length}, got shape {y.shape}")
    return float(y @ _slope_coefficients(length))


def spike_ratio(counts, short_days: int, long_days: int,
                alpha: float = RATIO_ALPHA) -> float:
    """Smoothed ratio of short-window to long-window mean daily counts.

    The short window is the trailing tail of the long one; additive
    smoothing keeps the ratio finite and positive on sparse series.
    """
    if not 0 < short_days < long_days:
        raise FeatureError("need 0 < short_days < long_days")
    y = np.asarray(counts, dtype=float)
    if y.size < long_days:
        raise FeatureError(f"need at least {long_days} trailing days, got {y.size}")
    tail = y[-long_days:]
    return float((tail[-short_days:].mean() + alpha) / (tail.mean() + alpha))


def _row_attrs(total: np.ndarray, symptom: np.ndarray, day: int) -> np.ndarray:
    attrs = np.empty(N_ATTRS)
    for i, k in enumerate(SLOPE_WEEKS):
        attrs[i] = window_slope(total[day - 7 * k + 1:day + 1], k)
        attrs[7 + i] = window_slope(symptom[day - 7 * k + 1:day + 1], k)
    for j, (a, b) in enumerate(RATIO_PAIRS):
        attrs[14 + j] = spike_ratio(total[:day + 1], a, b)
        attrs[17 + j] = spike_ratio(symptom[:day + 1], a, b)
    return attrs


def extract_features(cube: CountCube, drug: str, state: str, day: int) -> FeatureRow:
    """Attributes for one (drug, state, day); unknown keys get the all-zero series."""
    if day < WARMUP_DAYS:
        raise FeatureError(f"day {day} is inside the {WARMUP_DAYS}-day warm-up")
    if day >= cube.n_days:
        raise FeatureError(f"day {day} beyond study length {cube.n_days}")
    series = cube.series(drug, state).astype(float)
    return FeatureRow(drug, state, day, _row_attrs(series[:, 0], series[:, 1], day))


def _series_attrs(series: np.ndarray, n_days: int) -> np.ndarray:
    """All attribute rows for one (drug, state) series, days WARMUP_DAYS..n_days-1.

    Vectorized equivalent of _row_attrs per day; returns (n_rows, 20).
    """
    days = np.arange(WARMUP_DAYS, n_days)
    out = np.empty((days.size, N_ATTRS))
    for ch, base in ((0, 0), (1, 7)):
        y = series[:, ch].astype(float)
        for i, k in enumerate(SLOPE_WEEKS):
            length = 7 * k
            wins = sliding_window_view(y, length)  # wins[s] covers days s..s+length-1
            slopes = wins @ _slope_coefficients(length)
            out[:, base + i] = slopes[days - length + 1]
        csum = np.concatenate([[0.0], np.cumsum(y)])
        for j, (a, b) in enumerate(RATIO_PAIRS):
            short_mean = (csum[days + 1] - csum[days + 1 - a]) / a
            long_mean = (csum[days + 1] - csum[days + 1 - b]) / b
            out[:, 14 + 3 * ch + j] = (short_mean + RATIO_ALPHA) / (long_mean + RATIO_ALPHA)
    return out


def extract_all_features(cube: CountCube) -> list[FeatureRow]:
    """Feature rows for every (drug, state) in the cube, ordered (drug, state, day)."""
    rows: list[FeatureRow] = []
    for (drug, state) in sorted(cube.counts):
        attrs = _series_attrs(cube.counts[(drug, state)], cube.n_days)
        rows.extend(
            FeatureRow(drug, state, WARMUP_DAYS + i, attrs[i])
            for i in range(attrs.shape[0])
        )
    return rows


def first_recall_days(recalls: list[RecallRecord],
                      window: StudyWindow | None = None) -> dict[tuple[str, str], int]:
    """Earliest recall day index per (drug, state)."""
    window = window or StudyWindow()
    first: dict[tuple[str, str], int] = {}
    for rec in recalls:
        day = window.day_index(rec.initiation_date)
        for state in rec.states:
            key = (rec.drug, state)
            if key not in first or day < first[key]:
                first[key] = day
    return first


def apply_censoring(rows: list[FeatureRow], recalls: list[RecallRecord],
                    window: StudyWindow | None = None) -> list[FeatureRow]:
    """Drop all rows at or after the first recall day of their (drug, state)."""
    first = first_recall_days(recalls, window)
    return [
        r for r in rows
        if r.day < first.get((r.drug, r.state), np.inf)
    ]


def write_features_csv(rows: list[FeatureRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["drug", "state", "day"] + FEATURE_NAMES)
        for r in rows:
            w.writerow([r.drug, r.state, r.day] + [repr(float(v)) for v in r.attrs])


def read_features_csv(path) -> list[FeatureRow]:
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = set(FEATURE_NAMES) - set(reader.fieldnames or ())
        if missing:
            raise FeatureError(f"{path}: missing feature columns {sorted(missing)}")
        for row in reader:
            attrs = np.array([float(row[name]) for name in FEATURE_NAMES])
            rows.append(FeatureRow(row["drug"], row["state"], int(row["day"]), attrs))
    return rows
