"""Horizon-N labels, post-recall exclusion, and the time-based split."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .features import FEATURE_NAMES, FeatureRow, first_recall_days
from .ingest import RecallRecord, StudyWindow

DEFAULT_TRAIN_END_DAY = 240
MAX_HORIZON = 40


class LabelingError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledExample:
    key: tuple[str, str, int]  # (drug, state, day)
    features: np.ndarray
    label: int
    horizon: int
    classification: str = ""   # recall class when label=1, else empty
    rx_otc: str = ""

    @property
    def day(self) -> int:
        return self.key[2]


@dataclass
class DatasetSplit:
    train: list[LabeledExample]
    test: list[LabeledExample]
    train_end_day: int


def label_examples(rows: list[FeatureRow], recalls: list[RecallRecord],
                   horizon: int, window: StudyWindow | None = None,
                   max_horizon: int = MAX_HORIZON) -> list[LabeledExample]:
    """Label each row 1 iff its (drug, state) first recall lands exactly at day+N.

    Rows whose horizon target falls past the study end are dropped (label
    unobservable). Rows are expected to be censored already.
    """
    if not 1 <= horizon <= max_horizon:
        raise LabelingError(f"horizon must be in [1, {max_horizon}], got {horizon}")
    window = window or StudyWindow()
    first = first_recall_days(recalls, window)
    meta: dict[tuple[str, str], tuple[str, str]] = {}
    for rec in recalls:
        day = window.day_index(rec.initiation_date)
        for state in rec.states:
            key = (rec.drug, state)
            if first.get(key) == day and key not in meta:
                meta[key] = (rec.classification, rec.rx_otc)
    out: list[LabeledExample] = []
    for r in rows:
        target = r.day + horizon
        if target >= window.n_days:
            continue
        key = (r.drug, r.state)
        if first.get(key) == target:
            cls, rx = meta[key]
            out.append(LabeledExample(r.key(), r.attrs, 1, horizon, cls, rx))
        else:
            out.append(LabeledExample(r.key(), r.attrs, 0, horizon))
    return out


def post_recall_exclusion(examples: list[LabeledExample],
                          recalls: list[RecallRecord],
                          window: StudyWindow | None = None) -> list[LabeledExample]:
    """Defense in depth: drop examples at or after their first recall day."""
    first = first_recall_days(recalls, window)
    return [
        e for e in examples
        if e.day < first.get((e.key[0], e.key[1]), np.inf)
    ]


def split_by_time(examples: list[LabeledExample],
                  train_end_day: int = DEFAULT_TRAIN_END_DAY) -> DatasetSplit:
    train = [e for e in examples if e.day < train_end_day]
    test = [e for e in examples if e.day >= train_end_day]
    if not train or not test:
        raise LabelingError(
            f"empty {'train' if not train else 'test'} partition at train_end_day={train_end_day}"
        )
    return DatasetSplit(train, test, train_end_day)


def to_arrays(examples: list[LabeledExample]):
    """(X, y) design matrix and label vector in example order."""
    X = np.array([e.features for e in examples])
    y = np.array([e.label for e in examples], dtype=int)
    return X, y


def write_labeled_csv(examples: list[LabeledExample], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["drug", "state", "day"] + FEATURE_NAMES
                   + ["label", "horizon", "classification", "rx_otc"])
        for e in examples:
            w.writerow(list(e.key) + [repr(float(v)) for v in e.features]
                       + [e.label, e.horizon, e.classification, e.rx_otc])


def read_labeled_csv(path) -> list[LabeledExample]:
    out = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            attrs = np.array([float(row[name]) for name in FEATURE_NAMES])
            out.append(LabeledExample(
                (row["drug"], row["state"], int(row["day"])), attrs,
                int(row["label"]), int(row["horizon"]),
                row["classification"], row["rx_otc"],
            ))
    return out
