"""Metrics and meta-analyses: ROC/AUC, lift, rank regression, Spearman,
top-fraction strata comparison, pruning and horizon sweeps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import labeling, model
from .ingest import RecallRecord, StudyWindow
from .features import FeatureRow

DEFAULT_LIFT_FRACTION = 0.05


class EvalError(ValueError):
    pass


# ---------------------------------------------------------------------------
# ROC / AUC

@dataclass
class RocResult:
    points: np.ndarray  # (m, 2) rows of (fpr, tpr), (0,0) .. (1,1)
    auc: float


def roc_auc(scores, labels) -> RocResult:
    """ROC curve from a threshold sweep plus the tie-corrected pairwise AUC."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int)
    if s.shape != y.shape or s.ndim != 1:
        raise EvalError("scores and labels must be matching 1-D arrays")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise EvalError("both classes must be present")
    # Mann-Whitney with average ranks handles ties exactly
    ranks = sps.rankdata(s)
    auc = (ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)
    order = np.argsort(-s, kind="stable")
    s_sorted, y_sorted = s[order], y[order]
    tps = np.cumsum(y_sorted == 1)
    fps = np.cumsum(y_sorted == 0)
    # one curve point per distinct score (ties merged)
    last_of_block = np.nonzero(np.diff(s_sorted, append=np.nan))[0]
    tpr = tps[last_of_block] / n_pos
    fpr = fps[last_of_block] / n_neg
    points = np.vstack([[0.0, 0.0], np.column_stack([fpr, tpr])])
    if points[-1, 0] != 1.0 or points[-1, 1] != 1.0:
        points = np.vstack([points, [1.0, 1.0]])
    return RocResult(points, float(auc))


# ---------------------------------------------------------------------------
# lift

@dataclass
class LiftResult:
    fraction: float
    lift: float
    n_top: int
    positives_in_top: int


def _ranked_order(scores: np.ndarray, keys) -> np.ndarray:
    """Descending score order; ties broken by canonical example key."""
    n = scores.size
    if keys is None:
        keys = np.arange(n)
    idx = sorted(range(n), key=lambda i: (-scores[i], keys[i]))
    return np.array(idx, dtype=int)


def lift_at(scores, labels, fraction: float, keys=None) -> LiftResult:
    """Positives captured in the top fraction vs a random same-size sample."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int)
    if not 0 < fraction <= 1:
        raise EvalError(f"fraction must be in (0, 1], got {fraction}")
    n = s.size
    n_pos = int((y == 1).sum())
    if n_pos == 0:
        raise EvalError("no positive examples")
    n_top = math.ceil(fraction * n)
    order = _ranked_order(s, keys)
    hits = int(y[order[:n_top]].sum())
    lift = hits / (n_top * (n_pos / n))
    return LiftResult(fraction, float(lift), n_top, hits)


def lift_curve(scores, labels, grid, keys=None) -> np.ndarray:
    """(fraction, lift) pairs over a grid of fractions."""
    return np.array([[t, lift_at(scores, labels, t, keys).lift] for t in grid])


# ---------------------------------------------------------------------------
# rank regression and Spearman correlation

@dataclass
class RankRegressionResult:
    slopes: np.ndarray
    std_errors: np.ndarray
    p_values: np.ndarray
    r_squared: float
    model_p_value: float
    intercept: float


def rank_regression(y, X) -> RankRegressionResult:
    """OLS on average ranks of the response and each predictor column."""
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, p = X.shape
    if y.shape != (n,) or n < 3:
        raise EvalError("need >= 3 observations with matching response")
    ry = sps.rankdata(y)
    rX = np.column_stack([sps.rankdata(X[:, j]) for j in range(p)])
    design = np.column_stack([np.ones(n), rX])
    if np.linalg.matrix_rank(design) < p + 1:
        raise EvalError("rank-degenerate predictors")
    coef, _, _, _ = np.linalg.lstsq(design, ry, rcond=None)
    resid = ry - design @ coef
    dof = n - p - 1
    if dof < 1:
        raise EvalError("not enough residual degrees of freedom")
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(design.T @ design)
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, coef / se, np.inf * np.sign(coef))
    pvals = 2.0 * sps.t.sf(np.abs(t), dof)
    ss_tot = float(((ry - ry.mean()) ** 2).sum())
    ss_res = float(resid @ resid)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    if r2 >= 1.0:
        model_p = 0.0
    else:
        f_stat = (r2 / p) / ((1.0 - r2) / dof)
        model_p = float(sps.f.sf(f_stat, p, dof))
    return RankRegressionResult(coef[1:], se[1:], pvals[1:], r2, model_p, float(coef[0]))


def spearman(x, y) -> tuple[float, float]:
    """Rank correlation with the t-approximation p-value."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 3:
        raise EvalError("need matching 1-D arrays of length >= 3")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise EvalError("constant input")
    rx, ry = sps.rankdata(x), sps.rankdata(y)
    rho = float(np.corrcoef(rx, ry)[0, 1])
    rho = max(-1.0, min(1.0, rho))
    n = x.size
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return rho, float(2.0 * sps.t.sf(abs(t), n - 2))


# ---------------------------------------------------------------------------
# strata analysis of the top-ranked fraction

@dataclass
class StrataReport:
    fraction: float
    n_top_positives: int
    n_positives: int
    # stratification name -> stratum -> (top_prop, overall_prop, relative or None)
    strata: dict


def strata_analysis(examples: list[labeling.LabeledExample], scores,
                    fraction: float = DEFAULT_LIFT_FRACTION) -> StrataReport:
    """Compare recall-class and RX/OTC mixes of top-ranked positives vs all positives.

    Relative likelihood per stratum = (share among top-set positives /
    share among all positives) - 1; strata absent overall are reported as
    undefined (None), never as zero.
    """
    s = np.asarray(scores, dtype=float)
    y = np.array([e.label for e in examples], dtype=int)
    if s.size != len(examples):
        raise EvalError("scores must match examples")
    if int(y.sum()) == 0:
        raise EvalError("no positive examples with metadata")
    keys = [e.key for e in examples]
    order = _ranked_order(s, keys)
    n_top = math.ceil(fraction * len(examples))
    top = set(order[:n_top].tolist())
    positives = [(i, e) for i, e in enumerate(examples) if e.label == 1]
    top_pos = [e for i, e in positives if i in top]
    report: dict[str, dict] = {}
    for name, getter, values in (
        ("classification", lambda e: e.classification, ("I", "II", "III")),
        ("rx_otc", lambda e: e.rx_otc, ("RX", "OTC", "UNCLASSIFIED")),
    ):
        table = {}
        for value in values:
            overall = sum(1 for _, e in positives if getter(e) == value) / len(positives)
            if overall == 0:
                table[value] = (None, 0.0, None)
                continue
            top_prop = (
                sum(1 for e in top_pos if getter(e) == value) / len(top_pos)
                if top_pos else 0.0
            )
            table[value] = (top_prop, overall, top_prop / overall - 1.0)
        report[name] = table
    return StrataReport(fraction, len(top_pos), len(positives), report)


# ---------------------------------------------------------------------------
# sweeps

def prune_sweep(ensemble: model.Ensemble, examples: list[labeling.LabeledExample],
                m_grid, fraction: float = DEFAULT_LIFT_FRACTION) -> list[tuple[int, float]]:
    """lift@fraction as a function of the number of (largest) clusters used."""
    X, y = labeling.to_arrays(examples)
    keys = [e.key for e in examples]
    out = []
    for m in m_grid:
        if not 1 <= m <= ensemble.n_members:
            raise EvalError(f"m={m} outside [1, {ensemble.n_members}]")
        scores = model.ensemble_scores(ensemble, X, prune_m=int(m))
        out.append((int(m), lift_at(scores, y, fraction, keys).lift))
    return out


@dataclass
class HorizonPoint:
    horizon: int
    auc: float
    lift: float
    positives_in_test: int


def run_horizon(rows: list[FeatureRow], recalls: list[RecallRecord], horizon: int,
                k: int, ridge_lambda: float, seed: int,
                train_end_day: int = labeling.DEFAULT_TRAIN_END_DAY,
                fraction: float = DEFAULT_LIFT_FRACTION,
                window: StudyWindow | None = None):
    """Label, split, train and evaluate one horizon; rows must be censored."""
    examples = labeling.label_examples(rows, recalls, horizon, window)
    examples = labeling.post_recall_exclusion(examples, recalls, window)
    split = labeling.split_by_time(examples, train_end_day)
    X_train, y_train = labeling.to_arrays(split.train)
    ensemble = model.train_ensemble(X_train, y_train, k=k,
                                    ridge_lambda=ridge_lambda, seed=seed)
    X_test, y_test = labeling.to_arrays(split.test)
    scores = model.ensemble_scores(ensemble, X_test)
    keys = [e.key for e in split.test]
    roc = roc_auc(scores, y_test)
    lift = lift_at(scores, y_test, fraction, keys)
    point = HorizonPoint(horizon, roc.auc, lift.lift, int(y_test.sum()))
    return ensemble, split, scores, point


def horizon_sweep(rows: list[FeatureRow], recalls: list[RecallRecord], n_grid,
                  k: int, ridge_lambda: float, seed: int,
                  train_end_day: int = labeling.DEFAULT_TRAIN_END_DAY,
                  fraction: float = DEFAULT_LIFT_FRACTION,
                  window: StudyWindow | None = None) -> list[HorizonPoint]:
    """Full retrain and evaluation per horizon, assembled in grid order."""
    points = []
    for n in n_grid:
        _, _, _, point = run_horizon(rows, recalls, int(n), k, ridge_lambda, seed,
                                     train_end_day, fraction, window)
        points.append(point)
    return points


def horizon_regressions(points: list[HorizonPoint]):
    """Table-style rank regressions of AUC and lift on (horizon, test positives).

    Constant predictor columns (possible at desk scale, where every
    horizon may see the same test positives) are dropped rather than
    tripping the rank-degeneracy error. Returns
    {"auc": (result, predictor_names), "lift": (result, predictor_names)}.
    """
    n = np.array([p.horizon for p in points], dtype=float)
    pos = np.array([p.positives_in_test for p in points], dtype=float)
    columns = [("horizon", n), ("positives_in_test", pos)]
    used = [(name, col) for name, col in columns if not np.all(col == col[0])]
    if not used:
        raise EvalError("all predictors are constant")
    X = np.column_stack([col for _, col in used])
    names = [name for name, _ in used]
    return {
        "auc": (rank_regression([p.auc for p in points], X), names),
        "lift": (rank_regression([p.lift for p in points], X), names),
    }
