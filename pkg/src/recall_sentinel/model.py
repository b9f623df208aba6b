"""Cluster-bagged linear ensemble for extreme class imbalance.

The majority (negative) class is partitioned with k-means in the
standardized attribute space; one ridge least-squares model with full
pairwise interactions is fit per cluster against all positives, and
scores are fused by taking the maximum over members. Pruning keeps only
the members backed by the largest clusters.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps
from sklearn.base import BaseEstimator

DEFAULT_K = 500
DEFAULT_LAMBDA = 1e-3
KMEANS_TOL = 1e-6
KMEANS_MAX_ITER = 100


class ModelError(ValueError):
    pass


# ---------------------------------------------------------------------------
# interaction expansion

def _pair_indices(d: int) -> np.ndarray:
    i, j = np.triu_indices(d, k=1)
    return np.stack([i, j], axis=1)  # lexicographic (i, j), i < j


def interaction_dim(d: int) -> int:
    return 1 + d + d * (d - 1) // 2


def interaction_map(x) -> np.ndarray:
    """[1, x, all pairwise products x_i*x_j for i<j], deterministic order."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ModelError("interaction_map expects a 1-D vector")
    if not np.all(np.isfinite(x)):
        raise ModelError("non-finite input to interaction_map")
    pairs = _pair_indices(x.size)
    return np.concatenate([[1.0], x, x[pairs[:, 0]] * x[pairs[:, 1]]])


def interaction_matrix(X: np.ndarray) -> np.ndarray:
    """Row-wise interaction_map, as one (n, interaction_dim) array."""
    X = np.asarray(X, dtype=float)
    if not np.all(np.isfinite(X)):
        raise ModelError("non-finite input to interaction_matrix")
    n, d = X.shape
    pairs = _pair_indices(d)
    out = np.empty((n, interaction_dim(d)))
    out[:, 0] = 1.0
    out[:, 1:d + 1] = X
    out[:, d + 1:] = X[:, pairs[:, 0]] * X[:, pairs[:, 1]]
    return out


def term_attributes(d: int) -> list[frozenset[int]]:
    """Attribute indices appearing in each interaction term (bias term: none)."""
    terms = [frozenset()]
    terms += [frozenset({i}) for i in range(d)]
    terms += [frozenset({int(i), int(j)}) for i, j in _pair_indices(d)]
    return terms


# ---------------------------------------------------------------------------
# k-means (k-means++ seeding, Lloyd iterations)

@dataclass
class KMeansResult:
    centroids: np.ndarray
    assignments: np.ndarray
    objective: float
    objective_history: list[float] = field(default_factory=list)


def _sq_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # (n, k) squared Euclidean distances
    return (
        (points ** 2).sum(axis=1)[:, None]
        - 2.0 * points @ centroids.T
        + (centroids ** 2).sum(axis=1)[None, :]
    )


def _plus_plus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[rng.integers(n)]
    d2 = np.maximum(_sq_distances(points, centroids[:1]).ravel(), 0.0)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=d2 / total)
        centroids[c] = points[idx]
        d2 = np.minimum(d2, np.maximum(_sq_distances(points, centroids[c:c + 1]).ravel(), 0.0))
    return centroids


def kmeans(points, k: int, seed: int = 0, tol: float = KMEANS_TOL,
           max_iter: int = KMEANS_MAX_ITER) -> KMeansResult:
    """Seeded k-means++ plus Lloyd iterations; deterministic given seed.

    Empty clusters are re-seeded from the point farthest from its current
    centroid. Nearest-centroid ties break to the lowest cluster index.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ModelError("points must be a non-empty 2-D array")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ModelError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centroids = _plus_plus_init(points, k, rng)
    history: list[float] = []
    assignments = np.zeros(n, dtype=int)
    for _ in range(max_iter):
        d2 = np.maximum(_sq_distances(points, centroids), 0.0)
        assignments = np.argmin(d2, axis=1)
        history.append(float(d2[np.arange(n), assignments].sum()))
        new_centroids = centroids.copy()
        for c in range(k):
            mask = assignments == c
            if mask.any():
                new_centroids[c] = points[mask].mean(axis=0)
            else:
                farthest = int(np.argmax(d2[np.arange(n), assignments]))
                new_centroids[c] = points[farthest]
                assignments[farthest] = c
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if shift < tol:
            break
    d2 = np.maximum(_sq_distances(points, centroids), 0.0)
    assignments = np.argmin(d2, axis=1)
    objective = float(d2[np.arange(n), assignments].sum())
    history.append(objective)
    return KMeansResult(centroids, assignments, objective, history)


# ---------------------------------------------------------------------------
# ridge least squares with classical coefficient statistics

@dataclass
class ClusterClassifier:
    weights: np.ndarray
    cluster_size: int
    stats_valid: bool
    coef_t_stats: np.ndarray | None = None
    coef_p_values: np.ndarray | None = None


def fit_linear(phi: np.ndarray, targets: np.ndarray, ridge_lambda: float = DEFAULT_LAMBDA,
               cluster_size: int = 0) -> ClusterClassifier:
    """Ridge least squares on expanded features; bias column 0 unpenalized.

    Coefficient t-statistics and two-sided p-values use the classical
    least-squares formulas at the ridge point estimate; they are marked
    invalid when residual degrees of freedom < 1.
    """
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(targets, dtype=float)
    if phi.ndim != 2 or y.shape != (phi.shape[0],):
        raise ModelError("phi must be (n, p) with matching targets")
    if np.all(y == y[0]):
        raise ModelError("targets contain a single class/value")
    n, p = phi.shape
    penalty = np.full(p, ridge_lambda)
    penalty[0] = 0.0
    gram = phi.T @ phi + np.diag(penalty)
    try:
        w = np.linalg.solve(gram, phi.T @ y)
    except np.linalg.LinAlgError as exc:
        raise ModelError(f"singular system (lambda={ridge_lambda})") from exc
    dof = n - p
    if dof >= 1:
        resid = y - phi @ w
        sigma2 = float(resid @ resid) / dof
        cov_diag = np.diag(np.linalg.inv(gram)) * sigma2
        se = np.sqrt(np.maximum(cov_diag, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(se > 0, w / se, np.where(w == 0, 0.0, np.inf * np.sign(w)))
        pvals = 2.0 * sps.t.sf(np.abs(t), dof)
        return ClusterClassifier(w, cluster_size, True, t, pvals)
    return ClusterClassifier(w, cluster_size, False)


# ---------------------------------------------------------------------------
# standardization and the ensemble

@dataclass
class StandardizationStats:
    mean: np.ndarray
    std: np.ndarray  # zero-variance entries replaced by 1

    @classmethod
    def fit(cls, X: np.ndarray) -> "StandardizationStats":
        X = np.asarray(X, dtype=float)
        std = X.std(axis=0)
        return cls(X.mean(axis=0), np.where(std == 0, 1.0, std))

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std


@dataclass
class Ensemble:
    members: list[ClusterClassifier]  # sorted by cluster_size descending
    standardization: StandardizationStats
    k: int
    ridge_lambda: float
    seed: int

    @property
    def n_members(self) -> int:
        return len(self.members)


def _merge_small_clusters(points: np.ndarray, result: KMeansResult,
                          min_size: int = 2) -> np.ndarray:
    """Reassign members of clusters below min_size to the nearest other centroid."""
    assignments = result.assignments.copy()
    while True:
        sizes = np.bincount(assignments, minlength=result.centroids.shape[0])
        live = sizes >= min_size
        small = np.where((sizes > 0) & ~live)[0]
        if small.size == 0 or live.sum() == 0:
            break
        d2 = _sq_distances(points, result.centroids)
        d2[:, ~live] = np.inf
        for c in small:
            mask = assignments == c
            assignments[mask] = np.argmin(d2[mask], axis=1)
    return assignments


def train_ensemble(X: np.ndarray, y: np.ndarray, k: int = DEFAULT_K,
                   ridge_lambda: float = DEFAULT_LAMBDA, seed: int = 0) -> Ensemble:
    """Fit the cluster-bagged ensemble on a training set.

    X is the raw (n, d) attribute matrix, y the {0,1} labels. Clustering
    runs on standardized negatives; every member is trained on its
    cluster's negatives plus all positives with targets -1/+1.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    pos = y == 1
    neg = ~pos
    n_pos, n_neg = int(pos.sum()), int(neg.sum())
    if n_pos < 1:
        raise ModelError("training set has no positive examples")
    if n_neg < k:
        raise ModelError(f"need at least k={k} negatives, got {n_neg}")
    standardization = StandardizationStats.fit(X)
    Xs = standardization.transform(X)
    neg_points = Xs[neg]
    km = kmeans(neg_points, k, seed=seed)
    assignments = _merge_small_clusters(neg_points, km)
    phi_all = interaction_matrix(Xs)
    phi_pos = phi_all[pos]
    phi_neg = phi_all[neg]
    y_pos = np.ones(n_pos)
    members: list[tuple[int, ClusterClassifier]] = []
    for c in sorted(set(assignments.tolist())):
        mask = assignments == c
        size = int(mask.sum())
        phi = np.vstack([phi_neg[mask], phi_pos])
        targets = np.concatenate([-np.ones(size), y_pos])
        members.append((c, fit_linear(phi, targets, ridge_lambda, cluster_size=size)))
    members.sort(key=lambda item: (-item[1].cluster_size, item[0]))
    return Ensemble([m for _, m in members], standardization, k, ridge_lambda, seed)


def _weight_matrix(ensemble: Ensemble, prune_m: int | None) -> np.ndarray:
    m = ensemble.n_members if prune_m is None else prune_m
    if not 1 <= m <= ensemble.n_members:
        raise ModelError(f"prune_m must be in [1, {ensemble.n_members}], got {m}")
    return np.stack([mem.weights for mem in ensemble.members[:m]])


def ensemble_scores(ensemble: Ensemble, X: np.ndarray,
                    prune_m: int | None = None) -> np.ndarray:
    """Max-fused member scores for each row of the raw (n, d) matrix X."""
    W = _weight_matrix(ensemble, prune_m)
    phi = interaction_matrix(ensemble.standardization.transform(X))
    return (phi @ W.T).max(axis=1)


def predict(ensemble: Ensemble, x, prune_m: int | None = None) -> float:
    """Score a single raw attribute vector."""
    return float(ensemble_scores(ensemble, np.asarray(x, dtype=float)[None, :], prune_m)[0])


# ---------------------------------------------------------------------------
# attribute importance

@dataclass
class ImportanceReport:
    fractions: np.ndarray           # per-attribute credited fraction
    selected: list[int]             # attributes above fraction_threshold
    n_valid_members: int
    alpha: float
    fraction_threshold: float


def attribute_importance(ensemble: Ensemble, alpha: float = 0.05,
                         fraction_threshold: float = 0.2) -> ImportanceReport:
    """Fraction of stats-valid members crediting each attribute.

    A term counts as significant at p < alpha / n_terms (Bonferroni); an
    attribute is credited in a member when any significant term contains
    it, alone or inside an interaction.
    """
    valid = [m for m in ensemble.members if m.stats_valid]
    if not valid:
        raise ModelError("no ensemble member has valid coefficient statistics")
    d = ensemble.standardization.mean.size
    terms = term_attributes(d)
    n_terms = len(terms)
    credited = np.zeros(d)
    for member in valid:
        sig = member.coef_p_values < alpha / n_terms
        hit = np.zeros(d, dtype=bool)
        for t in np.nonzero(sig)[0]:
            for a in terms[t]:
                hit[a] = True
        credited += hit
    fractions = credited / len(valid)
    selected = [int(i) for i in np.nonzero(fractions > fraction_threshold)[0]]
    return ImportanceReport(fractions, selected, len(valid), alpha, fraction_threshold)


# ---------------------------------------------------------------------------
# persistence

def ensemble_to_dict(ensemble: Ensemble) -> dict:
    return {
        "k": ensemble.k,
        "seed": ensemble.seed,
        "ridge_lambda": ensemble.ridge_lambda,
        "standardization": {
            "mean": ensemble.standardization.mean.tolist(),
            "std": ensemble.standardization.std.tolist(),
        },
        "members": [
            {
                "cluster_size": m.cluster_size,
                "weights": m.weights.tolist(),
                "stats_valid": m.stats_valid,
                **({"p_values": m.coef_p_values.tolist()} if m.stats_valid else {}),
            }
            for m in ensemble.members
        ],
    }


def ensemble_from_dict(obj: dict) -> Ensemble:
    members = [
        ClusterClassifier(
            np.array(m["weights"]),
            int(m["cluster_size"]),
            bool(m["stats_valid"]),
            coef_p_values=np.array(m["p_values"]) if m.get("p_values") is not None else None,
        )
        for m in obj["members"]
    ]
    stats = StandardizationStats(
        np.array(obj["standardization"]["mean"]),
        np.array(obj["standardization"]["std"]),
    )
    return Ensemble(members, stats, int(obj["k"]), float(obj["ridge_lambda"]), int(obj["seed"]))


def save_ensemble(ensemble: Ensemble, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(ensemble_to_dict(ensemble), f, indent=1, sort_keys=True)
        f.write("\n")


def load_ensemble(path) -> Ensemble:
    with open(path, encoding="utf-8") as f:
        return ensemble_from_dict(json.load(f))


# ---------------------------------------------------------------------------
# sklearn-style wrapper

class ClusterBaggedClassifier(BaseEstimator):
    """Estimator wrapper around the cluster-bagged ensemble.

    Parameters follow sklearn conventions so the model composes with
    pipelines and grid search. decision_function returns the max-fused
    linear score; predict thresholds it at 0 (the +/-1 target midpoint).
    """

    def __init__(self, k: int = DEFAULT_K, ridge_lambda: float = DEFAULT_LAMBDA,
                 seed: int = 0, prune_m: int | None = None):
        self.k = k
        self.ridge_lambda = ridge_lambda
        self.seed = seed
        self.prune_m = prune_m

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ModelError("X must be (n, d) with matching y")
        if not np.all(np.isfinite(X)):
            raise ModelError("X contains non-finite values")
        self.classes_ = np.array([0, 1])
        self.ensemble_ = train_ensemble(X, y, k=self.k, ridge_lambda=self.ridge_lambda,
                                        seed=self.seed)
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        self._check_fitted()
        return ensemble_scores(self.ensemble_, np.asarray(X, dtype=float), self.prune_m)

    def predict(self, X):
        return (self.decision_function(X) > 0).astype(int)

    def _check_fitted(self):
        if not hasattr(self, "ensemble_"):
            raise ModelError("classifier is not fitted")
