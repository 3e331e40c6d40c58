"""Codebook encodings of rotated diagrams: bag of words, VLAD and Fisher vectors.

Points live in the rotated plane (birth, persistence). Only finite bars of
the selected homology dimension are used.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.utils.validation import check_is_fitted

from ..functions import ramp_weight
from ..persistence import rotate
from ..utils import check_diagram_corpus, check_random_state, select_bars
from ._base import DiagramTransformer

__all__ = [
    "Codebook",
    "GmmModel",
    "kmeans",
    "fit_codebook",
    "pbow",
    "pvlad",
    "fit_gmm",
    "pfv",
    "gmm_log_likelihood",
    "PersistenceBoW",
    "PersistenceVLAD",
    "PersistenceFisherVector",
]

VARIANCE_FLOOR = 1e-6


@dataclass(frozen=True)
class Codebook:
    centers: np.ndarray
    weighted: bool = False
    t1: float | None = None
    t2: float | None = None
    homology_dim: int = 1

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float).reshape(-1, 2)
        if len(c) < 1 or not np.all(np.isfinite(c)):
            raise ValueError("codebook needs at least one finite center")
        object.__setattr__(self, "centers", c)

    @property
    def k(self):
        return len(self.centers)

    def weights(self, pts):
        if not self.weighted:
            return np.ones(len(pts))
        return ramp_weight(pts[:, 1], self.t1, self.t2)


@dataclass
class GmmModel:
    """Diagonal-covariance Gaussian mixture on the rotated plane."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_likelihoods: list = field(default_factory=list)
    homology_dim: int = 1

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        self.means = np.asarray(self.means, dtype=float).reshape(-1, 2)
        self.variances = np.asarray(self.variances, dtype=float).reshape(-1, 2)
        m = len(self.weights)
        if m < 1 or self.means.shape != (m, 2) or self.variances.shape != (m, 2):
            raise ValueError("inconsistent GMM parameter shapes")
        if np.any(self.weights <= 0) or abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("GMM weights must be positive and sum to 1")
        if np.any(self.variances < VARIANCE_FLOOR * (1 - 1e-12)):
            raise ValueError("GMM variances below floor")

    @property
    def m(self):
        return len(self.weights)


def _rotated_points(d, homology_dim):
    bars = select_bars(d, homology_dim)
    if len(bars):
        bars = bars[np.isfinite(bars[:, 1])]
    return rotate(bars)


def _corpus_points(corpus, homology_dim):
    corpus = check_diagram_corpus(corpus)
    pts = [_rotated_points(d, homology_dim) for d in corpus]
    return np.vstack(pts) if pts else np.zeros((0, 2))


def _sq_dists(pts, centers):
    return ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def kmeans(pts, k, weights=None, seed=0, tol=1e-6, max_iter=100):
    """Weighted Lloyd iterations from a seeded k-means++ start.

    Stops when no center moves more than ``tol`` or after ``max_iter``
    iterations. Returns ``(centers, labels)``.
    """
    pts = np.asarray(pts, dtype=float)
    n = len(pts)
    if n < k:
        raise ValueError(f"need at least {k} points for {k} clusters, got {n}")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    rng = check_random_state(seed)
    # seeding probabilities prefer positive-weight points when any exist
    base = w if w.sum() > 0 else np.ones(n)
    centers = np.empty((k, 2))
    centers[0] = pts[rng.choice(n, p=base / base.sum())]
    closest = ((pts - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        score = base * closest
        total = score.sum()
        if total <= 0:
            idx = rng.choice(n, p=base / base.sum())
        else:
            idx = rng.choice(n, p=score / total)
        centers[c] = pts[idx]
        closest = np.minimum(closest, ((pts - centers[c]) ** 2).sum(axis=1))

    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        labels = np.argmin(_sq_dists(pts, centers), axis=1)
        new = centers.copy()
        for c in range(k):
            mask = labels == c
            mass = w[mask].sum()
            if mass > 0:
                new[c] = (w[mask, None] * pts[mask]).sum(axis=0) / mass
        shift = np.sqrt(((new - centers) ** 2).sum(axis=1)).max()
        centers = new
        if shift < tol:
            break
    labels = np.argmin(_sq_dists(pts, centers), axis=1)
    return centers, labels


def fit_codebook(corpus, k, weighted=False, seed=0, homology_dim=1) -> Codebook:
    """Cluster the pooled rotated points of a training corpus into ``k`` codewords.

    A weighted codebook weights each point by the persistence ramp with
    thresholds at the 0.05 and 0.95 quantiles of the corpus persistences.
    """
    pts = _corpus_points(corpus, homology_dim)
    if len(pts) < k:
        raise ValueError(f"corpus has {len(pts)} points, fewer than k={k}")
    t1 = t2 = None
    w = None
    if weighted:
        t1 = float(np.quantile(pts[:, 1], 0.05))
        t2 = float(np.quantile(pts[:, 1], 0.95))
        if not t2 > t1:
            t2 = t1 + 1e-12 + 1e-9 * abs(t1)
        w = ramp_weight(pts[:, 1], t1, t2)
    centers, _ = kmeans(pts, k, weights=w, seed=seed)
    return Codebook(centers, weighted=weighted, t1=t1, t2=t2, homology_dim=homology_dim)


def pbow(d, cb: Codebook) -> np.ndarray:
    """Per-codeword assignment counts (persistence-weighted for weighted codebooks)."""
    pts = _rotated_points(d, cb.homology_dim)
    out = np.zeros(cb.k)
    if len(pts):
        labels = np.argmin(_sq_dists(pts, cb.centers), axis=1)
        np.add.at(out, labels, cb.weights(pts))
    return out


def pvlad(d, cb: Codebook) -> np.ndarray:
    """Summed residuals to the nearest codeword, concatenated per codeword."""
    pts = _rotated_points(d, cb.homology_dim)
    out = np.zeros((cb.k, 2))
    if len(pts):
        labels = np.argmin(_sq_dists(pts, cb.centers), axis=1)
        np.add.at(out, labels, pts - cb.centers[labels])
    return out.reshape(-1)


def _component_log_pdf(pts, means, variances):
    """log N(x | mu_i, diag(var_i)) for every point/component pair."""
    diff = pts[:, None, :] - means[None, :, :]
    return -0.5 * ((diff**2) / variances[None]).sum(axis=2) - np.log(2 * np.pi) - 0.5 * np.log(variances.prod(axis=1))[None]


def _log_joint(pts, weights, means, variances):
    return _component_log_pdf(pts, means, variances) + np.log(weights)[None, :]


def _logsumexp(a, axis):
    mx = a.max(axis=axis, keepdims=True)
    return (mx + np.log(np.exp(a - mx).sum(axis=axis, keepdims=True))).squeeze(axis)


def gmm_log_likelihood(pts, g: GmmModel) -> float:
    """Sum over points of ``log sum_i w_i p_i(x)``."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if not len(pts):
        return 0.0
    return float(_logsumexp(_log_joint(pts, g.weights, g.means, g.variances), axis=1).sum())


def _em(pts, m, seed, max_iter, tol):
    centers, labels = kmeans(pts, m, seed=seed)
    n = len(pts)
    weights = np.bincount(labels, minlength=m).astype(float) / n
    weights = np.maximum(weights, 1.0 / (10 * n))
    weights /= weights.sum()
    means = centers.copy()
    overall = np.maximum(pts.var(axis=0), VARIANCE_FLOOR)
    variances = np.empty((m, 2))
    for c in range(m):
        sel = pts[labels == c]
        variances[c] = np.maximum(sel.var(axis=0), VARIANCE_FLOOR) if len(sel) > 1 else overall
    history = []
    degenerate = False
    for _ in range(max_iter):
        log_joint = _log_joint(pts, weights, means, variances)
        norm = _logsumexp(log_joint, axis=1)
        ll = float(norm.sum())
        if history and ll - history[-1] < tol:
            history.append(ll)
            break
        history.append(ll)
        resp = np.exp(log_joint - norm[:, None])
        mass = resp.sum(axis=0)
        if np.any(mass < 1e-10) or np.any(
            (mass < 1.0 + 1e-9) & np.all(variances <= VARIANCE_FLOOR * (1 + 1e-9), axis=1)
        ):
            degenerate = True
            break
        weights = mass / n
        means = (resp.T @ pts) / mass[:, None]
        sq = (resp.T @ (pts**2)) / mass[:, None] - means**2
        variances = np.maximum(sq, VARIANCE_FLOOR)
    return weights, means, variances, history, degenerate


def fit_gmm(corpus, m, seed=0, homology_dim=1, max_iter=200, tol=1e-8, max_restarts=5) -> GmmModel:
    """EM fit of an ``m``-component diagonal GMM to the pooled rotated points.

    Starts from k-means; a collapsed component triggers a restart with the
    next seed (at most ``max_restarts`` times).
    """
    pts = _corpus_points(corpus, homology_dim)
    if len(pts) < m:
        raise ValueError(f"corpus has {len(pts)} points, fewer than m={m}")
    for attempt in range(max_restarts + 1):
        weights, means, variances, history, degenerate = _em(pts, m, seed + attempt, max_iter, tol)
        if not degenerate:
            break
    else:
        warnings.warn("GMM kept a degenerate component after all restarts", RuntimeWarning, stacklevel=2)
    weights = weights / weights.sum()
    return GmmModel(weights, means, variances, log_likelihoods=history, homology_dim=homology_dim)


def pfv(d, g: GmmModel) -> np.ndarray:
    """Fisher vector: gradient of the diagram log-likelihood.

    Returns ``dF/dmu`` for every component (2m values, component-major) then
    ``dF/dvar`` with respect to each diagonal covariance entry (2m values).
    """
    return pfv_points(_rotated_points(d, g.homology_dim), g)


def pfv_points(pts, g: GmmModel) -> np.ndarray:
    """:func:`pfv` on already-rotated points."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if not len(pts):
        return np.zeros(4 * g.m)
    log_joint = _log_joint(pts, g.weights, g.means, g.variances)
    resp = np.exp(log_joint - _logsumexp(log_joint, axis=1)[:, None])
    diff = pts[:, None, :] - g.means[None, :, :]
    var = g.variances[None]
    d_mu = (resp[:, :, None] * diff / var).sum(axis=0)
    d_var = (resp[:, :, None] * (diff**2 / (2 * var**2) - 1 / (2 * var))).sum(axis=0)
    return np.concatenate([d_mu.reshape(-1), d_var.reshape(-1)])


class PersistenceBoW(DiagramTransformer):
    """Bag-of-words encoding against a k-means codebook fitted in ``fit``."""

    def __init__(self, n_words=10, weighted=False, homology_dim=1, random_state=0):
        self.n_words = n_words
        self.weighted = weighted
        self.homology_dim = homology_dim
        self.random_state = random_state

    def fit(self, X, y=None):
        self.codebook_ = fit_codebook(X, self.n_words, self.weighted, self.random_state, self.homology_dim)
        self.n_features_out_ = self.n_words
        return self

    def _feature_names(self):
        return [f"H{self.homology_dim}_bow{i}" for i in range(self.n_words)]

    def _transform_one(self, d):
        check_is_fitted(self, "codebook_")
        return pbow(d, self.codebook_)


class PersistenceVLAD(PersistenceBoW):
    def fit(self, X, y=None):
        super().fit(X, y)
        self.n_features_out_ = 2 * self.n_words
        return self

    def _feature_names(self):
        k = self.homology_dim
        return [f"H{k}_vlad{i}_{ax}" for i in range(self.n_words) for ax in ("birth", "pers")]

    def _transform_one(self, d):
        return pvlad(d, self.codebook_)


class PersistenceFisherVector(DiagramTransformer):
    def __init__(self, n_components=3, homology_dim=1, random_state=0):
        self.n_components = n_components
        self.homology_dim = homology_dim
        self.random_state = random_state

    def fit(self, X, y=None):
        self.gmm_ = fit_gmm(X, self.n_components, seed=self.random_state, homology_dim=self.homology_dim)
        self.n_features_out_ = 4 * self.n_components
        return self

    def _feature_names(self):
        k, m = self.homology_dim, self.n_components
        mu = [f"H{k}_fv_dmu{i}_{ax}" for i in range(m) for ax in ("birth", "pers")]
        var = [f"H{k}_fv_dvar{i}_{ax}" for i in range(m) for ax in ("birth", "pers")]
        return mu + var

    def _transform_one(self, d):
        return pfv(d, self.gmm_)
