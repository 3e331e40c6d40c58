"""Near-zero-variance filtering, standardisation and PCA for feature matrices."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

__all__ = ["NearZeroVarianceScaler", "PCA", "preprocess", "pca"]


class NearZeroVarianceScaler(TransformerMixin, BaseEstimator):
    """Drop (near-)constant columns, then standardise the rest.

    A column is dropped when its variance is below ``threshold`` or it has
    fewer than two distinct values. Statistics come from ``fit`` and are
    replayed unchanged by ``transform``.
    """

    def __init__(self, threshold=1e-12):
        self.threshold = threshold

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        var = X.var(axis=0)
        distinct = np.array([len(np.unique(col)) for col in X.T])
        keep = (var >= self.threshold) & (distinct >= 2)
        if not np.any(keep):
            raise ValueError("every column has near-zero variance; nothing left to keep")
        self.support_ = keep
        self.mean_ = X[:, keep].mean(axis=0)
        self.scale_ = X[:, keep].std(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "support_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return (X[:, self.support_] - self.mean_) / self.scale_

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "support_")
        if input_features is None:
            input_features = [f"x{i}" for i in range(self.n_features_in_)]
        return np.asarray(input_features, dtype=object)[self.support_]


class PCA(TransformerMixin, BaseEstimator):
    """Principal components by symmetric eigendecomposition.

    Uses the ``p x p`` covariance when ``p <= n`` and the ``n x n`` Gram
    matrix of the centred data otherwise.
    """

    def __init__(self, n_components=30):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        n, p = X.shape
        k = self.n_components
        if not 1 <= k <= min(n - 1, p):
            raise ValueError(f"n_components={k} out of range [1, {min(n - 1, p)}]")
        self.mean_ = X.mean(axis=0)
        Xc = X - self.mean_
        if p <= n:
            evals, evecs = np.linalg.eigh(Xc.T @ Xc / (n - 1))
            order = np.argsort(evals)[::-1]
            evals, evecs = evals[order], evecs[:, order]
            comps = evecs[:, :k].T
        else:
            evals, u = np.linalg.eigh(Xc @ Xc.T / (n - 1))
            order = np.argsort(evals)[::-1]
            evals, u = evals[order], u[:, order]
            lam = np.maximum(evals[:k], 0.0)
            comps = (Xc.T @ u[:, :k]) / np.sqrt(np.maximum(lam * (n - 1), np.finfo(float).tiny))
            comps = comps.T
            # re-orthonormalise against round-off in tiny-variance directions
            q, r = np.linalg.qr(comps.T)
            comps = (q * np.sign(np.diag(r))).T
        # deterministic sign: largest-magnitude loading positive
        signs = np.sign(comps[np.arange(k), np.argmax(np.abs(comps), axis=1)])
        signs[signs == 0] = 1.0
        self.components_ = comps * signs[:, None]
        self.explained_variance_ = np.maximum(evals[:k], 0.0)
        self.total_variance_ = float(np.maximum(evals, 0.0).sum())
        self.n_features_in_ = p
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=float)
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z):
        check_is_fitted(self, "components_")
        return np.asarray(Z) @ self.components_ + self.mean_


def preprocess(X):
    """Fit a :class:`NearZeroVarianceScaler` and return ``(X_out, scaler)``."""
    scaler = NearZeroVarianceScaler().fit(X)
    return scaler.transform(X), scaler


def pca(X, k):
    """Fit :class:`PCA` and return ``(scores, components)``."""
    model = PCA(k).fit(X)
    return model.transform(X), model.components_
