"""Transformers sampling functional summaries (Betti curves, landscapes, images, entropy)."""

from __future__ import annotations

import numpy as np

from ..functions import (
    Grid1D,
    ImageParams,
    betti_curve,
    betti_function,
    landscapes,
    persistence_image,
    persistent_entropy,
)
from ..utils import as_bars, check_diagram_corpus, select_bars
from ._base import DiagramTransformer

__all__ = ["BettiCurve", "BettiFunction", "Landscape", "PersistenceImager", "PersistentEntropy"]


class BettiCurve(DiagramTransformer):
    def __init__(self, start=0.0, end=20.0, n_samples=41, homology_dim=1):
        self.start = start
        self.end = end
        self.n_samples = n_samples
        self.homology_dim = homology_dim

    def _grid(self):
        return Grid1D(self.start, self.end, self.n_samples)

    def _feature_names(self):
        return [f"H{self.homology_dim}_betti{i}" for i in range(self.n_samples)]

    def _transform_one(self, d):
        return betti_curve(self._bars(d), self._grid())


class BettiFunction(BettiCurve):
    def _feature_names(self):
        return [f"H{self.homology_dim}_bettifn{i}" for i in range(self.n_samples)]

    def _transform_one(self, d):
        return betti_function(self._bars(d), self._grid())


class Landscape(DiagramTransformer):
    def __init__(self, levels=3, start=0.0, end=20.0, n_samples=41, homology_dim=1):
        self.levels = levels
        self.start = start
        self.end = end
        self.n_samples = n_samples
        self.homology_dim = homology_dim

    def _feature_names(self):
        k = self.homology_dim
        return [f"H{k}_land{m}_{i}" for m in range(1, self.levels + 1) for i in range(self.n_samples)]

    def _transform_one(self, d):
        grid = Grid1D(self.start, self.end, self.n_samples)
        return landscapes(self._bars(d), self.levels, grid).reshape(-1)


class PersistenceImager(DiagramTransformer):
    """Persistence images with corpus-derived defaults.

    Unset parameters are learned in ``fit``: bandwidth 0.1 x the largest
    finite persistence, ramp thresholds at the 0.05 / 0.95 persistence
    quantiles, and a domain spanning the observed births and persistences.
    """

    def __init__(self, resolution=(20, 20), sigma=None, t1=None, t2=None, domain=None, homology_dim=1):
        self.resolution = resolution
        self.sigma = sigma
        self.t1 = t1
        self.t2 = t2
        self.domain = domain
        self.homology_dim = homology_dim

    def fit(self, X, y=None):
        X = check_diagram_corpus(X)
        rows = []
        for d in X:
            b = select_bars(d, self.homology_dim)
            rows.append(b[np.isfinite(b[:, 1])] if len(b) else b)
        b = np.vstack(rows) if rows else np.zeros((0, 2))
        pers = b[:, 1] - b[:, 0] if len(b) else np.array([1.0])
        pmax = float(pers.max()) if pers.max() > 0 else 1.0
        sigma = self.sigma if self.sigma is not None else 0.1 * pmax
        t1 = self.t1 if self.t1 is not None else float(np.quantile(pers, 0.05))
        t2 = self.t2 if self.t2 is not None else float(np.quantile(pers, 0.95))
        if not t2 > t1:
            t2 = t1 + 1e-6 * pmax
        if self.domain is not None:
            domain = tuple(self.domain)
        else:
            bmin = float(b[:, 0].min()) if len(b) else 0.0
            bmax = float(b[:, 0].max()) if len(b) else 1.0
            if bmax <= bmin:
                bmax = bmin + pmax
            domain = (bmin - 3 * sigma, bmax + 3 * sigma, 0.0, pmax + 3 * sigma)
        self.params_ = ImageParams(sigma, t1, t2, tuple(self.resolution), domain)
        self.n_features_out_ = int(np.prod(self.resolution))
        return self

    def _feature_names(self):
        nx, ny = self.resolution
        return [f"H{self.homology_dim}_px{i}_{j}" for i in range(nx) for j in range(ny)]

    def _transform_one(self, d):
        return persistence_image(self._bars(d), self.params_).reshape(-1)


class PersistentEntropy(DiagramTransformer):
    """Entropy per homology dimension (0 for dimensions without finite bars)."""

    def __init__(self, dims=(0, 1, 2)):
        self.dims = dims

    def _feature_names(self):
        return [f"H{k}_entropy" for k in self.dims]

    def _transform_one(self, d):
        out = []
        for k in self.dims:
            b = as_bars(select_bars(d, k))
            finite = b[np.isfinite(b[:, 1])] if len(b) else b
            out.append(persistent_entropy(finite) if len(finite) and np.any(finite[:, 1] > finite[:, 0]) else 0.0)
        return np.array(out)
