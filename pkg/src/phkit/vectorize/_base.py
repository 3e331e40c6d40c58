from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..utils import check_diagram_corpus, select_bars

__all__ = ["FeatureMatrix", "DiagramTransformer"]


@dataclass
class FeatureMatrix:
    """Samples x features with column names and row ids."""

    values: np.ndarray
    columns: list
    ids: list = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("feature matrix must be 2-D")
        n, p = self.values.shape
        self.columns = [str(c) for c in self.columns] if self.columns else [f"f{i}" for i in range(p)]
        if len(self.columns) != p:
            raise ValueError(f"{len(self.columns)} column names for {p} features")
        self.ids = [str(i) for i in self.ids] if self.ids else [str(i) for i in range(n)]
        if len(self.ids) != n:
            raise ValueError(f"{len(self.ids)} ids for {n} rows")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature matrix has non-finite entries")

    @property
    def shape(self):
        return self.values.shape


class DiagramTransformer(TransformerMixin, BaseEstimator):
    """Base for estimators mapping a list of diagrams to a feature array.

    Subclasses implement ``_transform_one`` and ``_feature_names``; stateful
    ones override ``fit``.
    """

    homology_dim = 1

    def fit(self, X, y=None):
        X = check_diagram_corpus(X)
        self.n_features_out_ = len(self._feature_names())
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        X = check_diagram_corpus(X)
        rows = [self._transform_one(d) for d in X]
        out = np.vstack(rows) if rows else np.zeros((0, self.n_features_out_))
        return out.reshape(len(rows), self.n_features_out_)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_features_out_")
        return np.asarray(self._feature_names(), dtype=object)

    def _bars(self, d):
        return select_bars(d, self.homology_dim)

    def _feature_names(self):  # pragma: no cover - abstract
        raise NotImplementedError

    def _transform_one(self, d):  # pragma: no cover - abstract
        raise NotImplementedError
