"""Kernel SVM trained by SMO, with one-vs-rest multiclass."""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field

import numba
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

__all__ = ["SvmConfig", "SvmModel", "smo", "svm_train", "svm_decision", "kernel_matrix", "SVC"]

SVM_KERNELS = ("linear", "rbf", "precomputed")


@dataclass(frozen=True)
class SvmConfig:
    kernel: str = "rbf"
    C: float = 1.0
    gamma: float = 1.0
    tol: float = 1e-3
    max_iter: int = 1_000_000

    def __post_init__(self):
        if self.kernel not in SVM_KERNELS:
            raise ValueError(f"kernel must be one of {SVM_KERNELS}")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if self.kernel == "rbf" and not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class SvmModel:
    """Binary model: ``f(x) = sum_i coef_i k(x, x_i) + bias`` over support indices."""

    support: np.ndarray
    dual_coef: np.ndarray
    bias: float
    config: SvmConfig
    labels: tuple = (-1, 1)
    alpha: np.ndarray = field(default=None, repr=False)
    objective: np.ndarray = field(default=None, repr=False)
    converged: bool = True


def kernel_matrix(A, B, kernel, gamma=1.0):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if kernel == "linear":
        return A @ B.T
    if kernel == "rbf":
        sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2 * A @ B.T
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise ValueError(f"cannot build a {kernel!r} kernel from features")


@numba.njit(cache=True)
def _smo_core(K, y, C, tol, max_iter):
    n = K.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 0.5 a'Qa - e'a with Q_ij = y_i y_j K_ij
    hist = np.empty(max_iter + 1)
    hist[0] = 0.0
    it = 0
    converged = False
    while it < max_iter:
        i = -1
        j = -1
        gmax = -np.inf
        gmin = np.inf
        for t in range(n):
            v = -y[t] * grad[t]
            up = (y[t] > 0 and alpha[t] < C) or (y[t] < 0 and alpha[t] > 0)
            low = (y[t] > 0 and alpha[t] > 0) or (y[t] < 0 and alpha[t] < C)
            if up and v > gmax:
                gmax = v
                i = t
            if low and v < gmin:
                gmin = v
                j = t
        if i < 0 or j < 0 or gmax - gmin < tol:
            converged = True
            break
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if eta <= 1e-12:
            eta = 1e-12
        step = (gmax - gmin) / eta
        # room along the feasible direction
        room_i = C - alpha[i] if y[i] > 0 else alpha[i]
        room_j = alpha[j] if y[j] > 0 else C - alpha[j]
        if step > room_i:
            step = room_i
        if step > room_j:
            step = room_j
        di = y[i] * step
        dj = -y[j] * step
        alpha[i] += di
        alpha[j] += dj
        # snap to the box to keep constraints exact
        for t in (i, j):
            if alpha[t] < 1e-14 * C:
                alpha[t] = 0.0
            elif alpha[t] > C * (1 - 1e-14):
                alpha[t] = C
        for t in range(n):
            grad[t] += y[t] * (y[i] * K[t, i] * di + y[j] * K[t, j] * dj)
        it += 1
        obj = 0.0
        for t in range(n):
            obj += alpha[t] * (grad[t] - 1.0)
        hist[it] = -0.5 * obj
    return alpha, grad, hist[: it + 1], converged


def _bias(alpha, grad, y, C):
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if np.any(free):
        rho = float(yg[free].mean())
    else:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        # with every alpha at a bound, rho is only bracketed; take the midpoint
        ub = yg[up].min() if np.any(up) else yg[low].max()
        lb = yg[low].max() if np.any(low) else ub
        rho = 0.5 * float(ub + lb)
    return -rho


def smo(K, y, C=1.0, tol=1e-3, max_iter=1_000_000):
    """Solve the SVM dual on Gram matrix ``K`` with labels in {-1, +1}.

    Working pairs are chosen by maximal KKT violation. Returns
    ``(alpha, bias, objective_history, converged)``; the dual objective
    history is non-decreasing.
    """
    K = np.ascontiguousarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    alpha, grad, hist, converged = _smo_core(K, y, float(C), float(tol), int(max_iter))
    if not converged:
        warnings.warn("SMO hit max_iter before meeting the KKT tolerance", RuntimeWarning, stacklevel=2)
    return alpha, _bias(alpha, grad, y, C), hist, bool(converged)


def _check_precomputed(K):
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("precomputed kernel must be a square matrix")
    if not np.allclose(K, K.T, atol=1e-10 * max(1.0, np.abs(K).max())):
        raise ValueError("precomputed kernel is not symmetric")
    lam = np.linalg.eigvalsh(0.5 * (K + K.T))[0]
    if lam < -1e-8 * max(np.trace(K), 1.0):
        warnings.warn(f"precomputed kernel is not PSD (min eigenvalue {lam:.3g})", RuntimeWarning, stacklevel=3)
    return K


def svm_train(X, y, cfg: SvmConfig) -> SvmModel:
    """Train a binary SVM. ``y`` must hold exactly two distinct values.

    The larger label maps to +1. With ``kernel="precomputed"``, ``X`` is the
    training Gram matrix.
    """
    y = np.asarray(y)
    labels = np.unique(y)
    if len(labels) != 2:
        raise ValueError(f"binary training needs exactly 2 classes, got {len(labels)}")
    ys = np.where(y == labels[1], 1.0, -1.0)
    if cfg.kernel == "precomputed":
        K = _check_precomputed(X)
    else:
        K = kernel_matrix(X, X, cfg.kernel, cfg.gamma)
    if K.shape[0] != len(y):
        raise ValueError("kernel rows do not match label count")
    alpha, b, hist, ok = smo(K, ys, cfg.C, cfg.tol, cfg.max_iter)
    sv = np.flatnonzero(alpha > 0)
    return SvmModel(sv, alpha[sv] * ys[sv], b, cfg, tuple(labels.tolist()), alpha, hist, ok)


def svm_decision(model: SvmModel, K_cross):
    """Decision values from a (n_test, n_train) kernel block."""
    K_cross = np.asarray(K_cross, dtype=float)
    return K_cross[:, model.support] @ model.dual_coef + model.bias


class SVC(ClassifierMixin, BaseEstimator):
    """SMO-trained support vector classifier.

    Multiclass problems use one-vs-rest; the predicted class maximises the
    decision value, with ties going to the smallest class index. Binary
    problems train a single model. With ``kernel="precomputed"`` pass Gram
    matrices: ``fit(K_train)`` and ``predict(K_test_train)``.
    """

    def __init__(self, kernel="rbf", C=1.0, gamma=1.0, tol=1e-3, max_iter=1_000_000):
        self.kernel = kernel
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def _config(self):
        return SvmConfig(self.kernel, float(self.C), float(self.gamma), float(self.tol), int(self.max_iter))

    def fit(self, X, y):
        cfg = self._config()
        if cfg.kernel == "precomputed":
            K = _check_precomputed(check_array(X, dtype=float))
            y = np.asarray(y)
            if len(y) != K.shape[0]:
                raise ValueError("kernel rows do not match label count")
        else:
            X, y = check_X_y(X, y, dtype=float)
            K = kernel_matrix(X, X, cfg.kernel, cfg.gamma)
            self.X_fit_ = X
        return self._fit_gram(K, y, cfg)

    def _fit_gram(self, K, y, cfg=None):
        cfg = cfg or self._config()
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise ValueError("need at least 2 classes")
        self.models_ = []
        targets = [self.classes_[1]] if len(self.classes_) == 2 else list(self.classes_)
        for c in targets:
            ys = np.where(y == c, 1.0, -1.0)
            alpha, b, hist, ok = smo(K, ys, cfg.C, cfg.tol, cfg.max_iter)
            sv = np.flatnonzero(alpha > 0)
            self.models_.append(SvmModel(sv, alpha[sv] * ys[sv], b, cfg, (-1, 1), alpha, hist, ok))
        self.n_train_ = K.shape[0]
        return self

    def _cross_kernel(self, X):
        if self.kernel == "precomputed":
            K = check_array(X, dtype=float)
            if K.shape[1] != self.n_train_:
                raise ValueError(f"expected {self.n_train_} kernel columns, got {K.shape[1]}")
            return K
        X = check_array(X, dtype=float)
        return kernel_matrix(X, self.X_fit_, self.kernel, float(self.gamma))

    def decision_function(self, X):
        check_is_fitted(self, "models_")
        K = self._cross_kernel(X)
        dec = np.column_stack([svm_decision(m, K) for m in self.models_])
        return dec[:, 0] if len(self.classes_) == 2 else dec

    def _predict_from_kernel(self, K):
        dec = np.column_stack([svm_decision(m, K) for m in self.models_])
        if len(self.classes_) == 2:
            return self.classes_[(dec[:, 0] > 0).astype(int)]
        return self.classes_[np.argmax(dec, axis=1)]

    def predict(self, X):
        check_is_fitted(self, "models_")
        return self._predict_from_kernel(self._cross_kernel(X))

    def to_dict(self) -> dict:
        check_is_fitted(self, "models_")
        out = {
            "params": self.get_params(),
            "classes": self.classes_.tolist(),
            "n_train": int(self.n_train_),
            "models": [
                {
                    "support": m.support.tolist(),
                    "dual_coef": m.dual_coef.tolist(),
                    "bias": float(m.bias),
                    "config": asdict(m.config),
                }
                for m in self.models_
            ],
        }
        if self.kernel != "precomputed":
            out["X_fit"] = self.X_fit_.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SVC":
        est = cls(**data["params"])
        est.classes_ = np.asarray(data["classes"])
        est.n_train_ = int(data["n_train"])
        est.models_ = [
            SvmModel(
                np.asarray(m["support"], dtype=np.int64),
                np.asarray(m["dual_coef"], dtype=float),
                float(m["bias"]),
                SvmConfig(**m["config"]),
            )
            for m in data["models"]
        ]
        if "X_fit" in data:
            est.X_fit_ = np.asarray(data["X_fit"], dtype=float)
        return est

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "SVC":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))
