"""Functional summaries of a single-dimension diagram.

All functions take an ``(N, 2)`` array of (birth, death) bars. Infinite
deaths are capped at the end of the evaluation grid (or image domain)
before anything is evaluated.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .utils import as_bars

__all__ = [
    "Grid1D",
    "ImageParams",
    "betti_curve",
    "betti_function",
    "landscape",
    "landscapes",
    "persistence_surface",
    "persistence_image",
    "persistent_entropy",
    "ramp_weight",
]


@dataclass(frozen=True)
class Grid1D:
    start: float
    end: float
    n: int

    def __post_init__(self):
        if not self.end > self.start:
            raise ValueError("grid end must exceed start")
        if self.n < 2:
            raise ValueError("grid needs at least 2 samples")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.start, self.end, self.n)


@dataclass(frozen=True)
class ImageParams:
    """Persistence-image settings on the (birth, persistence) plane.

    ``domain`` is ``(birth_min, birth_max, pers_min, pers_max)``.
    """

    sigma: float
    t1: float
    t2: float
    resolution: tuple = (20, 20)
    domain: tuple = (0.0, 1.0, 0.0, 1.0)

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not (self.t2 > self.t1 >= 0):
            raise ValueError("weights need t2 > t1 >= 0")
        nx, ny = self.resolution
        if nx < 1 or ny < 1:
            raise ValueError("resolution must be positive")
        x0, x1, y0, y1 = self.domain
        if not (x1 > x0 and y1 > y0):
            raise ValueError("degenerate image domain (zero area)")


def _cap(bars, end):
    bars = as_bars(bars)
    if len(bars):
        bars = bars.copy()
        bars[~np.isfinite(bars[:, 1]), 1] = end
    return bars


def _cap_rotated(bars, pers_max):
    """Cap infinite deaths so their persistence equals ``pers_max``."""
    bars = as_bars(bars)
    if len(bars):
        bars = bars.copy()
        rows = ~np.isfinite(bars[:, 1])
        bars[rows, 1] = bars[rows, 0] + pers_max
    return bars


def betti_curve(bars, grid: Grid1D) -> np.ndarray:
    """Count of bars whose closed interval [birth, death] contains each x."""
    x = grid.x
    b = _cap(bars, grid.end)
    if not len(b):
        return np.zeros_like(x)
    inside = (b[:, 0][None, :] <= x[:, None]) & (x[:, None] <= b[:, 1][None, :])
    return inside.sum(axis=1).astype(float)


def betti_function(bars, grid: Grid1D, weights=None) -> np.ndarray:
    """Smooth Betti function: a Gaussian bump per bar centred at its midpoint.

    The bump width is ``weight * (death - birth)``.
    """
    x = grid.x
    b = _cap(bars, grid.end)
    if weights is None:
        w = np.ones(len(b))
    else:
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.shape != (len(b),):
            raise ValueError("need one weight per bar")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
    length = b[:, 1] - b[:, 0] if len(b) else np.zeros(0)
    keep = length > 0
    if not np.all(keep):
        warnings.warn("skipping zero-length bars in betti_function", RuntimeWarning, stacklevel=2)
        b, w, length = b[keep], w[keep], length[keep]
    if not len(b):
        return np.zeros_like(x)
    mid = 0.5 * (b[:, 0] + b[:, 1])
    z = (x[:, None] - mid[None, :]) / (w * length)[None, :]
    return np.exp(-(z**2)).sum(axis=1)


def _tents(bars, x):
    a = bars[:, 0][None, :]
    b = bars[:, 1][None, :]
    return np.maximum(np.minimum(x[:, None] - a, b - x[:, None]), 0.0)


def landscapes(bars, levels, grid: Grid1D) -> np.ndarray:
    """First ``levels`` landscape functions sampled on ``grid``; shape (levels, n)."""
    if levels < 1:
        raise ValueError("landscape level must be >= 1")
    x = grid.x
    b = _cap(bars, grid.end)
    out = np.zeros((levels, len(x)))
    if not len(b):
        return out
    tents = -np.sort(-_tents(b, x), axis=1)
    m = min(levels, tents.shape[1])
    out[:m] = tents[:, :m].T
    return out


def landscape(bars, m, grid: Grid1D) -> np.ndarray:
    """The m-th landscape function (1-based) sampled on ``grid``."""
    return landscapes(bars, m, grid)[m - 1]


def ramp_weight(y, t1, t2):
    """0 below t1, 1 above t2, linear in between."""
    y = np.asarray(y, dtype=float)
    return np.clip((y - t1) / (t2 - t1), 0.0, 1.0)


def persistence_surface(bars, params: ImageParams, x, y):
    """Weighted Gaussian surface on the rotated plane evaluated at (x, y)."""
    b = _cap_rotated(bars, params.domain[3])
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not len(b):
        return np.zeros(np.broadcast(x, y).shape)
    births = b[:, 0]
    pers = b[:, 1] - b[:, 0]
    s2 = params.sigma**2
    dx = x[..., None] - births
    dy = y[..., None] - pers
    phi = np.exp(-(dx**2 + dy**2) / (2 * s2)) / (2 * np.pi * s2)
    return ramp_weight(y, params.t1, params.t2) * phi.sum(axis=-1)


_GL_NODES = np.array([-1.0, 1.0]) / np.sqrt(3.0)


def persistence_image(bars, params: ImageParams) -> np.ndarray:
    """Pixel integrals of the persistence surface, shape ``(nx, ny)``.

    Each pixel is integrated with 2-point Gauss-Legendre quadrature per axis.
    Infinite deaths are capped so their persistence reaches the domain top.
    """
    nx, ny = params.resolution
    x0, x1, y0, y1 = params.domain
    b = _cap_rotated(bars, y1)
    ex = np.linspace(x0, x1, nx + 1)
    ey = np.linspace(y0, y1, ny + 1)
    hx = np.diff(ex)[0]
    hy = np.diff(ey)[0]
    cx = 0.5 * (ex[:-1] + ex[1:])
    cy = 0.5 * (ey[:-1] + ey[1:])
    qx = (cx[:, None] + 0.5 * hx * _GL_NODES[None, :]).reshape(-1)
    qy = (cy[:, None] + 0.5 * hy * _GL_NODES[None, :]).reshape(-1)
    X, Y = np.meshgrid(qx, qy, indexing="ij")
    vals = persistence_surface(b, params, X, Y)
    # unit GL weights: each of the 4 nodes carries a quarter of the pixel area
    vals = vals.reshape(nx, 2, ny, 2).sum(axis=(1, 3))
    return vals * (hx * hy / 4.0)


def persistent_entropy(bars) -> float:
    """Shannon entropy of normalised bar lengths; infinite bars ignored."""
    b = as_bars(bars)
    b = b[np.isfinite(b[:, 1])] if len(b) else b
    if not len(b):
        raise ValueError("persistent entropy needs at least one finite bar")
    length = b[:, 1] - b[:, 0]
    total = length.sum()
    if total <= 0:
        raise ValueError("persistent entropy needs positive total persistence")
    p = length[length > 0] / total
    return float(-(p * np.log(p)).sum())
