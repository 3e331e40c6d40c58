"""Forward pass of a parameterised layer of structure elements over a diagram."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..persistence import PersistenceDiagramSet
from ..utils import as_bars
from ._base import DiagramTransformer

__all__ = ["SignatureUnit", "structure_element", "signature_layer", "SignatureLayer"]


@dataclass(frozen=True)
class SignatureUnit:
    mu: tuple
    sigma: tuple
    nu: float

    def __post_init__(self):
        mu0, mu1 = map(float, self.mu)
        s0, s1 = map(float, self.sigma)
        if mu1 < 0:
            raise ValueError("mu[1] must be >= 0")
        if s0 <= 0 or s1 <= 0:
            raise ValueError("sigma entries must be positive")
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        object.__setattr__(self, "mu", (mu0, mu1))
        object.__setattr__(self, "sigma", (s0, s1))
        object.__setattr__(self, "nu", float(self.nu))


def structure_element(births, deaths, unit: SignatureUnit) -> np.ndarray:
    """Per-bar response; log-compressed below ``nu`` and 0 for death 0."""
    a = np.asarray(births, dtype=float)
    b = np.asarray(deaths, dtype=float)
    (mu0, mu1), (s0, s1), nu = unit.mu, unit.sigma, unit.nu
    with np.errstate(divide="ignore"):
        y = np.where(b >= nu, b, np.log(np.where(b > 0, b, 1.0) / nu) + nu)
    val = np.exp(-(s0**2) * (a - mu0) ** 2 - s1**2 * (y - mu1) ** 2)
    return np.where(b == 0, 0.0, val)


def signature_layer(d, units, homology_dim=1, cap=None) -> np.ndarray:
    """Sum of each unit's response over the bars; one output per unit.

    Infinite deaths are replaced by ``cap`` (default: the diagram's
    ``max_scale``).
    """
    if isinstance(d, PersistenceDiagramSet):
        bars = np.array(d[homology_dim])
        cap = d.max_scale if cap is None else cap
    else:
        bars = np.array(as_bars(d))
    if len(bars):
        inf_rows = ~np.isfinite(bars[:, 1])
        if np.any(inf_rows):
            if cap is None or not np.isfinite(cap):
                raise ValueError("infinite bars need a finite cap")
            bars[inf_rows, 1] = cap
    out = np.zeros(len(units))
    for i, unit in enumerate(units):
        if len(bars):
            out[i] = structure_element(bars[:, 0], bars[:, 1], unit).sum()
    return out


class SignatureLayer(DiagramTransformer):
    """Fixed (untrained) bank of structure elements.

    ``units`` is a list of :class:`SignatureUnit`; when ``None``, ``fit``
    places ``n_units`` centers on a regular grid over the training
    births/deaths with bandwidth set from the grid spacing.
    """

    def __init__(self, units=None, n_units=9, nu=0.1, homology_dim=1, cap=None):
        self.units = units
        self.n_units = n_units
        self.nu = nu
        self.homology_dim = homology_dim
        self.cap = cap

    def fit(self, X, y=None):
        if self.units is not None:
            self.units_ = list(self.units)
        else:
            pts = []
            for d in X:
                b = d[self.homology_dim] if isinstance(d, PersistenceDiagramSet) else as_bars(d)
                b = b[np.isfinite(b[:, 1])] if len(b) else b
                pts.append(b)
            pts = np.vstack(pts) if pts else np.zeros((0, 2))
            side = max(1, int(round(np.sqrt(self.n_units))))
            if len(pts):
                lo, hi = pts.min(axis=0), pts.max(axis=0)
            else:
                lo, hi = np.zeros(2), np.ones(2)
            hi = np.where(hi > lo, hi, lo + 1.0)
            gx = np.linspace(lo[0], hi[0], side)
            gy = np.linspace(max(lo[1], 0.0), hi[1], side)
            step = np.maximum((hi - lo) / max(side - 1, 1), 1e-6)
            self.units_ = [
                SignatureUnit((x, yv), (1.0 / step[0], 1.0 / step[1]), self.nu) for x in gx for yv in gy
            ]
        self.n_features_out_ = len(self.units_)
        return self

    def _feature_names(self):
        return [f"H{self.homology_dim}_sig{i}" for i in range(len(self.units_))]

    def _transform_one(self, d):
        return signature_layer(d, self.units_, self.homology_dim, self.cap)
