"""Binned feature vectors over a fixed filtration domain ``[0, L]``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..functions import Grid1D, ImageParams, betti_curve, landscapes, persistence_image
from ..persistence import PersistenceDiagramSet
from ..utils import as_bars
from ._base import DiagramTransformer

__all__ = ["BIN_KINDS", "BinningSpec", "binned_features", "binned_feature_names", "BinnedFeatures"]

# Declaration order fixes the concatenation order within a dimension.
BIN_KINDS = (
    "betti_samples",
    "bt_hist",
    "dt_hist",
    "pl_hist",
    "pd_grid",
    "landscape_samples",
    "image_pixels",
)


@dataclass(frozen=True)
class BinningSpec:
    """Binning of ``[0, L]`` into ``ceil(L / bin_width)`` equal bins.

    With ``dim0_pl_only`` (the default) the H0 birth and death histograms are
    zero-filled, since H0 births are all 0 and deaths equal lengths; the
    slots are kept so every dimension contributes the same width.
    """

    L: float = 20.0
    bin_width: float = 0.5
    kinds: tuple = ("bt_hist", "dt_hist", "pl_hist")
    dims: tuple = (0, 1, 2)
    dim0_pl_only: bool = True
    landscape_levels: int = 3
    image_sigma: float | None = None
    image_t1: float = 0.0
    image_t2: float | None = None

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.bin_width <= 0:
            raise ValueError("bin_width must be positive")
        if not self.dims:
            raise ValueError("dims must be nonempty")
        unknown = set(self.kinds) - set(BIN_KINDS)
        if unknown:
            raise ValueError(f"unknown bin kinds {sorted(unknown)}")
        if not self.kinds:
            raise ValueError("kinds must be nonempty")

    @property
    def n_bins(self) -> int:
        # tolerate L / width landing a hair above an integer
        return max(1, math.ceil(self.L / self.bin_width - 1e-9))

    @property
    def edges(self) -> np.ndarray:
        # last edge pinned at L; it shortens the final bin when L is not a multiple
        return np.append(np.arange(self.n_bins) * self.bin_width, float(self.L))

    @property
    def ordered_kinds(self) -> tuple:
        return tuple(k for k in BIN_KINDS if k in self.kinds)

    def image_params(self) -> ImageParams:
        sigma = self.image_sigma if self.image_sigma is not None else 0.1 * self.L
        t2 = self.image_t2 if self.image_t2 is not None else self.L
        n = self.n_bins
        return ImageParams(sigma, self.image_t1, t2, resolution=(n, n), domain=(0.0, self.L, 0.0, self.L))


def _histogram(values, edges):
    """Counts in [e_i, e_{i+1}) with a closed last bin; values clipped into range."""
    n = len(edges) - 1
    if not len(values):
        return np.zeros(n)
    v = np.clip(values, edges[0], edges[-1])
    idx = np.searchsorted(edges, v, side="right") - 1
    idx = np.clip(idx, 0, n - 1)
    return np.bincount(idx, minlength=n).astype(float)


def _kind_width(kind, spec):
    n = spec.n_bins
    return {
        "betti_samples": n + 1,
        "bt_hist": n,
        "dt_hist": n,
        "pl_hist": n,
        "pd_grid": n * n,
        "landscape_samples": spec.landscape_levels * (n + 1),
        "image_pixels": n * n,
    }[kind]


def binned_feature_names(spec: BinningSpec) -> list:
    names = []
    for k in spec.dims:
        for kind in spec.ordered_kinds:
            names.extend(f"H{k}_{kind}_{i}" for i in range(_kind_width(kind, spec)))
    return names


def binned_features(d, spec: BinningSpec) -> np.ndarray:
    """Concatenated binned features, dimension-major then kind order."""
    edges = spec.edges
    n = spec.n_bins
    L = edges[-1]
    grid = Grid1D(0.0, L, n + 1)
    parts = []
    for k in spec.dims:
        bars = d[k] if isinstance(d, PersistenceDiagramSet) else as_bars(d)
        bars = np.array(bars, dtype=float).reshape(-1, 2)
        if len(bars):
            bars[~np.isfinite(bars[:, 1]), 1] = L
        for kind in spec.ordered_kinds:
            if kind == "betti_samples":
                parts.append(betti_curve(bars, grid))
            elif kind in ("bt_hist", "dt_hist", "pl_hist"):
                if k == 0 and spec.dim0_pl_only and kind != "pl_hist":
                    parts.append(np.zeros(n))
                    continue
                col = {"bt_hist": 0, "dt_hist": 1}.get(kind)
                vals = bars[:, col] if col is not None else bars[:, 1] - bars[:, 0]
                parts.append(_histogram(vals, edges))
            elif kind == "pd_grid":
                if len(bars):
                    b = np.clip(bars, edges[0], edges[-1])
                    bi = np.clip(np.searchsorted(edges, b[:, 0], side="right") - 1, 0, n - 1)
                    di = np.clip(np.searchsorted(edges, b[:, 1], side="right") - 1, 0, n - 1)
                    grid2 = np.zeros((n, n))
                    np.add.at(grid2, (bi, di), 1.0)
                else:
                    grid2 = np.zeros((n, n))
                parts.append(grid2.reshape(-1))
            elif kind == "landscape_samples":
                parts.append(landscapes(bars, spec.landscape_levels, grid).reshape(-1))
            elif kind == "image_pixels":
                parts.append(persistence_image(bars, spec.image_params()).reshape(-1))
    return np.concatenate(parts)


class BinnedFeatures(DiagramTransformer):
    """Transformer producing :func:`binned_features` rows.

    When ``image_pixels`` is requested and no bandwidth is set, ``fit`` takes
    the image bandwidth as 0.1 x the largest finite persistence in the
    training corpus and the ramp thresholds from its 0.05 / 0.95 persistence
    quantiles.
    """

    def __init__(
        self,
        L=20.0,
        bin_width=0.5,
        kinds=("bt_hist", "dt_hist", "pl_hist"),
        dims=(0, 1, 2),
        dim0_pl_only=True,
        landscape_levels=3,
        image_sigma=None,
        image_t1=None,
        image_t2=None,
    ):
        self.L = L
        self.bin_width = bin_width
        self.kinds = kinds
        self.dims = dims
        self.dim0_pl_only = dim0_pl_only
        self.landscape_levels = landscape_levels
        self.image_sigma = image_sigma
        self.image_t1 = image_t1
        self.image_t2 = image_t2

    def fit(self, X, y=None):
        sigma, t1, t2 = self.image_sigma, self.image_t1, self.image_t2
        if "image_pixels" in self.kinds and (sigma is None or t1 is None or t2 is None):
            pers = []
            for d in X:
                for k in self.dims:
                    b = d[k] if isinstance(d, PersistenceDiagramSet) else as_bars(d)
                    b = b[np.isfinite(b[:, 1])] if len(b) else b
                    pers.extend((b[:, 1] - b[:, 0]).tolist())
            pers = np.asarray(pers) if pers else np.array([self.L])
            if sigma is None:
                sigma = 0.1 * float(pers.max()) or 0.1 * self.L
            if t1 is None:
                t1 = float(np.quantile(pers, 0.05))
            if t2 is None:
                t2 = float(np.quantile(pers, 0.95))
            if not t2 > t1:
                t2 = t1 + 1e-9 + 1e-6 * self.L
        self.spec_ = BinningSpec(
            L=self.L,
            bin_width=self.bin_width,
            kinds=tuple(self.kinds),
            dims=tuple(self.dims),
            dim0_pl_only=self.dim0_pl_only,
            landscape_levels=self.landscape_levels,
            image_sigma=sigma,
            image_t1=0.0 if t1 is None else t1,
            image_t2=t2,
        )
        self.n_features_out_ = len(binned_feature_names(self.spec_))
        return self

    def _feature_names(self):
        return binned_feature_names(self.spec_)

    def _transform_one(self, d):
        return binned_features(d, self.spec_)
