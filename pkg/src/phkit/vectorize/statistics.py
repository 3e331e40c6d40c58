"""Barcode statistics, algebraic coordinates and tropical coordinates."""

from __future__ import annotations

import numpy as np

from ..persistence import PersistenceDiagramSet
from ..utils import as_bars
from ._base import DiagramTransformer

__all__ = [
    "BARCODE_STAT_NAMES",
    "barcode_statistics",
    "algebraic_coordinates",
    "tropical_coordinates",
    "BarcodeStatistics",
    "AlgebraicCoordinates",
    "TropicalCoordinates",
]

# Frozen slot order of the 13 statistics.
BARCODE_STAT_NAMES = (
    "H0_len1",
    "H0_len2",
    "H0_len3",
    "H1_len1",
    "H1_len2",
    "H1_len3",
    "H2_len1",
    "H2_len2",
    "H1_longest_birth",
    "H1_longest_death",
    "H2_longest_birth",
    "H2_longest_death",
    "H1_births_in_window",
)


def _usable(bars, cap):
    bars = as_bars(bars)
    if not len(bars):
        return bars
    if cap is None:
        return bars[np.isfinite(bars[:, 1])]
    bars = bars.copy()
    bars[~np.isfinite(bars[:, 1]), 1] = cap
    return bars


def _longest(bars, count):
    out = np.zeros(count)
    if len(bars):
        lengths = np.sort(bars[:, 1] - bars[:, 0])[::-1][:count]
        out[: len(lengths)] = lengths
    return out


def _longest_bar(bars):
    if not len(bars):
        return np.zeros(2)
    # stable argmax: first bar among equal lengths
    j = int(np.argmax(bars[:, 1] - bars[:, 0]))
    return bars[j].copy()


def barcode_statistics(d: PersistenceDiagramSet, window=(4.5, 5.5), cap=None) -> np.ndarray:
    """The 13 barcode statistics in the order of :data:`BARCODE_STAT_NAMES`.

    Lengths are the three longest H0 and H1 bars and the two longest H2 bars,
    then birth/death of the longest H1 and H2 bars, then the number of H1
    bars born inside the closed ``window``. Missing entries are 0. Infinite
    bars are skipped unless ``cap`` gives a death value to substitute.
    """
    b0, b1, b2 = (_usable(d[k], cap) for k in range(3))
    lo, hi = window
    in_window = float(np.count_nonzero((b1[:, 0] >= lo) & (b1[:, 0] <= hi))) if len(b1) else 0.0
    return np.concatenate(
        [
            _longest(b0, 3),
            _longest(b1, 3),
            _longest(b2, 2),
            _longest_bar(b1),
            _longest_bar(b2),
            [in_window],
        ]
    )


def algebraic_coordinates(bars) -> np.ndarray:
    """Four polynomial coordinates averaged over the finite bars.

    ``mean(a p)``, ``mean((m - b) p)``, ``mean(a^2 p^4)``,
    ``mean((m - b)^2 p^4)`` with ``p = b - a`` and ``m`` the largest death.
    """
    b = as_bars(bars)
    b = b[np.isfinite(b[:, 1])] if len(b) else b
    if not len(b):
        return np.zeros(4)
    a, d = b[:, 0], b[:, 1]
    p = d - a
    top = d.max() - d
    return np.array(
        [
            np.mean(a * p),
            np.mean(top * p),
            np.mean(a**2 * p**4),
            np.mean(top**2 * p**4),
        ]
    )


def tropical_coordinates(bars) -> np.ndarray:
    """Max single persistence, max sums of 2, 3 and 4 bars, total persistence."""
    b = as_bars(bars)
    b = b[np.isfinite(b[:, 1])] if len(b) else b
    if not len(b):
        return np.zeros(5)
    p = np.sort(b[:, 1] - b[:, 0])[::-1]
    csum = np.cumsum(p)
    head = [csum[min(r, len(p)) - 1] for r in (1, 2, 3, 4)]
    return np.array(head + [csum[-1]])


class BarcodeStatistics(DiagramTransformer):
    """Transformer wrapper around :func:`barcode_statistics`."""

    def __init__(self, window=(4.5, 5.5), cap=None):
        self.window = window
        self.cap = cap

    def _feature_names(self):
        return list(BARCODE_STAT_NAMES)

    def _transform_one(self, d):
        if not isinstance(d, PersistenceDiagramSet):
            raise TypeError("barcode statistics need full PersistenceDiagramSet inputs")
        return barcode_statistics(d, window=self.window, cap=self.cap)


class AlgebraicCoordinates(DiagramTransformer):
    def __init__(self, homology_dim=1):
        self.homology_dim = homology_dim

    def _feature_names(self):
        return [f"H{self.homology_dim}_alg{i}" for i in range(1, 5)]

    def _transform_one(self, d):
        return algebraic_coordinates(self._bars(d))


class TropicalCoordinates(DiagramTransformer):
    def __init__(self, homology_dim=1):
        self.homology_dim = homology_dim

    def _feature_names(self):
        k = self.homology_dim
        return [f"H{k}_trop_max1", f"H{k}_trop_max2", f"H{k}_trop_max3", f"H{k}_trop_max4", f"H{k}_trop_sum"]

    def _transform_one(self, d):
        return tropical_coordinates(self._bars(d))
