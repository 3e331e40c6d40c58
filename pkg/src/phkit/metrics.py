"""Distances between persistence diagrams.

All functions take ``(N, 2)`` bar arrays of one homology dimension. Infinite
bars are dropped after checking both diagrams carry the same number of them;
a mismatch raises :class:`InfiniteBarMismatch`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .persistence import PersistenceDiagramSet
from .utils import as_bars, select_bars

__all__ = [
    "InfiniteBarMismatch",
    "SwParams",
    "FimParams",
    "bottleneck",
    "wasserstein",
    "sliced_wasserstein",
    "fisher_information_metric",
    "diagram_distance",
    "pairwise_distances",
    "METHODS",
]


class InfiniteBarMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SwParams:
    """Number of directions sampled uniformly from ``[-pi/2, pi/2)``."""

    slices: int = 50

    def __post_init__(self):
        if int(self.slices) < 1:
            raise ValueError("slices must be >= 1")

    @property
    def thetas(self) -> np.ndarray:
        m = int(self.slices)
        return -np.pi / 2 + np.arange(m) * np.pi / m


@dataclass(frozen=True)
class FimParams:
    """Gaussian bandwidth, grid resolution per axis and padding in units of sigma."""

    sigma: float = 0.1
    resolution: int = 100
    padding: float = 3.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if int(self.resolution) < 2:
            raise ValueError("resolution must be >= 2")
        if self.padding < 0:
            raise ValueError("padding must be >= 0")


def _finite_pair(D1, D2):
    a, b = as_bars(D1), as_bars(D2)
    ia, ib = ~np.isfinite(a[:, 1]), ~np.isfinite(b[:, 1])
    if ia.sum() != ib.sum():
        raise InfiniteBarMismatch(f"diagrams have {int(ia.sum())} and {int(ib.sum())} infinite bars")
    return a[~ia], b[~ib]


def _diag(bars):
    m = (bars[:, 0] + bars[:, 1]) / 2
    return np.column_stack([m, m])


def _cost_blocks(a, b):
    """L-infinity point-to-point costs and half-persistences (distance to the diagonal)."""
    if len(a) and len(b):
        c = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)
    else:
        c = np.zeros((len(a), len(b)))
    return c, (a[:, 1] - a[:, 0]) / 2, (b[:, 1] - b[:, 0]) / 2


def _threshold_graph(c, ha, hb, t):
    """Bipartite adjacency of the augmented problem restricted to costs <= t.

    Rows: points of D1 then diagonal slots for D2. Columns: points of D2 then
    diagonal slots for D1. Slot-to-slot edges cost 0.
    """
    n1, n2 = c.shape
    n = n1 + n2
    adj = np.zeros((n, n), dtype=bool)
    adj[:n1, :n2] = c <= t
    adj[np.arange(n1), n2 + np.arange(n1)] = ha <= t
    adj[n1 + np.arange(n2), np.arange(n2)] = hb <= t
    adj[n1:, n2:] = True
    return csr_matrix(adj)


def _perfect(adj):
    match = maximum_bipartite_matching(adj, perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck(D1, D2) -> float:
    """Exact bottleneck distance by binary search over candidate costs."""
    a, b = _finite_pair(D1, D2)
    if not len(a) and not len(b):
        return 0.0
    c, ha, hb = _cost_blocks(a, b)
    cand = np.unique(np.concatenate([[0.0], c.ravel(), ha, hb]))
    # collapse candidates closer than 1e-12
    keep = np.concatenate([[True], np.diff(cand) > 1e-12])
    cand = cand[keep]
    lo, hi = 0, len(cand) - 1
    # max(ha, hb) matching everything to the diagonal is always feasible
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect(_threshold_graph(c, ha, hb, cand[mid] + 1e-12)):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])


def wasserstein(D1, D2, p=2) -> float:
    """p-Wasserstein distance with L-infinity ground metric (Hungarian solve)."""
    if p == np.inf:
        return bottleneck(D1, D2)
    if p < 1 or int(p) != p:
        raise ValueError("p must be a positive integer")
    a, b = _finite_pair(D1, D2)
    n1, n2 = len(a), len(b)
    if n1 + n2 == 0:
        return 0.0
    c, ha, hb = _cost_blocks(a, b)
    n = n1 + n2
    big = 1.0 + 2.0 * (np.max(c, initial=0.0) + np.max(ha, initial=0.0) + np.max(hb, initial=0.0))
    big = big**p * n
    cost = np.full((n, n), big)
    cost[:n1, :n2] = c**p
    cost[np.arange(n1), n2 + np.arange(n1)] = ha**p
    cost[n1 + np.arange(n2), np.arange(n2)] = hb**p
    cost[n1:, n2:] = 0.0
    r, s = linear_sum_assignment(cost)
    total = float(cost[r, s].sum())
    return total ** (1.0 / p)


def sliced_wasserstein(D1, D2, sw: SwParams | None = None) -> float:
    """Sliced Wasserstein distance, ``(1/2M) * sum_theta W1`` over ``M`` slices."""
    sw = sw or SwParams()
    a, b = _finite_pair(D1, D2)
    if not len(a) and not len(b):
        return 0.0
    u = np.vstack([a, _diag(b)])
    v = np.vstack([b, _diag(a)])
    th = sw.thetas
    dirs = np.vstack([np.cos(th), np.sin(th)])
    pu = np.sort(u @ dirs, axis=0)
    pv = np.sort(v @ dirs, axis=0)
    w = np.abs(pu - pv).sum(axis=0)
    return float(w.sum() / (2 * len(th)))


def _density(points, xs, ys, sigma):
    gx = np.exp(-((xs[None, :] - points[:, 0:1]) ** 2) / (2 * sigma**2))
    gy = np.exp(-((ys[None, :] - points[:, 1:2]) ** 2) / (2 * sigma**2))
    rho = gx.T @ gy  # (nx, ny) sum of separable Gaussians
    return rho / rho.sum()


def fisher_information_metric(D1, D2, fp: FimParams | None = None) -> float:
    """Fisher information metric between smoothed diagram densities.

    Densities of ``D1 + diag(D2)`` and ``D2 + diag(D1)`` are sampled on a
    shared grid and normalised to sum to one. The distance
    ``arccos(sum sqrt(rho1 * rho2))`` is evaluated through the equivalent
    Hellinger form so identical inputs give exactly 0.
    """
    fp = fp or FimParams()
    a, b = _finite_pair(D1, D2)
    u = np.vstack([a, _diag(b)])
    v = np.vstack([b, _diag(a)])
    if not len(u):
        raise ValueError("both diagrams are empty")
    allp = np.vstack([u, v])
    pad = fp.padding * fp.sigma
    lo, hi = allp.min(axis=0) - pad, allp.max(axis=0) + pad
    n = int(fp.resolution)
    xs = np.linspace(lo[0], hi[0], n)
    ys = np.linspace(lo[1], hi[1], n)
    r1 = _density(u, xs, ys, fp.sigma)
    r2 = _density(v, xs, ys, fp.sigma)
    h2 = 0.5 * float(np.sum((np.sqrt(r1) - np.sqrt(r2)) ** 2))
    h2 = min(max(h2, 0.0), 1.0)
    return float(2.0 * np.arcsin(np.sqrt(h2 / 2.0)))


METHODS = {
    "bottleneck": lambda a, b, **kw: bottleneck(a, b),
    "wasserstein": lambda a, b, p=2, **kw: wasserstein(a, b, p),
    "sliced_wasserstein": lambda a, b, slices=50, **kw: sliced_wasserstein(a, b, SwParams(slices)),
    "fim": lambda a, b, sigma=0.1, resolution=100, **kw: fisher_information_metric(a, b, FimParams(sigma, resolution)),
}


def diagram_distance(d1, d2, method="bottleneck", homology_dim=1, **params) -> float:
    """Distance between two diagrams (bar arrays or diagram sets)."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    if isinstance(d1, PersistenceDiagramSet) or isinstance(d2, PersistenceDiagramSet):
        d1, d2 = select_bars(d1, homology_dim), select_bars(d2, homology_dim)
    return METHODS[method](d1, d2, **params)


def pairwise_distances(corpus, method="bottleneck", homology_dim=1, **params) -> np.ndarray:
    """Symmetric matrix of :func:`diagram_distance` over a corpus."""
    corpus = list(corpus)
    n = len(corpus)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = diagram_distance(corpus[i], corpus[j], method, homology_dim, **params)
    return out
