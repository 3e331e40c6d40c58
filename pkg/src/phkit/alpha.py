"""Alpha filtration on a Delaunay triangulation (2D and 3D)."""

from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .complexes import Filtration
from .geometry import PointCloud

__all__ = ["alpha_filtration", "circumsphere", "delaunay_simplices"]


def circumsphere(points):
    """Center and radius of the smallest sphere through all of ``points``.

    The center lies in the affine hull of the points, so for a k-simplex
    in R^d this is the k-dimensional circumsphere.
    """
    pts = np.asarray(points, dtype=float)
    p0 = pts[0]
    if len(pts) == 1:
        return p0.copy(), 0.0
    a = pts[1:] - p0
    gram = a @ a.T
    rhs = 0.5 * np.diag(gram)
    lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    offset = lam @ a
    return p0 + offset, float(np.sqrt(offset @ offset))


def delaunay_simplices(points):
    """Top-dimensional Delaunay simplices as sorted vertex tuples.

    Cocircular/cospherical ties are resolved by Qhull's triangulated output;
    flat inputs fall back to joggled input (``QJ``), a tiny deterministic
    perturbation.
    """
    pts = np.asarray(points, dtype=float)
    try:
        tri = Delaunay(pts, qhull_options="Qbb Qc Qz Q12 Qt")
    except QhullError:
        tri = Delaunay(pts, qhull_options="QJ Qbb")
    simplices = {tuple(sorted(map(int, s))) for s in tri.simplices}
    return sorted(simplices)


def alpha_filtration(pc, rel_tol=1e-10) -> Filtration:
    """Alpha filtration with circumradius values.

    Top simplices enter at their circumradius. A lower face enters at its own
    circumradius when its smallest circumsphere holds no other input point
    in its interior (Gabriel), and otherwise at the minimum value of its
    cofaces.
    """
    pts = pc.points if isinstance(pc, PointCloud) else np.asarray(pc, dtype=float)
    n, d = pts.shape
    if d not in (2, 3):
        raise ValueError(f"alpha filtration supports ambient dimension 2 or 3, got {d}")
    if n < d + 1:
        raise ValueError(f"need at least {d + 1} points for a {d}D alpha filtration, got {n}")

    top = delaunay_simplices(pts)
    if not top:
        raise ValueError("Delaunay triangulation is empty")
    top_dim = len(top[0]) - 1

    by_dim = [set() for _ in range(top_dim + 1)]
    for s in top:
        for r in range(1, top_dim + 2):
            by_dim[r - 1].update(combinations(s, r))

    value = {s: circumsphere(pts[list(s)])[1] for s in by_dim[top_dim]}
    cofaces = {}
    for k in range(top_dim, 0, -1):
        for s in by_dim[k]:
            for i in range(len(s)):
                cofaces.setdefault(s[:i] + s[i + 1 :], []).append(s)

    for k in range(top_dim - 1, -1, -1):
        for s in sorted(by_dim[k]):
            if k == 0:
                value[s] = 0.0
                continue
            center, radius = circumsphere(pts[list(s)])
            above = min(value[c] for c in cofaces[s])
            if _is_gabriel(pts, s, center, radius, rel_tol):
                value[s] = min(radius, above)
            else:
                value[s] = above

    cells = [s for k in range(top_dim + 1) for s in by_dim[k]]
    return Filtration.from_cells(cells, [value[s] for s in cells], scale_convention="circumradius")


def _is_gabriel(pts, simplex, center, radius, rel_tol):
    dist = np.sqrt(((pts - center) ** 2).sum(axis=1))
    dist[list(simplex)] = np.inf
    return bool(np.all(dist >= radius * (1.0 - rel_tol)))
