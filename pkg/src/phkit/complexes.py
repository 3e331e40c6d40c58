"""Filtered complexes: Rips, clique (flag), cubical; alpha lives in :mod:`phkit.alpha`.

A :class:`Filtration` is a total order of cells with non-decreasing values in
which every face precedes its cofaces. Ties are broken by
``(value, dimension, lexicographic cell key)``.

Simplices are sorted vertex tuples. Cubes are tuples of coordinates in the
doubled grid, where an odd coordinate is a unit interval and an even
coordinate a degenerate one, so the cube dimension is the count of odd
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, inf

import numpy as np

__all__ = [
    "Filtration",
    "WeightedGraph",
    "ScalarGrid",
    "rips_filtration",
    "clique_filtration",
    "cubical_filtration",
    "simplex_count",
]

SCALE_CONVENTIONS = ("diameter", "circumradius", "sublevel")


@dataclass(frozen=True, eq=False)
class Filtration:
    cells: tuple
    values: np.ndarray
    dims: np.ndarray
    scale_convention: str = "diameter"
    cubical: bool = False

    def __post_init__(self):
        if self.scale_convention not in SCALE_CONVENTIONS:
            raise ValueError(f"unknown scale convention {self.scale_convention!r}")
        values = np.asarray(self.values, dtype=float)
        dims = np.asarray(self.dims, dtype=np.int64)
        if len(values) != len(self.cells) or len(dims) != len(self.cells):
            raise ValueError("cells, values and dims must have equal length")
        values.setflags(write=False)
        dims.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_cells(cls, cells, values, dims=None, *, scale_convention="diameter", cubical=False):
        """Build a filtration from unordered cells, applying the canonical order."""
        cells = [tuple(int(v) for v in c) for c in cells]
        values = [float(v) for v in values]
        if dims is None:
            if cubical:
                dims = [sum(x & 1 for x in c) for c in cells]
            else:
                dims = [len(c) - 1 for c in cells]
        order = sorted(range(len(cells)), key=lambda i: (values[i], dims[i], cells[i]))
        return cls(
            tuple(cells[i] for i in order),
            np.array([values[i] for i in order], dtype=float),
            np.array([dims[i] for i in order], dtype=np.int64),
            scale_convention=scale_convention,
            cubical=cubical,
        )

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(zip(self.cells, self.dims.tolist(), self.values.tolist()))

    @property
    def max_dim(self) -> int:
        return int(self.dims.max()) if len(self.dims) else -1

    def facets(self, cell) -> list:
        """Codimension-one faces of ``cell``."""
        if self.cubical:
            out = []
            for axis, x in enumerate(cell):
                if x & 1:
                    out.append(cell[:axis] + (x - 1,) + cell[axis + 1 :])
                    out.append(cell[:axis] + (x + 1,) + cell[axis + 1 :])
            return out
        if len(cell) == 1:
            return []
        return [cell[:i] + cell[i + 1 :] for i in range(len(cell))]

    def index(self) -> dict:
        return {c: i for i, c in enumerate(self.cells)}

    def count_by_dim(self, t=inf) -> np.ndarray:
        """Number of cells of each dimension with value <= t."""
        if not len(self):
            return np.zeros(0, dtype=np.int64)
        mask = self.values <= t
        return np.bincount(self.dims[mask], minlength=self.max_dim + 1)

    def check(self) -> None:
        """Raise ``ValueError`` if an ordering invariant is violated."""
        if np.any(np.diff(self.values) < 0):
            raise ValueError("filtration values decrease along the order")
        idx = self.index()
        if len(idx) != len(self.cells):
            raise ValueError("duplicate cells in filtration")
        for j, cell in enumerate(self.cells):
            for face in self.facets(cell):
                i = idx.get(face)
                if i is None:
                    raise ValueError(f"face {face} of {cell} missing from filtration")
                if i >= j:
                    raise ValueError(f"face {face} does not precede {cell}")

    def to_text(self) -> str:
        """One ``dim;v0,v1,...;value`` line per cell."""
        lines = [
            f"{d};{','.join(map(str, c))};{v!r}" for c, d, v in zip(self.cells, self.dims.tolist(), self.values.tolist())
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text, *, scale_convention="diameter", cubical=False):
        cells, values, dims = [], [], []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            d, verts, val = line.split(";")
            cells.append(tuple(int(x) for x in verts.split(",")))
            dims.append(int(d))
            values.append(float(val))
        return cls.from_cells(cells, values, dims, scale_convention=scale_convention, cubical=cubical)


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple

    def __post_init__(self):
        seen = set()
        clean = []
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for {self.n} vertices")
            if w < 0 or not np.isfinite(w):
                raise ValueError("edge weights must be finite and >= 0")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            clean.append((key[0], key[1], w))
        object.__setattr__(self, "edges", tuple(clean))

    @classmethod
    def from_distance_matrix(cls, dm, max_scale=inf):
        dm = np.asarray(dm, dtype=float)
        n = len(dm)
        iu, ju = np.triu_indices(n, 1)
        keep = dm[iu, ju] <= max_scale
        return cls(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist(), dm[iu, ju][keep].tolist())))


@dataclass(frozen=True)
class ScalarGrid:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim < 1 or v.size == 0 or 0 in v.shape:
            raise ValueError("grid dimensions must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dims(self):
        return self.values.shape


def _flag_expansion(n, weight_rows, neighbors, max_dim):
    """Enumerate cliques up to ``max_dim + 1`` vertices with max-edge values.

    ``neighbors[i]`` holds the adjacent vertices ``j > i``; ``weight_rows[i][j]``
    gives the edge weight.
    """
    cells = [(i,) for i in range(n)]
    values = [0.0] * n
    frontier = [((i,), 0.0, neighbors[i]) for i in range(n)]
    for _ in range(max_dim):
        nxt = []
        for simplex, value, cand in frontier:
            for w in sorted(cand):
                row = weight_rows[w]
                v = value
                for u in simplex:
                    x = row[u]
                    if x > v:
                        v = x
                s = simplex + (w,)
                cells.append(s)
                values.append(v)
                nxt.append((s, v, cand & neighbors[w]))
        frontier = nxt
        if not frontier:
            break
    return cells, values


def rips_filtration(dm, max_dim=2, max_scale=inf) -> Filtration:
    """Vietoris-Rips filtration; a simplex enters at its diameter.

    Contains every simplex of dimension <= ``max_dim`` whose diameter is at
    most ``max_scale``. Vertices enter at 0.
    """
    dm = np.asarray(dm, dtype=float)
    if dm.ndim != 2 or dm.shape[0] != dm.shape[1]:
        raise ValueError("distance matrix must be square")
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    n = len(dm)
    rows = dm.tolist()
    neighbors = [frozenset(j for j in range(i + 1, n) if rows[i][j] <= max_scale) for i in range(n)]
    cells, values = _flag_expansion(n, rows, neighbors, max_dim)
    return Filtration.from_cells(cells, values, scale_convention="diameter")


def clique_filtration(g: WeightedGraph, max_dim=2) -> Filtration:
    """Clique (flag) complex; a clique enters at its largest edge weight."""
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    rows = [dict() for _ in range(g.n)]
    neighbors = [set() for _ in range(g.n)]
    for i, j, w in g.edges:
        rows[i][j] = rows[j][i] = w
        neighbors[i].add(j)
    cells, values = _flag_expansion(g.n, rows, [frozenset(s) for s in neighbors], max_dim)
    return Filtration.from_cells(cells, values, scale_convention="diameter")


def simplex_count(n, max_dim) -> int:
    """Size of the full simplex on ``n`` vertices truncated at ``max_dim``."""
    return sum(comb(n, j) for j in range(1, max_dim + 2))


def cubical_filtration(grid) -> Filtration:
    """Sublevel filtration of a pixel/voxel grid.

    Each top cube enters at its scalar; every lower cube enters at the
    minimum over the top cubes containing it.
    """
    if not isinstance(grid, ScalarGrid):
        grid = ScalarGrid(grid)
    top = grid.values
    shape = tuple(2 * s + 1 for s in top.shape)
    full = np.full(shape, np.inf)
    full[tuple(slice(1, None, 2) for _ in shape)] = top
    for axis in range(len(shape)):
        moved = np.moveaxis(full, axis, 0)
        even = moved[0::2]
        left = np.full_like(even, np.inf)
        right = np.full_like(even, np.inf)
        left[1:] = moved[1::2]
        right[:-1] = moved[1::2]
        moved[0::2] = np.minimum(np.minimum(left, right), even)
    coords = np.indices(shape).reshape(len(shape), -1).T
    dims = (coords & 1).sum(axis=1)
    vals = full.reshape(-1)
    cells = [tuple(c) for c in coords.tolist()]
    return Filtration.from_cells(cells, vals, dims.tolist(), scale_convention="sublevel", cubical=True)

