"""Persistent homology over Z/2 by boundary-matrix column reduction.

:func:`reduce` is the standard left-to-right reduction with the clearing
(twist) shortcut. :func:`oracle_betti` is an independent dense rank
computation intended for tests on small complexes.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf
from typing import NamedTuple

import numpy as np

from .complexes import Filtration

__all__ = [
    "BoundaryMatrix",
    "Pairing",
    "Bar",
    "PersistenceDiagramSet",
    "boundary_matrix",
    "reduce",
    "diagrams",
    "persistent_betti",
    "betti_numbers",
    "oracle_betti",
    "rotate",
]


@dataclass(frozen=True, eq=False)
class BoundaryMatrix:
    """Sparse Z/2 boundary matrix; ``columns[j]`` holds sorted face indices."""

    columns: tuple
    dims: np.ndarray

    def __len__(self):
        return len(self.columns)

    def check(self):
        for j, col in enumerate(self.columns):
            if any(i >= j for i in col):
                raise ValueError(f"column {j} references a later cell")
        # boundary of a boundary vanishes
        for j, col in enumerate(self.columns):
            acc = set()
            for i in col:
                acc.symmetric_difference_update(self.columns[i])
            if acc:
                raise ValueError(f"boundary of boundary of column {j} is nonzero")


class Pairing(NamedTuple):
    pairs: list
    unpaired: list


class Bar(NamedTuple):
    dim: int
    birth: float
    death: float
    birth_index: int
    death_index: int  # -1 for an infinite bar


def boundary_matrix(f: Filtration) -> BoundaryMatrix:
    idx = f.index()
    columns = []
    for j, cell in enumerate(f.cells):
        try:
            col = sorted(idx[face] for face in f.facets(cell))
        except KeyError as exc:
            raise ValueError(f"face {exc.args[0]} of cell {cell} missing from filtration") from None
        if col and col[-1] >= j:
            raise ValueError(f"a face of cell {cell} appears after it")
        columns.append(tuple(col))
    return BoundaryMatrix(tuple(columns), f.dims)


def reduce(m: BoundaryMatrix, clearing=True) -> Pairing:
    """Reduce columns over Z/2 and return (birth, death) index pairs.

    With ``clearing`` the dimensions are processed from high to low and a
    column whose index already appeared as a pivot is zeroed without work.
    The resulting pairing is the same either way.
    """
    n = len(m)
    dims = np.asarray(m.dims)
    if clearing and n:
        order = []
        for d in range(int(dims.max()), -1, -1):
            order.extend(np.flatnonzero(dims == d).tolist())
    else:
        order = range(n)

    owner = {}
    reduced = {}
    cleared = bytearray(n)
    columns = m.columns
    for j in order:
        if cleared[j] or not columns[j]:
            continue
        col = set(columns[j])
        while col:
            low = max(col)
            k = owner.get(low)
            if k is None:
                owner[low] = j
                reduced[j] = col
                if clearing:
                    cleared[low] = 1
                break
            col ^= reduced[k]

    pairs = sorted((low, j) for low, j in owner.items())
    paired = set(owner) | set(owner.values())
    unpaired = [i for i in range(n) if i not in paired]
    return Pairing(pairs, unpaired)


def rotate(bars) -> np.ndarray:
    """(birth, death) -> (birth, persistence)."""
    bars = np.asarray(bars, dtype=float).reshape(-1, 2)
    return np.column_stack([bars[:, 0], bars[:, 1] - bars[:, 0]])


class PersistenceDiagramSet:
    """Per-dimension persistence diagrams.

    ``diagrams[k]`` is an ``(N_k, 2)`` array of (birth, death); infinite
    deaths are ``inf``. ``indices[k]`` holds the filtration positions of the
    creator and destroyer cells (``-1`` for no destroyer) when known.
    """

    def __init__(self, diagrams, max_scale=inf, indices=None):
        self.diagrams = tuple(np.asarray(d, dtype=float).reshape(-1, 2) for d in diagrams)
        for d in self.diagrams:
            d.setflags(write=False)
        self.max_scale = float(max_scale)
        if indices is not None:
            indices = tuple(np.asarray(i, dtype=np.int64).reshape(-1, 2) for i in indices)
        self.indices = indices

    def __len__(self):
        return len(self.diagrams)

    def __getitem__(self, k):
        if k < len(self.diagrams):
            return self.diagrams[k]
        return np.zeros((0, 2))

    def __iter__(self):
        return iter(self.diagrams)

    def __repr__(self):
        counts = ", ".join(f"H{k}:{len(d)}" for k, d in enumerate(self.diagrams))
        return f"PersistenceDiagramSet({counts}, max_scale={self.max_scale})"

    @property
    def max_dim(self):
        return len(self.diagrams) - 1

    @property
    def counts(self):
        return [len(d) for d in self.diagrams]

    def bars(self, k):
        d = self[k]
        idx = self.indices[k] if self.indices is not None and k < len(self.indices) else None
        out = []
        for row, (a, b) in enumerate(d.tolist()):
            bi, di = (int(idx[row, 0]), int(idx[row, 1])) if idx is not None else (-1, -1)
            out.append(Bar(k, a, b, bi, di))
        return out

    def finite(self, k):
        d = self[k]
        return d[np.isfinite(d[:, 1])]

    def capped(self, k, cap):
        """Bars of dimension ``k`` with infinite deaths replaced by ``cap``."""
        d = np.array(self[k])
        d[~np.isfinite(d[:, 1]), 1] = cap
        return d

    def padded(self, max_dim):
        """Same diagrams extended with empty dimensions up to ``max_dim``."""
        diags = [self[k] for k in range(max_dim + 1)]
        return PersistenceDiagramSet(diags, self.max_scale)


def diagrams(f: Filtration, max_dim=None, clearing=True) -> PersistenceDiagramSet:
    """Persistence diagrams of ``f`` with zero-persistence pairs dropped."""
    top = f.max_dim if max_dim is None else max_dim
    pairing = reduce(boundary_matrix(f), clearing=clearing)
    vals = f.values
    dims = f.dims
    out = [[] for _ in range(max(top, 0) + 1)]
    idx = [[] for _ in range(max(top, 0) + 1)]
    for i, j in pairing.pairs:
        k = int(dims[i])
        if k > top or vals[i] == vals[j]:
            continue
        out[k].append((vals[i], vals[j]))
        idx[k].append((i, j))
    for i in pairing.unpaired:
        k = int(dims[i])
        if k > top:
            continue
        out[k].append((vals[i], inf))
        idx[k].append((i, -1))
    max_scale = float(vals[-1]) if len(vals) else 0.0
    return PersistenceDiagramSet(out, max_scale=max_scale, indices=idx)


def persistent_betti(d, k, l, p=0.0) -> int:
    """Number of dimension-``k`` bars with birth <= l and death > l + p."""
    bars = d[k] if isinstance(d, PersistenceDiagramSet) else np.asarray(d, dtype=float).reshape(-1, 2)
    if not len(bars):
        return 0
    return int(np.count_nonzero((bars[:, 0] <= l) & (bars[:, 1] > l + p)))


def betti_numbers(d: PersistenceDiagramSet, t) -> list:
    return [persistent_betti(d, k, t) for k in range(len(d))]


def _gf2_rank(rows):
    """Rank over Z/2 of row bitsets given as Python ints."""
    basis = {}
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in basis:
                r ^= basis[top]
            else:
                basis[top] = r
                rank += 1
                break
    return rank


def oracle_betti(f: Filtration, k, t) -> int:
    """Betti number of the subcomplex with values <= t via dense Z/2 ranks.

    Computes ``dim ker d_k - rank d_(k+1)`` by Gaussian elimination on
    bitset rows, independently of :func:`reduce`.
    """
    live = [i for i in range(len(f)) if f.values[i] <= t]
    by_dim = {}
    for i in live:
        by_dim.setdefault(int(f.dims[i]), []).append(f.cells[i])
    k_cells = by_dim.get(k, [])
    if not k_cells:
        return 0
    pos_k = {c: r for r, c in enumerate(k_cells)}

    def rank_of(dim):
        lower = by_dim.get(dim - 1, [])
        if dim <= 0 or not lower or not by_dim.get(dim):
            return 0
        pos = {c: r for r, c in enumerate(lower)} if dim - 1 != k else pos_k
        rows = []
        for cell in by_dim[dim]:
            bits = 0
            for face in f.facets(cell):
                bits ^= 1 << pos[face]
            rows.append(bits)
        return _gf2_rank(rows)

    nullity = len(k_cells) - rank_of(k)
    return nullity - rank_of(k + 1)
