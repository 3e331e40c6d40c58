"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numpy as np

__all__ = ["as_bars", "check_diagram_corpus", "check_random_state"]


def as_bars(bars) -> np.ndarray:
    """Coerce a bar list to a float ``(N, 2)`` array, validating its shape."""
    arr = np.asarray(bars, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 2))
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"bars must have shape (N, 2), got {arr.shape}")
    if np.any(np.isnan(arr)):
        raise ValueError("bars contain NaN")
    return arr


def check_diagram_corpus(X, homology_dim=None):
    """Validate a list of diagrams.

    Accepts :class:`~phkit.persistence.PersistenceDiagramSet` objects or, when
    ``homology_dim`` is ignored, raw ``(N, 2)`` bar arrays. Returns a list.
    """
    from .persistence import PersistenceDiagramSet

    if isinstance(X, PersistenceDiagramSet):
        raise TypeError("expected a sequence of diagrams, got a single PersistenceDiagramSet")
    X = list(X)
    if not X:
        raise ValueError("empty diagram corpus")
    out = []
    for d in X:
        if isinstance(d, PersistenceDiagramSet):
            out.append(d)
        else:
            out.append(as_bars(d))
    return out


def select_bars(d, homology_dim):
    """Bars of one dimension from a diagram set, or the array itself."""
    from .persistence import PersistenceDiagramSet

    if isinstance(d, PersistenceDiagramSet):
        return d[homology_dim]
    return as_bars(d)


def check_random_state(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
