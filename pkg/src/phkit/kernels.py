"""Kernels on persistence diagrams and on point clouds via persistence landscapes."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .complexes import rips_filtration
from .functions import Grid1D, landscapes
from .geometry import PointCloud, distance_matrix
from .metrics import FimParams, fisher_information_metric, wasserstein
from .persistence import diagrams
from .utils import as_bars, check_random_state, select_bars

__all__ = [
    "KERNEL_KINDS",
    "KernelConfig",
    "GramMatrix",
    "kernel_eval",
    "pssk",
    "pwgk",
    "gphk",
    "landscape_inner",
    "mphk",
    "smurphk",
    "mphk_embedding",
    "gram_matrix",
]

KERNEL_KINDS = ("pssk", "upssk", "pwgk", "gtk", "glk", "pfk", "gphk", "mphk", "smurphk")
DIAGRAM_KINDS = KERNEL_KINDS[:7]
CLOUD_KINDS = ("mphk", "smurphk")


@dataclass(frozen=True)
class KernelConfig:
    """Parameters for every kernel kind; each kind reads only its own fields.

    ``printed_sign`` switches GTK/GLK to ``exp(+d/h)`` instead of the default
    decaying ``exp(-d/h)``. ``weights`` defaults to ``(r_1 / r_i)**3``.
    ``fraction`` is the share of each ball kept per SMURPHK subsample.
    """

    kind: str = "pssk"
    sigma: float = 1.0
    C: float = 1.0
    p: float = 1.0
    h: float = 1.0
    t0: float = 1.0
    fim: FimParams = field(default_factory=FimParams)
    levels: int = 3
    grid: Grid1D = field(default_factory=lambda: Grid1D(0.0, 20.0, 401))
    radii: tuple = ()
    weights: tuple | None = None
    n_centers: int = 10
    n_boot: int = 1
    fraction: float = 1.0
    homology_dim: int = 1
    cap: float | None = None
    printed_sign: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        for name in ("sigma", "C", "p", "h", "t0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.kind in CLOUD_KINDS:
            r = np.asarray(self.radii, dtype=float)
            if r.size == 0:
                raise ValueError(f"{self.kind} needs at least one radius")
            if np.any(r <= 0) or np.any(np.diff(r) >= 0):
                raise ValueError("radii must be positive and strictly decreasing")
            if self.weights is not None and len(self.weights) != r.size:
                raise ValueError("need one weight per radius")
            if self.n_centers < 1 or self.n_boot < 1:
                raise ValueError("n_centers and n_boot must be >= 1")
            if not 0 < self.fraction <= 1:
                raise ValueError("fraction must lie in (0, 1]")

    @property
    def radius_weights(self) -> np.ndarray:
        r = np.asarray(self.radii, dtype=float)
        if self.weights is not None:
            return np.asarray(self.weights, dtype=float)
        return (r[0] / r) ** 3


@dataclass
class GramMatrix:
    values: np.ndarray
    config: KernelConfig
    ids: list
    min_eigenvalue: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("Gram matrix must be square")
        if not np.allclose(v, v.T, atol=1e-12, rtol=0):
            raise ValueError("Gram matrix is not symmetric")
        self.values = v

    @property
    def is_psd(self) -> bool:
        return self.min_eigenvalue >= -1e-8 * max(float(np.trace(self.values)), 1.0)


def _finite_bars(d, cfg):
    b = as_bars(select_bars(d, cfg.homology_dim))
    inf_rows = ~np.isfinite(b[:, 1]) if len(b) else np.zeros(0, bool)
    if np.any(inf_rows):
        if cfg.cap is None:
            raise ValueError("infinite bars: set KernelConfig.cap or cap them upstream")
        b = b.copy()
        b[inf_rows, 1] = cfg.cap
    return b


def pssk(D1, D2, sigma=1.0) -> float:
    """Scale-space kernel: heat diffusion with the mirrored diagram subtracted."""
    a, b = as_bars(D1), as_bars(D2)
    if not len(a) or not len(b):
        return 0.0
    mirror = b[:, ::-1]
    d_pos = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    d_neg = ((a[:, None, :] - mirror[None, :, :]) ** 2).sum(axis=2)
    s = np.exp(-d_pos / (8 * sigma)) - np.exp(-d_neg / (8 * sigma))
    return float(s.sum() / (8 * np.pi * sigma))


def pwgk(D1, D2, sigma=1.0, C=1.0, p=1.0) -> float:
    """Persistence weighted Gaussian kernel with arctan weights.

    The exponent uses the unsquared Euclidean norm, ``-|l - l'| / (2 sigma^2)``.
    """
    a, b = as_bars(D1), as_bars(D2)
    if not len(a) or not len(b):
        return 0.0
    wa = np.arctan(C * (a[:, 1] - a[:, 0]) ** p)
    wb = np.arctan(C * (b[:, 1] - b[:, 0]) ** p)
    dist = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    return float(wa @ np.exp(-dist / (2 * sigma**2)) @ wb)


def gphk(lam1, lam2, x) -> float:
    """Trapezoidal integral of ``sum_m lam1[m] * lam2[m]`` over grid ``x``."""
    l1, l2 = np.atleast_2d(lam1), np.atleast_2d(lam2)
    x = np.asarray(x, dtype=float)
    if l1.shape != l2.shape or l1.shape[1] != len(x):
        raise ValueError(f"landscape grids do not match: {l1.shape}, {l2.shape}, {len(x)} samples")
    return float(np.trapezoid((l1 * l2).sum(axis=0), x))


def landscape_inner(emb1, emb2, cfg: KernelConfig) -> float:
    """Weighted sum over radii of landscape inner products."""
    x = cfg.grid.x
    return float(sum(w * gphk(p1, p2, x) for w, p1, p2 in zip(cfg.radius_weights, emb1, emb2)))


def _points(P):
    return np.asarray(P.points if isinstance(P, PointCloud) else P, dtype=float)


def _ball_landscape(pts, cfg):
    k = cfg.homology_dim
    if len(pts) < 2:
        return np.zeros((cfg.levels, cfg.grid.n))
    f = rips_filtration(distance_matrix(pts), max_dim=k + 1)
    return landscapes(diagrams(f, max_dim=k)[k], cfg.levels, cfg.grid)


def mphk_embedding(P, cfg: KernelConfig, sampled=False) -> list:
    """Mean local-ball landscape per radius.

    With ``sampled`` the SMURPHK scheme is used: ``n_centers`` centres drawn
    without replacement and ``n_boot`` subsamples of each ball, each of size
    ``fraction`` of the ball, drawn without replacement.
    """
    pts = _points(P)
    if not len(pts):
        raise ValueError("empty point cloud")
    dm = distance_matrix(pts)
    rng = check_random_state(cfg.seed)
    centres = np.arange(len(pts))
    if sampled:
        centres = np.sort(rng.choice(len(pts), size=min(cfg.n_centers, len(pts)), replace=False))
    out = []
    for r in np.asarray(cfg.radii, dtype=float):
        acc = np.zeros((cfg.levels, cfg.grid.n))
        count = 0
        for c in centres:
            ball = np.flatnonzero(dm[c] <= r)
            if not sampled:
                acc += _ball_landscape(pts[ball], cfg)
                count += 1
                continue
            size = max(1, int(round(cfg.fraction * len(ball))))
            for _ in range(cfg.n_boot):
                sub = ball if size == len(ball) else np.sort(rng.choice(ball, size=size, replace=False))
                acc += _ball_landscape(pts[sub], cfg)
                count += 1
        out.append(acc / count)
    return out


def mphk(P1, P2, cfg: KernelConfig) -> float:
    return landscape_inner(mphk_embedding(P1, cfg), mphk_embedding(P2, cfg), cfg)


def smurphk(P1, P2, cfg: KernelConfig, seed=None) -> float:
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    return landscape_inner(mphk_embedding(P1, cfg, True), mphk_embedding(P2, cfg, True), cfg)


def kernel_eval(D1, D2, cfg: KernelConfig) -> float:
    """Kernel value between two diagrams (or two clouds for mphk/smurphk)."""
    kind = cfg.kind
    if kind == "mphk":
        return mphk(D1, D2, cfg)
    if kind == "smurphk":
        return smurphk(D1, D2, cfg)
    if kind in ("gtk", "glk", "pfk"):
        a = select_bars(D1, cfg.homology_dim)
        b = select_bars(D2, cfg.homology_dim)
        if kind == "pfk":
            return float(np.exp(-cfg.t0 * fisher_information_metric(a, b, cfg.fim)))
        d = wasserstein(a, b, 2)
        d = d**2 if kind == "gtk" else d
        sign = 1.0 if cfg.printed_sign else -1.0
        return float(np.exp(sign * d / cfg.h))
    if kind == "gphk":
        la = landscapes(select_bars(D1, cfg.homology_dim), cfg.levels, cfg.grid)
        lb = landscapes(select_bars(D2, cfg.homology_dim), cfg.levels, cfg.grid)
        return gphk(la, lb, cfg.grid.x)
    a, b = _finite_bars(D1, cfg), _finite_bars(D2, cfg)
    if kind == "pssk":
        return pssk(a, b, cfg.sigma)
    if kind == "upssk":
        return float(np.exp(pssk(a, b, cfg.sigma)))
    return pwgk(a, b, cfg.sigma, cfg.C, cfg.p)


def _min_eigenvalue(K):
    return float(np.linalg.eigvalsh(K)[0]) if len(K) else 0.0


def gram_matrix(corpus, cfg: KernelConfig, ids=None) -> GramMatrix:
    """All pairwise kernel values, with the smallest eigenvalue recorded.

    A negative minimum eigenvalue (beyond ``-1e-8 * trace``) triggers a
    warning but is not an error.
    """
    corpus = list(corpus)
    n = len(corpus)
    K = np.zeros((n, n))
    if cfg.kind in CLOUD_KINDS:
        emb = [mphk_embedding(P, cfg, sampled=cfg.kind == "smurphk") for P in corpus]
        pair = lambda i, j: landscape_inner(emb[i], emb[j], cfg)  # noqa: E731
    elif cfg.kind == "gphk":
        lam = [landscapes(select_bars(d, cfg.homology_dim), cfg.levels, cfg.grid) for d in corpus]
        x = cfg.grid.x
        pair = lambda i, j: gphk(lam[i], lam[j], x)  # noqa: E731
    else:
        pair = lambda i, j: kernel_eval(corpus[i], corpus[j], cfg)  # noqa: E731
    for i in range(n):
        for j in range(i, n):
            K[i, j] = K[j, i] = pair(i, j)
    lam_min = _min_eigenvalue(K)
    gm = GramMatrix(K, cfg, list(ids) if ids is not None else [str(i) for i in range(n)], lam_min)
    if not gm.is_psd:
        warnings.warn(f"{cfg.kind} Gram matrix is not PSD (min eigenvalue {lam_min:.3g})", RuntimeWarning, stacklevel=2)
    return gm

