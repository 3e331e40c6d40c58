"""Point-cloud ingestion (CSV, PDB), seeded synthetic shapes and distance matrices.

Synthetic shapes draw from :class:`numpy.random.Generator` backed by PCG64
(``numpy.random.default_rng(seed)``), whose stream is fixed across platforms,
so a given :class:`ShapeSpec` always yields bitwise-identical coordinates.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "PointCloud",
    "ShapeSpec",
    "ParseError",
    "RaggedRowError",
    "load_point_cloud_csv",
    "save_point_cloud_csv",
    "parse_pdb_ca",
    "generate_shape",
    "distance_matrix",
    "SHAPE_KINDS",
]

SHAPE_KINDS = ("circle", "sphere", "torus", "clusters", "helix", "two_circles")

# Canonical alpha-helix geometry: 3.8 between consecutive C-alpha atoms,
# 3.6 residues per turn, 1.5 rise per residue.
HELIX_BOND = 3.8
HELIX_RESIDUES_PER_TURN = 3.6
HELIX_RISE = 1.5


class ParseError(ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class RaggedRowError(ParseError):
    """A CSV row has a different field count than the first data row."""


@dataclass(frozen=True)
class PointCloud:
    """Ordered points in R^d with an optional class label and provenance."""

    points: np.ndarray
    label: str | None = None
    source: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if pts.size else pts.reshape(0, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("a point cloud needs at least one point of dimension >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class ShapeSpec:
    """Parameters of a seeded synthetic point cloud.

    ``radius`` is the circle/sphere radius, the torus major radius, the helix
    radius override (derived from the bond length when ``None``) and the
    cluster spread. ``minor_radius`` is the torus tube radius. ``separation``
    is the distance between cluster or circle centers.
    """

    kind: str
    n: int = 100
    noise: float = 0.0
    seed: int = 0
    radius: float | None = None
    minor_radius: float = 0.3
    n_clusters: int = 2
    separation: float = 3.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}; expected one of {SHAPE_KINDS}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")


_SPLIT = re.compile(r"[,\s]+")


def load_point_cloud_csv(path, label=None) -> PointCloud:
    """Read one point per line; comma or whitespace separated, ``#`` comments."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path=path) from exc

    rows = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = [t for t in _SPLIT.split(line) if t]
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise RaggedRowError(
                f"expected {width} fields, found {len(tokens)}", line=lineno, path=path
            )
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            bad = next(t for t in tokens if not _is_float(t))
            raise ParseError(f"non-numeric token {bad!r}", line=lineno, path=path) from None
    if not rows:
        raise ParseError("no points found", path=path)
    return PointCloud(np.array(rows), label=label, source=str(path))


def _is_float(token):
    try:
        float(token)
    except ValueError:
        return False
    return True


def save_point_cloud_csv(pc: PointCloud, path) -> None:
    with open(path, "w") as fh:
        if pc.label is not None:
            fh.write(f"# label: {pc.label}\n")
        for row in pc.points:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def parse_pdb_ca(path, label=None) -> PointCloud:
    """Extract C-alpha coordinates from the first model of a PDB file.

    Keeps ATOM records whose atom name (columns 13-16) is `` CA `` and whose
    alternate location (column 17) is blank or ``A``.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path=path) from exc

    coords = []
    seen_model = False
    for lineno, line in enumerate(lines, start=1):
        record = line[:6]
        if record.startswith("MODEL"):
            if seen_model:
                break
            seen_model = True
            continue
        if record.startswith("ENDMDL"):
            break
        if record != "ATOM  " or line[12:16] != " CA ":
            continue
        altloc = line[16:17]
        if altloc not in ("", " ", "A"):
            continue
        try:
            xyz = [float(line[30:38]), float(line[38:46]), float(line[46:54])]
        except ValueError:
            raise ParseError("unparseable coordinate field", line=lineno, path=path) from None
        coords.append(xyz)
    if not coords:
        raise ParseError("no CA atoms found", path=path)
    return PointCloud(np.array(coords), label=label, source=str(path))


def generate_shape(spec: ShapeSpec) -> PointCloud:
    """Sample a synthetic cloud; a pure function of ``spec``."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    kind = spec.kind

    if kind == "circle":
        r = 1.0 if spec.radius is None else spec.radius
        t = rng.uniform(0.0, 2 * np.pi, n)
        pts = r * np.column_stack([np.cos(t), np.sin(t)])
    elif kind == "two_circles":
        r = 1.0 if spec.radius is None else spec.radius
        t = rng.uniform(0.0, 2 * np.pi, n)
        which = np.arange(n) % 2
        pts = r * np.column_stack([np.cos(t), np.sin(t)])
        pts[:, 0] += (which - 0.5) * spec.separation
    elif kind == "sphere":
        r = 1.0 if spec.radius is None else spec.radius
        # uniform in (cos(polar), azimuth) is uniform on the sphere
        z = rng.uniform(-1.0, 1.0, n)
        phi = rng.uniform(0.0, 2 * np.pi, n)
        s = np.sqrt(1.0 - z * z)
        pts = r * np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    elif kind == "torus":
        big = 1.0 if spec.radius is None else spec.radius
        u = rng.uniform(0.0, 2 * np.pi, n)
        v = rng.uniform(0.0, 2 * np.pi, n)
        ring = big + spec.minor_radius * np.cos(v)
        pts = np.column_stack([ring * np.cos(u), ring * np.sin(u), spec.minor_radius * np.sin(v)])
    elif kind == "clusters":
        spread = 0.1 if spec.radius is None else spec.radius
        k = max(1, spec.n_clusters)
        angles = 2 * np.pi * np.arange(k) / k
        centers = spec.separation * np.column_stack([np.cos(angles), np.sin(angles)])
        if k == 1:
            centers[:] = 0.0
        assign = np.arange(n) % k
        pts = centers[assign] + spread * rng.standard_normal((n, 2))
    elif kind == "helix":
        pts = _helix(n, spec.radius)
    else:  # pragma: no cover - guarded by ShapeSpec
        raise ValueError(f"unknown shape kind {kind!r}")

    if spec.noise > 0:
        pts = pts + spec.noise * rng.standard_normal(pts.shape)
    return PointCloud(pts, label=kind, source=f"generated:{kind}:seed={spec.seed}")


def _helix(n, radius=None):
    turn = 2 * np.pi / HELIX_RESIDUES_PER_TURN
    if radius is None:
        chord = math.sqrt(HELIX_BOND**2 - HELIX_RISE**2)
        radius = chord / (2 * math.sin(turn / 2))
        rise = HELIX_RISE
    else:
        chord = 2 * radius * math.sin(turn / 2)
        if chord > HELIX_BOND:
            raise ValueError("helix radius too large for the fixed bond length")
        rise = math.sqrt(HELIX_BOND**2 - chord**2)
    i = np.arange(n)
    return np.column_stack([radius * np.cos(turn * i), radius * np.sin(turn * i), rise * i])


def distance_matrix(pc) -> np.ndarray:
    """Euclidean pairwise distances (symmetric, exact zero diagonal)."""
    pts = pc.points if isinstance(pc, PointCloud) else np.asarray(pc, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    dm = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    dm = 0.5 * (dm + dm.T)
    np.fill_diagonal(dm, 0.0)
    return dm
