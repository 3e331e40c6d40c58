"""Persistent homology pipeline: filtrations, diagrams, features, distances, kernels and SVMs."""

from .alpha import alpha_filtration
from .complexes import (
    Filtration,
    ScalarGrid,
    WeightedGraph,
    clique_filtration,
    cubical_filtration,
    rips_filtration,
)
from .geometry import PointCloud, ShapeSpec, distance_matrix, generate_shape, load_point_cloud_csv, parse_pdb_ca
from .persistence import PersistenceDiagramSet, diagrams, persistent_betti

__version__ = "0.1.0"

__all__ = [
    "Filtration",
    "PersistenceDiagramSet",
    "PointCloud",
    "ScalarGrid",
    "ShapeSpec",
    "WeightedGraph",
    "alpha_filtration",
    "clique_filtration",
    "cubical_filtration",
    "diagrams",
    "distance_matrix",
    "generate_shape",
    "load_point_cloud_csv",
    "parse_pdb_ca",
    "persistent_betti",
    "rips_filtration",
]
