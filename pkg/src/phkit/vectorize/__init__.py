"""Fixed-length encodings of persistence diagrams."""

from ._base import DiagramTransformer, FeatureMatrix
from .binning import BIN_KINDS, BinnedFeatures, BinningSpec, binned_feature_names, binned_features
from .codebook import (
    Codebook,
    GmmModel,
    PersistenceBoW,
    PersistenceFisherVector,
    PersistenceVLAD,
    fit_codebook,
    fit_gmm,
    kmeans,
    pbow,
    pfv,
    pfv_points,
    pvlad,
)
from .functional import BettiCurve, BettiFunction, Landscape, PersistenceImager, PersistentEntropy
from .preprocessing import PCA, NearZeroVarianceScaler, pca, preprocess
from .signature import SignatureLayer, SignatureUnit, signature_layer, structure_element
from .statistics import (
    BARCODE_STAT_NAMES,
    AlgebraicCoordinates,
    BarcodeStatistics,
    TropicalCoordinates,
    algebraic_coordinates,
    barcode_statistics,
    tropical_coordinates,
)

__all__ = [
    "AlgebraicCoordinates",
    "BARCODE_STAT_NAMES",
    "BIN_KINDS",
    "BarcodeStatistics",
    "BettiCurve",
    "BettiFunction",
    "BinnedFeatures",
    "BinningSpec",
    "Codebook",
    "DiagramTransformer",
    "FeatureMatrix",
    "GmmModel",
    "Landscape",
    "NearZeroVarianceScaler",
    "PCA",
    "PersistenceBoW",
    "PersistenceFisherVector",
    "PersistenceImager",
    "PersistenceVLAD",
    "PersistentEntropy",
    "SignatureLayer",
    "SignatureUnit",
    "TropicalCoordinates",
    "algebraic_coordinates",
    "barcode_statistics",
    "binned_feature_names",
    "binned_features",
    "fit_codebook",
    "fit_gmm",
    "kmeans",
    "pbow",
    "pca",
    "pfv",
    "pfv_points",
    "preprocess",
    "pvlad",
    "signature_layer",
    "structure_element",
    "tropical_coordinates",
]
