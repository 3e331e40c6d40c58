"""Kernel SVM, grid search and evaluation report."""

from .report import EvalReport, evaluate
from .selection import DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, GridSearchResult, grid_search_cv
from .svm import SVC, SvmConfig, SvmModel, kernel_matrix, smo, svm_decision, svm_train

__all__ = [
    "DEFAULT_C_GRID",
    "DEFAULT_GAMMA_GRID",
    "EvalReport",
    "GridSearchResult",
    "SVC",
    "SvmConfig",
    "SvmModel",
    "evaluate",
    "grid_search_cv",
    "kernel_matrix",
    "smo",
    "svm_decision",
    "svm_train",
]
