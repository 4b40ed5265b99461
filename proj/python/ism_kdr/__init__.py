"""Interpretable kernel dimension reduction with the iterative spectral method."""

from ._ism import (
    alternative_clustering,
    canonical_kernel,
    cross_validate,
    gamma_supervised,
    hsic,
    ism_solve,
    kernel_matrix,
    knn_accuracy,
    nmi,
    objective_cost,
    phi,
    phi0,
    run_cli,
    stiefel_ascent,
    supervised_dr,
    unsupervised_dr,
    valid_kernel_tokens,
)

__all__ = [
    "alternative_clustering",
    "canonical_kernel",
    "cross_validate",
    "gamma_supervised",
    "hsic",
    "ism_solve",
    "kernel_matrix",
    "knn_accuracy",
    "nmi",
    "objective_cost",
    "phi",
    "phi0",
    "run_cli",
    "stiefel_ascent",
    "supervised_dr",
    "unsupervised_dr",
    "valid_kernel_tokens",
]
