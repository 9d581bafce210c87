"""Robust two-view estimation: LO-RANSAC with DPCP, DLT and Huber refits."""

from ._robustfit import (
    Error,
    EstimationFailed,
    InvalidInput,
    ParseError,
    dpcp_irls,
    dpcp_irls_basis,
    estimate,
    hartley_normalize,
    huber_irls,
    least_eigvecs,
    read_correspondences,
    required_iterations,
    solve_cubic_real,
    symmetric_eigen,
    synth,
    truncated_quadratic_score,
)

__all__ = [
    "Error",
    "EstimationFailed",
    "InvalidInput",
    "ParseError",
    "dpcp_irls",
    "dpcp_irls_basis",
    "estimate",
    "hartley_normalize",
    "huber_irls",
    "least_eigvecs",
    "read_correspondences",
    "required_iterations",
    "solve_cubic_real",
    "symmetric_eigen",
    "synth",
    "truncated_quadratic_score",
]
