"""Sparse linear forecasting of the next-day ozone maximum."""

from ._core import (
    Error,
    base_feature_count,
    cross_validate,
    expanded_feature_count,
    fit_lasso,
    fit_ols,
    fit_ridge,
    lambda_grid,
    lambda_max,
    mae,
    rmse,
    soft_threshold,
    synthetic_truth,
)

__all__ = [
    "Error",
    "base_feature_count",
    "cross_validate",
    "expanded_feature_count",
    "fit_lasso",
    "fit_ols",
    "fit_ridge",
    "lambda_grid",
    "lambda_max",
    "mae",
    "rmse",
    "soft_threshold",
    "synthetic_truth",
]
