"""Error metrics shared by calibration, isolation, and rendering reports.

Definitions (per axis unless noted):

- MAE: mean absolute error of the signed residual.
- SD: standard deviation (ddof=1) of the signed residual.
- R^2: coefficient of determination of the least-squares line fit of
  the reference onto the estimate, 1 - SS_res / SS_tot.
- improvement ratio: 1 - mae_new / mae_baseline.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "mae",
    "error_sd",
    "regression_r2",
    "improvement_ratio",
    "residual_histogram",
]


def mae(err, axis=0):
    """Mean absolute value of a residual array."""
    return np.mean(np.abs(np.asarray(err, dtype=float)), axis=axis)


def error_sd(err, axis=0):
    """Sample standard deviation of a signed residual array."""
    err = np.asarray(err, dtype=float)
    n = err.shape[axis] if err.ndim else err.size
    ddof = 1 if n > 1 else 0
    return np.std(err, axis=axis, ddof=ddof)


def regression_r2(estimate, reference):
    """Per-axis R^2 of the linear regression reference ~ a*estimate + b.

    Both inputs are (n,) or (n, k); the return matches the column count.
    A constant reference column yields 1.0 when the fit is exact and 0.0
    otherwise.
    """
    x = np.atleast_2d(np.asarray(estimate, dtype=float).T).T
    y = np.atleast_2d(np.asarray(reference, dtype=float).T).T
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    out = np.empty(x.shape[1])
    for j in range(x.shape[1]):
        xj, yj = x[:, j], y[:, j]
        ss_tot = float(np.sum((yj - yj.mean()) ** 2))
        A = np.column_stack([xj, np.ones_like(xj)])
        coef, *_ = np.linalg.lstsq(A, yj, rcond=None)
        ss_res = float(np.sum((yj - A @ coef) ** 2))
        if ss_tot == 0.0:
            out[j] = 1.0 if ss_res < 1e-30 else 0.0
        else:
            out[j] = 1.0 - ss_res / ss_tot
    if np.asarray(estimate).ndim == 1:
        return float(out[0])
    return out


def improvement_ratio(mae_new, mae_baseline):
    """Fractional error reduction relative to a baseline, 1 - new/base."""
    mae_baseline = float(mae_baseline)
    if mae_baseline <= 0.0:
        return 0.0
    return 1.0 - float(mae_new) / mae_baseline


def residual_histogram(residuals, bins=51, limit=None):
    """Histogram of residuals with symmetric, deterministic bin edges.

    Returns (edges, counts) where ``edges`` has ``bins + 1`` entries.
    ``limit`` fixes the half-range; by default it is the max |residual|
    (or 1.0 when all residuals are zero).
    """
    r = np.asarray(residuals, dtype=float).ravel()
    if limit is None:
        limit = float(np.max(np.abs(r))) if r.size and np.max(np.abs(r)) > 0 else 1.0
    edges = np.linspace(-limit, limit, bins + 1)
    counts, _ = np.histogram(r, bins=edges)
    return edges, counts
