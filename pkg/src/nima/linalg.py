"""Shared pseudo-inverse and rank helpers.

All least-squares solves in the package route through the SVD
pseudo-inverse below so that the identification code, the gravity
calibration, and their tests share one numerical contract: singular
values below ``rcond`` times the largest singular value are truncated,
which yields the minimum-norm least-squares solution on rank-deficient
systems and the ordinary least-squares solution on full-rank ones.
"""

from __future__ import annotations

import numpy as np

__all__ = ["pinv", "lstsq_pinv", "numerical_rank", "svd_diagnostics"]


def pinv(a, rcond=1e-10):
    """Moore-Penrose pseudo-inverse via SVD with a relative cutoff.

    Parameters
    ----------
    a : array_like, shape (m, n)
    rcond : float
        Singular values below ``rcond * max(singular values)`` are
        treated as zero.
    """
    a = np.asarray(a, dtype=float)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[1], a.shape[0]))
    inv = np.where(s > rcond * s[0], 1.0 / np.where(s > 0, s, 1.0), 0.0)
    return (vt.T * inv) @ u.T


def lstsq_pinv(a, b, rcond=1e-10):
    """Minimum-norm least-squares solution of ``a @ x = b`` via :func:`pinv`."""
    return pinv(a, rcond=rcond) @ np.asarray(b, dtype=float)


def numerical_rank(a, rcond=1e-10):
    """Rank of ``a`` counting singular values above the relative cutoff."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rcond * s[0]))


def svd_diagnostics(a, rcond=1e-10):
    """(rank, smallest retained singular value, condition number) of ``a``.

    The condition number is taken over the retained spectrum only, so it
    stays finite on rank-deficient inputs that the cutoff regularizes.
    """
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0, 0.0, np.inf
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, 0.0, np.inf
    kept = s[s > rcond * s[0]]
    return int(kept.size), float(kept[-1]), float(s[0] / kept[-1])
