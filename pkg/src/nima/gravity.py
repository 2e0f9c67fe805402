"""Orientation-dependent gravity/mounting bias identification for force sensors.

A force sensor mounted behind a tool adapter reads a bias that varies
with the end-effector orientation (adapter weight rotating through the
sensor frame) plus a fixed zero offset. The bias along each force axis
is modelled as a linear combination of (sin alpha, cos alpha, sin beta,
cos beta, 1), where alpha/beta are the roll and pitch angles recovered
from static accelerometer readings. Stacking calibration poses row-wise
gives A (n x 5) and the sensor readings B (n x 3); the coefficient
matrix X (5 x 3) solves A X = B in the least-squares sense and is then
subtracted from raw readings at runtime.

Units: angles radians, forces newtons.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, SingularSystemError
from .linalg import pinv, svd_diagnostics

__all__ = [
    "GravityCalibrationSet",
    "GravityModel",
    "build_design_matrix",
    "fit",
    "compensate",
    "feature_row",
]

FEATURE_NAMES = ("sin_alpha", "cos_alpha", "sin_beta", "cos_beta", "const")

# Rank/conditioning gate applied before fitting; below this the pose set
# does not excite all five features and coefficients would be meaningless.
MAX_CONDITION = 1e8
SVD_RCOND = 1e-10


@dataclass
class GravityCalibrationSet:
    """Calibration poses: orientation angles and the raw force read there."""

    alpha: np.ndarray  # (n,) rad
    beta: np.ndarray  # (n,) rad
    forces: np.ndarray  # (n, 3) N

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float).ravel()
        self.beta = np.asarray(self.beta, dtype=float).ravel()
        self.forces = np.asarray(self.forces, dtype=float).reshape(-1, 3)
        if not (len(self.alpha) == len(self.beta) == len(self.forces)):
            raise ValueError("alpha, beta, forces must have equal length")

    def __len__(self):
        return len(self.alpha)

    def distinct_orientations(self, tol=1e-9):
        """Number of distinct (alpha, beta) pairs up to ``tol``."""
        pairs = np.column_stack([self.alpha, self.beta])
        rounded = np.round(pairs / tol) * tol
        return len(np.unique(rounded, axis=0))

    @classmethod
    def read_csv(cls, path):
        data = np.genfromtxt(path, delimiter=",", names=True)
        data = np.atleast_1d(data)
        forces = np.column_stack([data["fx_N"], data["fy_N"], data["fz_N"]])
        return cls(alpha=data["alpha_rad"], beta=data["beta_rad"], forces=forces)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["alpha_rad", "beta_rad", "fx_N", "fy_N", "fz_N"])
            for a, b, f in zip(self.alpha, self.beta, self.forces):
                w.writerow([f"{a:.12g}", f"{b:.12g}"] + [f"{v:.12g}" for v in f])


@dataclass
class GravityModel:
    """Fitted 5x3 coefficient matrix plus per-axis fit residuals."""

    coefficients: np.ndarray  # (5, 3), rows follow FEATURE_NAMES
    residual_rms: np.ndarray = field(default_factory=lambda: np.zeros(3))  # (3,) N

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float).reshape(5, 3)
        self.residual_rms = np.asarray(self.residual_rms, dtype=float).reshape(3)
        if not np.all(np.isfinite(self.coefficients)):
            raise ValueError("gravity model coefficients must be finite")

    def predict(self, alpha, beta):
        """Bias force (3,) predicted at orientation (alpha, beta)."""
        return feature_row(alpha, beta) @ self.coefficients

    @classmethod
    def read_csv(cls, path):
        rows = np.genfromtxt(path, delimiter=",", skip_header=1)
        return cls(coefficients=rows)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["cx", "cy", "cz"])
            for row in self.coefficients:
                w.writerow([f"{v:.17g}" for v in row])


def feature_row(alpha, beta):
    """Design-matrix row [sin a, cos a, sin b, cos b, 1] for one pose."""
    return np.array(
        [np.sin(alpha), np.cos(alpha), np.sin(beta), np.cos(beta), 1.0]
    )


def build_design_matrix(cal_set):
    """Stack feature rows for every record of a calibration set.

    Raises
    ------
    InsufficientDataError
        Fewer than 5 records (the design matrix has 5 columns).
    """
    n = len(cal_set)
    if n < 5:
        raise InsufficientDataError(f"need at least 5 calibration poses, got {n}")
    A = np.empty((n, 5))
    A[:, 0] = np.sin(cal_set.alpha)
    A[:, 1] = np.cos(cal_set.alpha)
    A[:, 2] = np.sin(cal_set.beta)
    A[:, 3] = np.cos(cal_set.beta)
    A[:, 4] = 1.0
    return A


def _deficient_direction(A):
    """Describe the least-excited feature combination of a design matrix."""
    _, _, vt = np.linalg.svd(A, full_matrices=False)
    v = vt[-1]
    terms = [
        f"{c:+.3f}*{name}" for c, name in zip(v, FEATURE_NAMES) if abs(c) > 0.05
    ]
    return " ".join(terms) if terms else "unknown"


def fit(cal_set):
    """Least-squares fit of the 5x3 bias coefficient matrix.

    Solves X = pinv(A) @ B where A is the pose design matrix and B the
    stacked raw force readings, minimizing the Frobenius residual
    ||A X - B||.

    Raises
    ------
    InsufficientDataError
        Fewer than 5 poses or fewer than 3 distinct orientations.
    SingularSystemError
        Pose set leaves a feature direction unexcited (rank < 5 or
        condition number above 1e8); the message names the direction.
    """
    if cal_set.distinct_orientations() < 3:
        raise InsufficientDataError(
            "calibration poses must span at least 3 distinct orientations"
        )
    A = build_design_matrix(cal_set)
    rank, _, cond = svd_diagnostics(A, rcond=SVD_RCOND)
    if rank < 5 or cond > MAX_CONDITION:
        raise SingularSystemError(
            f"design matrix rank {rank}/5, condition {cond:.3g}; "
            f"unexcited direction: {_deficient_direction(A)}"
        )
    X = pinv(A, rcond=SVD_RCOND) @ cal_set.forces
    resid = A @ X - cal_set.forces
    rms = np.sqrt(np.mean(resid**2, axis=0))
    return GravityModel(coefficients=X, residual_rms=rms)


def compensate(model, alpha, beta, raw):
    """Subtract the modelled orientation bias from a raw force reading."""
    raw = np.asarray(raw, dtype=float)
    return raw - model.predict(alpha, beta)
