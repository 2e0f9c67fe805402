"""Rotation estimation between the tissue-mounted and robot-side sensor frames.

During a friction-free contact trial both sensors see the same physical
force, so for each paired sample

    f_robot_i = C_i @ R @ f_tip_i

where ``C_i`` is the known part of the frame chain for that record
(robot pose and optical-tracker transforms, supplied by the caller) and
``R`` is the single unknown rotation from the tissue-sensor frame into
the camera frame. ``R`` is parameterized by Euler angles,
R = Rz(tz) @ Ry(ty) @ Rx(tx), which keeps it exactly orthonormal, and
the angles are found by damped Gauss-Newton on the stacked residuals
with multi-start to escape Euler-angle local minima.

Forces are free vectors; translation between the frames plays no role.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import metrics
from .errors import ConvergenceError, UnobservableRotationError
from .geometry import euler_to_rotation, rot_x, rot_y, rot_z, rotation_to_euler

__all__ = [
    "CorrespondenceSet",
    "FrameCalibration",
    "estimate_rotation",
    "transform_tip_forces",
    "evaluate_correspondence",
    "pair_nearest",
]

MAX_ITER = 200
STEP_TOL = 1e-10

# Coarse rotations used as multi-start seeds: identity, the three half-turns,
# quarter-turns about z, and the two 120-degree turns about the main diagonal.
_STARTS = [
    np.array([0.0, 0.0, 0.0]),
    np.array([np.pi, 0.0, 0.0]),
    np.array([0.0, np.pi, 0.0]),
    np.array([0.0, 0.0, np.pi]),
    np.array([0.0, 0.0, np.pi / 2]),
    np.array([0.0, 0.0, -np.pi / 2]),
    np.array([np.pi / 2, 0.0, np.pi / 2]),
    np.array([-np.pi / 2, 0.0, -np.pi / 2]),
]


@dataclass
class CorrespondenceSet:
    """Paired force samples from the two sensors plus the known chain terms."""

    f_robot: np.ndarray  # (n, 3) N, robot-sensor frame
    f_tip: np.ndarray  # (n, 3) N, tissue-sensor frame
    chains: np.ndarray  # (n, 3, 3) known rotation per record
    t_ms: np.ndarray = None  # (n,) optional timestamps

    def __post_init__(self):
        self.f_robot = np.asarray(self.f_robot, dtype=float).reshape(-1, 3)
        self.f_tip = np.asarray(self.f_tip, dtype=float).reshape(-1, 3)
        self.chains = np.asarray(self.chains, dtype=float).reshape(-1, 3, 3)
        if self.t_ms is None:
            self.t_ms = np.arange(len(self.f_robot), dtype=float)
        self.t_ms = np.asarray(self.t_ms, dtype=float).ravel()
        n = len(self.f_robot)
        if not (len(self.f_tip) == len(self.chains) == len(self.t_ms) == n):
            raise ValueError("stream lengths do not match")

    def __len__(self):
        return len(self.f_robot)

    @classmethod
    def read_csv(cls, path):
        rows = np.genfromtxt(path, delimiter=",", skip_header=1)
        rows = np.atleast_2d(rows)
        return cls(
            t_ms=rows[:, 0],
            f_robot=rows[:, 1:4],
            f_tip=rows[:, 4:7],
            chains=rows[:, 7:16].reshape(-1, 3, 3),
        )

    def write_csv(self, path):
        header = (
            ["t_ms", "frx", "fry", "frz", "ftx", "fty", "ftz"]
            + [f"c{i}{j}" for i in range(1, 4) for j in range(1, 4)]
        )
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for t, fr, ft, c in zip(self.t_ms, self.f_robot, self.f_tip, self.chains):
                row = [t, *fr, *ft, *c.ravel()]
                w.writerow([f"{v:.12g}" for v in row])


@dataclass
class FrameCalibration:
    """Estimated rotation with its fit diagnostics on the calibration set."""

    rotation: np.ndarray  # (3, 3), the solved camera<-tissue-sensor rotation
    euler: np.ndarray  # (3,) rad
    mae: np.ndarray  # (3,) N
    sd: np.ndarray  # (3,) N
    r2: np.ndarray  # (3,)
    residual: float  # final sum of squared residuals, N^2
    iterations: int
    n_samples: int

    def write_csv(self, path):
        header = (
            ["theta_x", "theta_y", "theta_z"]
            + [f"r{i}{j}" for i in range(1, 4) for j in range(1, 4)]
            + ["mae_x", "mae_y", "mae_z", "sd_x", "sd_y", "sd_z", "r2_x", "r2_y", "r2_z"]
        )
        row = [*self.euler, *self.rotation.ravel(), *self.mae, *self.sd, *self.r2]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerow([f"{v:.12g}" for v in row])

    @classmethod
    def read_csv(cls, path):
        row = np.genfromtxt(path, delimiter=",", skip_header=1)
        return cls(
            euler=row[0:3],
            rotation=row[3:12].reshape(3, 3),
            mae=row[12:15],
            sd=row[15:18],
            r2=row[18:21],
            residual=float("nan"),
            iterations=0,
            n_samples=0,
        )


def pair_nearest(t_a, t_b, max_skew_ms=1.0):
    """Nearest-timestamp pairing of two sample clocks.

    Returns (idx_a, idx_b) index arrays selecting pairs whose timestamps
    differ by at most ``max_skew_ms``. Each sample of stream A is matched
    to its nearest neighbour in stream B.
    """
    t_a = np.asarray(t_a, dtype=float)
    t_b = np.asarray(t_b, dtype=float)
    pos = np.searchsorted(t_b, t_a)
    pos = np.clip(pos, 1, len(t_b) - 1)
    left = t_b[pos - 1]
    right = t_b[pos]
    nearest = np.where(np.abs(t_a - left) <= np.abs(t_a - right), pos - 1, pos)
    skew = np.abs(t_a - t_b[nearest])
    keep = skew <= max_skew_ms
    return np.nonzero(keep)[0], nearest[keep]


def _check_observable(cal_set):
    """Rotation is observable only if tip forces span >= 2 directions."""
    f = cal_set.f_tip
    norms = np.linalg.norm(f, axis=1)
    active = f[norms > 1e-12]
    if len(active) < 3:
        raise UnobservableRotationError(
            f"need >= 3 nonzero force samples, got {len(active)}"
        )
    dirs = active / np.linalg.norm(active, axis=1, keepdims=True)
    s = np.linalg.svd(dirs, compute_uv=False)
    if s[1] < 1e-6 * s[0]:
        raise UnobservableRotationError(
            "force directions are collinear; rotation about the force axis "
            "is unobservable"
        )


def _rotation_partials(euler):
    """R and its three partial derivatives w.r.t. the Euler angles."""
    tx, ty, tz = euler
    Rx, Ry, Rz = rot_x(tx), rot_y(ty), rot_z(tz)
    cx, sx = np.cos(tx), np.sin(tx)
    cy, sy = np.cos(ty), np.sin(ty)
    cz, sz = np.cos(tz), np.sin(tz)
    dRx = np.array([[0, 0, 0], [0, -sx, -cx], [0, cx, -sx]])
    dRy = np.array([[-sy, 0, cy], [0, 0, 0], [-cy, 0, -sy]])
    dRz = np.array([[-sz, -cz, 0], [cz, -sz, 0], [0, 0, 0]])
    R = Rz @ Ry @ Rx
    return R, (Rz @ Ry @ dRx, Rz @ dRy @ Rx, dRz @ Ry @ Rx)


def _residual_cost(euler, chains, f_tip, f_robot):
    R = euler_to_rotation(euler)
    pred = np.einsum("nij,jk,nk->ni", chains, R, f_tip)
    r = pred - f_robot
    return r, float(np.sum(r * r))


def _gauss_newton(start, chains, f_tip, f_robot):
    """Damped Gauss-Newton from one start; returns (euler, cost, iters, hit_tol)."""
    euler = np.array(start, dtype=float)
    _, cost = _residual_cost(euler, chains, f_tip, f_robot)
    lam = 1e-6
    hit_tol = False
    it = 0
    for it in range(1, MAX_ITER + 1):
        R, partials = _rotation_partials(euler)
        pred = np.einsum("nij,jk,nk->ni", chains, R, f_tip)
        r = (pred - f_robot).ravel()
        # J columns: d residual / d angle, stacked over samples
        J = np.stack(
            [np.einsum("nij,jk,nk->ni", chains, dR, f_tip).ravel() for dR in partials],
            axis=1,
        )
        g = J.T @ r
        H = J.T @ J
        step = None
        for _ in range(12):
            try:
                step = np.linalg.solve(H + lam * np.eye(3), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            new = euler + step
            _, new_cost = _residual_cost(new, chains, f_tip, f_robot)
            if new_cost <= cost:
                euler, cost = new, new_cost
                lam = max(lam / 3.0, 1e-12)
                break
            lam *= 10.0
        else:
            step = np.zeros(3)
        if np.linalg.norm(step) < STEP_TOL:
            hit_tol = True
            break
    return euler, cost, it, hit_tol


def estimate_rotation(cal_set):
    """Estimate the unknown sensor-frame rotation from paired forces.

    Minimizes sum_i || C_i R(euler) f_tip_i - f_robot_i ||^2 over the
    three Euler angles with damped Gauss-Newton, started from 8 coarse
    rotations; the best converged local solution wins. The returned
    rotation is orthonormal by construction of the parameterization.

    Raises
    ------
    UnobservableRotationError
        Fewer than 3 nonzero forces, or all force directions collinear.
    ConvergenceError
        No start reached the step-norm tolerance within 200 iterations.
    """
    _check_observable(cal_set)
    chains, f_tip, f_robot = cal_set.chains, cal_set.f_tip, cal_set.f_robot
    best = None
    for start in _STARTS:
        euler, cost, iters, hit_tol = _gauss_newton(start, chains, f_tip, f_robot)
        if best is None or cost < best[1]:
            best = (euler, cost, iters, hit_tol)
    euler, cost, iters, hit_tol = best
    if not hit_tol:
        raise ConvergenceError(
            f"rotation estimate did not converge within {MAX_ITER} iterations "
            f"(residual {cost:.6g})",
            residual=cost,
        )
    R = euler_to_rotation(euler)
    calib = FrameCalibration(
        rotation=R,
        euler=rotation_to_euler(R),
        mae=np.zeros(3),
        sd=np.zeros(3),
        r2=np.ones(3),
        residual=cost,
        iterations=iters,
        n_samples=len(cal_set),
    )
    report = evaluate_correspondence(calib, cal_set)
    calib.mae, calib.sd, calib.r2 = report["mae"], report["sd"], report["r2"]
    return calib


def transform_tip_forces(calib, cal_set):
    """Map every tissue-sensor force into the robot-sensor frame.

    Returns an (n, 3) array: chain_i @ R @ f_tip_i for each record.
    """
    return np.einsum(
        "nij,jk,nk->ni", cal_set.chains, calib.rotation, cal_set.f_tip
    )


def evaluate_correspondence(calib, cal_set):
    """Per-axis MAE, SD, and R^2 between transformed tip and robot forces.

    Raises
    ------
    ValueError
        Empty correspondence set.
    """
    if len(cal_set) == 0:
        raise ValueError("cannot evaluate an empty correspondence set")
    mapped = transform_tip_forces(calib, cal_set)
    err = mapped - cal_set.f_robot
    return {
        "mae": metrics.mae(err),
        "sd": metrics.error_sd(err),
        "r2": np.asarray(metrics.regression_r2(mapped, cal_set.f_robot)),
    }
