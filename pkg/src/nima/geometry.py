"""Rotation, quaternion, and orientation-from-acceleration primitives.

Conventions used throughout the package:

- Vectors are numpy arrays of shape (3,); quaternions are (4,) in
  (w, x, y, z) order; rotation matrices are (3, 3) acting on column
  vectors in right-handed frames.
- Euler angles are (theta_x, theta_y, theta_z) in radians, composed as
  R = Rz(theta_z) @ Ry(theta_y) @ Rx(theta_x), each angle wrapped to
  (-pi, pi].
- Roll/pitch from a static accelerometer reading:
  alpha = atan2(a_y, a_z), beta = atan2(-a_x, sqrt(a_y^2 + a_z^2)).
  Yaw is not observable from accelerations alone and is deliberately
  not estimated here; downstream gravity modelling only needs alpha
  and beta.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateOrientationError

__all__ = [
    "roll_pitch_from_accel",
    "wrap_angle",
    "rot_x",
    "rot_y",
    "rot_z",
    "euler_to_rotation",
    "rotation_to_euler",
    "quat_normalize",
    "quat_canonical",
    "quat_to_rotation",
    "compose_chain",
    "geodesic_angle",
    "random_rotation",
]


def roll_pitch_from_accel(a):
    """Roll and pitch angles of a static body from one accelerometer sample.

    Parameters
    ----------
    a : array_like, shape (3,)
        Acceleration (a_x, a_y, a_z); any consistent unit, must be nonzero.

    Returns
    -------
    (alpha, beta) : tuple of float
        alpha = atan2(a_y, a_z) about the x axis,
        beta = atan2(-a_x, sqrt(a_y^2 + a_z^2)) about the y axis, radians.

    Raises
    ------
    DegenerateOrientationError
        If the acceleration vector is (numerically) zero.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DegenerateOrientationError("acceleration contains non-finite values")
    if np.linalg.norm(a) == 0.0:
        raise DegenerateOrientationError("zero acceleration vector has no orientation")
    alpha = math.atan2(a[1], a[2])
    beta = math.atan2(-a[0], math.hypot(a[1], a[2]))
    return alpha, beta


def wrap_angle(theta):
    """Wrap an angle (or array of angles) to the canonical interval (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    wrapped = np.mod(-theta + np.pi, 2.0 * np.pi)
    out = -(wrapped - np.pi)
    return float(out) if out.ndim == 0 else out


def rot_x(theta):
    """Rotation matrix about the x axis by ``theta`` radians."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(theta):
    """Rotation matrix about the y axis by ``theta`` radians."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(theta):
    """Rotation matrix about the z axis by ``theta`` radians."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def euler_to_rotation(euler):
    """Rotation matrix from (theta_x, theta_y, theta_z) Euler angles.

    Composition order is R = Rz(theta_z) @ Ry(theta_y) @ Rx(theta_x),
    i.e. the x rotation is applied to a column vector first.
    """
    euler = np.asarray(euler, dtype=float)
    if euler.shape != (3,):
        raise ValueError(f"expected 3 Euler angles, got shape {euler.shape}")
    if not np.all(np.isfinite(euler)):
        raise ValueError("Euler angles must be finite")
    return rot_z(euler[2]) @ rot_y(euler[1]) @ rot_x(euler[0])


def rotation_to_euler(R):
    """Extract (theta_x, theta_y, theta_z) from a rotation matrix.

    Inverse of :func:`euler_to_rotation` away from gimbal lock
    (|theta_y| = pi/2). At lock, theta_x is set to 0 and the remaining
    freedom is pushed into theta_z.
    """
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {R.shape}")
    sy = -R[2, 0]
    sy = min(1.0, max(-1.0, sy))
    theta_y = math.asin(sy)
    if abs(sy) < 1.0 - 1e-12:
        theta_x = math.atan2(R[2, 1], R[2, 2])
        theta_z = math.atan2(R[1, 0], R[0, 0])
    else:
        theta_x = 0.0
        theta_z = math.atan2(-R[0, 1], R[1, 1]) * (1.0 if sy > 0 else -1.0)
    return np.array([wrap_angle(theta_x), wrap_angle(theta_y), wrap_angle(theta_z)])


def quat_normalize(q):
    """Return ``q`` scaled to unit norm.

    Raises
    ------
    DegenerateOrientationError
        If the quaternion norm is (numerically) zero.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise ValueError(f"expected a 4-vector quaternion, got shape {q.shape}")
    n = np.linalg.norm(q)
    if n < 1e-12 or not np.isfinite(n):
        raise DegenerateOrientationError("cannot normalize a zero quaternion")
    return q / n


def quat_canonical(q):
    """Normalize and fix the sign ambiguity of a unit quaternion.

    q and -q encode the same rotation; the canonical representative has
    its first nonzero component positive. Used wherever a quaternion is
    consumed as a feature so the double cover cannot leak into results.
    """
    q = quat_normalize(q)
    for c in q:
        if abs(c) > 1e-12:
            return q if c > 0 else -q
    return q


def quat_to_rotation(q):
    """Rotation matrix of a unit quaternion in (w, x, y, z) order.

    The input is normalized internally; its norm must already be within
    1e-6 of one.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise ValueError(f"expected a 4-vector quaternion, got shape {q.shape}")
    n = np.linalg.norm(q)
    if n < 1e-12:
        raise DegenerateOrientationError("zero quaternion has no rotation")
    if abs(n - 1.0) > 1e-6:
        raise ValueError(f"quaternion norm {n:.6g} is not within 1e-6 of unit")
    w, x, y, z = q / n
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def compose_chain(rotations):
    """Left-to-right product of a sequence of rotation matrices.

    ``compose_chain([A, B, C])`` returns ``A @ B @ C``.
    """
    mats = [np.asarray(R, dtype=float) for R in rotations]
    if not mats:
        raise ValueError("cannot compose an empty rotation chain")
    out = np.eye(3)
    for R in mats:
        if R.shape != (3, 3):
            raise ValueError(f"chain entries must be 3x3, got shape {R.shape}")
        out = out @ R
    return out


def geodesic_angle(Ra, Rb):
    """Angle in radians of the relative rotation between two matrices."""
    Ra = np.asarray(Ra, dtype=float)
    Rb = np.asarray(Rb, dtype=float)
    c = (np.trace(Ra.T @ Rb) - 1.0) / 2.0
    return math.acos(min(1.0, max(-1.0, c)))


def random_rotation(rng):
    """Uniformly distributed random rotation from a seeded generator."""
    q = rng.standard_normal(4)
    return quat_to_rotation(q / np.linalg.norm(q))
