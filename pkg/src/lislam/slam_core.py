"""Landmark-inertial system model.

State: attitude R, inertial velocity v, position x, and n static landmarks
p_i, packed into an extended pose X = (R, (v x p_1..p_n)).  An IMU supplies
body angular velocity and proper acceleration; a 3D camera measures every
landmark in the body frame.  The model is invariant under yaw rotations and
translations of the inertial frame; the base-space projection extracts the
full set of observable quantities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidDimension, NotIsotropy, NotUnitVector
from .matgroups import E3, ExtendedPose, SimTangent, skew

__all__ = [
    "ImuInput",
    "MeasurementSet",
    "FrameTransform",
    "BaseState",
    "StructuralMatrices",
    "PoseDerivative",
    "build_structural",
    "system_derivative",
    "measure",
    "apply_frame_action",
    "frame_compose",
    "frame_inverse",
    "project_base",
]

DEFAULT_GRAVITY = 9.81  # m/s^2

_ISOTROPY_TOL = 1e-9


@dataclass(frozen=True)
class ImuInput:
    """Body-frame angular velocity [rad/s] and proper acceleration [m/s^2]."""

    omega: np.ndarray
    accel: np.ndarray

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float).reshape(3)
        accel = np.asarray(self.accel, dtype=float).reshape(3)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "accel", accel)
        if not (np.isfinite(omega).all() and np.isfinite(accel).all()):
            raise DimensionMismatch("IMU input must be finite")


@dataclass(frozen=True)
class MeasurementSet:
    """Body-frame landmark positions, one column per landmark [m]."""

    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "y", y)
        if y.ndim != 2 or y.shape[0] != 3:
            raise DimensionMismatch(f"measurements must be 3xn, got {y.shape}")

    @property
    def n(self) -> int:
        return self.y.shape[1]


@dataclass(frozen=True)
class FrameTransform:
    """Change of inertial frame: a yaw rotation plus a translation.

    The rotation must fix the vertical axis; anything else is not a symmetry
    of the problem and is rejected rather than projected.
    """

    r_s: np.ndarray
    x_s: np.ndarray

    def __post_init__(self):
        r_s = np.asarray(self.r_s, dtype=float)
        x_s = np.asarray(self.x_s, dtype=float).reshape(3)
        object.__setattr__(self, "r_s", r_s)
        object.__setattr__(self, "x_s", x_s)
        if np.linalg.norm(r_s @ E3 - E3) >= _ISOTROPY_TOL:
            raise NotIsotropy("rotation does not fix the vertical axis")

    @classmethod
    def identity(cls) -> "FrameTransform":
        return cls(np.eye(3), np.zeros(3))


def frame_compose(a: FrameTransform, b: FrameTransform) -> FrameTransform:
    """Rigid-body composition (Ra Rb, xa + Ra xb)."""
    return FrameTransform(a.r_s @ b.r_s, a.x_s + a.r_s @ b.x_s)


def frame_inverse(a: FrameTransform) -> FrameTransform:
    return FrameTransform(a.r_s.T, -(a.r_s.T @ a.x_s))


@dataclass(frozen=True)
class BaseState:
    """Observable coordinates: gravity direction and body-frame vectors.

    ``eta`` is the unit gravity direction in the body frame; column 0 of
    ``v_o`` is the body-frame velocity and columns 1..n are the body-frame
    landmark positions relative to the robot.
    """

    eta: np.ndarray
    v_o: np.ndarray

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float).reshape(3)
        v_o = np.asarray(self.v_o, dtype=float)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "v_o", v_o)
        if abs(np.linalg.norm(eta) - 1.0) >= 1e-9:
            raise NotUnitVector("gravity direction must be a unit vector")

    @property
    def n(self) -> int:
        return self.v_o.shape[1] - 1


@dataclass(frozen=True)
class StructuralMatrices:
    """Constant matrices of the model for a given landmark count and gravity.

    ``c`` maps measurement columns out of the translation block, ``pi_mat``
    extracts the observable columns, and ``c_prime``/``s_n_prime`` are their
    base-space counterparts satisfying pi_mat @ c_prime == c and
    pi_mat @ s_n_prime == s_n @ pi_mat exactly.
    """

    n: int
    g: float
    c: np.ndarray
    pi_mat: np.ndarray
    c_prime: np.ndarray
    s_n: np.ndarray
    s_n_prime: np.ndarray
    w_g: np.ndarray
    n_mat: SimTangent


def build_structural(n: int, g: float = DEFAULT_GRAVITY) -> StructuralMatrices:
    """Build the structural matrices for n landmarks.

    Raises
    ------
    InvalidDimension
        For n < 1: with no landmarks the correction terms vanish identically
        and nothing is estimable, so the case is rejected loudly.
    """
    if n < 1:
        raise InvalidDimension("landmark count must be at least 1")
    if g <= 0.0:
        raise InvalidDimension("gravity must be positive")

    c = np.zeros((n + 2, n))
    c[1, :] = 1.0
    c[2:, :] = -np.eye(n)

    pi_mat = np.zeros((n + 2, n + 1))
    pi_mat[0, 0] = -1.0
    pi_mat[1, 1:] = 1.0
    pi_mat[2:, 1:] = -np.eye(n)

    c_prime = np.zeros((n + 1, n))
    c_prime[1:, :] = np.eye(n)

    s_n = np.zeros((n + 2, n + 2))
    s_n[0, 1] = -1.0

    s_n_prime = np.zeros((n + 1, n + 1))
    s_n_prime[0, 1:] = 1.0

    w_g = np.zeros((3, n + 2))
    w_g[2, 0] = g

    n_mat = SimTangent(np.zeros(3), np.zeros((3, n + 2)), s_n)
    return StructuralMatrices(
        n=n,
        g=float(g),
        c=c,
        pi_mat=pi_mat,
        c_prime=c_prime,
        s_n=s_n,
        s_n_prime=s_n_prime,
        w_g=w_g,
        n_mat=n_mat,
    )


@dataclass(frozen=True)
class PoseDerivative:
    """Time derivative of an extended pose, in component and matrix form.

    ``omega_body`` is the rate entering the rotation from the right (body
    rate) and ``omega_correction`` the rate entering from the left; geometric
    integrators consume the split, entrywise integrators use ``r_dot``.
    """

    r_dot: np.ndarray
    v_block_dot: np.ndarray
    matrix: np.ndarray
    omega_body: np.ndarray
    omega_correction: np.ndarray | None = None


def system_derivative(
    x: ExtendedPose, u: ImuInput, sm: StructuralMatrices
) -> PoseDerivative:
    """Derivative of the true state under IMU input.

    Componentwise: R' = R skew(omega), v' = R a + g e3, x' = v, p_i' = 0.
    The dense matrix form X U + G X + [N, X] is returned alongside; the two
    agree to floating-point precision.
    """
    if x.n != sm.n:
        raise DimensionMismatch(f"state has {x.n} landmarks, model has {sm.n}")
    k = sm.n + 2

    r_dot = x.r @ skew(u.omega)
    v_block_dot = np.zeros((3, k))
    v_block_dot[:, 0] = x.r @ u.accel + sm.g * E3
    v_block_dot[:, 1] = x.v

    u_mat = np.zeros((3 + k, 3 + k))
    u_mat[:3, :3] = skew(u.omega)
    u_mat[:3, 3] = u.accel
    g_mat = np.zeros((3 + k, 3 + k))
    g_mat[:3, 3:] = sm.w_g
    n_dense = sm.n_mat.as_matrix()
    xm = x.as_matrix()
    matrix = xm @ u_mat + g_mat @ xm + n_dense @ xm - xm @ n_dense

    return PoseDerivative(
        r_dot=r_dot,
        v_block_dot=v_block_dot,
        matrix=matrix,
        omega_body=u.omega,
    )


def measure(x: ExtendedPose, sm: StructuralMatrices) -> MeasurementSet:
    """Body-frame landmark positions R^T (p_i - x), equal to -R^T V C."""
    y = x.r.T @ (x.landmarks - x.x[:, None])
    return MeasurementSet(y)


def apply_frame_action(s: FrameTransform, x: ExtendedPose) -> ExtendedPose:
    """Express the state in the inertial frame moved by s.

    Componentwise (R_S^T R, R_S^T v, R_S^T (x - x_S), R_S^T (p_i - x_S)).
    This is a right action: acting by s1 then s2 equals acting by s1 * s2.
    """
    rst = s.r_s.T
    v_block = x.v_block.copy()
    v_block[:, 1:] -= s.x_s[:, None]
    return ExtendedPose(rst @ x.r, rst @ v_block)


def project_base(x: ExtendedPose, sm: StructuralMatrices) -> BaseState:
    """Project onto the observable coordinates (R^T e3, -R^T V Pi)."""
    eta = x.r.T @ E3
    v_o = -(x.r.T @ x.v_block @ sm.pi_mat)
    return BaseState(eta, v_o)
