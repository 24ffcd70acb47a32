"""Error coordinates, stability certificates, and reporting metrics.

The total-space error conjugates the right-invariant error by the auxiliary
state; projecting it to the base space gives the quantities whose stability
is certified.  The certificate bundles the translational error matrix, its
Lyapunov solution, and the linearized attitude decay rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHurwitz, NotUnitVector, YawDegenerate
from .matgroups import (
    E3,
    AutomorphismState,
    ExtendedPose,
    sen_compose,
    sen_inverse,
    conjugate,
    sim_inverse,
    so3_exp,
    weighted_norm_sq,
)
from .observer import GainMatrices, Gains, build_gain_matrices
from .slam_core import (
    BaseState,
    FrameTransform,
    StructuralMatrices,
    apply_frame_action,
    frame_inverse,
    project_base,
)

__all__ = [
    "StabilityCertificate",
    "AlignmentTransform",
    "MetricRecord",
    "total_error",
    "base_error",
    "stability_matrix",
    "solve_lyapunov",
    "build_certificate",
    "lyapunov_translation",
    "lyapunov_full",
    "align_estimate",
    "error_metrics",
    "rotation_to_zyx",
]

_HURWITZ_MARGIN = -1e-9


def total_error(
    x: ExtendedPose, x_hat: ExtendedPose, z: AutomorphismState
) -> ExtendedPose:
    """Total-space error Z^-1 (X X_hat^-1) Z.

    Its rotation block is R R_hat^T; the translation block carries the
    right-invariant difference plus the auxiliary compensation term.
    """
    return conjugate(sim_inverse(z), sen_compose(x, sen_inverse(x_hat)))


def base_error(
    e_bar: ExtendedPose, z: AutomorphismState, sm: StructuralMatrices
) -> BaseState:
    """Base-space error: the observable projection of the total error."""
    return project_base(e_bar, sm)


def stability_matrix(gm: GainMatrices, sm: StructuralMatrices) -> np.ndarray:
    """Translational error system matrix C' K Pi - S'_N.

    Its characteristic polynomial is
    (s + k_p)^(n-1) (s^2 + (k_p + n k_x) s + n k_v), so it is Hurwitz for
    any valid gain set.
    """
    return sm.c_prime @ gm.k @ sm.pi_mat - sm.s_n_prime


def solve_lyapunov(a: np.ndarray) -> np.ndarray:
    """Solve A P + P A^T = -I for symmetric positive definite P.

    The equation is vectorized to (I (x) A + A (x) I) vec(P) = -vec(I) and
    solved by LU; the result is symmetrized.  At the matrix sizes that occur
    here (n + 1 <= ~10) this is cheaper than a Bartels-Stewart solver and
    P is computed once per certificate anyway.

    Raises
    ------
    NotHurwitz
        If any eigenvalue of ``a`` has real part >= -1e-9.
    """
    a = np.asarray(a, dtype=float)
    m = a.shape[0]
    if np.max(np.linalg.eigvals(a).real) >= _HURWITZ_MARGIN:
        raise NotHurwitz("matrix has an eigenvalue with nonnegative real part")
    lhs = np.kron(np.eye(m), a) + np.kron(a, np.eye(m))
    p = np.linalg.solve(lhs, -np.eye(m).reshape(-1)).reshape(m, m)
    return 0.5 * (p + p.T)


@dataclass(frozen=True)
class StabilityCertificate:
    """Executable stability certificate for a gain/model pair.

    ``a_mat`` is the translational error matrix, ``p_mat`` its Lyapunov
    solution, ``q`` the weight 2 n k_v k_r / g coupling the translational
    cost into the full Lyapunov function, and ``local_rate`` the linearized
    attitude decay rate k_r g / k_v.
    """

    a_mat: np.ndarray
    p_mat: np.ndarray
    q: float
    eigenvalues: np.ndarray
    local_rate: float


def build_certificate(gains: Gains, sm: StructuralMatrices) -> StabilityCertificate:
    """Certify a gain set: build A, solve for P, record eigen data and rates."""
    gm = build_gain_matrices(gains, sm)
    a = stability_matrix(gm, sm)
    p = solve_lyapunov(a)
    return StabilityCertificate(
        a_mat=a,
        p_mat=p,
        q=2.0 * sm.n * gains.k_v * gains.k_r / sm.g,
        eigenvalues=np.linalg.eigvals(a),
        local_rate=gains.k_r * sm.g / gains.k_v,
    )


def lyapunov_translation(v_o: np.ndarray, cert: StabilityCertificate) -> float:
    """Translational cost |V|_P^2 = tr(V P V^T); decays at rate -|V|^2."""
    return weighted_norm_sq(v_o, cert.p_mat)


def lyapunov_full(base_err: BaseState, cert: StabilityCertificate) -> float:
    """Full Lyapunov value 0.5 |eta - e3|^2 + q |V|_P^2.

    Zero exactly at the origin of the base error; its global maximum over
    zero translational error is 2, attained at the antipodal gravity
    direction.
    """
    eta = np.asarray(base_err.eta, dtype=float)
    if abs(np.linalg.norm(eta) - 1.0) >= 1e-6:
        raise NotUnitVector("gravity direction must be a unit vector")
    return float(
        0.5 * np.sum((eta - E3) ** 2) + cert.q * lyapunov_translation(base_err.v_o, cert)
    )


@dataclass(frozen=True)
class AlignmentTransform:
    """Yaw angle in [0, 2*pi) and translation removed when aligning."""

    theta: float
    t: np.ndarray


def align_estimate(
    x_hat: ExtendedPose, e_bar: ExtendedPose
) -> tuple[AlignmentTransform, ExtendedPose]:
    """Remove the unobservable yaw/translation offset from an estimate.

    The yaw is read off the rotation error as atan2 of its (1,0) over (0,0)
    entry, wrapped to [0, 2*pi); the translation is the position column of
    the error.  The estimate is re-expressed through the inverse frame
    action, so a converged estimate lands on the true trajectory.

    Raises
    ------
    YawDegenerate
        If the rotation error is gimbal-degenerate (both atan2 arguments
        vanish), which cannot occur once the gravity direction has converged.
    """
    r_e = e_bar.r
    if r_e[0, 0] ** 2 + r_e[1, 0] ** 2 < 1e-12:
        raise YawDegenerate("rotation error has no well-defined yaw")
    theta = float(np.arctan2(r_e[1, 0], r_e[0, 0])) % (2.0 * np.pi)
    t = e_bar.v_block[:, 1].copy()
    s = FrameTransform(so3_exp(theta * E3), t)
    aligned = apply_frame_action(frame_inverse(s), x_hat)
    return AlignmentTransform(theta=theta, t=t), aligned


def rotation_to_zyx(r: np.ndarray) -> tuple[float, float, float]:
    """Roll, pitch, yaw of a rotation in the aerospace yaw-pitch-roll order."""
    pitch = float(np.arcsin(np.clip(-r[2, 0], -1.0, 1.0)))
    roll = float(np.arctan2(r[2, 1], r[2, 2]))
    yaw = float(np.arctan2(r[1, 0], r[0, 0]))
    return roll, pitch, yaw


@dataclass(frozen=True)
class MetricRecord:
    """Per-sample error metrics.

    Body-frame quantities (reduced attitude angle, velocity and landmark
    errors) converge to zero; the inertial-frame quantities converge to the
    constant frame offset left by the invariance.
    """

    att_reduced: float
    vel_body: float
    lm_body: np.ndarray
    lyap_v: float
    lyap_l: float
    roll_err: float
    pitch_err: float
    yaw_err: float
    pos_inertial: float
    lm_inertial: np.ndarray


def error_metrics(
    x: ExtendedPose,
    x_hat: ExtendedPose,
    z: AutomorphismState,
    sm: StructuralMatrices,
    cert: StabilityCertificate,
) -> MetricRecord:
    """Full metric record for one true/estimated state pair."""
    e_bar = total_error(x, x_hat, z)
    be = base_error(e_bar, z, sm)
    r_e = e_bar.r

    att_reduced = float(np.arccos(np.clip(E3 @ be.eta, -1.0, 1.0)))
    vel_body = float(np.linalg.norm(x.r.T @ x.v - x_hat.r.T @ x_hat.v))
    rel_true = x.r.T @ (x.landmarks - x.x[:, None])
    rel_est = x_hat.r.T @ (x_hat.landmarks - x_hat.x[:, None])
    lm_body = np.linalg.norm(rel_true - rel_est, axis=0)

    roll_err, pitch_err, yaw_err = rotation_to_zyx(r_e)
    pos_inertial = float(np.linalg.norm(x.x - r_e @ x_hat.x))
    lm_inertial = np.linalg.norm(x.landmarks - r_e @ x_hat.landmarks, axis=0)

    lyap_v = lyapunov_translation(be.v_o, cert)
    return MetricRecord(
        att_reduced=att_reduced,
        vel_body=vel_body,
        lm_body=lm_body,
        lyap_v=lyap_v,
        lyap_l=float(0.5 * np.sum((be.eta - E3) ** 2) + cert.q * lyap_v),
        roll_err=roll_err,
        pitch_err=pitch_err,
        yaw_err=yaw_err,
        pos_inertial=pos_inertial,
        lm_inertial=lm_inertial,
    )
