"""Dense matrix Lie-group primitives: SO(3), extended poses, and automorphisms.

Rotations are plain (3, 3) numpy arrays.  Extended poses live on the group of
block matrices [[R, V], [0, I_k]] with V of shape (3, k); automorphism states
generalize the lower-right block to an invertible A of shape (k, k).  The
landmark count n corresponds to k = n + 2 (columns v, x, p_1..p_n).

All value types are immutable after construction and every operation is a
pure function, so instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotAntisymmetric, NotPositiveDefinite

__all__ = [
    "ExtendedPose",
    "AutomorphismState",
    "SeTangent",
    "SimTangent",
    "skew",
    "unskew",
    "so3_exp",
    "orthonormalize",
    "check_rotation",
    "sen_compose",
    "sen_inverse",
    "sim_compose",
    "sim_inverse",
    "conjugate",
    "weighted_norm_sq",
]

E3 = np.array([0.0, 0.0, 1.0])

_SMALL_ANGLE = 1e-8  # below this, Rodrigues switches to its series expansion


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


def skew(v: np.ndarray) -> np.ndarray:
    """Map a 3-vector to the antisymmetric matrix with skew(v) @ u = v x u."""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def unskew(m: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Invert :func:`skew`.

    Raises
    ------
    NotAntisymmetric
        If ``m + m.T`` has norm above ``tol``.
    """
    m = np.asarray(m, dtype=float)
    if np.linalg.norm(m + m.T) >= tol:
        raise NotAntisymmetric("matrix is not antisymmetric")
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def so3_exp(v: np.ndarray) -> np.ndarray:
    """Rodrigues formula for exp(skew(v)).

    For angles below 1e-8 rad the second-order series is used instead, which
    keeps the error under 1e-16 while avoiding division by the angle.
    """
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v)
    vx = skew(v)
    if angle < _SMALL_ANGLE:
        return np.eye(3) + vx + 0.5 * (vx @ vx)
    return (
        np.eye(3)
        + (np.sin(angle) / angle) * vx
        + ((1.0 - np.cos(angle)) / angle**2) * (vx @ vx)
    )


def orthonormalize(m: np.ndarray, iterations: int = 3) -> np.ndarray:
    """Project a near-rotation onto SO(3) by iterated polar Newton steps.

    Each step maps R to (R + R^-T) / 2; three iterations take the mild
    off-orthogonality left by a raw Euler update down to machine precision.
    """
    r = np.asarray(m, dtype=float)
    for _ in range(iterations):
        r = 0.5 * (r + np.linalg.inv(r).T)
    return r


def check_rotation(m: np.ndarray, tol: float = 1e-9) -> bool:
    """True if m is orthonormal with determinant one, both within tol."""
    m = np.asarray(m, dtype=float)
    return (
        np.linalg.norm(m.T @ m - np.eye(3)) < tol
        and abs(np.linalg.det(m) - 1.0) < tol
    )


@dataclass(frozen=True)
class ExtendedPose:
    """Group element (R, V) acting as the block matrix [[R, V], [0, I]].

    For the landmark-inertial state the columns of ``v_block`` are the
    velocity v, position x, and landmark positions p_1..p_n, all in meters
    (m/s for v).
    """

    r: np.ndarray
    v_block: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", _frozen(self.r))
        object.__setattr__(self, "v_block", _frozen(self.v_block))
        if self.r.shape != (3, 3):
            raise DimensionMismatch(f"rotation block must be 3x3, got {self.r.shape}")
        if self.v_block.ndim != 2 or self.v_block.shape[0] != 3:
            raise DimensionMismatch(
                f"translation block must be 3xk, got {self.v_block.shape}"
            )

    @property
    def k(self) -> int:
        """Width of the translation block."""
        return self.v_block.shape[1]

    @property
    def n(self) -> int:
        """Number of landmark columns (k - 2)."""
        return self.k - 2

    @property
    def v(self) -> np.ndarray:
        return self.v_block[:, 0]

    @property
    def x(self) -> np.ndarray:
        return self.v_block[:, 1]

    @property
    def landmarks(self) -> np.ndarray:
        """Landmark positions as a (3, n) matrix."""
        return self.v_block[:, 2:]

    @classmethod
    def identity(cls, n: int) -> "ExtendedPose":
        return cls(np.eye(3), np.zeros((3, n + 2)))

    @classmethod
    def from_components(
        cls, r: np.ndarray, v: np.ndarray, x: np.ndarray, landmarks: np.ndarray
    ) -> "ExtendedPose":
        """Assemble from velocity, position, and a (3, n) landmark matrix."""
        landmarks = np.asarray(landmarks, dtype=float).reshape(3, -1)
        return cls(r, np.column_stack([v, x, landmarks]))

    def as_matrix(self) -> np.ndarray:
        """Dense (k+3, k+3) matrix form."""
        k = self.k
        m = np.eye(3 + k)
        m[:3, :3] = self.r
        m[:3, 3:] = self.v_block
        return m


@dataclass(frozen=True)
class SeTangent:
    """Tangent element (omega, W) of the extended pose group."""

    omega: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega", _frozen(self.omega))
        object.__setattr__(self, "w", _frozen(self.w))

    def as_matrix(self) -> np.ndarray:
        k = self.w.shape[1]
        m = np.zeros((3 + k, 3 + k))
        m[:3, :3] = skew(self.omega)
        m[:3, 3:] = self.w
        return m


@dataclass(frozen=True)
class AutomorphismState:
    """Group element (R, V, A) acting as [[R, V], [0, A]] with A invertible."""

    r_z: np.ndarray
    v_z: np.ndarray
    a_z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r_z", _frozen(self.r_z))
        object.__setattr__(self, "v_z", _frozen(self.v_z))
        object.__setattr__(self, "a_z", _frozen(self.a_z))
        k = self.v_z.shape[1]
        if self.a_z.shape != (k, k):
            raise DimensionMismatch(
                f"scaling block must be {k}x{k}, got {self.a_z.shape}"
            )
        if abs(np.linalg.det(self.a_z)) <= 1e-12:
            raise DimensionMismatch("scaling block is numerically singular")

    @property
    def k(self) -> int:
        return self.v_z.shape[1]

    @classmethod
    def identity(cls, n: int) -> "AutomorphismState":
        return cls(np.eye(3), np.zeros((3, n + 2)), np.eye(n + 2))

    def as_matrix(self) -> np.ndarray:
        k = self.k
        m = np.zeros((3 + k, 3 + k))
        m[:3, :3] = self.r_z
        m[:3, 3:] = self.v_z
        m[3:, 3:] = self.a_z
        return m


@dataclass(frozen=True)
class SimTangent:
    """Tangent element (omega, W, S) of the automorphism group."""

    omega: np.ndarray
    w: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega", _frozen(self.omega))
        object.__setattr__(self, "w", _frozen(self.w))
        object.__setattr__(self, "s", _frozen(self.s))

    def as_matrix(self) -> np.ndarray:
        k = self.w.shape[1]
        m = np.zeros((3 + k, 3 + k))
        m[:3, :3] = skew(self.omega)
        m[:3, 3:] = self.w
        m[3:, 3:] = self.s
        return m


def _require_same_width(a, b) -> None:
    if a.k != b.k:
        raise DimensionMismatch(f"block widths differ: {a.k} vs {b.k}")


def sen_compose(a: ExtendedPose, b: ExtendedPose) -> ExtendedPose:
    """Group product, blockwise: (Ra Rb, Ra Vb + Va)."""
    _require_same_width(a, b)
    return ExtendedPose(a.r @ b.r, a.r @ b.v_block + a.v_block)


def sen_inverse(a: ExtendedPose) -> ExtendedPose:
    """Group inverse, blockwise: (R^T, -R^T V)."""
    return ExtendedPose(a.r.T, -(a.r.T @ a.v_block))


def sim_compose(a: AutomorphismState, b: AutomorphismState) -> AutomorphismState:
    """Group product: (Ra Rb, Ra Vb + Va Ab, Aa Ab)."""
    _require_same_width(a, b)
    return AutomorphismState(a.r_z @ b.r_z, a.r_z @ b.v_z + a.v_z @ b.a_z, a.a_z @ b.a_z)


def sim_inverse(a: AutomorphismState) -> AutomorphismState:
    """Group inverse: (R^T, -R^T V A^-1, A^-1)."""
    a_inv = np.linalg.inv(a.a_z)
    return AutomorphismState(a.r_z.T, -(a.r_z.T @ a.v_z @ a_inv), a_inv)


def conjugate(z: AutomorphismState, x: ExtendedPose) -> ExtendedPose:
    """Automorphism Z X Z^-1 of the extended pose group.

    Computed blockwise, so the lower-right identity block of the result is
    exact rather than recovered from a dense product.
    """
    _require_same_width(z, x)
    r_out = z.r_z @ x.r @ z.r_z.T
    v_out = z.r_z @ x.v_block + z.v_z - r_out @ z.v_z
    # right-multiply by A^-1 via a solve on the transposed system
    v_out = np.linalg.solve(z.a_z.T, v_out.T).T
    return ExtendedPose(r_out, v_out)


def weighted_norm_sq(a: np.ndarray, p: np.ndarray, tol: float = 1e-9) -> float:
    """Squared weighted norm tr(A P A^T) for symmetric positive definite P.

    Raises
    ------
    NotPositiveDefinite
        If P is asymmetric beyond tol or has a nonpositive eigenvalue.
    """
    a = np.asarray(a, dtype=float)
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1] or a.shape[-1] != p.shape[0]:
        raise DimensionMismatch(f"weight shape {p.shape} does not match {a.shape}")
    if np.linalg.norm(p - p.T) >= tol:
        raise NotPositiveDefinite("weight matrix is not symmetric")
    if np.linalg.eigvalsh(p).min() <= 0.0:
        raise NotPositiveDefinite("weight matrix has a nonpositive eigenvalue")
    return float(np.trace(a @ p @ a.T))
