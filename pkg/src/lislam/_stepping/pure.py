"""Pure-numpy closed-loop stepping kernel.

Reference implementation of the coupled true-state / observer propagation.
The compiled extension mirrors this loop operation for operation; tests pin
the two against each other and against the library-level vector fields.
"""

from __future__ import annotations

import numpy as np

from ..matgroups import E3, orthonormalize, skew, so3_exp

__all__ = ["propagate"]


def _deriv(r, v, rh, vh, om, ac, g, k_r, k_v, k_x, k_p, v_z, x_z):
    """Joint derivative of the true state and the observer state.

    The observer sees the body-frame landmark positions of the true state at
    the same instant (noiseless, zero-order hold).
    """
    r_dot = r @ skew(om)
    v_dot = np.zeros_like(v)
    v_dot[:, 0] = r @ ac + g * E3
    v_dot[:, 1] = v[:, 0]

    y = r.T @ (v[:, 2:] - v[:, 1:2])
    y_hat = rh.T @ (vh[:, 2:] - vh[:, 1:2])
    innovation = rh @ (y - y_hat)
    s = innovation.sum(axis=1)
    omega_delta = k_r * np.cross(E3, s)
    od = skew(omega_delta)

    rh_dot = rh @ skew(om) + od @ rh
    vh_dot = np.empty_like(vh)
    vh_dot[:, 0] = rh @ ac + g * E3 - k_v * s + od @ (vh[:, 0] - v_z)
    vh_dot[:, 1] = vh[:, 0] - k_x * s + od @ (vh[:, 1] - x_z)
    vh_dot[:, 2:] = k_p * innovation + od @ vh[:, 2:]
    return r_dot, v_dot, rh_dot, vh_dot, omega_delta


def propagate(
    r0: np.ndarray,
    v0: np.ndarray,
    rhat0: np.ndarray,
    vhat0: np.ndarray,
    omega_table: np.ndarray,
    accel_table: np.ndarray,
    dt: float,
    g: float,
    k_r: float,
    k_v: float,
    k_x: float,
    k_p: float,
    v_z: np.ndarray,
    x_z: np.ndarray,
    method: str = "euler",
    orthonormalize_rotations: bool = True,
):
    """Propagate system and observer over the whole input table.

    Parameters
    ----------
    r0, v0, rhat0, vhat0:
        Initial rotation (3, 3) and translation (3, n+2) blocks of the true
        state and the estimate.
    omega_table, accel_table:
        (T, 3) zero-order-hold input samples; row k applies on step k.
    dt, g:
        Step length [s] and gravity [m/s^2].
    k_r, k_v, k_x, k_p:
        Observer gains.
    v_z, x_z:
        Velocity and position columns of the constant auxiliary translation.
    method:
        "euler" (entrywise update plus rotation re-orthonormalization),
        "geometric_euler" (rotations via exponential increments, right for
        body rates and left for the correction), or "rk4" (classic 4-stage
        on matrix entries with a final re-orthonormalization).
    orthonormalize_rotations:
        Disable to keep raw entrywise rotation updates (strict literal Euler).

    Returns
    -------
    (r_log, v_log, rhat_log, vhat_log):
        Arrays of length T+1 holding every state including the initial one.
    """
    steps = omega_table.shape[0]
    k = v0.shape[1]
    r_log = np.empty((steps + 1, 3, 3))
    v_log = np.empty((steps + 1, 3, k))
    rhat_log = np.empty((steps + 1, 3, 3))
    vhat_log = np.empty((steps + 1, 3, k))

    r, v = r0.copy(), v0.copy()
    rh, vh = rhat0.copy(), vhat0.copy()
    r_log[0], v_log[0], rhat_log[0], vhat_log[0] = r, v, rh, vh
    args = (g, k_r, k_v, k_x, k_p, v_z, x_z)

    for t in range(steps):
        om, ac = omega_table[t], accel_table[t]
        if method == "euler":
            r_dot, v_dot, rh_dot, vh_dot, _ = _deriv(r, v, rh, vh, om, ac, *args)
            r = r + dt * r_dot
            v = v + dt * v_dot
            rh = rh + dt * rh_dot
            vh = vh + dt * vh_dot
            if orthonormalize_rotations:
                r = orthonormalize(r)
                rh = orthonormalize(rh)
        elif method == "geometric_euler":
            _, v_dot, _, vh_dot, omega_delta = _deriv(r, v, rh, vh, om, ac, *args)
            body_inc = so3_exp(dt * om)
            r = r @ body_inc
            rh = so3_exp(dt * omega_delta) @ rh @ body_inc
            v = v + dt * v_dot
            vh = vh + dt * vh_dot
        elif method == "rk4":
            s1 = _deriv(r, v, rh, vh, om, ac, *args)[:4]
            s2 = _deriv(
                r + 0.5 * dt * s1[0],
                v + 0.5 * dt * s1[1],
                rh + 0.5 * dt * s1[2],
                vh + 0.5 * dt * s1[3],
                om, ac, *args,
            )[:4]
            s3 = _deriv(
                r + 0.5 * dt * s2[0],
                v + 0.5 * dt * s2[1],
                rh + 0.5 * dt * s2[2],
                vh + 0.5 * dt * s2[3],
                om, ac, *args,
            )[:4]
            s4 = _deriv(
                r + dt * s3[0],
                v + dt * s3[1],
                rh + dt * s3[2],
                vh + dt * s3[3],
                om, ac, *args,
            )[:4]
            sixth = dt / 6.0
            r = r + sixth * (s1[0] + 2.0 * s2[0] + 2.0 * s3[0] + s4[0])
            v = v + sixth * (s1[1] + 2.0 * s2[1] + 2.0 * s3[1] + s4[1])
            rh = rh + sixth * (s1[2] + 2.0 * s2[2] + 2.0 * s3[2] + s4[2])
            vh = vh + sixth * (s1[3] + 2.0 * s2[3] + 2.0 * s3[3] + s4[3])
            if orthonormalize_rotations:
                r = orthonormalize(r)
                rh = orthonormalize(rh)
        else:
            raise ValueError(f"unknown integrator {method!r}")

        r_log[t + 1], v_log[t + 1] = r, v
        rhat_log[t + 1], vhat_log[t + 1] = rh, vh

    return r_log, v_log, rhat_log, vhat_log
