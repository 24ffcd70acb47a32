"""Cross-validation of the stepping kernels against the library vector fields."""

import numpy as np
import pytest

from lislam import _stepping
from lislam.matgroups import ExtendedPose
from lislam.observer import build_gain_matrices, correction_terms, init_auxiliary
from lislam.simkit import reference_scenario, step
from lislam.slam_core import ImuInput, build_structural, measure, system_derivative
from lislam.observer import observer_derivative

HAS_COMPILED = "compiled" in _stepping.available_backends()


def setup_reference(duration=0.2, rate=500.0):
    cfg = reference_scenario(duration_s=duration, rate_hz=rate)
    sm = build_structural(cfg.n, cfg.g)
    gm = build_gain_matrices(cfg.gains, sm)
    z = init_auxiliary(cfg.gains, sm)
    steps = int(round(duration * rate))
    omega = np.tile([0.0, 0.0, 1.0], (steps, 1))
    accel = np.tile([-1.0, 0.0, -cfg.g], (steps, 1))
    return cfg, sm, gm, z, omega, accel


def kernel_args(cfg, z, omega, accel):
    x0, xh0 = cfg.true_init.pose(), cfg.est_init.pose()
    return (
        x0.r, x0.v_block, xh0.r, xh0.v_block, omega, accel,
        1.0 / cfg.rate_hz, cfg.g,
        cfg.gains.k_r, cfg.gains.k_v, cfg.gains.k_x, cfg.gains.k_p,
        z.v_z[:, 0], z.v_z[:, 1],
    )


def library_loop(cfg, sm, gm, z, omega, accel, method):
    """Reference propagation through the public vector-field API."""
    dt = 1.0 / cfg.rate_hz
    x, xh = cfg.true_init.pose(), cfg.est_init.pose()
    xs, xhs = [x], [xh]

    def fields(xc, xhc, u):
        ct = correction_terms(measure(xc, sm), xhc, z, gm, cfg.gains, sm)
        return system_derivative(xc, u, sm), observer_derivative(xhc, u, ct, z, sm)

    for t in range(omega.shape[0]):
        u = ImuInput(omega[t], accel[t])
        if method == "rk4":
            # joint four-stage update: the stages see each other's states
            d1x, d1h = fields(x, xh, u)
            x2 = ExtendedPose(x.r + 0.5 * dt * d1x.r_dot, x.v_block + 0.5 * dt * d1x.v_block_dot)
            h2 = ExtendedPose(xh.r + 0.5 * dt * d1h.r_dot, xh.v_block + 0.5 * dt * d1h.v_block_dot)
            d2x, d2h = fields(x2, h2, u)
            x3 = ExtendedPose(x.r + 0.5 * dt * d2x.r_dot, x.v_block + 0.5 * dt * d2x.v_block_dot)
            h3 = ExtendedPose(xh.r + 0.5 * dt * d2h.r_dot, xh.v_block + 0.5 * dt * d2h.v_block_dot)
            d3x, d3h = fields(x3, h3, u)
            x4 = ExtendedPose(x.r + dt * d3x.r_dot, x.v_block + dt * d3x.v_block_dot)
            h4 = ExtendedPose(xh.r + dt * d3h.r_dot, xh.v_block + dt * d3h.v_block_dot)
            d4x, d4h = fields(x4, h4, u)
            from lislam.matgroups import orthonormalize

            x = ExtendedPose(
                orthonormalize(x.r + dt / 6 * (d1x.r_dot + 2 * d2x.r_dot + 2 * d3x.r_dot + d4x.r_dot)),
                x.v_block + dt / 6 * (d1x.v_block_dot + 2 * d2x.v_block_dot + 2 * d3x.v_block_dot + d4x.v_block_dot),
            )
            xh = ExtendedPose(
                orthonormalize(xh.r + dt / 6 * (d1h.r_dot + 2 * d2h.r_dot + 2 * d3h.r_dot + d4h.r_dot)),
                xh.v_block + dt / 6 * (d1h.v_block_dot + 2 * d2h.v_block_dot + 2 * d3h.v_block_dot + d4h.v_block_dot),
            )
        else:
            dx, dh = fields(x, xh, u)
            x = step(x, lambda _: dx, dt, method)
            xh = step(xh, lambda _: dh, dt, method)
        xs.append(x)
        xhs.append(xh)
    return xs, xhs


@pytest.mark.parametrize("method", ["euler", "geometric_euler", "rk4"])
def test_pure_kernel_matches_library_fields(method):
    cfg, sm, gm, z, omega, accel = setup_reference(duration=0.1)
    r, v, rh, vh = _stepping.propagate(
        *kernel_args(cfg, z, omega, accel), method=method, backend="pure"
    )
    xs, xhs = library_loop(cfg, sm, gm, z, omega, accel, method)
    worst = 0.0
    for t in range(len(xs)):
        worst = max(worst, np.abs(r[t] - xs[t].r).max(), np.abs(v[t] - xs[t].v_block).max())
        worst = max(worst, np.abs(rh[t] - xhs[t].r).max(), np.abs(vh[t] - xhs[t].v_block).max())
    assert worst < 1e-12


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled kernel not built")
@pytest.mark.parametrize("method", ["euler", "geometric_euler", "rk4"])
def test_compiled_matches_pure(method):
    cfg, sm, gm, z, omega, accel = setup_reference(duration=0.5)
    args = kernel_args(cfg, z, omega, accel)
    out_pure = _stepping.propagate(*args, method=method, backend="pure")
    out_fast = _stepping.propagate(*args, method=method, backend="compiled")
    for a, b in zip(out_pure, out_fast):
        assert np.abs(a - b).max() < 1e-12


@pytest.mark.skipif(not HAS_COMPILED, reason="compiled kernel not built")
def test_compiled_respects_orthonormalization_flag(method="euler"):
    cfg, sm, gm, z, omega, accel = setup_reference(duration=2.0)
    args = kernel_args(cfg, z, omega, accel)
    r_on, *_ = _stepping.propagate(*args, method=method, orthonormalize_rotations=True)
    r_off, *_ = _stepping.propagate(*args, method=method, orthonormalize_rotations=False)

    def drift(r_log):
        return max(np.abs(rt.T @ rt - np.eye(3)).max() for rt in r_log)

    assert drift(r_on) < 1e-10
    assert drift(r_off) > 10 * drift(r_on)


def test_zero_steps_returns_initial_state_only():
    cfg, sm, gm, z, _, _ = setup_reference()
    empty = np.zeros((0, 3))
    r, v, rh, vh = _stepping.propagate(
        *kernel_args(cfg, z, empty, empty), method="euler", backend="pure"
    )
    assert r.shape == (1, 3, 3) and v.shape == (1, 3, 7)


def test_unknown_method_rejected():
    cfg, sm, gm, z, omega, accel = setup_reference(duration=0.01)
    with pytest.raises(ValueError):
        _stepping.propagate(*kernel_args(cfg, z, omega, accel), method="leapfrog", backend="pure")
