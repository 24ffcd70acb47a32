import numpy as np
import pytest

from helpers import random_pose, random_valid_gains
from lislam.errors import InvalidDimension, NotIsotropy
from lislam.matgroups import E3, ExtendedPose, so3_exp
from lislam.observer import build_gain_matrices
from lislam.simkit import REFERENCE_LANDMARKS
from lislam.slam_core import (
    FrameTransform,
    ImuInput,
    apply_frame_action,
    build_structural,
    frame_compose,
    measure,
    project_base,
    system_derivative,
)


def reference_initial_pose():
    return ExtendedPose.from_components(
        np.eye(3), np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 1.0]), REFERENCE_LANDMARKS
    )


def random_yaw_translation(rng):
    return FrameTransform(so3_exp(rng.uniform(0, 2 * np.pi) * E3), rng.normal(size=3))


class TestBuildStructural:
    def test_rejects_zero_landmarks(self):
        with pytest.raises(InvalidDimension):
            build_structural(0)

    def test_rejects_nonpositive_gravity(self):
        with pytest.raises(InvalidDimension):
            build_structural(2, g=0.0)

    def test_n1_measurement_selector(self):
        sm = build_structural(1)
        assert np.array_equal(sm.c, np.array([[0.0], [1.0], [-1.0]]))

    def test_projection_factorization_exact(self):
        for n in range(1, 9):
            sm = build_structural(n)
            assert np.array_equal(sm.pi_mat @ sm.c_prime, sm.c)

    def test_shift_blocks_intertwine(self):
        for n in range(1, 9):
            sm = build_structural(n)
            assert np.abs(sm.pi_mat @ sm.s_n_prime - sm.s_n @ sm.pi_mat).max() <= 1e-14

    def test_gain_kernel_identity(self):
        rng = np.random.default_rng(30)
        for n in range(1, 9):
            sm = build_structural(n)
            gm = build_gain_matrices(random_valid_gains(rng, n), sm)
            assert np.abs(gm.k_z @ sm.pi_mat).max() <= 1e-14

    def test_selector_entries(self):
        sm = build_structural(6)
        for mat in (sm.c, sm.pi_mat):
            assert set(np.unique(mat)) <= {-1.0, 0.0, 1.0}

    def test_gravity_block(self):
        sm = build_structural(3, g=9.81)
        expected = np.zeros((3, 5))
        expected[2, 0] = 9.81
        assert np.array_equal(sm.w_g, expected)


class TestSystemDerivative:
    def test_hover_cancels_gravity(self):
        sm = build_structural(2)
        x = ExtendedPose.from_components(
            np.eye(3), np.array([1.0, 2.0, 3.0]), np.zeros(3), np.ones((3, 2))
        )
        d = system_derivative(x, ImuInput(np.zeros(3), -sm.g * E3), sm)
        assert np.allclose(d.v_block_dot[:, 0], 0.0)
        assert np.allclose(d.v_block_dot[:, 1], x.v)
        assert np.allclose(d.v_block_dot[:, 2:], 0.0)
        assert np.allclose(d.r_dot, 0.0)

    def test_reference_initial_acceleration(self):
        sm = build_structural(5)
        u = ImuInput(np.array([0.0, 0.0, 1.0]), np.array([-1.0, 0.0, -sm.g]))
        d = system_derivative(reference_initial_pose(), u, sm)
        assert np.allclose(d.v_block_dot[:, 0], [-1.0, 0.0, 0.0])

    def test_landmarks_are_static(self):
        rng = np.random.default_rng(31)
        sm = build_structural(4)
        for _ in range(10):
            x = random_pose(rng, 4)
            u = ImuInput(rng.normal(size=3), rng.normal(size=3))
            d = system_derivative(x, u, sm)
            assert np.array_equal(d.v_block_dot[:, 2:], np.zeros((3, 4)))

    def test_matrix_and_component_forms_agree(self):
        rng = np.random.default_rng(32)
        for n in (1, 3, 8):
            sm = build_structural(n)
            for _ in range(20):
                x = random_pose(rng, n)
                u = ImuInput(rng.normal(size=3), rng.normal(size=3))
                d = system_derivative(x, u, sm)
                assembled = np.zeros((n + 5, n + 5))
                assembled[:3, :3] = d.r_dot
                assembled[:3, 3:] = d.v_block_dot
                assert np.abs(assembled - d.matrix).max() < 1e-12


class TestMeasure:
    def test_identity_frame(self):
        sm = build_structural(3)
        p = np.arange(9.0).reshape(3, 3)
        x = ExtendedPose.from_components(np.eye(3), np.zeros(3), np.zeros(3), p)
        assert np.allclose(measure(x, sm).y, p)

    def test_reference_initial_measurement(self):
        sm = build_structural(5)
        y = measure(reference_initial_pose(), sm)
        assert np.allclose(y.y[:, 0], [-0.5, 0.5, -1.0])

    def test_matches_selector_identity(self):
        rng = np.random.default_rng(33)
        for n in (1, 4, 8):
            sm = build_structural(n)
            x = random_pose(rng, n)
            direct = measure(x, sm).y
            via_selector = -(x.r.T @ x.v_block @ sm.c)
            assert np.abs(direct - via_selector).max() < 1e-12

    def test_invariant_under_frame_action(self):
        rng = np.random.default_rng(34)
        sm = build_structural(3)
        x = random_pose(rng, 3)
        for _ in range(30):
            s = random_yaw_translation(rng)
            moved = apply_frame_action(s, x)
            assert np.abs(measure(moved, sm).y - measure(x, sm).y).max() < 1e-12

    def test_base_space_factorization(self):
        rng = np.random.default_rng(35)
        sm = build_structural(4)
        x = random_pose(rng, 4)
        y = measure(x, sm).y
        v_o = project_base(x, sm).v_o
        assert np.abs(y - v_o @ sm.c_prime).max() < 1e-12


class TestFrameAction:
    def test_identity(self):
        rng = np.random.default_rng(36)
        x = random_pose(rng, 2)
        out = apply_frame_action(FrameTransform.identity(), x)
        assert np.allclose(out.as_matrix(), x.as_matrix())

    def test_pure_translation(self):
        rng = np.random.default_rng(37)
        x = random_pose(rng, 2)
        t = np.array([1.0, -2.0, 3.0])
        out = apply_frame_action(FrameTransform(np.eye(3), t), x)
        assert np.allclose(out.r, x.r)
        assert np.allclose(out.v, x.v)
        assert np.allclose(out.x, x.x - t)
        assert np.allclose(out.landmarks, x.landmarks - t[:, None])

    def test_right_action_property(self):
        rng = np.random.default_rng(38)
        x = random_pose(rng, 3)
        for _ in range(10):
            s1, s2 = random_yaw_translation(rng), random_yaw_translation(rng)
            seq = apply_frame_action(s2, apply_frame_action(s1, x))
            joint = apply_frame_action(frame_compose(s1, s2), x)
            assert np.abs(seq.as_matrix() - joint.as_matrix()).max() < 1e-10

    def test_rejects_tilted_rotation(self):
        with pytest.raises(NotIsotropy):
            FrameTransform(so3_exp(np.array([0.3, 0.0, 0.0])), np.zeros(3))

    def test_projection_invariance(self):
        rng = np.random.default_rng(39)
        sm = build_structural(3)
        x = random_pose(rng, 3)
        base = project_base(x, sm)
        for _ in range(100):
            s = random_yaw_translation(rng)
            moved = project_base(apply_frame_action(s, x), sm)
            assert np.abs(moved.eta - base.eta).max() < 1e-12
            assert np.abs(moved.v_o - base.v_o).max() < 1e-12

    def test_dynamics_invariance(self):
        # the derivative of a frame-moved trajectory is the frame-moved derivative
        rng = np.random.default_rng(40)
        sm = build_structural(3)
        for _ in range(20):
            x = random_pose(rng, 3)
            u = ImuInput(rng.normal(size=3), rng.normal(size=3))
            s = random_yaw_translation(rng)
            d = system_derivative(x, u, sm)
            d_moved = system_derivative(apply_frame_action(s, x), u, sm)
            assert np.abs(d_moved.r_dot - s.r_s.T @ d.r_dot).max() < 1e-10
            assert np.abs(d_moved.v_block_dot - s.r_s.T @ d.v_block_dot).max() < 1e-10


class TestProjectBase:
    def test_identity_state(self):
        sm = build_structural(2)
        base = project_base(ExtendedPose.identity(2), sm)
        assert np.allclose(base.eta, E3)
        assert np.allclose(base.v_o, 0.0)

    def test_reference_initial_projection(self):
        sm = build_structural(5)
        base = project_base(reference_initial_pose(), sm)
        assert np.allclose(base.v_o[:, 0], [0.0, 1.0, 0.0])
        assert np.allclose(base.v_o[:, 1], [-0.5, 0.5, -1.0])

    def test_coordinate_vs_componentwise(self):
        rng = np.random.default_rng(41)
        for n in (1, 5):
            sm = build_structural(n)
            x = random_pose(rng, n)
            base = project_base(x, sm)
            assert np.abs(base.eta - x.r.T @ E3).max() < 1e-12
            assert np.abs(base.v_o[:, 0] - x.r.T @ x.v).max() < 1e-12
            rel = x.r.T @ (x.landmarks - x.x[:, None])
            assert np.abs(base.v_o[:, 1:] - rel).max() < 1e-12
