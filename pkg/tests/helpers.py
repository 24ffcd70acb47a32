"""Shared random-instance generators for the test suite."""

import numpy as np

from lislam.matgroups import AutomorphismState, ExtendedPose, so3_exp
from lislam.observer import Gains


def random_rotation(rng, max_angle=np.pi):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return so3_exp(rng.uniform(0.0, max_angle) * axis)


def random_pose(rng, n, scale=1.0):
    return ExtendedPose(random_rotation(rng), scale * rng.normal(size=(3, n + 2)))


def random_autostate(rng, n, scale=1.0):
    # keep the scaling block well conditioned
    a = np.eye(n + 2) + 0.3 * rng.normal(size=(n + 2, n + 2))
    return AutomorphismState(random_rotation(rng), scale * rng.normal(size=(3, n + 2)), a)


def random_valid_gains(rng, n):
    k_r, k_v, k_p = rng.uniform(0.1, 10.0, size=3)
    k_x = rng.uniform(-k_p / n + 0.05, 10.0)
    return Gains(k_r=float(k_r), k_v=float(k_v), k_x=float(k_x), k_p=float(k_p))
