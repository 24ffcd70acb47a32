"""Synchronous nonlinear observer for landmark-inertial SLAM.

A library and CLI for joint estimation of a robot's attitude, velocity, and
position together with static landmark positions, from IMU and body-frame
landmark measurements.  The observer integrates a single extended pose on
SE_{n+2}(3); a constant auxiliary state shapes its error coordinates so that
the observable part of the error is globally exponentially (translations)
and almost-globally asymptotically (gravity direction) stable, and the
stability certificates are computed, not assumed.
"""

from .analysis import (
    AlignmentTransform,
    MetricRecord,
    StabilityCertificate,
    align_estimate,
    base_error,
    build_certificate,
    error_metrics,
    lyapunov_full,
    lyapunov_translation,
    solve_lyapunov,
    stability_matrix,
    total_error,
)
from .matgroups import (
    AutomorphismState,
    ExtendedPose,
    SeTangent,
    SimTangent,
    conjugate,
    orthonormalize,
    sen_compose,
    sen_inverse,
    sim_compose,
    sim_inverse,
    skew,
    so3_exp,
    unskew,
    weighted_norm_sq,
)
from .observer import (
    CorrectionTerms,
    GainMatrices,
    Gains,
    auxiliary_derivative,
    build_gain_matrices,
    correction_terms,
    init_auxiliary,
    observer_derivative,
)
from .simkit import (
    ScenarioConfig,
    TrajectoryLog,
    circular_reference,
    reference_scenario,
    run_simulation,
    step,
)
from .slam_core import (
    BaseState,
    FrameTransform,
    ImuInput,
    MeasurementSet,
    StructuralMatrices,
    apply_frame_action,
    build_structural,
    measure,
    project_base,
    system_derivative,
)

__version__ = "0.1.0"
