"""Stepping kernel with a compiled fast path and a pure-numpy fallback.

The compiled extension is used when it imported successfully; set the
environment variable ``LISLAM_KERNEL`` to ``pure`` or ``compiled`` to force
a backend (``compiled`` raises if the extension is unavailable).
"""

from __future__ import annotations

import os

import numpy as np

from . import pure

try:
    from . import _compiled
except ImportError:  # extension not built; pure fallback stays in charge
    _compiled = None

__all__ = ["propagate", "active_backend", "available_backends"]

_ENV_VAR = "LISLAM_KERNEL"


def available_backends() -> tuple[str, ...]:
    return ("pure", "compiled") if _compiled is not None else ("pure",)


def active_backend() -> str:
    """Backend that :func:`propagate` will dispatch to."""
    choice = os.environ.get(_ENV_VAR, "auto")
    if choice == "pure":
        return "pure"
    if choice == "compiled":
        if _compiled is None:
            raise ImportError(
                "LISLAM_KERNEL=compiled but the extension is not built"
            )
        return "compiled"
    return "compiled" if _compiled is not None else "pure"


def propagate(
    r0,
    v0,
    rhat0,
    vhat0,
    omega_table,
    accel_table,
    dt: float,
    g: float,
    k_r: float,
    k_v: float,
    k_x: float,
    k_p: float,
    v_z,
    x_z,
    method: str = "euler",
    orthonormalize_rotations: bool = True,
    backend: str | None = None,
):
    """Propagate the coupled system/observer pair; see ``pure.propagate``."""
    name = backend or active_backend()
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled stepping kernel is not built")
        impl = _compiled.propagate
    elif name == "pure":
        impl = pure.propagate
    else:
        raise ValueError(f"unknown backend {name!r}")
    return impl(
        np.asarray(r0, dtype=float),
        np.asarray(v0, dtype=float),
        np.asarray(rhat0, dtype=float),
        np.asarray(vhat0, dtype=float),
        np.asarray(omega_table, dtype=float),
        np.asarray(accel_table, dtype=float),
        float(dt),
        float(g),
        float(k_r),
        float(k_v),
        float(k_x),
        float(k_p),
        np.asarray(v_z, dtype=float),
        np.asarray(x_z, dtype=float),
        method=method,
        orthonormalize_rotations=orthonormalize_rotations,
    )
