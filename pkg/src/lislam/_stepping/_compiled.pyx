# cython: language_level=3
"""Compiled closed-loop stepping kernel.

Mirrors ``lislam._stepping.pure.propagate`` with C loops over the small
dense blocks; the landmark count stays a runtime value.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()


cdef inline void _cross(const double* a, const double* b, double* out) nogil:
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]


cdef inline void _mat3_mul(const double[:, ::1] a, const double[:, ::1] b,
                           double[:, ::1] out) nogil:
    cdef int i, j
    for i in range(3):
        for j in range(3):
            out[i, j] = a[i, 0] * b[0, j] + a[i, 1] * b[1, j] + a[i, 2] * b[2, j]


cdef inline void _polar3(double[:, ::1] r) nogil:
    # three Newton steps of R <- (R + R^-T) / 2; R^-T is the cofactor
    # matrix over the determinant, so no transpose is needed
    cdef double c[3][3]
    cdef double det
    cdef int it, i, j
    for it in range(3):
        c[0][0] = r[1, 1] * r[2, 2] - r[1, 2] * r[2, 1]
        c[0][1] = r[1, 2] * r[2, 0] - r[1, 0] * r[2, 2]
        c[0][2] = r[1, 0] * r[2, 1] - r[1, 1] * r[2, 0]
        c[1][0] = r[0, 2] * r[2, 1] - r[0, 1] * r[2, 2]
        c[1][1] = r[0, 0] * r[2, 2] - r[0, 2] * r[2, 0]
        c[1][2] = r[0, 1] * r[2, 0] - r[0, 0] * r[2, 1]
        c[2][0] = r[0, 1] * r[1, 2] - r[0, 2] * r[1, 1]
        c[2][1] = r[0, 2] * r[1, 0] - r[0, 0] * r[1, 2]
        c[2][2] = r[0, 0] * r[1, 1] - r[0, 1] * r[1, 0]
        det = r[0, 0] * c[0][0] + r[0, 1] * c[0][1] + r[0, 2] * c[0][2]
        for i in range(3):
            for j in range(3):
                r[i, j] = 0.5 * (r[i, j] + c[i][j] / det)


cdef inline void _so3_exp(const double* w, double[:, ::1] out) nogil:
    cdef double a2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    cdef double a = sqrt(a2)
    cdef double ka, kb
    cdef int i, j
    if a < 1e-8:
        ka = 1.0
        kb = 0.5
    else:
        ka = sin(a) / a
        kb = (1.0 - cos(a)) / a2
    # out = I + ka * skew(w) + kb * (w w^T - a2 I)
    for i in range(3):
        for j in range(3):
            out[i, j] = kb * w[i] * w[j]
        out[i, i] += 1.0 - kb * a2
    out[0, 1] -= ka * w[2]
    out[0, 2] += ka * w[1]
    out[1, 0] += ka * w[2]
    out[1, 2] -= ka * w[0]
    out[2, 0] -= ka * w[1]
    out[2, 1] += ka * w[0]


cdef inline void _rot_times_skew(const double[:, ::1] r, const double* w,
                                 double[:, ::1] out) nogil:
    # out = r @ skew(w)
    cdef int i
    for i in range(3):
        out[i, 0] = r[i, 1] * w[2] - r[i, 2] * w[1]
        out[i, 1] = r[i, 2] * w[0] - r[i, 0] * w[2]
        out[i, 2] = r[i, 0] * w[1] - r[i, 1] * w[0]


cdef void _deriv(const double[:, ::1] r, const double[:, ::1] v,
                 const double[:, ::1] rh, const double[:, ::1] vh,
                 const double* om, const double* ac,
                 double g, double k_r, double k_v, double k_x, double k_p,
                 const double* v_z, const double* x_z,
                 double[:, ::1] r_dot, double[:, ::1] v_dot,
                 double[:, ::1] rh_dot, double[:, ::1] vh_dot,
                 double* od_out) nogil:
    cdef int kk = v.shape[1]
    cdef int n = kk - 2
    cdef int i, j, c
    cdef double tmp[3]
    cdef double yi[3]
    cdef double yhi[3]
    cdef double di[3]
    cdef double s[3]
    cdef double od[3]
    cdef double shifted[3]
    cdef double crossed[3]

    _rot_times_skew(r, om, r_dot)
    for i in range(3):
        v_dot[i, 0] = r[i, 0] * ac[0] + r[i, 1] * ac[1] + r[i, 2] * ac[2]
        v_dot[i, 1] = v[i, 0]
        for c in range(2, kk):
            v_dot[i, c] = 0.0
    v_dot[2, 0] += g

    # innovations R_hat (y_i - y_hat_i); stored raw in the landmark columns
    # of vh_dot until the attitude rate is known
    s[0] = s[1] = s[2] = 0.0
    for c in range(n):
        for i in range(3):
            tmp[i] = v[i, 2 + c] - v[i, 1]
        for j in range(3):
            yi[j] = r[0, j] * tmp[0] + r[1, j] * tmp[1] + r[2, j] * tmp[2]
        for i in range(3):
            tmp[i] = vh[i, 2 + c] - vh[i, 1]
        for j in range(3):
            yhi[j] = rh[0, j] * tmp[0] + rh[1, j] * tmp[1] + rh[2, j] * tmp[2]
        for j in range(3):
            di[j] = yi[j] - yhi[j]
        for i in range(3):
            tmp[i] = rh[i, 0] * di[0] + rh[i, 1] * di[1] + rh[i, 2] * di[2]
            vh_dot[i, 2 + c] = tmp[i]
            s[i] += tmp[i]

    # attitude correction rate k_r * (e3 x s)
    od[0] = -k_r * s[1]
    od[1] = k_r * s[0]
    od[2] = 0.0
    od_out[0] = od[0]
    od_out[1] = od[1]
    od_out[2] = od[2]

    _rot_times_skew(rh, om, rh_dot)
    for j in range(3):
        for i in range(3):
            tmp[i] = rh[i, j]
        _cross(od, tmp, crossed)
        for i in range(3):
            rh_dot[i, j] += crossed[i]

    for i in range(3):
        shifted[i] = vh[i, 0] - v_z[i]
    _cross(od, shifted, crossed)
    for i in range(3):
        vh_dot[i, 0] = (rh[i, 0] * ac[0] + rh[i, 1] * ac[1] + rh[i, 2] * ac[2]
                        - k_v * s[i] + crossed[i])
    vh_dot[2, 0] += g

    for i in range(3):
        shifted[i] = vh[i, 1] - x_z[i]
    _cross(od, shifted, crossed)
    for i in range(3):
        vh_dot[i, 1] = vh[i, 0] - k_x * s[i] + crossed[i]

    for c in range(n):
        for i in range(3):
            shifted[i] = vh[i, 2 + c]
        _cross(od, shifted, crossed)
        for i in range(3):
            vh_dot[i, 2 + c] = k_p * vh_dot[i, 2 + c] + crossed[i]


cdef inline void _axpy(double[:, ::1] out, const double[:, ::1] base,
                       double scale, const double[:, ::1] inc) nogil:
    cdef int i, j
    for i in range(out.shape[0]):
        for j in range(out.shape[1]):
            out[i, j] = base[i, j] + scale * inc[i, j]


cdef inline void _rk4_combine(double[:, ::1] y, double sixth,
                              const double[:, ::1] k1, const double[:, ::1] k2,
                              const double[:, ::1] k3, const double[:, ::1] k4) nogil:
    cdef int i, j
    for i in range(y.shape[0]):
        for j in range(y.shape[1]):
            y[i, j] += sixth * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])


def propagate(r0, v0, rhat0, vhat0, omega_table, accel_table,
              double dt, double g,
              double k_r, double k_v, double k_x, double k_p,
              v_z, x_z, method="euler", orthonormalize_rotations=True):
    """Compiled counterpart of :func:`lislam._stepping.pure.propagate`."""
    cdef int method_id
    if method == "euler":
        method_id = 0
    elif method == "geometric_euler":
        method_id = 1
    elif method == "rk4":
        method_id = 2
    else:
        raise ValueError(f"unknown integrator {method!r}")

    om_tab = np.ascontiguousarray(omega_table, dtype=np.float64)
    ac_tab = np.ascontiguousarray(accel_table, dtype=np.float64)
    cdef double[:, ::1] om_v = om_tab
    cdef double[:, ::1] ac_v = ac_tab
    cdef int steps = om_tab.shape[0]
    cdef int kk = np.asarray(v0).shape[1]
    cdef bint ortho = bool(orthonormalize_rotations)

    r_log = np.empty((steps + 1, 3, 3))
    v_log = np.empty((steps + 1, 3, kk))
    rhat_log = np.empty((steps + 1, 3, 3))
    vhat_log = np.empty((steps + 1, 3, kk))
    cdef double[:, :, ::1] r_log_v = r_log
    cdef double[:, :, ::1] v_log_v = v_log
    cdef double[:, :, ::1] rhat_log_v = rhat_log
    cdef double[:, :, ::1] vhat_log_v = vhat_log

    cdef double[:, ::1] r = np.ascontiguousarray(r0, dtype=np.float64).copy()
    cdef double[:, ::1] v = np.ascontiguousarray(v0, dtype=np.float64).copy()
    cdef double[:, ::1] rh = np.ascontiguousarray(rhat0, dtype=np.float64).copy()
    cdef double[:, ::1] vh = np.ascontiguousarray(vhat0, dtype=np.float64).copy()

    vz_arr = np.ascontiguousarray(v_z, dtype=np.float64)
    xz_arr = np.ascontiguousarray(x_z, dtype=np.float64)
    cdef double[::1] vz_v = vz_arr
    cdef double[::1] xz_v = xz_arr

    # stage and scratch buffers (reused every step)
    cdef double[:, ::1] kr1 = np.empty((3, 3)), kv1 = np.empty((3, kk))
    cdef double[:, ::1] krh1 = np.empty((3, 3)), kvh1 = np.empty((3, kk))
    cdef double[:, ::1] kr2 = np.empty((3, 3)), kv2 = np.empty((3, kk))
    cdef double[:, ::1] krh2 = np.empty((3, 3)), kvh2 = np.empty((3, kk))
    cdef double[:, ::1] kr3 = np.empty((3, 3)), kv3 = np.empty((3, kk))
    cdef double[:, ::1] krh3 = np.empty((3, 3)), kvh3 = np.empty((3, kk))
    cdef double[:, ::1] kr4 = np.empty((3, 3)), kv4 = np.empty((3, kk))
    cdef double[:, ::1] krh4 = np.empty((3, 3)), kvh4 = np.empty((3, kk))
    cdef double[:, ::1] ra = np.empty((3, 3)), va = np.empty((3, kk))
    cdef double[:, ::1] rha = np.empty((3, 3)), vha = np.empty((3, kk))
    cdef double[:, ::1] exp_body = np.empty((3, 3))
    cdef double[:, ::1] exp_corr = np.empty((3, 3))
    cdef double[:, ::1] rot_tmp = np.empty((3, 3))

    cdef double od[3]
    cdef double om_step[3]
    cdef int t, i, j
    cdef double sixth = dt / 6.0

    with nogil:
        for i in range(3):
            for j in range(3):
                r_log_v[0, i, j] = r[i, j]
                rhat_log_v[0, i, j] = rh[i, j]
            for j in range(kk):
                v_log_v[0, i, j] = v[i, j]
                vhat_log_v[0, i, j] = vh[i, j]

        for t in range(steps):
            if method_id == 0:
                _deriv(r, v, rh, vh, &om_v[t, 0], &ac_v[t, 0],
                       g, k_r, k_v, k_x, k_p, &vz_v[0], &xz_v[0],
                       kr1, kv1, krh1, kvh1, od)
                _axpy(r, r, dt, kr1)
                _axpy(v, v, dt, kv1)
                _axpy(rh, rh, dt, krh1)
                _axpy(vh, vh, dt, kvh1)
                if ortho:
                    _polar3(r)
                    _polar3(rh)
            elif method_id == 1:
                _deriv(r, v, rh, vh, &om_v[t, 0], &ac_v[t, 0],
                       g, k_r, k_v, k_x, k_p, &vz_v[0], &xz_v[0],
                       kr1, kv1, krh1, kvh1, od)
                for i in range(3):
                    om_step[i] = dt * om_v[t, i]
                _so3_exp(om_step, exp_body)
                _mat3_mul(r, exp_body, rot_tmp)
                r[:, :] = rot_tmp
                for i in range(3):
                    om_step[i] = dt * od[i]
                _so3_exp(om_step, exp_corr)
                _mat3_mul(rh, exp_body, rot_tmp)
                _mat3_mul(exp_corr, rot_tmp, rh)
                _axpy(v, v, dt, kv1)
                _axpy(vh, vh, dt, kvh1)
            else:
                _deriv(r, v, rh, vh, &om_v[t, 0], &ac_v[t, 0],
                       g, k_r, k_v, k_x, k_p, &vz_v[0], &xz_v[0],
                       kr1, kv1, krh1, kvh1, od)
                _axpy(ra, r, 0.5 * dt, kr1)
                _axpy(va, v, 0.5 * dt, kv1)
                _axpy(rha, rh, 0.5 * dt, krh1)
                _axpy(vha, vh, 0.5 * dt, kvh1)
                _deriv(ra, va, rha, vha, &om_v[t, 0], &ac_v[t, 0],
                       g, k_r, k_v, k_x, k_p, &vz_v[0], &xz_v[0],
                       kr2, kv2, krh2, kvh2, od)
                _axpy(ra, r, 0.5 * dt, kr2)
                _axpy(va, v, 0.5 * dt, kv2)
                _axpy(rha, rh, 0.5 * dt, krh2)
                _axpy(vha, vh, 0.5 * dt, kvh2)
                _deriv(ra, va, rha, vha, &om_v[t, 0], &ac_v[t, 0],
                       g, k_r, k_v, k_x, k_p, &vz_v[0], &xz_v[0],
                       kr3, kv3, krh3, kvh3, od)
                _axpy(ra, r, dt, kr3)
                _axpy(va, v, dt, kv3)
                _axpy(rha, rh, dt, krh3)
                _axpy(vha, vh, dt, kvh3)
                _deriv(ra, va, rha, vha, &om_v[t, 0], &ac_v[t, 0],
                       g, k_r, k_v, k_x, k_p, &vz_v[0], &xz_v[0],
                       kr4, kv4, krh4, kvh4, od)
                _rk4_combine(r, sixth, kr1, kr2, kr3, kr4)
                _rk4_combine(v, sixth, kv1, kv2, kv3, kv4)
                _rk4_combine(rh, sixth, krh1, krh2, krh3, krh4)
                _rk4_combine(vh, sixth, kvh1, kvh2, kvh3, kvh4)
                if ortho:
                    _polar3(r)
                    _polar3(rh)

            for i in range(3):
                for j in range(3):
                    r_log_v[t + 1, i, j] = r[i, j]
                    rhat_log_v[t + 1, i, j] = rh[i, j]
                for j in range(kk):
                    v_log_v[t + 1, i, j] = v[i, j]
                    vhat_log_v[t + 1, i, j] = vh[i, j]

    return r_log, v_log, rhat_log, vhat_log
