# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batched Aberth-Ehrlich root solver; same contract as ``_pykernels.aberth``.

Tensor-grid evaluation is not compiled: the BLAS-backed numpy path is faster.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, exp, fabs, hypot, log, sin, sqrt

cnp.import_array()

cdef double EPS = 2.220446049250313e-16
cdef double INF = float("inf")


cdef inline double cabs_(double complex z) noexcept nogil:
    cdef double m = fabs(z.real) + fabs(z.imag)
    if 1e-150 < m < 1e150:
        return sqrt(z.real * z.real + z.imag * z.imag)
    return hypot(z.real, z.imag)


cdef inline double complex cdiv(double complex a, double complex b) noexcept nogil:
    # Smith's algorithm: no overflow or underflow from squaring |b|
    cdef double r, t
    if fabs(b.real) >= fabs(b.imag):
        r = b.imag / b.real
        t = b.real + b.imag * r
        return ((a.real + a.imag * r) / t) + 1j * ((a.imag - a.real * r) / t)
    r = b.real / b.imag
    t = b.imag + b.real * r
    return ((a.real * r + a.imag) / t) + 1j * ((a.imag * r - a.real) / t)


cdef int _aberth_one(double complex[::1] c, double complex[::1] z, int max_sweeps,
                     unsigned char[::1] done) noexcept nogil:
    """Gauss-Seidel Aberth sweeps on one monic-izable polynomial; returns sweeps used."""
    cdef Py_ssize_t d = c.shape[0] - 1, k, j, i
    cdef double complex p, dp, ratio, s, w, diff
    cdef double scale, az
    cdef int sweep, remaining
    for sweep in range(1, max_sweeps + 1):
        remaining = 0
        for k in range(d):
            if done[k]:
                continue
            p = c[d]
            dp = 0
            scale = cabs_(c[d])
            az = cabs_(z[k])
            for i in range(d - 1, -1, -1):
                dp = dp * z[k] + p
                p = p * z[k] + c[i]
                scale = scale * az + cabs_(c[i])
            if cabs_(p) <= 4 * EPS * scale and scale < INF:
                done[k] = 1
                continue
            if dp == 0:
                remaining += 1
                continue
            ratio = cdiv(p, dp)
            s = 0
            for j in range(d):
                if j != k:
                    diff = z[k] - z[j]
                    if diff != 0:
                        s = s + cdiv(1, diff)
            w = cdiv(ratio, 1 - ratio * s)
            if w != w:
                remaining += 1
                continue
            z[k] = z[k] - w
            if cabs_(w) <= EPS * cabs_(z[k]):
                done[k] = 1
            else:
                remaining += 1
        if remaining == 0:
            return sweep
    return max_sweeps


cdef void _horner(double complex[::1] c, double complex x, double complex* p,
                  double complex* dp, double* scale) noexcept nogil:
    cdef Py_ssize_t d = c.shape[0] - 1, i
    cdef double ax = cabs_(x)
    p[0] = c[d]
    dp[0] = 0
    scale[0] = cabs_(c[d])
    for i in range(d - 1, -1, -1):
        dp[0] = dp[0] * x + p[0]
        p[0] = p[0] * x + c[i]
        scale[0] = scale[0] * ax + cabs_(c[i])


cdef void _initial(double complex[::1] c, double complex[::1] z, double[::1] logs,
                   double[::1] hull) noexcept nogil:
    """Newton-polygon radii (see ``_pykernels.newton_radii``) on staggered angles."""
    cdef Py_ssize_t d = c.shape[0] - 1, i, j, k
    cdef double a, t, chord
    for k in range(d + 1):
        a = cabs_(c[k])
        logs[k] = log(a if a > 1e-300 else 1e-300)
        hull[k] = logs[k]
    for i in range(d + 1):
        for j in range(i + 2, d + 1):
            for k in range(i + 1, j):
                t = <double>(k - i) / (j - i)
                chord = logs[i] * (1 - t) + logs[j] * t
                if chord > hull[k]:
                    hull[k] = chord
    for k in range(d):
        t = 6.283185307179586 * k / d + 0.4
        a = exp(hull[k] - hull[k + 1])
        z[k] = a * cos(t) + 1j * (a * sin(t))


def aberth(coeffs, int max_sweeps=200):
    """Aberth-Ehrlich iteration on a batch ``(M, d+1)`` of ascending coefficient rows."""
    cdef double complex[:, ::1] C = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef Py_ssize_t M = C.shape[0], d = C.shape[1] - 1, m, k
    if d == 1:
        arr = np.asarray(C)
        return (-arr[:, 0] / arr[:, 1])[:, None], np.ones(M, dtype=bool), 1
    roots = np.empty((M, d), dtype=np.complex128)
    work = np.empty((2, d + 1))
    cdef double[::1] logs = work[0]
    cdef double[::1] hull = work[1]
    cdef double complex[:, ::1] Z = roots
    conv = np.ones(M, dtype=bool)
    cdef unsigned char[::1] cv = conv.view(np.uint8)
    done_arr = np.zeros(d, dtype=np.uint8)
    cdef unsigned char[::1] done = done_arr
    cdef int sweeps, worst = 0
    cdef double complex p, dp, p2, dp2, cand
    cdef double scale, scale2, resid
    cdef bint ok
    with nogil:
        for m in range(M):
            _initial(C[m], Z[m], logs, hull)
            for k in range(d):
                done[k] = 0
            sweeps = _aberth_one(C[m], Z[m], max_sweeps, done)
            if sweeps > worst:
                worst = sweeps
            ok = True
            for k in range(d):
                _horner(C[m], Z[m, k], &p, &dp, &scale)
                resid = cabs_(p) / (scale if scale > 1e-300 else 1e-300)
                if dp != 0:
                    cand = Z[m, k] - cdiv(p, dp)
                    _horner(C[m], cand, &p2, &dp2, &scale2)
                    if cabs_(p2) < cabs_(p):
                        Z[m, k] = cand
                        resid = cabs_(p2) / (scale2 if scale2 > 1e-300 else 1e-300)
                if not scale < INF or (not done[k] and not resid <= 64 * EPS):
                    ok = False
            cv[m] = ok
    return roots, conv, worst
