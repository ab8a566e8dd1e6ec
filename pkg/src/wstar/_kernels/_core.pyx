# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: the square-root Taylor-series loop and the cyclic
Jacobi eigensolver.  Semantics mirror ``fallback.py``; tests assert parity.
"""

import numpy as np

from libc.math cimport fabs, sqrt


def series_bracket(p0, unit, double scale, double tol, int max_terms):
    """See fallback.series_bracket."""
    cdef double complex[:, ::1] P = np.ascontiguousarray(p0, dtype=np.complex128)
    acc_arr = np.array(unit, dtype=np.complex128, order="C")
    cdef double complex[:, ::1] acc = acc_arr
    cdef int d = P.shape[0]
    term_arr = np.array(p0, dtype=np.complex128, order="C")
    scratch_arr = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] term = term_arr
    cdef double complex[:, ::1] scratch = scratch_arr
    cdef double lam = 0.5
    cdef double last, fro
    cdef int k = 1
    cdef int i, j, l
    cdef double complex z, s

    while True:
        fro = 0.0
        for i in range(d):
            for j in range(d):
                z = term[i, j]
                acc[i, j] = acc[i, j] - lam * z
                fro += z.real * z.real + z.imag * z.imag
        last = scale * lam * sqrt(fro)
        if last < tol:
            return acc_arr, k, True
        if k >= max_terms:
            return acc_arr, k, False
        # scratch = term @ P
        for i in range(d):
            for j in range(d):
                s = 0
                for l in range(d):
                    s = s + term[i, l] * P[l, j]
                scratch[i, j] = s
        term_arr, scratch_arr = scratch_arr, term_arr
        term = term_arr
        scratch = scratch_arr
        lam = lam * (2 * k - 1) / (2 * k + 2)
        k += 1


def jacobi_eigh(a, double tol=1e-13, int max_sweeps=60):
    """See fallback.jacobi_eigh."""
    A_arr = np.array(a, dtype=np.complex128, order="C")
    cdef double complex[:, ::1] A = A_arr
    cdef int d = A.shape[0]
    V_arr = np.eye(d, dtype=np.complex128)
    cdef double complex[:, ::1] V = V_arr
    cdef int i, j, p, q, sweep
    cdef double scale = 0.0, off, m, tau, t, c, s, thresh
    cdef double complex apq, beta, gpp, gpq, gqp, gqq, xp, xq

    if d <= 1:
        if d == 1:
            return np.array([A[0, 0].real]), V_arr
        return np.zeros(0), V_arr

    for i in range(d):
        for j in range(d):
            scale += A[i, j].real * A[i, j].real + A[i, j].imag * A[i, j].imag
    scale = sqrt(scale)
    if scale == 0.0:
        return np.zeros(d), V_arr

    thresh = tol * scale / (d * d)
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(d):
            for j in range(d):
                if i != j:
                    off += A[i, j].real * A[i, j].real + A[i, j].imag * A[i, j].imag
        if sqrt(off) <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                m = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if m <= 1e-300 or m <= thresh:
                    continue
                beta = apq / m
                tau = (A[q, q].real - A[p, p].real) / (2.0 * m)
                if tau >= 0:
                    t = 1.0 / (fabs(tau) + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (fabs(tau) + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                gpp = c
                gpq = s * beta
                gqp = -s * beta.conjugate()
                gqq = c
                for i in range(d):
                    xp = A[i, p]
                    xq = A[i, q]
                    A[i, p] = xp * gpp + xq * gqp
                    A[i, q] = xp * gpq + xq * gqq
                for i in range(d):
                    xp = A[p, i]
                    xq = A[q, i]
                    A[p, i] = gpp.conjugate() * xp + gqp.conjugate() * xq
                    A[q, i] = gpq.conjugate() * xp + gqq.conjugate() * xq
                for i in range(d):
                    xp = V[i, p]
                    xq = V[i, q]
                    V[i, p] = xp * gpp + xq * gqp
                    V[i, q] = xp * gpq + xq * gqq

    w = np.empty(d)
    for i in range(d):
        w[i] = A[i, i].real
    order = np.argsort(w, kind="stable")
    return w[order], V_arr[:, order]
