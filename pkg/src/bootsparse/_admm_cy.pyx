# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled ADMM inner loop. Same contract as _admm_py.admm_iterate."""

import numpy as np

from libc.math cimport isfinite, sqrt
from scipy.linalg.cython_blas cimport dgemv, dnrm2


cdef inline void _cgemv(double* M, int rows, int cols, double* x, double* y) nogil:
    # y = M @ x for a C-contiguous (rows, cols) matrix: BLAS sees the buffer
    # as the Fortran (cols, rows) transpose, so ask for op='T'.
    cdef double one = 1.0, zero = 0.0
    cdef int inc = 1
    dgemv("T", &cols, &rows, &one, M, &cols, x, &inc, &zero, y, &inc)


cdef inline void _cgemv_t(double* M, int rows, int cols, double* x, double* y) nogil:
    # y = M.T @ x for a C-contiguous (rows, cols) matrix.
    cdef double one = 1.0, zero = 0.0
    cdef int inc = 1
    dgemv("N", &cols, &rows, &one, M, &cols, x, &inc, &zero, y, &inc)


def admm_iterate(double[:, :, ::1] A, double[:, :, ::1] W,
                 double[:, ::1] AtY, double[:, ::1] Z, double[:, ::1] U,
                 double rho, double thresh, int max_iter,
                 double eps_abs, double eps_rel, bint woodbury):
    cdef int n = AtY.shape[0], K = AtY.shape[1]
    cdef int L = A.shape[1]
    cdef double tol0 = sqrt(<double> (n * K)) * eps_abs
    cdef int it_done = 0, bad_iter = -1, nk = n * K, inc = 1
    cdef bint converged = False, finite = True
    cdef double r = np.inf, s = np.inf
    cdef double rr, ss, nx2, nz2, g, gn2, gn, sc, zn, d1, d2, nu, eps_pri, eps_dual
    cdef int it, i, j

    X_arr = np.empty((n, K))
    vbuf_arr = np.empty(n)
    xbuf_arr = np.empty(n)
    tbuf_arr = np.empty(max(L, 1))
    wbuf_arr = np.empty(max(L, 1))
    rowbuf_arr = np.empty(K)
    cdef double[:, ::1] X = X_arr
    cdef double[::1] vbuf = vbuf_arr
    cdef double[::1] xbuf = xbuf_arr
    cdef double[::1] tbuf = tbuf_arr
    cdef double[::1] wbuf = wbuf_arr
    cdef double[::1] rowbuf = rowbuf_arr

    with nogil:
        for it in range(1, max_iter + 1):
            for j in range(K):
                for i in range(n):
                    vbuf[i] = AtY[i, j] + rho * (Z[i, j] - U[i, j])
                if woodbury:
                    _cgemv(&A[j, 0, 0], L, n, &vbuf[0], &tbuf[0])
                    _cgemv(&W[j, 0, 0], L, L, &tbuf[0], &wbuf[0])
                    _cgemv_t(&A[j, 0, 0], L, n, &wbuf[0], &xbuf[0])
                    for i in range(n):
                        X[i, j] = (vbuf[i] - xbuf[i]) / rho
                else:
                    _cgemv(&W[j, 0, 0], n, n, &vbuf[0], &xbuf[0])
                    for i in range(n):
                        X[i, j] = xbuf[i]
            finite = True
            for i in range(n):
                for j in range(K):
                    if not isfinite(X[i, j]):
                        finite = False
                        break
                if not finite:
                    break
            if not finite:
                bad_iter = it
                it_done = it
                break

            rr = 0.0
            ss = 0.0
            nx2 = 0.0
            nz2 = 0.0
            for i in range(n):
                gn2 = 0.0
                for j in range(K):
                    g = X[i, j] + U[i, j]
                    rowbuf[j] = g
                    gn2 += g * g
                gn = sqrt(gn2)
                sc = 1.0 - thresh / gn if gn > thresh else 0.0
                for j in range(K):
                    zn = sc * rowbuf[j]
                    d1 = X[i, j] - zn
                    d2 = zn - Z[i, j]
                    rr += d1 * d1
                    ss += d2 * d2
                    U[i, j] += d1
                    Z[i, j] = zn
                    nx2 += X[i, j] * X[i, j]
                    nz2 += zn * zn
            r = sqrt(rr)
            s = rho * sqrt(ss)
            nu = dnrm2(&nk, &U[0, 0], &inc)
            eps_pri = tol0 + eps_rel * (sqrt(nx2) if nx2 > nz2 else sqrt(nz2))
            eps_dual = tol0 + eps_rel * rho * nu
            it_done = it
            if r <= eps_pri and s <= eps_dual:
                converged = True
                break

    return it_done, float(r), float(s), bool(converged), int(bad_iter)
