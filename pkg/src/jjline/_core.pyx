# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: chain transfer products and batched steady-state concurrence.

Contracts are identical to jjline._purepy, which is the readable reference.
LAPACK is reached through scipy's cython_lapack bindings; all buffers are
packed column-major by hand, so no per-call numpy overhead remains in the
inner loops.
"""

import numpy as np

from libc.math cimport cos, sin, sqrt, M_PI, NAN
from scipy.linalg.cython_lapack cimport zgesvd, zgeev

IMPL_NAME = "core"


def chain_transfer_grid(const signed char[::1] kinds, const double[::1] p1,
                        const double[::1] p2, const double[::1] omegas,
                        double v, double tol):
    cdef Py_ssize_t m = omegas.shape[0]
    cdef Py_ssize_t n = kinds.shape[0]
    T_arr = np.empty((m, 2, 2), dtype=complex)
    ok_arr = np.ones(m, dtype=np.uint8)
    cdef double complex[:, :, ::1] T = T_arr
    cdef unsigned char[::1] ok = ok_arr
    cdef Py_ssize_t i, e
    cdef double omega, x, wb, q, denom
    cdef double complex a, b, c, d, ph, r, t, ea, eb, ec, ed, na, nb, nc, nd
    cdef bint good
    for i in range(m):
        omega = omegas[i]
        a = 1.0
        b = 0.0
        c = 0.0
        d = 1.0
        good = True
        for e in range(n):
            if kinds[e] == 0:
                x = 2.0 * M_PI * omega * p1[e] / v
                ph = cos(x) + 1j * sin(x)
                a = ph * a
                b = ph * b
                c = ph.conjugate() * c
                d = ph.conjugate() * d
            else:
                wb = omega / p1[e]
                q = 2.0 * p2[e] * (wb * wb - 1.0) / wb
                denom = 1.0 + q * q
                r = (1.0 - 1j * q) / denom
                t = 1.0 - r
                if abs(t) < tol:
                    good = False
                    break
                ea = 1.0 / t.conjugate()
                ec = -r / t
                eb = ec.conjugate()
                ed = ea.conjugate()
                na = ea * a + eb * c
                nb = ea * b + eb * d
                nc = ec * a + ed * c
                nd = ec * b + ed * d
                a = na
                b = nb
                c = nc
                d = nd
        if good:
            T[i, 0, 0] = a
            T[i, 0, 1] = b
            T[i, 1, 0] = c
            T[i, 1, 1] = d
        else:
            T[i, 0, 0] = NAN
            T[i, 0, 1] = NAN
            T[i, 1, 0] = NAN
            T[i, 1, 1] = NAN
            ok[i] = 0
    return T_arr, ok_arr.astype(bool)


cdef double _YY_R[4][4]
_YY_R[0][:] = [0.0, 0.0, 0.0, -1.0]
_YY_R[1][:] = [0.0, 0.0, 1.0, 0.0]
_YY_R[2][:] = [0.0, 1.0, 0.0, 0.0]
_YY_R[3][:] = [-1.0, 0.0, 0.0, 0.0]


def steady_concurrence_batch(const double[:, ::1] coeffs,
                             const double complex[:, :, ::1] basis,
                             double sv_tol=1e-8):
    cdef Py_ssize_t m = coeffs.shape[0]
    cdef Py_ssize_t nk = coeffs.shape[1]
    if basis.shape[0] != nk or basis.shape[1] != 16 or basis.shape[2] != 16:
        raise ValueError("basis must have shape (n_coeffs, 16, 16)")
    C_arr = np.full(m, np.nan)
    st_arr = np.zeros(m, dtype=np.int8)
    cdef double[::1] C = C_arr
    cdef signed char[::1] st = st_arr
    # column-major scratch for LAPACK
    cdef double complex[::1] Lf = np.empty(256, dtype=complex)
    cdef double complex[::1] vt = np.empty(256, dtype=complex)
    cdef double complex[::1] udum = np.empty(1, dtype=complex)
    cdef double[::1] s = np.empty(16)
    cdef double[::1] rwork = np.empty(80)
    cdef double complex[::1] wq = np.empty(1, dtype=complex)
    cdef char jobu = 'N'
    cdef char jobvt = 'A'
    cdef char jobn = 'N'
    cdef int n16 = 16, n4 = 4, one = 1, info = 0, lwork = -1
    # workspace queries, shared across the batch
    zgesvd(&jobu, &jobvt, &n16, &n16, &Lf[0], &n16, &s[0], &udum[0], &one,
           &vt[0], &n16, &wq[0], &lwork, &rwork[0], &info)
    cdef int lsvd = <int>wq[0].real
    zgeev(&jobn, &jobn, &n4, &Lf[0], &n4, &vt[0], &udum[0], &one, &udum[0],
          &one, &wq[0], &lwork, &rwork[0], &info)
    cdef int lev = <int>wq[0].real
    if lev > lsvd:
        lsvd = lev
    cdef double complex[::1] work = np.empty(lsvd, dtype=complex)
    cdef double complex rho[4][4]
    cdef double complex tmp1[4][4]
    cdef double complex tmp2[4][4]
    cdef double complex Rf[16]
    cdef double complex ev[4]
    cdef double complex acc, tr, z
    cdef double lam[4]
    cdef double lt, cval
    cdef Py_ssize_t row, i, j, k
    for row in range(m):
        for j in range(16):
            for i in range(16):
                acc = 0.0
                for k in range(nk):
                    acc = acc + coeffs[row, k] * basis[k, i, j]
                Lf[j * 16 + i] = acc
        lwork = lsvd
        zgesvd(&jobu, &jobvt, &n16, &n16, &Lf[0], &n16, &s[0], &udum[0], &one,
               &vt[0], &n16, &work[0], &lwork, &rwork[0], &info)
        if info != 0:
            st[row] = 2
            continue
        if s[14] < sv_tol:
            st[row] = 1
            continue
        # null vector is the conjugated last row of VT; reshape row-major
        for i in range(4):
            for j in range(4):
                rho[i][j] = (vt[(4 * i + j) * 16 + 15]).conjugate()
        tr = rho[0][0] + rho[1][1] + rho[2][2] + rho[3][3]
        if abs(tr) < 1e-14:
            st[row] = 1
            continue
        for i in range(4):
            for j in range(4):
                rho[i][j] = rho[i][j] / tr
        for i in range(4):
            for j in range(i, 4):
                z = 0.5 * (rho[i][j] + rho[j][i].conjugate())
                rho[i][j] = z
                rho[j][i] = z.conjugate()
        # R = rho YY conj(rho) YY
        for i in range(4):
            for j in range(4):
                acc = 0.0
                for k in range(4):
                    acc = acc + rho[i][k] * _YY_R[k][j]
                tmp1[i][j] = acc
        for i in range(4):
            for j in range(4):
                acc = 0.0
                for k in range(4):
                    acc = acc + tmp1[i][k] * rho[k][j].conjugate()
                tmp2[i][j] = acc
        # feed R transposed (row-major buffer as column-major); spectrum is equal
        for i in range(4):
            for j in range(4):
                acc = 0.0
                for k in range(4):
                    acc = acc + tmp2[i][k] * _YY_R[k][j]
                Rf[j * 4 + i] = acc
        lwork = lsvd
        zgeev(&jobn, &jobn, &n4, &Rf[0], &n4, &ev[0], &udum[0], &one,
              &udum[0], &one, &work[0], &lwork, &rwork[0], &info)
        if info != 0:
            st[row] = 2
            continue
        for i in range(4):
            lt = ev[i].real
            if lt < 0.0:
                lt = 0.0
            lam[i] = sqrt(lt)
        # insertion sort, descending
        for i in range(1, 4):
            lt = lam[i]
            j = i
            while j > 0 and lam[j - 1] < lt:
                lam[j] = lam[j - 1]
                j = j - 1
            lam[j] = lt
        cval = lam[0] - lam[1] - lam[2] - lam[3]
        if cval < 0.0:
            cval = 0.0
        C[row] = cval
    return C_arr, st_arr
