# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same signatures and semantics as ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

NAME = "cython"


cdef inline void qmul_acc(double aw, double ax, double ay, double az,
                          double bw, double bx, double by, double bz,
                          double *out) noexcept nogil:
    out[0] += aw * bw - ax * bx - ay * by - az * bz
    out[1] += aw * bx + ax * bw + ay * bz - az * by
    out[2] += aw * by - ax * bz + ay * bw + az * bx
    out[3] += aw * bz + ax * by - ay * bx + az * bw


cdef inline void qmul_set(double aw, double ax, double ay, double az,
                          double bw, double bx, double by, double bz,
                          double *out) noexcept nogil:
    out[0] = aw * bw - ax * bx - ay * by - az * bz
    out[1] = aw * bx + ax * bw + ay * bz - az * by
    out[2] = aw * by - ax * bz + ay * bw + az * bx
    out[3] = aw * bz + ax * by - ay * bx + az * bw


cdef inline void qinv_set(double w, double x, double y, double z, double *out) noexcept nogil:
    cdef double n2 = w * w + x * x + y * y + z * z
    out[0] = w / n2
    out[1] = -x / n2
    out[2] = -y / n2
    out[3] = -z / n2


cdef void _star_mul(const double[:, ::1] a, const double[:, ::1] b, double[:, ::1] out, Py_ssize_t degree) noexcept nogil:
    cdef Py_ssize_t r, s, top
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    cdef double tmp[4]
    for r in range(degree + 1):
        out[r, 0] = 0.0
        out[r, 1] = 0.0
        out[r, 2] = 0.0
        out[r, 3] = 0.0
    for r in range(min(na, degree + 1)):
        top = min(nb - 1, degree - r)
        for s in range(top + 1):
            qmul_set(a[r, 0], a[r, 1], a[r, 2], a[r, 3], b[s, 0], b[s, 1], b[s, 2], b[s, 3], tmp)
            out[r + s, 0] += tmp[0]
            out[r + s, 1] += tmp[1]
            out[r + s, 2] += tmp[2]
            out[r + s, 3] += tmp[3]


def star_mul(a, b, Py_ssize_t degree):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    out = np.zeros((degree + 1, 4))
    cdef double[:, ::1] ov = out
    with nogil:
        _star_mul(av, bv, ov, degree)
    return out


def star_inverse(a, Py_ssize_t degree):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    out = np.zeros((degree + 1, 4))
    cdef double[:, ::1] ov = out
    cdef double inv0[4]
    cdef double acc[4]
    cdef double neg[4]
    cdef Py_ssize_t n, r, top, na = av.shape[0]
    with nogil:
        qinv_set(av[0, 0], av[0, 1], av[0, 2], av[0, 3], inv0)
        ov[0, 0] = inv0[0]
        ov[0, 1] = inv0[1]
        ov[0, 2] = inv0[2]
        ov[0, 3] = inv0[3]
        for n in range(1, degree + 1):
            acc[0] = 0.0
            acc[1] = 0.0
            acc[2] = 0.0
            acc[3] = 0.0
            top = min(n, na - 1)
            for r in range(1, top + 1):
                qmul_acc(av[r, 0], av[r, 1], av[r, 2], av[r, 3],
                         ov[n - r, 0], ov[n - r, 1], ov[n - r, 2], ov[n - r, 3], acc)
            qmul_set(inv0[0], inv0[1], inv0[2], inv0[3], acc[0], acc[1], acc[2], acc[3], neg)
            ov[n, 0] = -neg[0]
            ov[n, 1] = -neg[1]
            ov[n, 2] = -neg[2]
            ov[n, 3] = -neg[3]
    return out


def bullet_compose(g, w, Py_ssize_t degree):
    cdef const double[:, ::1] gv = np.ascontiguousarray(g, dtype=np.float64)
    cdef const double[:, ::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    out = np.zeros((degree + 1, 4))
    power = np.zeros((degree + 1, 4))
    scratch = np.zeros((degree + 1, 4))
    cdef double[:, ::1] ov = out
    cdef double[:, ::1] pv = power
    cdef double[:, ::1] sv = scratch
    cdef double[:, ::1] swap
    cdef Py_ssize_t n, m, ng = gv.shape[0]
    pv[0, 0] = 1.0
    with nogil:
        for n in range(min(ng, degree + 1)):
            for m in range(n, degree + 1):
                qmul_acc(pv[m, 0], pv[m, 1], pv[m, 2], pv[m, 3],
                         gv[n, 0], gv[n, 1], gv[n, 2], gv[n, 3], &ov[m, 0])
            if n < ng - 1:
                _star_mul(pv, wv, sv, degree)
                swap = pv
                pv = sv
                sv = swap
    return out


def evaluate(coeffs, points):
    cdef const double[:, ::1] cv = np.ascontiguousarray(coeffs, dtype=np.float64)
    pts = np.ascontiguousarray(points, dtype=np.float64)
    shape = pts.shape
    flat = pts.reshape(-1, 4)
    cdef const double[:, ::1] qv = flat
    out = np.zeros_like(flat)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t p, n, npts = qv.shape[0], last = cv.shape[0] - 1
    cdef double pw[4]
    cdef double nxt[4]
    with nogil:
        for p in range(npts):
            pw[0] = 1.0
            pw[1] = 0.0
            pw[2] = 0.0
            pw[3] = 0.0
            for n in range(last + 1):
                qmul_acc(pw[0], pw[1], pw[2], pw[3], cv[n, 0], cv[n, 1], cv[n, 2], cv[n, 3], &ov[p, 0])
                if n < last:
                    qmul_set(pw[0], pw[1], pw[2], pw[3], qv[p, 0], qv[p, 1], qv[p, 2], qv[p, 3], nxt)
                    pw[0] = nxt[0]
                    pw[1] = nxt[1]
                    pw[2] = nxt[2]
                    pw[3] = nxt[3]
    return out.reshape(shape)


def bullet_inverse_right(g, Py_ssize_t degree):
    cdef const double[:, ::1] gv = np.ascontiguousarray(g, dtype=np.float64)
    b = np.zeros((degree + 1, 4))
    if degree < 1:
        return b
    powers = np.zeros((degree + 1, degree + 1, 4))
    cdef double[:, ::1] bv = b
    cdef double[:, :, ::1] P = powers
    cdef double inv1[4]
    cdef double s[4]
    cdef double t[4]
    cdef Py_ssize_t n, k, m, top, ng = gv.shape[0]
    with nogil:
        qinv_set(gv[1, 0], gv[1, 1], gv[1, 2], gv[1, 3], inv1)
        for m in range(4):
            bv[1, m] = inv1[m]
            P[1, 1, m] = inv1[m]
        for n in range(2, degree + 1):
            for k in range(2, n + 1):
                for m in range(k - 1, n):
                    qmul_acc(P[k - 1, m, 0], P[k - 1, m, 1], P[k - 1, m, 2], P[k - 1, m, 3],
                             bv[n - m, 0], bv[n - m, 1], bv[n - m, 2], bv[n - m, 3], &P[k, n, 0])
            s[0] = 0.0
            s[1] = 0.0
            s[2] = 0.0
            s[3] = 0.0
            top = min(n, ng - 1)
            for k in range(2, top + 1):
                qmul_acc(P[k, n, 0], P[k, n, 1], P[k, n, 2], P[k, n, 3],
                         gv[k, 0], gv[k, 1], gv[k, 2], gv[k, 3], s)
            qmul_set(s[0], s[1], s[2], s[3], inv1[0], inv1[1], inv1[2], inv1[3], t)
            for m in range(4):
                bv[n, m] = -t[m]
                P[1, n, m] = -t[m]
    return b


def bullet_inverse_left(g, Py_ssize_t degree):
    cdef const double[:, ::1] gv = np.ascontiguousarray(g, dtype=np.float64)
    b = np.zeros((degree + 1, 4))
    if degree < 1:
        return b
    powers = np.zeros((degree + 1, degree + 1, 4))
    cdef double[:, ::1] bv = b
    cdef double[:, :, ::1] P = powers
    cdef double rhs[4]
    cdef double inv[4]
    cdef double t[4]
    cdef Py_ssize_t n, k, m
    P[0, 0, 0] = 1.0
    with nogil:
        for k in range(1, degree + 1):
            _star_mul(P[k - 1], gv, P[k], degree)
        for n in range(1, degree + 1):
            rhs[0] = 1.0 if n == 1 else 0.0
            rhs[1] = 0.0
            rhs[2] = 0.0
            rhs[3] = 0.0
            for k in range(1, n):
                qmul_set(P[k, n, 0], P[k, n, 1], P[k, n, 2], P[k, n, 3],
                         bv[k, 0], bv[k, 1], bv[k, 2], bv[k, 3], t)
                for m in range(4):
                    rhs[m] -= t[m]
            qinv_set(P[n, n, 0], P[n, n, 1], P[n, n, 2], P[n, n, 3], inv)
            qmul_set(inv[0], inv[1], inv[2], inv[3], rhs[0], rhs[1], rhs[2], rhs[3], t)
            for m in range(4):
                bv[n, m] = t[m]
    return b
