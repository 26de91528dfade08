# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``_pykernels``."""

import numpy as np

cimport numpy as cnp
from libc.math cimport log, sqrt, NAN

cnp.import_array()


def pivot(list rows, Py_ssize_t r, Py_ssize_t c):
    cdef list row_r = rows[r]
    cdef list row_i
    cdef object p = row_r[c]
    cdef object f
    cdef Py_ssize_t i, k, nrows = len(rows)
    cdef list nz = [k for k in range(len(row_r)) if row_r[k]]
    for k in nz:
        row_r[k] = row_r[k] / p
    for i in range(nrows):
        if i == r:
            continue
        row_i = rows[i]
        f = row_i[c]
        if not f:
            continue
        for k in nz:
            row_i[k] = row_i[k] - f * row_r[k]


def guillemin_hessians(double[:, ::1] ell, double[:, ::1] normals):
    cdef Py_ssize_t N = ell.shape[0], m = ell.shape[1], n = normals.shape[1]
    cdef Py_ssize_t p, k, i, j
    cdef double w
    out_arr = np.zeros((N, n, n))
    cdef double[:, :, ::1] out = out_arr
    for p in range(N):
        for k in range(m):
            w = 0.5 / ell[p, k]
            for i in range(n):
                if normals[k, i] == 0.0:
                    continue
                for j in range(n):
                    out[p, i, j] += w * normals[k, i] * normals[k, j]
    return out_arr


def guillemin_logdet(double[:, ::1] ell, subsets, subset_sq_dets):
    cdef Py_ssize_t N = ell.shape[0]
    cdef Py_ssize_t n = len(subsets[0])
    cdef Py_ssize_t S = len(subsets)
    cdef Py_ssize_t p, s, t
    sub_arr = np.ascontiguousarray(np.asarray(subsets, dtype=np.intp).reshape(S, n))
    sq_arr = np.ascontiguousarray(np.asarray(subset_sq_dets, dtype=float))
    cdef Py_ssize_t[:, ::1] sub = sub_arr
    cdef double[::1] sq = sq_arr
    out_arr = np.empty(N)
    cdef double[::1] out = out_arr
    cdef double total, term, half = log(0.5) * n
    for p in range(N):
        total = 0.0
        for s in range(S):
            if sq[s] == 0.0:
                continue
            term = sq[s]
            for t in range(n):
                term /= ell[p, sub[s, t]]
            total += term
        out[p] = log(total) + half
    return out_arr


def sym_inverse(h):
    cdef cnp.ndarray arr = np.ascontiguousarray(h, dtype=float)
    if arr.shape[1] > 3:
        return np.linalg.inv(arr)
    cdef double[:, :, ::1] a = arr
    cdef Py_ssize_t N = a.shape[0], n = a.shape[1], p
    out_arr = np.empty_like(arr)
    cdef double[:, :, ::1] o = out_arr
    cdef double d, c00, c01, c02, c11, c12, c22
    for p in range(N):
        if n == 1:
            o[p, 0, 0] = 1.0 / a[p, 0, 0]
        elif n == 2:
            d = a[p, 0, 0] * a[p, 1, 1] - a[p, 0, 1] * a[p, 1, 0]
            o[p, 0, 0] = a[p, 1, 1] / d
            o[p, 1, 1] = a[p, 0, 0] / d
            o[p, 0, 1] = -a[p, 0, 1] / d
            o[p, 1, 0] = -a[p, 1, 0] / d
        else:
            c00 = a[p, 1, 1] * a[p, 2, 2] - a[p, 1, 2] * a[p, 2, 1]
            c01 = a[p, 1, 2] * a[p, 2, 0] - a[p, 1, 0] * a[p, 2, 2]
            c02 = a[p, 1, 0] * a[p, 2, 1] - a[p, 1, 1] * a[p, 2, 0]
            d = a[p, 0, 0] * c00 + a[p, 0, 1] * c01 + a[p, 0, 2] * c02
            o[p, 0, 0] = c00 / d
            o[p, 1, 0] = c01 / d
            o[p, 2, 0] = c02 / d
            o[p, 0, 1] = (a[p, 0, 2] * a[p, 2, 1] - a[p, 0, 1] * a[p, 2, 2]) / d
            o[p, 1, 1] = (a[p, 0, 0] * a[p, 2, 2] - a[p, 0, 2] * a[p, 2, 0]) / d
            o[p, 2, 1] = (a[p, 0, 1] * a[p, 2, 0] - a[p, 0, 0] * a[p, 2, 1]) / d
            o[p, 0, 2] = (a[p, 0, 1] * a[p, 1, 2] - a[p, 0, 2] * a[p, 1, 1]) / d
            o[p, 1, 2] = (a[p, 0, 2] * a[p, 1, 0] - a[p, 0, 0] * a[p, 1, 2]) / d
            o[p, 2, 2] = (a[p, 0, 0] * a[p, 1, 1] - a[p, 0, 1] * a[p, 1, 0]) / d
    return out_arr


def sym_logdet(h):
    """Cholesky log determinant; NaN where the matrix is not positive definite."""
    cdef double[:, :, ::1] a = np.ascontiguousarray(h, dtype=float)
    cdef Py_ssize_t N = a.shape[0], n = a.shape[1], p, i, j, k
    out_arr = np.empty(N)
    cdef double[::1] out = out_arr
    work_arr = np.empty((n, n))
    cdef double[:, ::1] L = work_arr
    cdef double s, total
    cdef bint ok
    for p in range(N):
        total = 0.0
        ok = True
        for j in range(n):
            s = a[p, j, j]
            for k in range(j):
                s -= L[j, k] * L[j, k]
            if not s > 0.0:
                ok = False
                break
            L[j, j] = sqrt(s)
            total += log(s)
            for i in range(j + 1, n):
                s = a[p, i, j]
                for k in range(j):
                    s -= L[i, k] * L[j, k]
                L[i, j] = s / L[j, j]
        out[p] = total if ok else NAN
    return out_arr
