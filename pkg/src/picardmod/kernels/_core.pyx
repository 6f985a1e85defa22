# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; mirrors _fallback.py exactly (int64 arithmetic)."""

import numpy as np

cimport numpy as cnp

ctypedef cnp.int64_t i64


def sweep_norms(ga, gb, pa, pb, long long d, long long tau_c):
    cdef i64[:, ::1] Ga = np.ascontiguousarray(ga, dtype=np.int64)
    cdef i64[:, ::1] Gb = np.ascontiguousarray(gb, dtype=np.int64)
    cdef i64[:, ::1] Pa = np.ascontiguousarray(pa, dtype=np.int64)
    cdef i64[:, ::1] Pb = np.ascontiguousarray(pb, dtype=np.int64)
    cdef Py_ssize_t K = Ga.shape[0], n = Ga.shape[1], r = Pa.shape[1]
    out_arr = np.empty((K, r), dtype=np.int64)
    cdef i64[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef i64 xa, xb, cross, ra, rb
    for i in range(K):
        for j in range(r):
            xa = 0; xb = 0; cross = 0
            for k in range(n):
                xa += Ga[i, k] * Pa[k, j]
                xb += Gb[i, k] * Pb[k, j]
                cross += Ga[i, k] * Pb[k, j] + Gb[i, k] * Pa[k, j]
            if tau_c < 0:
                ra = xa - d * xb
                rb = cross
                out[i, j] = ra * ra + d * rb * rb
            else:
                ra = xa - tau_c * xb
                rb = cross + xb
                out[i, j] = ra * ra + ra * rb + tau_c * rb * rb
    return out_arr


def points_in_hulls(samples, normals, offsets, starts):
    cdef i64[:, ::1] S = np.ascontiguousarray(samples, dtype=np.int64)
    cdef i64[:, ::1] N = np.ascontiguousarray(normals, dtype=np.int64)
    cdef i64[::1] C = np.ascontiguousarray(offsets, dtype=np.int64)
    starts_arr = np.ascontiguousarray(starts, dtype=np.int64)
    cdef i64[::1] st = starts_arr
    cdef Py_ssize_t ns = S.shape[0], nr = st.shape[0] - 1
    out_arr = np.zeros(ns, dtype=np.uint8)
    cdef cnp.uint8_t[::1] out = out_arr
    cdef Py_ssize_t i, r, f
    cdef i64 dot
    cdef bint ok
    for i in range(ns):
        for r in range(nr):
            ok = True
            for f in range(st[r], st[r + 1]):
                dot = N[f, 0] * S[i, 0] + N[f, 1] * S[i, 1] + N[f, 2] * S[i, 2]
                if dot < C[f]:
                    ok = False
                    break
            if ok:
                out[i] = 1
                break
    return out_arr.astype(bool)
