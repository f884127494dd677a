# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled matvec kernel for the bilinear-biquadratic chain.

Semantics match akltlab._kernels_np exactly: site 1 is the slowest-varying
index, bonds are accumulated in ascending order (then the wrap bond), and
within a bond the nonzero matrix elements are applied in row-major scan order
with an ascending inner loop, so the summation order is fixed.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef void _open_bond(double* out, const double* vec, long dl, long dr,
                     const double* w, const int* ai, const int* bi,
                     int nnz) noexcept nogil:
    cdef long l, r, base
    cdef int t
    cdef double wt
    cdef double* po
    cdef const double* pv
    for l in range(dl):
        base = l * 9 * dr
        for t in range(nnz):
            wt = w[t]
            po = out + base + ai[t] * dr
            pv = vec + base + bi[t] * dr
            for r in range(dr):
                po[r] += wt * pv[r]


cdef void _wrap_bond(double* out, const double* vec, long dmid, long d1,
                     const double* w, const int* si, const int* ti,
                     const int* ui, const int* vi, int nnz) noexcept nogil:
    cdef long m
    cdef int t
    cdef double wt
    cdef double* po
    cdef const double* pv
    for t in range(nnz):
        wt = w[t]
        po = out + ti[t] * d1 + si[t]
        pv = vec + vi[t] * d1 + ui[t]
        for m in range(dmid):
            po[m * 3] += wt * pv[m * 3]


def apply_bbh(double[::1] vec, int n, double[:, ::1] bond, bint periodic):
    """Apply the BBH Hamiltonian to a vector; see _kernels_np.apply_bbh."""
    cdef long dim = vec.shape[0]
    out_arr = np.zeros(dim, dtype=np.float64)
    cdef double[::1] out = out_arr

    # Collect nonzero bond entries once (row-major order).
    cdef double[81] w
    cdef int[81] ai, bi
    cdef int nnz = 0
    cdef int a, b
    for a in range(9):
        for b in range(9):
            if bond[a, b] != 0.0:
                w[nnz] = bond[a, b]
                ai[nnz] = a
                bi[nnz] = b
                nnz += 1

    cdef long dl, dr
    cdef int i
    cdef double[81] w4
    cdef int[81] si, ti, ui, vi
    with nogil:
        for i in range(n - 1):
            dl = 1
            for a in range(i):
                dl *= 3
            dr = 1
            for a in range(n - i - 2):
                dr *= 3
            _open_bond(&out[0], &vec[0], dl, dr, w, ai, bi, nnz)
        if periodic:
            # Split pair indices: rows (s, t), cols (u, v) with s, u on site n
            # (stride 1) and t, v on site 1 (stride 3**(n-1)).
            for a in range(nnz):
                w4[a] = w[a]
                si[a] = ai[a] // 3
                ti[a] = ai[a] % 3
                ui[a] = bi[a] // 3
                vi[a] = bi[a] % 3
            dl = 1
            for a in range(n - 2):
                dl *= 3
            _wrap_bond(&out[0], &vec[0], dl, dim // 3, w4, si, ti, ui, vi, nnz)
    return out_arr
