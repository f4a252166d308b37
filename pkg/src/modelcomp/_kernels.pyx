# cython: language_level=3
"""Compiled hot loops: Blaschke products over point batches and
4-connected component labelling of boolean grids."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def blaschke_eval(const double complex[::1] zeros, const double complex[::1] z):
    """Value and derivative of the finite Blaschke product at each z."""
    cdef Py_ssize_t n = z.shape[0]
    cdef Py_ssize_t m = zeros.shape[0]
    cdef Py_ssize_t i, k
    cdef double pr, pi, dr, di, br, bi, dbr, dbi, xr, xi, lr, li
    cdef double denr, deni, dd, ir, ii, nr, ni, tr, ti, mod2
    # per-zero constants: unimodular factor conj(lam)/|lam| and |lam|^2 - 1
    consts = np.empty((m, 3), dtype=np.float64)
    cdef double[:, ::1] c = consts
    for k in range(m):
        lr = zeros[k].real
        li = zeros[k].imag
        mod2 = lr * lr + li * li
        c[k, 2] = mod2 - 1.0
        if mod2 == 0.0:
            c[k, 0] = 0.0
            c[k, 1] = 0.0
        else:
            c[k, 0] = lr / sqrt(mod2)
            c[k, 1] = -li / sqrt(mod2)
    val = np.empty(n, dtype=np.complex128)
    der = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] v = val
    cdef double complex[::1] dv = der
    for i in range(n):
        xr = z[i].real
        xi = z[i].imag
        pr = 1.0
        pi = 0.0
        dr = 0.0
        di = 0.0
        for k in range(m):
            lr = zeros[k].real
            li = zeros[k].imag
            if c[k, 0] == 0.0 and c[k, 1] == 0.0:
                br = xr
                bi = xi
                dbr = 1.0
                dbi = 0.0
            else:
                # den = 1 - conj(lam) z, inv = 1 / den
                denr = 1.0 - (lr * xr + li * xi)
                deni = -(lr * xi - li * xr)
                dd = 1.0 / (denr * denr + deni * deni)
                ir = denr * dd
                ii = -deni * dd
                # b = u (lam - z) inv
                nr = c[k, 0] * (lr - xr) - c[k, 1] * (li - xi)
                ni = c[k, 0] * (li - xi) + c[k, 1] * (lr - xr)
                br = nr * ir - ni * ii
                bi = nr * ii + ni * ir
                # db = u (|lam|^2 - 1) inv^2
                tr = ir * ir - ii * ii
                ti = 2.0 * ir * ii
                dbr = c[k, 2] * (c[k, 0] * tr - c[k, 1] * ti)
                dbi = c[k, 2] * (c[k, 0] * ti + c[k, 1] * tr)
            tr = dr * br - di * bi + pr * dbr - pi * dbi
            ti = dr * bi + di * br + pr * dbi + pi * dbr
            dr = tr
            di = ti
            tr = pr * br - pi * bi
            pi = pr * bi + pi * br
            pr = tr
        v[i] = pr + 1j * pi
        dv[i] = dr + 1j * di
    return val, der


def label_components(const unsigned char[:, ::1] mask):
    """Label 4-connected components of ``mask``; returns (labels, count)."""
    cdef Py_ssize_t nr = mask.shape[0]
    cdef Py_ssize_t nc = mask.shape[1]
    labels_arr = np.zeros((nr, nc), dtype=np.int32)
    cdef int[:, ::1] labels = labels_arr
    stack_arr = np.empty(nr * nc + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] stack = stack_arr
    cdef Py_ssize_t top, cell, r, c, i, j
    cdef int current = 0
    for i in range(nr):
        for j in range(nc):
            if mask[i, j] == 0 or labels[i, j] != 0:
                continue
            current += 1
            labels[i, j] = current
            top = 0
            stack[top] = i * nc + j
            top += 1
            while top > 0:
                top -= 1
                cell = stack[top]
                r = cell // nc
                c = cell - r * nc
                if r > 0 and mask[r - 1, c] and labels[r - 1, c] == 0:
                    labels[r - 1, c] = current
                    stack[top] = cell - nc
                    top += 1
                if r < nr - 1 and mask[r + 1, c] and labels[r + 1, c] == 0:
                    labels[r + 1, c] = current
                    stack[top] = cell + nc
                    top += 1
                if c > 0 and mask[r, c - 1] and labels[r, c - 1] == 0:
                    labels[r, c - 1] = current
                    stack[top] = cell - 1
                    top += 1
                if c < nc - 1 and mask[r, c + 1] and labels[r, c + 1] == 0:
                    labels[r, c + 1] = current
                    stack[top] = cell + 1
                    top += 1
    return labels_arr, current
