# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sparse polynomial kernels.

Same contract as ``_poly_py``: canonical term lists are lexsorted unique
exponent rows with nonzero float64 coefficients.  Sorting is delegated to
numpy's lexsort; the duplicate reduction, product expansion and evaluation
loops run at C level, which is where the recursive polytope integrator
spends its time.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


cdef inline double _ipow(double base, long e) noexcept:
    cdef double r = 1.0
    cdef double b = base
    cdef long k = e
    while k > 0:
        if k & 1:
            r *= b
        b *= b
        k >>= 1
    return r


def merge_terms(exps, coefs):
    """Canonicalize a term list: lexsort rows, sum duplicates, drop zeros."""
    cdef Py_ssize_t n = len(coefs)
    if n == 0:
        return np.ascontiguousarray(exps.reshape(0, exps.shape[1])), coefs
    order = np.lexsort(exps.T[::-1])
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] e = \
        np.ascontiguousarray(exps[order], dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] c = \
        np.ascontiguousarray(coefs[order], dtype=np.float64)
    cdef Py_ssize_t d = e.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] oe = np.empty_like(e)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] oc = np.empty_like(c)
    cdef Py_ssize_t i, j, m = 0
    cdef bint same
    cdef double acc = c[0]
    for j in range(d):
        oe[0, j] = e[0, j]
    for i in range(1, n):
        same = True
        for j in range(d):
            if e[i, j] != oe[m, j]:
                same = False
                break
        if same:
            acc += c[i]
        else:
            if acc != 0.0:
                oc[m] = acc
                m += 1
            for j in range(d):
                oe[m, j] = e[i, j]
            acc = c[i]
    if acc != 0.0:
        oc[m] = acc
        m += 1
    return np.ascontiguousarray(oe[:m]), np.ascontiguousarray(oc[:m])


def mul_terms(exps_a, coefs_a, exps_b, coefs_b):
    """Product of two canonical term lists, returned canonical."""
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] ea = \
        np.ascontiguousarray(exps_a, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] eb = \
        np.ascontiguousarray(exps_b, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] ca = \
        np.ascontiguousarray(coefs_a, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] cb = \
        np.ascontiguousarray(coefs_b, dtype=np.float64)
    cdef Py_ssize_t na = ea.shape[0], nb = eb.shape[0], d = ea.shape[1]
    if na == 0 or nb == 0:
        return ea[:0], ca[:0]
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] e = \
        np.empty((na * nb, d), dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] c = \
        np.empty(na * nb, dtype=np.float64)
    cdef Py_ssize_t i, j, k, row = 0
    for i in range(na):
        for j in range(nb):
            for k in range(d):
                e[row, k] = ea[i, k] + eb[j, k]
            c[row] = ca[i] * cb[j]
            row += 1
    return merge_terms(e, c)


def eval_terms(exps, coefs, point):
    """Evaluate the term list at one point (1-d array of length nvars)."""
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] e = \
        np.ascontiguousarray(exps, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] c = \
        np.ascontiguousarray(coefs, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] x = \
        np.ascontiguousarray(point, dtype=np.float64)
    cdef Py_ssize_t n = e.shape[0], d = e.shape[1]
    cdef Py_ssize_t i, j
    cdef double total = 0.0, term
    for i in range(n):
        term = c[i]
        for j in range(d):
            if e[i, j] != 0:
                term *= _ipow(x[j], e[i, j])
        total += term
    return total
