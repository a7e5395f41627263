"""Pure-numpy sparse polynomial kernels (fallback backend).

Terms are held as an ``(nterms, nvars)`` int64 exponent matrix plus a float64
coefficient vector.  Canonical form: rows lexicographically sorted, unique,
no exactly-zero coefficients.  The compiled backend in ``_poly_core.pyx``
implements the same three entry points.
"""

import numpy as np

BACKEND = "python"


def merge_terms(exps, coefs):
    """Canonicalize a term list: lexsort rows, sum duplicates, drop zeros."""
    if len(coefs) == 0:
        return exps.reshape(0, exps.shape[1]), coefs
    order = np.lexsort(exps.T[::-1])
    e = exps[order]
    c = coefs[order]
    boundary = np.empty(len(c), dtype=bool)
    boundary[0] = True
    np.any(e[1:] != e[:-1], axis=1, out=boundary[1:])
    starts = np.flatnonzero(boundary)
    summed = np.add.reduceat(c, starts)
    e = e[starts]
    keep = summed != 0.0
    return np.ascontiguousarray(e[keep]), np.ascontiguousarray(summed[keep])


def mul_terms(exps_a, coefs_a, exps_b, coefs_b):
    """Product of two canonical term lists, returned canonical."""
    na, _ = exps_a.shape
    nb, _ = exps_b.shape
    if na == 0 or nb == 0:
        return exps_a[:0], coefs_a[:0]
    exps = (exps_a[:, None, :] + exps_b[None, :, :]).reshape(na * nb, -1)
    coefs = (coefs_a[:, None] * coefs_b[None, :]).reshape(na * nb)
    return merge_terms(exps, coefs)


def eval_terms(exps, coefs, point):
    """Evaluate the term list at one point (1-d array of length nvars)."""
    if len(coefs) == 0:
        return 0.0
    powers = np.power(point[None, :], exps)
    return float(np.dot(coefs, powers.prod(axis=1)))
