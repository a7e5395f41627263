"""Boundary-reduction integration over flat-faced polytopes.

Everything here reduces volume integrals to boundary data.  The truncated
series quadrature converts the integral of a smooth function into facet
integrals of directional-derivative contractions; polynomials are integrated
exactly by recursing the homogeneous-layer identity

    int_P h = 1/(d + deg h) * sum_facets [(x_F - c) . n_F] int_F h

down the face lattice to vertex evaluations.  The per-layer weights are
folded into one degree-diagonal rescaling per face, so each recursion step
costs a single recentering.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle as _oracle
from .geometry import Polytope
from .tensorpoly import (
    DerivativeOracle,
    MultiPolynomial,
    directional_poly,
    recenter,
)

__all__ = [
    "IntegralReport",
    "expand_nd_check",
    "integrate_poly",
    "integrate_series",
    "integrate_surface_expansion",
    "volume",
    "centroid",
    "trapezoid_nd",
    "remainder_nd",
]

MAX_SERIES_ORDER_SUM = 30  # reject n + m beyond this (factorial scaling)


@dataclass
class IntegralReport:
    """Outcome of one integration run."""

    value: float
    method: str
    truncation_order: object = "exact"  # int or "exact"
    facet_contributions: list = field(default_factory=list)
    oracle_value: float = None
    abs_error: float = None

    def with_oracle(self, ref):
        self.oracle_value = float(ref)
        self.abs_error = abs(self.value - ref)
        return self


def _series_coeff(n, k):
    """(n-1)!/(n+k)! as a running product: 1/(n (n+1) ... (n+k))."""
    c = 1.0
    for j in range(k + 1):
        c /= n + j
    return c


def _degree_scaled(poly, k):
    """Divide every coefficient by (k + term degree); the folded layer weights."""
    if len(poly.coefs) == 0:
        return poly
    degs = poly.exps.sum(axis=1)
    return MultiPolynomial(poly.dim, poly.exps, poly.coefs / (k + degs), poly.center)


def _face_integral(poly, polytope, k, idx):
    """Exact integral of ``poly`` over face (k, idx), recursively."""
    if k == 0:
        return poly(polytope.face_vertices(0, idx)[0])
    frame = polytope.frame(k, idx)
    g = _degree_scaled(recenter(poly, frame.chart.x0), k)
    return math.fsum(
        p.offset * _face_integral(g, polytope, k - 1, p.child) for p in frame.pieces
    )


def integrate_poly(f, polytope, z0=None, face=None):
    """Exact (to roundoff) integral of a polynomial over a polytope or face.

    ``face=(k, i)`` integrates over that k-face of the lattice; the default
    is the whole polytope.  ``z0`` overrides the top-level expansion center
    (the result is independent of it); deeper levels always recenter at the
    face barycenters, which lie on their faces as the identity requires.
    """
    if not isinstance(f, MultiPolynomial):
        raise TypeError("integrate_poly expects a MultiPolynomial")
    if f.dim != polytope.dim_ambient:
        raise ValueError(
            f"polynomial dim {f.dim} != ambient dim {polytope.dim_ambient}"
        )
    k, idx = (polytope.dim, 0) if face is None else face
    if z0 is None:
        return _face_integral(f, polytope, k, idx)
    z0 = np.asarray(z0, dtype=np.float64)
    if k == 0:
        return f(polytope.face_vertices(0, idx)[0])
    frame = polytope.frame(k, idx)
    g = _degree_scaled(recenter(f, z0), k)
    total = 0.0
    kf = k - 1
    for p in frame.pieces:
        bar = polytope.face_barycenter(kf, p.child)
        offset = float(np.dot(bar - z0, p.n_x))
        total += offset * _face_integral(g, polytope, kf, p.child)
    return total


def volume(polytope, z0=None):
    """Measure of the polytope from facet offsets and recursive face measures."""
    d = polytope.dim
    frame = polytope.facet_frame()
    if z0 is None:
        z0 = frame.chart.x0
    z0 = np.asarray(z0, dtype=np.float64)
    total = 0.0
    for p in frame.pieces:
        bar = polytope.face_barycenter(d - 1, p.child)
        total += float(np.dot(bar - z0, p.n_x)) * polytope.face_measure(d - 1, p.child)
    val = total / d
    if val <= 0.0:
        raise ValueError("degenerate polytope: non-positive volume")
    return val


def _face_centroid(polytope, k, idx):
    """True centroid of a face (first moments over measure), cached."""
    cache = getattr(polytope, "_divquad_centroids", None)
    if cache is None:
        cache = {}
        polytope._divquad_centroids = cache
    key = (k, idx)
    if key in cache:
        return cache[key]
    if k == 0:
        c = polytope.face_vertices(0, idx)[0].copy()
    elif len(polytope.face(k, idx).verts) == k + 1:
        c = polytope.face_vertices(k, idx).mean(axis=0)  # simplex: vertex mean
    else:
        n = polytope.dim_ambient
        meas = polytope.face_measure(k, idx)
        c = np.array(
            [
                _face_integral(MultiPolynomial.variable(n, j), polytope, k, idx)
                for j in range(n)
            ]
        ) / meas
    cache[key] = c
    return c


def centroid(polytope):
    """Centroid from boundary data: facet first moments and offsets."""
    d = polytope.dim
    vol = volume(polytope)
    n_amb = polytope.dim_ambient
    frame = polytope.facet_frame()
    acc = np.zeros(n_amb)
    for p in frame.pieces:
        bar = polytope.face_barycenter(d - 1, p.child)
        weight = float(np.dot(bar, p.n_x))  # (x_i . n_i), constant on the facet
        moment = np.array(
            [
                _face_integral(MultiPolynomial.variable(n_amb, j), polytope, d - 1, p.child)
                for j in range(n_amb)
            ]
        )
        acc += weight * moment
    return acc / ((d + 1) * vol)


# -- pointwise expansion check --------------------------------------------------


def expand_nd_check(f, x, z0, m):
    """Evaluate both groups of the truncated divergence expansion at ``x``.

    Returns ``(series_part, remainder_part)`` whose sum reconstructs f(x).
    The divergence terms are expanded symbolically.
    """
    if not isinstance(f, MultiPolynomial):
        raise TypeError("expand_nd_check expects a MultiPolynomial")
    x = np.asarray(x, dtype=np.float64)
    z0 = np.asarray(z0, dtype=np.float64)
    n = f.dim
    series = 0.0
    sign = 1.0
    for k in range(m + 1):
        tk = directional_poly(f, k, z0)
        div = n * tk
        for i in range(n):
            xi = MultiPolynomial.monomial(n, tuple(int(i == j) for j in range(n)), 1.0, z0)
            div = div + xi * tk.diff(i)
        series += sign * _series_coeff(n, k) * div(x)
        sign = -sign
    t_next = directional_poly(f, m + 1, z0)
    remainder = sign * _series_coeff(n, m) * t_next(x)
    return series, remainder


# -- facet quadrature for non-polynomial integrands -----------------------------


def _facet_trapezoid(g, polytope, k, idx):
    """One-level boundary-reduction (trapezoidal) facet integral of ``g``."""
    if k == 0:
        return g(polytope.face_vertices(0, idx)[0])
    if k == 1:
        verts = polytope.face_vertices(1, idx)
        length = float(np.linalg.norm(verts[1] - verts[0]))
        return 0.5 * length * (g(verts[0]) + g(verts[1]))
    frame = polytope.frame(k, idx)
    cbar = _face_centroid(polytope, k, idx)
    total = 0.0
    for p in frame.pieces:
        sub_c = _face_centroid(polytope, k - 1, p.child)
        meas = polytope.face_measure(k - 1, p.child)
        total += meas * g(sub_c) * float(np.dot(sub_c - cbar, p.n_x))
    return total / k


def _facet_gauss(g, polytope, k, idx, order):
    """Dense simplex-fan Gauss integral of ``g`` over face (k, idx)."""
    total = 0.0
    for simplex in polytope.triangulate_face(k, idx):
        pts, wts = _oracle.simplex_gauss_rule(simplex, order)
        total += math.fsum(w * g(p) for p, w in zip(pts, wts))
    return total


# -- truncated series quadrature -------------------------------------------------


def integrate_series(f, polytope, z0=None, m=0, facet_rule="auto", gauss_order=16):
    """Truncated boundary-series quadrature of order ``m``.

    Each term integrates the k-th directional contraction over every facet,
    weighted by the constant facet offset.  Polynomial input uses the exact
    recursive facet integrals; derivative oracles use ``facet_rule``:
    ``"gauss"`` (dense, default via ``"auto"``) or ``"trapezoid"`` (one-level
    boundary reduction, cheap but low order).
    """
    if m < 0:
        raise ValueError("truncation order must be non-negative")
    n = polytope.dim
    if n != polytope.dim_ambient:
        raise ValueError("series quadrature expects a full-dimensional polytope")
    if n + m > MAX_SERIES_ORDER_SUM:
        raise ValueError(f"n + m = {n + m} beyond factorial-scaling limit")
    if z0 is None:
        z0 = centroid(polytope)
    z0 = np.asarray(z0, dtype=np.float64)

    is_poly = isinstance(f, MultiPolynomial)
    if not is_poly and not isinstance(f, DerivativeOracle):
        raise TypeError("integrate_series expects a MultiPolynomial or DerivativeOracle")
    if facet_rule == "auto":
        facet_rule = "exact" if is_poly else "gauss"
    if is_poly and facet_rule != "exact":
        raise ValueError("polynomial facet integrals are always exact; use facet_rule='auto'")

    frame = polytope.facet_frame()
    kf = n - 1
    offsets = [
        float(np.dot(polytope.face_barycenter(kf, p.child) - z0, p.n_x))
        for p in frame.pieces
    ]
    per_facet = [[] for _ in frame.pieces]
    sign = 1.0
    scale = math.factorial(n - 1)
    for k in range(m + 1):
        coeff = sign * _series_coeff(n, k)
        if is_poly:
            tk = directional_poly(f, k, z0)
            vals = [
                _face_integral(tk, polytope, kf, p.child) for p in frame.pieces
            ]
        else:
            def g(x, _k=k):
                x = np.asarray(x, dtype=np.float64)
                return f.directional(_k, x, x - z0)

            if facet_rule == "trapezoid":
                vals = [_facet_trapezoid(g, polytope, kf, p.child) for p in frame.pieces]
            elif facet_rule == "gauss":
                vals = [_facet_gauss(g, polytope, kf, p.child, gauss_order) for p in frame.pieces]
            else:
                raise ValueError(f"unknown facet rule {facet_rule!r}")
        for i, v in enumerate(vals):
            per_facet[i].append(coeff * offsets[i] * v)
        sign = -sign
    contributions = [scale * math.fsum(vals) for vals in per_facet]
    return IntegralReport(
        value=math.fsum(contributions),
        method="series-truncated",
        truncation_order=m,
        facet_contributions=contributions,
    )


def remainder_nd(f, polytope, z0=None, m=0, gauss_order=16):
    """Truncation remainder of the order-m series: the volume integral of the
    (m+1)-st contraction with its factorial weight.  Exact for polynomials,
    dense tessellation quadrature for oracles."""
    n = polytope.dim
    if z0 is None:
        z0 = centroid(polytope)
    z0 = np.asarray(z0, dtype=np.float64)
    sign = -1.0 if m % 2 == 0 else 1.0
    coeff = sign * math.factorial(n - 1) * _series_coeff(n, m)
    if isinstance(f, MultiPolynomial):
        t_next = directional_poly(f, m + 1, z0)
        return coeff * integrate_poly(t_next, polytope)

    def g(x):
        x = np.asarray(x, dtype=np.float64)
        return f.directional(m + 1, x, x - z0)

    return coeff * _oracle.quadrature_integrate(g, polytope, order=gauss_order)


# -- multidimensional trapezoidal rule -------------------------------------------


def trapezoid_nd(f, polytope):
    """Lowest-order boundary rule: facet barycenter values times offsets.

    Exact for linear integrands (the centroid choice kills the remainder and
    barycenter evaluation integrates linear facet integrands exactly).
    """
    n = polytope.dim
    if callable(f):
        g = f
    elif isinstance(f, DerivativeOracle):
        g = f.value
    else:
        raise TypeError("trapezoid_nd expects a point evaluator")
    xbar = centroid(polytope)
    frame = polytope.facet_frame()
    kf = n - 1
    contributions = []
    for p in frame.pieces:
        c = _face_centroid(polytope, kf, p.child)
        meas = polytope.face_measure(kf, p.child)
        contributions.append(meas * g(c) * float(np.dot(c - xbar, p.n_x)) / n)
    return IntegralReport(
        value=math.fsum(contributions),
        method="trapezoid-recursive",
        truncation_order=0,
        facet_contributions=contributions,
    )


# -- surface expansion on a face --------------------------------------------------


def integrate_surface_expansion(phi, polytope, face, order):
    """Boundary series for the integral of ``phi`` over an m-face.

    The expansion center is the face barycenter; boundary pieces carry the
    transported in-plane outward normals, and their integrals are computed
    by the exact recursion.  For polynomial ``phi`` with ``order >= deg phi``
    the result agrees with :func:`integrate_poly` on the face.
    """
    if not isinstance(phi, MultiPolynomial):
        raise TypeError("integrate_surface_expansion expects a MultiPolynomial")
    if order < 0:
        raise ValueError("expansion order must be non-negative")
    k, idx = face
    if k < 1:
        raise ValueError("surface expansion needs a face of dimension >= 1")
    if k + order > MAX_SERIES_ORDER_SUM:
        raise ValueError(f"m + order = {k + order} beyond factorial-scaling limit")
    frame = polytope.frame(k, idx)
    x0 = frame.chart.x0
    total = 0.0
    sign = 1.0
    for j in range(order + 1):
        tj = directional_poly(phi, j, x0)
        coeff = sign * _series_coeff(k, j)
        term = 0.0
        for p in frame.pieces:
            if k == 1:
                # boundary pieces are vertices: point evaluation, measure 1
                piece_val = tj(polytope.face_vertices(0, p.child)[0])
            else:
                piece_val = _face_integral(tj, polytope, k - 1, p.child)
            term += p.offset * piece_val
        total += coeff * term
        sign = -sign
    return math.factorial(k - 1) * total
