"""Independent ground-truth integrators.

Two reference routes back every exactness claim: simplex tessellation with
the closed-form Dirichlet monomial integral (exact for polynomials), and
seeded rejection-sampling Monte Carlo (for anything evaluable).  A dense
Gauss rule on tessellated simplices (Duffy transform) covers smooth
integrands where statistical error would drown the comparison.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import tensorpoly
from .geometry import Polytope

__all__ = [
    "UnsupportedOracleError",
    "SamplingEfficiencyError",
    "SimplexMesh",
    "tessellate",
    "simplex_monomial",
    "integrate_poly_oracle",
    "simplex_gauss_rule",
    "quadrature_integrate",
    "mc_integrate",
]


class UnsupportedOracleError(ValueError):
    """Input outside the oracle's validity domain (e.g. nonconvex)."""


class SamplingEfficiencyError(RuntimeError):
    """Rejection sampling acceptance rate collapsed."""


@dataclass
class SimplexMesh:
    """Covering of a convex polytope by simplices."""

    simplices: list  # (n+1, n) coordinate arrays
    jacobians: list  # |det| of the edge matrix per simplex

    def volume(self):
        n = self.simplices[0].shape[1]
        return math.fsum(self.jacobians) / math.factorial(n)

    def centroid(self):
        n = self.simplices[0].shape[1]
        w = np.array(self.jacobians)
        means = np.array([s.mean(axis=0) for s in self.simplices])
        return (w[:, None] * means).sum(axis=0) / w.sum()


def is_convex(polytope, tol=1e-9):
    """All vertices on the inner side of every facet hyperplane."""
    kf = polytope.dim - 1
    for p in polytope.facet_frame().pieces:
        bar = polytope.face_barycenter(kf, p.child)
        if np.max((polytope.vertices - bar) @ p.n_x) > tol:
            return False
    return True


def tessellate(polytope):
    """Cover a convex polytope by simplices coned from the vertex mean.

    A simplex input is returned as itself.  Facets are fanned recursively
    from their barycenters; cones degenerate to zero volume (apex on the
    facet plane) are dropped.
    """
    if polytope.dim != polytope.dim_ambient:
        raise UnsupportedOracleError("tessellation needs a full-dimensional polytope")
    if not is_convex(polytope):
        raise UnsupportedOracleError("tessellation oracle supports convex polytopes only")
    n = polytope.dim
    if len(polytope.vertices) == n + 1:
        verts = polytope.vertices
        det = abs(np.linalg.det((verts[1:] - verts[0]).T))
        return SimplexMesh([verts.copy()], [det])
    apex = polytope.vertex_mean
    simplices, jacobians = [], []
    scale = max(1.0, float(np.abs(polytope.vertices).max())) ** n
    for i in range(polytope.n_facets):
        for s in polytope.triangulate_face(n - 1, i):
            simplex = np.vstack([apex[None, :], s])
            det = abs(np.linalg.det((simplex[1:] - simplex[0]).T))
            if det < 1e-14 * scale:
                continue
            simplices.append(simplex)
            jacobians.append(det)
    return SimplexMesh(simplices, jacobians)


def simplex_monomial(simplex_vertices, alpha, center=None):
    """Exact integral of ``(x - center)^alpha`` over one simplex.

    The simplex is mapped to the standard one, the monomial pulled back
    exactly, and each resulting term integrated by the Dirichlet closed form
    ``int_simplex t^beta dt = prod(beta!) / (m + |beta|)!``.  Works for
    simplices of any intrinsic dimension (the measure scale is the Gram
    square root).  Degenerate simplices integrate to 0.
    """
    verts = np.asarray(simplex_vertices, dtype=np.float64)
    m = verts.shape[0] - 1
    n = verts.shape[1]
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != n:
        raise ValueError(f"multi-index length {len(alpha)} != ambient dim {n}")
    if center is None:
        center = np.zeros(n)
    E = (verts[1:] - verts[0]).T  # (n, m)
    gram_det = float(np.linalg.det(E.T @ E)) if m else 1.0
    if gram_det <= 1e-300:
        import warnings

        warnings.warn("degenerate simplex in monomial oracle", stacklevel=2)
        return 0.0
    scale = math.sqrt(gram_det)
    mono = tensorpoly.MultiPolynomial.monomial(n, alpha, 1.0, center)
    pulled = tensorpoly.compose_affine(mono, verts[0], E)
    total = 0.0
    for row, c in zip(pulled.exps, pulled.coefs):
        beta = [int(b) for b in row]
        num = 1.0
        for b in beta:
            num *= math.factorial(b)
        total += c * num / math.factorial(m + sum(beta))
    return float(total * scale)


def integrate_poly_oracle(poly, polytope):
    """Tessellation + closed-form reference integral of a polynomial."""
    mesh = tessellate(polytope)
    total = 0.0
    for simplex in mesh.simplices:
        for row, c in zip(poly.exps, poly.coefs):
            total += c * simplex_monomial(simplex, tuple(int(e) for e in row), poly.center)
    return total


def simplex_gauss_rule(simplex_vertices, order=20):
    """Gauss points/weights on a simplex via the Duffy (collapsed) map.

    Exactness grows with ``order``; convergence is spectral for analytic
    integrands.  Works for simplices of any intrinsic dimension.
    """
    verts = np.asarray(simplex_vertices, dtype=np.float64)
    m = verts.shape[0] - 1
    if m == 0:
        return verts.copy(), np.array([1.0])
    E = (verts[1:] - verts[0]).T
    gram_det = float(np.linalg.det(E.T @ E))
    if gram_det <= 0.0:
        return verts[:1].copy(), np.array([0.0])
    measure = math.sqrt(gram_det)
    g, w = np.polynomial.legendre.leggauss(order)
    g = 0.5 * (g + 1.0)  # [0, 1]
    w = 0.5 * w
    grids = np.meshgrid(*([g] * m), indexing="ij")
    U = np.stack([grid.ravel() for grid in grids], axis=1)  # (q^m, m)
    wgrids = np.meshgrid(*([w] * m), indexing="ij")
    W = np.prod(np.stack([grid.ravel() for grid in wgrids], axis=1), axis=1)
    # collapsed map onto the standard simplex with its jacobian
    T = np.empty_like(U)
    jac = np.ones(len(U))
    remaining = np.ones(len(U))
    for i in range(m):
        T[:, i] = U[:, i] * remaining
        jac *= remaining
        remaining = remaining * (1.0 - U[:, i])
    points = verts[0][None, :] + T @ E.T
    weights = W * jac * measure
    return points, weights


def quadrature_integrate(f, polytope, order=20):
    """Dense tessellation quadrature of a point evaluator over a convex body."""
    mesh = tessellate(polytope)
    total = 0.0
    for simplex in mesh.simplices:
        pts, wts = simplex_gauss_rule(simplex, order)
        total += math.fsum(w * f(p) for p, w in zip(pts, wts))
    return total


def mc_integrate(f, polytope, samples=100_000, seed=0):
    """Rejection-sampling Monte Carlo estimate with standard error.

    Uniform draws in the bounding box are filtered by the half-space test;
    the counter-based generator makes runs reproducible for a fixed seed.
    """
    if polytope.dim != polytope.dim_ambient:
        raise UnsupportedOracleError("Monte Carlo needs a full-dimensional polytope")
    if not is_convex(polytope):
        raise UnsupportedOracleError("Monte Carlo containment test assumes convexity")
    rng = np.random.Generator(np.random.Philox(seed))
    lo = polytope.vertices.min(axis=0)
    hi = polytope.vertices.max(axis=0)
    box_vol = float(np.prod(hi - lo))
    pts = rng.uniform(lo, hi, size=(samples, polytope.dim))
    kf = polytope.dim - 1
    inside = np.ones(samples, dtype=bool)
    for p in polytope.facet_frame().pieces:
        bar = polytope.face_barycenter(kf, p.child)
        inside &= (pts - bar) @ p.n_x <= 1e-12
    rate = inside.mean()
    if rate < 1e-3:
        raise SamplingEfficiencyError(f"acceptance rate {rate:.2e} below 1e-3")
    vals = np.zeros(samples)
    idx = np.flatnonzero(inside)
    for i in idx:
        vals[i] = f(pts[i])
    estimate = box_vol * float(vals.mean())
    stderr = box_vol * float(vals.std(ddof=1)) / math.sqrt(samples)
    return estimate, stderr
