"""Ready-made polytopes: boxes, simplices, polygons and random convex hulls.

Builders return :class:`~divquad.geometry.Polytope` instances with complete
face lattices.  Hull-based builders represent each hull facet by the
simplices qhull reports; coplanar pieces carry the same outward normal, so
boundary-reduction integrals are unaffected by the splitting.
"""

from itertools import combinations, product

import numpy as np

from .geometry import Face, Polytope

__all__ = [
    "interval",
    "box",
    "unit_cube",
    "simplex",
    "standard_simplex",
    "polygon",
    "from_convex_hull",
    "random_convex_polytope",
]


def interval(a, b):
    """The 1-polytope [a, b] (facets are its endpoints, normals -1 / +1)."""
    if not b > a:
        raise ValueError("interval requires b > a")
    vertices = [[float(a)], [float(b)]]
    faces = [[Face((0,), ()), Face((1,), ())]]
    return Polytope(vertices, faces, facet_normals=[[-1.0], [1.0]])


def box(lo, hi):
    """Axis-aligned box with corners ``lo``, ``hi`` in R^n."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    n = len(lo)
    if n == 1:
        return interval(lo[0], hi[0])
    if not np.all(hi > lo):
        raise ValueError("box requires hi > lo componentwise")
    corners = list(product(*[(lo[i], hi[i]) for i in range(n)]))
    index = {c: i for i, c in enumerate(corners)}
    vertices = np.array(corners)

    # k-faces: choose n-k coordinates to pin at lo/hi, k left free
    levels = []
    face_index = [dict() for _ in range(n)]
    for k in range(n):
        entries = []
        for fixed_axes in combinations(range(n), n - k):
            free_axes = [i for i in range(n) if i not in fixed_axes]
            for pins in product(*[(lo[i], hi[i]) for i in fixed_axes]):
                spec = (fixed_axes, pins)
                verts = []
                for freevals in product(*[(lo[i], hi[i]) for i in free_axes]):
                    coord = [0.0] * n
                    for ax, v in zip(fixed_axes, pins):
                        coord[ax] = v
                    for ax, v in zip(free_axes, freevals):
                        coord[ax] = v
                    verts.append(index[tuple(coord)])
                children = []
                if k > 0:
                    for ax in free_axes:
                        sub_fixed = tuple(sorted(fixed_axes + (ax,)))
                        for extra in (lo[ax], hi[ax]):
                            sub_pins = []
                            for a2 in sub_fixed:
                                if a2 == ax:
                                    sub_pins.append(extra)
                                else:
                                    sub_pins.append(pins[fixed_axes.index(a2)])
                            children.append(face_index[k - 1][(sub_fixed, tuple(sub_pins))])
                face_index[k][spec] = len(entries)
                entries.append(Face(tuple(sorted(verts)), tuple(children)))
        levels.append(entries)

    normals = []
    for (fixed_axes, pins) in sorted(face_index[n - 1], key=face_index[n - 1].get):
        ax = fixed_axes[0]
        nvec = np.zeros(n)
        nvec[ax] = -1.0 if pins[0] == lo[ax] else 1.0
        normals.append(nvec)
    # face_index keys iterate in insertion order already; keep it simple
    normals = np.array(normals)
    return Polytope(vertices, levels, facet_normals=normals)


def unit_cube(n):
    """The unit cube [0, 1]^n."""
    return box(np.zeros(n), np.ones(n))


def _simplex_lattice(nverts):
    """Full subface lattice of a simplex on ``nverts`` vertices."""
    levels = []
    index = {}
    for k in range(nverts - 1):
        entries = []
        for subset in combinations(range(nverts), k + 1):
            children = tuple(index[(k - 1, sub)] for sub in combinations(subset, k)) if k else ()
            index[(k, subset)] = len(entries)
            entries.append(Face(subset, children))
        levels.append(entries)
    return levels


def simplex(vertices):
    """Simplex on n+1 affinely independent vertices in R^n."""
    vertices = np.asarray(vertices, dtype=np.float64)
    nverts, n = vertices.shape
    if nverts != n + 1:
        raise ValueError(f"a simplex in R^{n} needs {n + 1} vertices, got {nverts}")
    return Polytope(vertices, _simplex_lattice(nverts))


def standard_simplex(n):
    """Simplex with vertices at the origin and the n coordinate units."""
    return simplex(np.vstack([np.zeros(n), np.eye(n)]))


def polygon(vertices):
    """2-polytope from vertices listed in boundary order (convex or star-shaped
    about the vertex mean)."""
    vertices = np.asarray(vertices, dtype=np.float64)
    nv = len(vertices)
    if vertices.shape[1] != 2 or nv < 3:
        raise ValueError("polygon needs >= 3 vertices in R^2")
    level0 = [Face((i,), ()) for i in range(nv)]
    level1 = [Face((i, (i + 1) % nv), (i, (i + 1) % nv)) for i in range(nv)]
    return Polytope(vertices, [level0, level1])


def from_convex_hull(points):
    """Convex polytope in R^n from a point cloud via its hull.

    Facets are the simplices qhull reports (coplanar facets arrive split but
    share their outward normal); every lower-dimensional face is a shared
    subsimplex.
    """
    from scipy.spatial import ConvexHull

    points = np.asarray(points, dtype=np.float64)
    hull = ConvexHull(points)
    keep = sorted(hull.vertices)
    remap = {old: new for new, old in enumerate(keep)}
    vertices = points[keep]
    n = points.shape[1]

    levels = [[] for _ in range(n)]
    index = [dict() for _ in range(n)]

    def add_face(subset):
        k = len(subset) - 1
        if subset in index[k]:
            return index[k][subset]
        children = tuple(add_face(sub) for sub in combinations(subset, k)) if k else ()
        index[k][subset] = len(levels[k])
        levels[k].append(Face(subset, children))
        return index[k][subset]

    normals = []
    order = []
    for row, simp in enumerate(hull.simplices):
        subset = tuple(sorted(remap[v] for v in simp))
        idx = add_face(subset)
        order.append((idx, row))
    normals_arr = np.zeros((len(levels[n - 1]), n))
    for idx, row in order:
        normals_arr[idx] = hull.equations[row, :n]
    normals_arr /= np.linalg.norm(normals_arr, axis=1, keepdims=True)
    return Polytope(vertices, levels, facet_normals=normals_arr)


def random_convex_polytope(n, rng, n_points=None):
    """Random convex polytope: hull of gaussian points pushed to a shell.

    Shell radii keep the hull well-conditioned; all sampled points end up as
    hull vertices in almost every draw, but the hull pass makes it exact.
    """
    if n_points is None:
        n_points = {1: 2, 2: 7, 3: 9, 4: 11}.get(n, 2 * n + 4)
    if n == 1:
        a, b = np.sort(rng.uniform(-2.0, 2.0, size=2))
        return interval(a, b + 1.0)
    pts = rng.normal(size=(n_points, n))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts *= rng.uniform(0.7, 1.3, size=(n_points, 1))
    pts += rng.uniform(-0.5, 0.5, size=n)
    return from_convex_hull(pts)
