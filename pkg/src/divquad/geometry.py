"""Polytopes with explicit face lattices, affine charts and normal transport.

A flat m-face embedded in R^n is handled through the chart

    s  ->  x0 + A s,          A an (n, m) matrix of spanning vectors,

whose Gram determinant ``det(A^T A)`` carries the measure distortion and
whose pseudoinverse maps ambient points back to reference coordinates.
Outward unit normals of face boundaries transport as the normalized image
``A (A^T A)^{-1} n_s``; the cofactor identity ties the per-piece measure
ratio to the Gram cofactor quadratic form.

The face lattice is explicit input (no hull computation here): for every
dimension k the k-faces list their vertex indices and their (k-1)-subfaces.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegenerateFaceError",
    "FlatnessError",
    "AffineChart",
    "Face",
    "BoundaryPiece",
    "FaceFrame",
    "Polytope",
    "build_chart",
    "parallelepiped_volume",
    "pushforward_normal",
    "cofactor_identity_check",
    "facet_offset",
    "load_polytope",
    "save_polytope",
]

FLATNESS_TOL = 1e-10


class DegenerateFaceError(ValueError):
    """Vertex set does not span a face of the requested dimension."""


class FlatnessError(ValueError):
    """Vertices deviate from their fitted flat by more than the tolerance."""


# -- charts -------------------------------------------------------------------


@dataclass(frozen=True)
class AffineChart:
    """Map ``s -> x0 + A s`` from R^m onto a flat m-face in R^n."""

    x0: np.ndarray
    A: np.ndarray
    gram: np.ndarray = field(init=False)
    gram_det: float = field(init=False)
    pseudoinv: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "x0", np.asarray(self.x0, dtype=np.float64))
        object.__setattr__(self, "A", np.asarray(self.A, dtype=np.float64))
        gram = self.A.T @ self.A
        det = float(np.linalg.det(gram)) if gram.size else 1.0
        if det <= 0.0:
            raise DegenerateFaceError("chart columns are linearly dependent")
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "gram_det", det)
        object.__setattr__(self, "pseudoinv", np.linalg.solve(gram, self.A.T))

    @property
    def dim_ambient(self):
        return self.A.shape[0]

    @property
    def dim_face(self):
        return self.A.shape[1]

    @property
    def measure_factor(self):
        """sqrt(det(A^T A)); the volume scale from reference to ambient."""
        return float(np.sqrt(self.gram_det))

    def to_ambient(self, s):
        return self.x0 + self.A @ np.asarray(s, dtype=np.float64)

    def to_reference(self, x):
        return self.pseudoinv @ (np.asarray(x, dtype=np.float64) - self.x0)


def _flat_basis(vertices, dim=None):
    """Orthonormal direction basis of the flat spanned by ``vertices``.

    Returns (x0, basis (n, m), residual) where residual is the largest
    vertex distance to the fitted flat.  ``dim`` forces the flat dimension.
    """
    verts = np.asarray(vertices, dtype=np.float64)
    x0 = verts.mean(axis=0)
    D = (verts - x0).T  # (n, nverts)
    if D.shape[1] == 0:
        raise DegenerateFaceError("empty vertex set")
    U, sing, _ = np.linalg.svd(D, full_matrices=False)
    scale = max(float(sing[0]) if sing.size else 0.0, 1.0)
    rank = int(np.sum(sing > 1e-12 * scale))
    m = rank if dim is None else int(dim)
    if rank < m:
        raise DegenerateFaceError(f"vertices span a {rank}-flat, expected {m}")
    basis = U[:, :m]
    if m < len(sing):
        # distance of each vertex to the fitted m-flat
        resid = D - basis @ (basis.T @ D)
        residual = float(np.linalg.norm(resid, axis=0).max())
    else:
        residual = 0.0
    return x0, basis, residual


def build_chart(face_vertices, dim=None, basis="orthonormal"):
    """Chart for the flat face spanned by ``face_vertices``.

    The base point is the vertex barycenter.  ``basis="orthonormal"`` takes
    stable SVD directions; ``basis="edges"`` uses raw edge vectors from the
    first vertex (the construction the transport identities are stated for).
    Raises :class:`DegenerateFaceError` for rank-deficient input and
    :class:`FlatnessError` when vertices leave the fitted flat by more than
    ``FLATNESS_TOL``.
    """
    verts = np.asarray(face_vertices, dtype=np.float64)
    x0, onb, residual = _flat_basis(verts, dim)
    if residual > FLATNESS_TOL:
        raise FlatnessError(f"vertices off the fitted flat by {residual:.3e}")
    if basis == "orthonormal":
        return AffineChart(x0, onb)
    if basis == "edges":
        m = onb.shape[1]
        edges = verts[1:] - verts[0]
        # greedy pick of m independent edges
        cols = []
        for e in edges:
            trial = cols + [e]
            M = np.array(trial).T
            if np.linalg.matrix_rank(M, tol=1e-12) == len(trial):
                cols.append(e)
            if len(cols) == m:
                break
        if len(cols) < m:
            raise DegenerateFaceError("could not find independent edge vectors")
        return AffineChart(x0, np.array(cols).T)
    raise ValueError(f"unknown basis choice {basis!r}")


def parallelepiped_volume(A):
    """m-volume of the parallelepiped spanned by the columns of ``A``.

    Equals sqrt(det(A^T A)); coincides with \\|det A\\| when square.  Returns
    0.0 (with a warning) for dependent columns.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix of column vectors")
    if A.shape[1] == 0:
        return 1.0
    gram = A.T @ A
    det = float(np.linalg.det(gram))
    if det <= 1e-300:
        warnings.warn("degenerate parallelepiped: dependent columns", stacklevel=2)
        return 0.0
    return float(np.sqrt(det))


def _reference_boundary_normal(child_s_verts, m):
    """Outward unit normal in R^m of a flat boundary piece of the reference
    polytope, oriented away from the reference barycenter (the origin)."""
    child_s_verts = np.asarray(child_s_verts, dtype=np.float64)
    bar = child_s_verts.mean(axis=0)
    D = child_s_verts - bar
    if m == 1:
        n_s = np.array([1.0])
    else:
        _, sing, Vt = np.linalg.svd(D, full_matrices=True)
        n_s = Vt[-1]
    # orient outward: away from the face barycenter at s = 0
    sgn = float(np.dot(n_s, bar))
    if abs(sgn) < 1e-14:
        raise DegenerateFaceError("boundary piece passes through the face barycenter")
    if sgn < 0:
        n_s = -n_s
    return n_s / np.linalg.norm(n_s)


def pushforward_normal(chart, n_s, boundary_face_s=None):
    """Transport a reference outward unit normal through the chart.

    Returns ``(n_x, measure_ratio)`` where ``n_x`` is the normalized image
    ``A (A^T A)^{-1} n_s`` (a unit vector, in the face plane, outward on the
    corresponding boundary piece) and ``measure_ratio`` is the per-piece
    ambient/reference measure ratio ``sqrt(det(Q^T Q))`` for the piece chart
    ``Q`` (1.0 when the piece vertices are not supplied).
    """
    n_s = np.asarray(n_s, dtype=np.float64)
    if abs(np.linalg.norm(n_s) - 1.0) > 1e-10:
        raise ValueError("reference normal must be a unit vector")
    raw = chart.A @ np.linalg.solve(chart.gram, n_s)
    n_x = raw / np.linalg.norm(raw)
    ratio = 1.0
    if boundary_face_s is not None:
        s_verts = np.asarray(boundary_face_s, dtype=np.float64)
        m = chart.dim_face
        if s_verts.shape[0] > 1:
            _, B, _ = _flat_basis(s_verts, m - 1)
            ratio = parallelepiped_volume(chart.A @ B)
    return n_x, float(ratio)


def cofactor_identity_check(chart, n_s, boundary_face_s):
    """Both sides of the measure/normal identity for one boundary piece.

    lhs: squared ambient/reference measure ratio ``det(Q^T Q)``;
    rhs: ``(Cof(A^T A) n_s, n_s)``.  Equal for every flat boundary piece.
    """
    n_s = np.asarray(n_s, dtype=np.float64)
    s_verts = np.asarray(boundary_face_s, dtype=np.float64)
    m = chart.dim_face
    if s_verts.shape[0] > 1:
        _, B, _ = _flat_basis(s_verts, m - 1)
        Q = chart.A @ B
        lhs = float(np.linalg.det(Q.T @ Q)) if Q.shape[1] else 1.0
    else:
        lhs = 1.0
    cof = chart.gram_det * np.linalg.inv(chart.gram).T
    rhs = float(n_s @ cof @ n_s)
    return lhs, rhs


def facet_offset(facet_vertices, normal, z0):
    """The constant ``(x - z0) . n`` over a flat facet, from its barycenter."""
    verts = np.asarray(facet_vertices, dtype=np.float64)
    normal = np.asarray(normal, dtype=np.float64)
    z0 = np.asarray(z0, dtype=np.float64)
    return float(np.dot(verts.mean(axis=0) - z0, normal))


# -- polytopes ----------------------------------------------------------------


@dataclass(frozen=True)
class Face:
    """One lattice entry: vertex indices plus indices of (k-1)-subfaces."""

    verts: tuple
    children: tuple


@dataclass(frozen=True)
class BoundaryPiece:
    """One flat portion of a face boundary, with transported normal data."""

    child: int  # index into the (k-1)-face list
    n_s: np.ndarray  # outward unit normal in reference coordinates
    n_x: np.ndarray  # outward unit normal in the face plane (ambient)
    offset: float  # (piece barycenter - face barycenter) . n_x


@dataclass(frozen=True)
class FaceFrame:
    """Chart plus reference pre-image and boundary normal data of one face."""

    key: tuple  # (k, index)
    chart: AffineChart
    s_vertices: np.ndarray
    pieces: tuple


class Polytope:
    """Flat-faced polytope: vertices plus an explicit face lattice.

    ``faces[k]`` lists the k-faces for k = 0..d-1; the polytope itself is the
    single d-face.  ``facet_normals`` (outward units for the (d-1)-faces) are
    validated when given and derived from the geometry otherwise; automatic
    orientation points away from the vertex mean, which is correct for convex
    and star-shaped-about-the-mean inputs.  Instances are immutable after
    construction; frames and measures are cached lazily.
    """

    def __init__(self, vertices, faces, facet_normals=None):
        self.vertices = np.asarray(vertices, dtype=np.float64)
        if self.vertices.ndim != 2:
            raise ValueError("vertices must be a 2-d array of coordinates")
        self.dim_ambient = self.vertices.shape[1]
        self.faces = [
            [Face(tuple(int(v) for v in f.verts), tuple(int(c) for c in f.children))
             if isinstance(f, Face) else
             Face(tuple(int(v) for v in f[0]), tuple(int(c) for c in f[1]))
             for f in level]
            for level in faces
        ]
        self.dim = len(self.faces)
        if self.dim < 1 or self.dim > self.dim_ambient:
            raise ValueError(
                f"lattice depth {self.dim} incompatible with ambient dim {self.dim_ambient}"
            )
        if facet_normals is not None:
            facet_normals = np.asarray(facet_normals, dtype=np.float64)
            if facet_normals.shape != (len(self.faces[-1]), self.dim_ambient):
                raise ValueError("facet_normals shape does not match the facet list")
        self.facet_normals = facet_normals
        self._frames = {}
        self._measures = {}
        self._validate()

    # -- structure ------------------------------------------------------------

    @property
    def n_facets(self):
        return len(self.faces[-1])

    @property
    def vertex_mean(self):
        return self.vertices.mean(axis=0)

    def face(self, k, i):
        """The i-th k-face; ``k == self.dim`` addresses the whole polytope."""
        if k == self.dim:
            if i != 0:
                raise IndexError("the polytope is the only top-dimensional face")
            facets = tuple(range(len(self.faces[-1]))) if self.dim >= 1 else ()
            return Face(tuple(range(len(self.vertices))), facets)
        return self.faces[k][i]

    def face_vertices(self, k, i):
        return self.vertices[list(self.face(k, i).verts)]

    def face_barycenter(self, k, i):
        """Vertex mean of the face (the chart base point)."""
        return self.face_vertices(k, i).mean(axis=0)

    # -- validation -------------------------------------------------------------

    def _validate(self):
        nv = len(self.vertices)
        for k, level in enumerate(self.faces):
            if k == 0:
                for i, f in enumerate(level):
                    if len(f.verts) != 1 or f.children:
                        raise ValueError(f"0-face {i} must hold exactly one vertex and no children")
                    if not 0 <= f.verts[0] < nv:
                        raise ValueError(f"0-face {i} references unknown vertex {f.verts[0]}")
                continue
            for i, f in enumerate(level):
                if not f.children:
                    raise ValueError(f"{k}-face {i} lists no subfaces")
                covered = set()
                for c in f.children:
                    if not 0 <= c < len(self.faces[k - 1]):
                        raise ValueError(f"{k}-face {i} references unknown {k-1}-face {c}")
                    covered.update(self.faces[k - 1][c].verts)
                if covered != set(f.verts):
                    raise ValueError(
                        f"{k}-face {i}: vertex set differs from the union of its subfaces"
                    )
                if k >= 2:
                    verts = self.vertices[list(f.verts)]
                    _, _, residual = _flat_basis(verts, k)
                    if residual > FLATNESS_TOL:
                        raise FlatnessError(
                            f"{k}-face {i} is non-flat: deviation {residual:.3e}"
                        )
        if self.facet_normals is not None:
            interior = self.vertex_mean
            kf = self.dim - 1
            for i, n in enumerate(self.facet_normals):
                if abs(np.linalg.norm(n) - 1.0) > 1e-10:
                    raise ValueError(f"facet normal {i} is not unit length")
                verts = self.face_vertices(kf, i)
                bar = verts.mean(axis=0)
                D = verts - bar
                if np.abs(D @ n).max() > 1e-8 * max(1.0, np.abs(verts).max()):
                    raise ValueError(f"facet normal {i} is not orthogonal to its facet")
                if np.dot(bar - interior, n) <= 0:
                    raise ValueError(f"facet normal {i} does not point outward")

    # -- frames and measures ----------------------------------------------------

    def frame(self, k, i):
        """Cached :class:`FaceFrame` for face (k, i); k may equal ``self.dim``."""
        key = (k, i)
        if key in self._frames:
            return self._frames[key]
        if k < 1:
            raise ValueError("frames exist for faces of dimension >= 1")
        f = self.face(k, i)
        verts = self.vertices[list(f.verts)]
        chart = build_chart(verts, dim=k)
        s_verts = np.array([chart.to_reference(v) for v in verts])
        pieces = []
        vert_pos = {v: j for j, v in enumerate(f.verts)}
        for c in f.children:
            child = self.face(k - 1, c)
            child_s = s_verts[[vert_pos[v] for v in child.verts]]
            if k == self.dim and self.facet_normals is not None:
                # respect supplied orientation (required for nonconvex input)
                n_x = self.facet_normals[c]
                n_s = chart.A.T @ n_x
                n_s /= np.linalg.norm(n_s)
                n_x, _ = pushforward_normal(chart, n_s)
            else:
                n_s = _reference_boundary_normal(child_s, k)
                n_x, _ = pushforward_normal(chart, n_s)
            bar = self.vertices[list(child.verts)].mean(axis=0)
            offset = float(np.dot(bar - chart.x0, n_x))
            pieces.append(BoundaryPiece(c, n_s, n_x, offset))
        frame = FaceFrame(key, chart, s_verts, tuple(pieces))
        self._frames[key] = frame
        return frame

    def face_measure(self, k, i):
        """k-dimensional measure of face (k, i) by recursive boundary reduction.

        Base cases: a vertex has measure 1, a segment its length.
        """
        key = (k, i)
        if key in self._measures:
            return self._measures[key]
        if k == 0:
            val = 1.0
        elif k == 1:
            verts = self.face_vertices(k, i)
            val = float(np.linalg.norm(verts[1] - verts[0]))
        else:
            frame = self.frame(k, i)
            val = sum(p.offset * self.face_measure(k - 1, p.child) for p in frame.pieces) / k
        self._measures[key] = val
        return val

    def facet_frame(self):
        """Frame of the whole polytope: facets with outward normals/offsets."""
        return self.frame(self.dim, 0)

    def outward_normals(self):
        """Outward unit facet normals (supplied or derived)."""
        return np.array([p.n_x for p in self.facet_frame().pieces])

    def contains(self, x, tol=1e-12):
        """Half-space membership test (meaningful for convex polytopes)."""
        x = np.asarray(x, dtype=np.float64)
        kf = self.dim - 1
        for p in self.facet_frame().pieces:
            bar = self.face_barycenter(kf, p.child)
            if np.dot(x - bar, p.n_x) > tol:
                return False
        return True

    def triangulate_face(self, k, i):
        """Cover face (k, i) by k-simplices, returned as (k+1, n) coordinate
        arrays.  Simplicial faces are returned as-is; otherwise the face
        barycenter cones over the triangulated subfaces (valid for faces
        star-shaped about their vertex mean)."""
        f = self.face(k, i)
        verts = self.face_vertices(k, i)
        if len(f.verts) == k + 1:
            return [verts]
        bar = self.face_barycenter(k, i)
        out = []
        for c in f.children:
            for s in self.triangulate_face(k - 1, c):
                out.append(np.vstack([bar[None, :], s]))
        return out

    def __repr__(self):
        counts = "/".join(str(len(level)) for level in self.faces)
        return (
            f"Polytope(dim={self.dim}, ambient={self.dim_ambient}, "
            f"vertices={len(self.vertices)}, faces={counts})"
        )


# -- file format ----------------------------------------------------------------


def save_polytope(polytope, path):
    """Write the polytope JSON document (schema in the package README)."""
    doc = {
        "dim": polytope.dim_ambient,
        "vertices": polytope.vertices.tolist(),
        "faces": [
            [{"verts": list(f.verts), "children": list(f.children)} for f in level]
            for level in polytope.faces
        ],
    }
    if polytope.facet_normals is not None:
        doc["normals"] = polytope.facet_normals.tolist()
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_polytope(path):
    """Read a polytope JSON document, naming the offending field on error."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON in {path}: {exc}") from None
    for fieldname in ("dim", "vertices", "faces"):
        if fieldname not in doc:
            raise ValueError(f"polytope file {path}: missing field '{fieldname}'")
    vertices = np.asarray(doc["vertices"], dtype=np.float64)
    if vertices.ndim != 2 or vertices.shape[1] != int(doc["dim"]):
        raise ValueError(f"polytope file {path}: field 'vertices' does not match 'dim'")
    faces = []
    for k, level in enumerate(doc["faces"]):
        entries = []
        for j, f in enumerate(level):
            if "verts" not in f:
                raise ValueError(f"polytope file {path}: faces[{k}][{j}] missing 'verts'")
            entries.append(Face(tuple(f["verts"]), tuple(f.get("children", ()))))
        faces.append(entries)
    normals = doc.get("normals")
    try:
        return Polytope(vertices, faces, normals)
    except (ValueError, FlatnessError, DegenerateFaceError) as exc:
        raise ValueError(f"polytope file {path}: {exc}") from None
