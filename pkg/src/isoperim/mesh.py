"""Discrete k-surfaces: polylines in Riemannian surfaces and triangle meshes in E^3.

Polylines (k=1) live in the chart of any 2-dimensional ambient; their element
lengths use 3-point Gauss quadrature of the metric along chart chords, and the
discrete geodesic curvature comes from RK2 parallel transport of edge tangents.
Triangle meshes (k=2) are Euclidean only, with the cotangent mean-curvature
operator.  All quadratures are shared with the varifold module so that the
discrete Thm-style identities close exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .ambient import AmbientSurface
from .errors import InvalidMeshError, UnsupportedDimensionError

GAUSS3_NODES = np.array([0.5 - 0.5 * math.sqrt(0.6), 0.5,
                         0.5 + 0.5 * math.sqrt(0.6)])
GAUSS3_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 18.0


class MeshSurface:
    """A polyline (k=1) or triangle mesh (k=2) with oriented elements.

    For k=1 the elements must form consistently oriented paths or loops:
    every vertex is the source of at most one segment and the target of at
    most one.  Vertices are stored in unwrapped chart coordinates; periodic
    axes are handled through the chart's shortest-displacement convention.
    """

    def __init__(self, ambient, k, vertices, elements, params=None,
                 curve=None, projector=None, name="mesh"):
        self.ambient = ambient
        self.k = int(k)
        self.vertices = np.array(vertices, dtype=float)
        self.elements = np.array(elements, dtype=int)
        self.params = None if params is None else np.asarray(params, dtype=float)
        self.curve = curve
        self.projector = projector
        self.name = name
        self._validate()

    # ------------------------------------------------------------ structure

    def _validate(self):
        if self.k not in (1, 2):
            raise InvalidMeshError("k must be 1 or 2")
        if self.k + 1 != self.elements.shape[1]:
            raise InvalidMeshError("element arity does not match k")
        if self.k == 2 and (self.ambient.dim != 3 or
                            self.ambient.family != "euclidean"):
            raise UnsupportedDimensionError(
                "triangle meshes are supported in Euclidean 3-space only")
        n = len(self.vertices)
        if self.elements.size and (self.elements.min() < 0 or
                                   self.elements.max() >= n):
            raise InvalidMeshError("element index out of range")
        if self.k == 1:
            src = self.elements[:, 0]
            dst = self.elements[:, 1]
            if len(np.unique(src)) != len(src) or len(np.unique(dst)) != len(dst):
                raise InvalidMeshError("polyline elements must be consistently "
                                       "oriented (vertex used twice as source)")
            self._out_edge = np.full(n, -1, dtype=int)
            self._in_edge = np.full(n, -1, dtype=int)
            self._out_edge[src] = np.arange(len(src))
            self._in_edge[dst] = np.arange(len(dst))
            self.boundary_vertices = np.nonzero(
                (self._out_edge < 0) ^ (self._in_edge < 0))[0]
            used = (self._out_edge >= 0) | (self._in_edge >= 0)
            if not np.all(used):
                raise InvalidMeshError("isolated vertex in polyline")
        else:
            edges = np.concatenate([self.elements[:, [0, 1]],
                                    self.elements[:, [1, 2]],
                                    self.elements[:, [2, 0]]])
            key = np.sort(edges, axis=1)
            uniq, counts = np.unique(key, axis=0, return_counts=True)
            if np.any(counts > 2):
                raise InvalidMeshError("non-manifold edge")
            self.boundary_edges = _order_boundary_edges(
                edges, key, uniq[counts == 1])
            self.boundary_vertices = np.unique(self.boundary_edges)
        measures = element_measures(self)
        if measures.size and measures.min() <= 1e-12:
            raise InvalidMeshError("degenerate element (measure <= 1e-12)")

    @property
    def closed(self):
        return len(self.boundary_vertices) == 0

    def edge_vectors(self):
        """Chart displacement along each element edge (k=1)."""
        a = self.vertices[self.elements[:, 0]]
        b = self.vertices[self.elements[:, 1]]
        return self.ambient.chart.delta(a, b)

    def __repr__(self):
        return (f"MeshSurface(k={self.k}, {len(self.vertices)} vertices, "
                f"{len(self.elements)} elements, name={self.name!r})")


def _order_boundary_edges(edges, key, boundary_keys):
    if len(boundary_keys) == 0:
        return np.zeros((0, 2), dtype=int)
    keyset = {tuple(k) for k in boundary_keys.tolist()}
    out = [e for e, k in zip(edges.tolist(), key.tolist()) if tuple(k) in keyset]
    return np.asarray(out, dtype=int)


# ------------------------------------------------------------------ measures


def element_measures(mesh):
    """Riemannian measure of every element (shared quadrature).

    k=1: 3-point Gauss quadrature of the metric speed along chart chords.
    k=2: Euclidean triangle area.
    """
    if len(mesh.elements) == 0:
        return np.zeros(0)
    if mesh.k == 1:
        a = mesh.vertices[mesh.elements[:, 0]]
        d = mesh.edge_vectors()
        total = np.zeros(len(d))
        for s, w in zip(GAUSS3_NODES, GAUSS3_WEIGHTS):
            q = a + s * d
            total += w * mesh.ambient.norm(q, d)
        return total
    p0 = mesh.vertices[mesh.elements[:, 0]]
    p1 = mesh.vertices[mesh.elements[:, 1]]
    p2 = mesh.vertices[mesh.elements[:, 2]]
    cross = np.cross(p1 - p0, p2 - p0)
    return 0.5 * np.linalg.norm(cross, axis=1)


def measure(mesh):
    """Total Riemannian measure |M| (length for k=1, area for k=2)."""
    return math.fsum(element_measures(mesh))


def boundary_measure(mesh):
    """|dM|: endpoint count for k=1, boundary polyline length for k=2."""
    if mesh.k == 1:
        return float(len(mesh.boundary_vertices))
    a = mesh.vertices[mesh.boundary_edges[:, 0]]
    b = mesh.vertices[mesh.boundary_edges[:, 1]]
    return math.fsum(np.linalg.norm(b - a, axis=1))


# ----------------------------------------------------------------- curvature


@dataclass
class CurvatureField:
    """Per-vertex discrete mean curvature data.

    ``vector`` holds the mean curvature vector in chart components; rows where
    ``defined`` is False (boundary vertices) carry no curvature.  ``dual``
    is the per-vertex dual measure used by all curvature quadratures, and
    ``conormal`` maps each boundary vertex to the outward unit conormal.
    """

    vector: np.ndarray
    defined: np.ndarray
    dual: np.ndarray
    conormal: dict = field(default_factory=dict)
    signed: np.ndarray = None  # k=1 only: signed geodesic curvature

    def magnitude(self, mesh):
        mag = mesh.ambient.norm(mesh.vertices, self.vector)
        return np.where(self.defined, mag, 0.0)


def _transport_rk2(ambient, start, d, v):
    """Parallel transport of v along the chart chord start -> start + d."""
    G0 = ambient.christoffel(start)
    k1 = -np.einsum("...kij,...i,...j->...k", G0, d, v)
    Gm = ambient.christoffel(start + 0.5 * d)
    return v - np.einsum("...kij,...i,...j->...k", Gm, d, v + 0.5 * k1)


def mean_curvature(mesh):
    """Discrete mean curvature vector field of the mesh."""
    if mesh.k == 1:
        return _polyline_curvature(mesh)
    return _cotan_curvature(mesh)


def turning_curvature(ambient, u, v, w, len_in, len_out):
    """Discrete geodesic curvature at vertices v between neighbors u and w.

    The incoming chord tangent is parallel transported (RK2 with midpoint
    Christoffels) to v and compared with the outgoing chord tangent in the
    g-orthonormal frame; the turning angle divided by the average adjacent
    length is the signed curvature, directed along the rotated bisector.
    Returns (H chart vectors, signed kappa, frame coords of the bisector).
    """
    amb = ambient
    d_in = amb.chart.delta(u, v)
    d_out = amb.chart.delta(v, w)
    t0 = amb.unit(u, d_in)
    t_in = amb.unit(v, _transport_rk2(amb, u, d_in, t0))
    t_out = amb.unit(v, d_out)

    a = amb.frame_coords(v, t_in)
    b = amb.frame_coords(v, t_out)
    angle = np.arctan2(a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
                       np.einsum("...i,...i->...", a, b))
    kappa = angle / (0.5 * (len_in + len_out))

    mean_dir = a + b
    mean_dir = mean_dir / np.linalg.norm(mean_dir, axis=-1, keepdims=True)
    normal_frame = np.stack([-mean_dir[..., 1], mean_dir[..., 0]], axis=-1)
    F = amb.frame(v)
    H = np.einsum("...ij,...j->...i", F, kappa[..., None] * normal_frame)
    return H, kappa, mean_dir


def _polyline_curvature(mesh):
    amb = mesh.ambient
    n = len(mesh.vertices)
    lengths = element_measures(mesh)
    dual = np.zeros(n)
    np.add.at(dual, mesh.elements[:, 0], 0.5 * lengths)
    np.add.at(dual, mesh.elements[:, 1], 0.5 * lengths)

    interior = np.nonzero((mesh._in_edge >= 0) & (mesh._out_edge >= 0))[0]
    H = np.zeros((n, 2))
    signed = np.zeros(n)
    if len(interior):
        e_in = mesh._in_edge[interior]
        e_out = mesh._out_edge[interior]
        v = mesh.vertices[interior]
        u = mesh.vertices[mesh.elements[e_in, 0]]
        w = mesh.vertices[mesh.elements[e_out, 1]]
        H[interior], signed[interior], _ = turning_curvature(
            amb, u, v, w, lengths[e_in], lengths[e_out])

    defined = np.zeros(n, dtype=bool)
    defined[interior] = True

    conormal = {}
    for bv in mesh.boundary_vertices:
        if mesh._in_edge[bv] >= 0:  # end of path: points along the last edge
            src = mesh.elements[mesh._in_edge[bv], 0]
            d = amb.chart.delta(mesh.vertices[src], mesh.vertices[bv])
        else:  # start of path: points backwards
            dst = mesh.elements[mesh._out_edge[bv], 1]
            d = -amb.chart.delta(mesh.vertices[bv], mesh.vertices[dst])
        conormal[int(bv)] = amb.unit(mesh.vertices[bv], d)
    return CurvatureField(H, defined, dual, conormal, signed)


def _cotan_curvature(mesh):
    pts = mesh.vertices
    tri = mesh.elements
    n = len(pts)
    areas = element_measures(mesh)

    cots = np.zeros((len(tri), 3))
    for c in range(3):
        i = tri[:, c]
        j = tri[:, (c + 1) % 3]
        k = tri[:, (c + 2) % 3]
        u = pts[j] - pts[i]
        v = pts[k] - pts[i]
        cos = np.einsum("ij,ij->i", u, v)
        sin = np.linalg.norm(np.cross(u, v), axis=1)
        cots[:, c] = cos / np.maximum(sin, 1e-300)

    lap = np.zeros((n, 3))
    for c in range(3):
        i = tri[:, c]
        j = tri[:, (c + 1) % 3]
        k = tri[:, (c + 2) % 3]
        # cotangent at corner k weights edge (i, j)
        w = cots[:, (c + 2) % 3]
        np.add.at(lap, i, w[:, None] * (pts[j] - pts[i]))
        np.add.at(lap, j, w[:, None] * (pts[i] - pts[j]))

    # mixed Voronoi dual cell area
    dual = np.zeros(n)
    obtuse = cots < 0.0
    any_obtuse = np.any(obtuse, axis=1)
    for c in range(3):
        i = tri[:, c]
        j = tri[:, (c + 1) % 3]
        k = tri[:, (c + 2) % 3]
        lij2 = np.einsum("ij,ij->i", pts[j] - pts[i], pts[j] - pts[i])
        lik2 = np.einsum("ij,ij->i", pts[k] - pts[i], pts[k] - pts[i])
        voronoi = 0.125 * (lij2 * cots[:, (c + 2) % 3] +
                           lik2 * cots[:, (c + 1) % 3])
        fallback = np.where(obtuse[:, c], 0.5 * areas, 0.25 * areas)
        np.add.at(dual, i, np.where(any_obtuse, fallback, voronoi))

    H = lap / (2.0 * dual[:, None])
    defined = np.ones(n, dtype=bool)
    defined[mesh.boundary_vertices] = False
    H[~defined] = 0.0

    conormal = {}
    if len(mesh.boundary_vertices):
        edge_to_tri = {}
        for t_idx, (i, j, k) in enumerate(tri):
            for a, b in ((i, j), (j, k), (k, i)):
                edge_to_tri[(min(a, b), max(a, b))] = t_idx
        for a, b in mesh.boundary_edges:
            t_idx = edge_to_tri[(min(a, b), max(a, b))]
            i, j, k = tri[t_idx]
            opp = [v for v in (i, j, k) if v not in (a, b)][0]
            e = pts[b] - pts[a]
            e = e / np.linalg.norm(e)
            w = pts[opp] - pts[a]
            nu = -(w - np.dot(w, e) * e)
            nu = nu / np.linalg.norm(nu)
            conormal[(int(a), int(b))] = nu
    return CurvatureField(H, defined, dual, conormal)


def total_mean_curvature(mesh, curvature=None):
    """Integral of |H| with the vertex-dual quadrature."""
    cf = curvature if curvature is not None else mean_curvature(mesh)
    mags = cf.magnitude(mesh)
    return math.fsum(mags[cf.defined] * cf.dual[cf.defined])


# --------------------------------------------------------- divergence identity


def divergence_identity_residual(mesh, X):
    """|int_M div^M X  -  (int_dM X.nu - int_M H.X)| with shared quadratures."""
    lhs = integral_tangential_divergence(mesh, X)
    rhs = boundary_flux(mesh, X) - curvature_pairing(mesh, X)
    return abs(lhs - rhs)


def integral_tangential_divergence(mesh, X):
    amb = mesh.ambient
    if mesh.k == 1:
        a = mesh.vertices[mesh.elements[:, 0]]
        d = mesh.edge_vectors()
        total = np.zeros(len(d))
        for s, w in zip(GAUSS3_NODES, GAUSS3_WEIGHTS):
            q = a + s * d
            speed = amb.norm(q, d)
            tau = d / speed[:, None]
            J = X.jacobian(q)
            Xq = X.eval(q)
            G = amb.christoffel(q)
            nabla = np.einsum("mij,mj->mi", J, tau) + \
                np.einsum("mkij,mi,mj->mk", G, tau, Xq)
            total += w * amb.inner(q, nabla, tau) * speed
        return math.fsum(total)
    p0 = mesh.vertices[mesh.elements[:, 0]]
    p1 = mesh.vertices[mesh.elements[:, 1]]
    p2 = mesh.vertices[mesh.elements[:, 2]]
    e1, e2 = _triangle_frames(p0, p1, p2)
    areas = element_measures(mesh)
    total = np.zeros(len(areas))
    for qa, qb in ((p0, p1), (p1, p2), (p2, p0)):
        q = 0.5 * (qa + qb)
        J = X.jacobian(q)
        div = np.einsum("mi,mij,mj->m", e1, J, e1) + \
            np.einsum("mi,mij,mj->m", e2, J, e2)
        total += div * areas / 3.0
    return math.fsum(total)


def boundary_flux(mesh, X):
    amb = mesh.ambient
    if mesh.k == 1:
        cf = mean_curvature(mesh)
        vals = []
        for bv, nu in cf.conormal.items():
            p = mesh.vertices[bv]
            vals.append(amb.inner(p, X.eval(p), nu))
        return math.fsum(vals)
    cf = mean_curvature(mesh)
    vals = []
    for (a, b), nu in cf.conormal.items():
        pa, pb = mesh.vertices[a], mesh.vertices[b]
        length = np.linalg.norm(pb - pa)
        for s, w in zip(GAUSS3_NODES, GAUSS3_WEIGHTS):
            q = pa + s * (pb - pa)
            vals.append(w * length * float(np.dot(X.eval(q), nu)))
    return math.fsum(vals)


def curvature_pairing(mesh, X, curvature=None):
    """int_M H . X with the vertex-dual quadrature."""
    cf = curvature if curvature is not None else mean_curvature(mesh)
    idx = np.nonzero(cf.defined)[0]
    if len(idx) == 0:
        return 0.0
    pts = mesh.vertices[idx]
    vals = mesh.ambient.inner(pts, cf.vector[idx], X.eval(pts)) * cf.dual[idx]
    return math.fsum(vals)


def _triangle_frames(p0, p1, p2):
    e1 = p1 - p0
    e1 = e1 / np.linalg.norm(e1, axis=1, keepdims=True)
    v = p2 - p0
    e2 = v - np.einsum("ij,ij->i", v, e1)[:, None] * e1
    e2 = e2 / np.linalg.norm(e2, axis=1, keepdims=True)
    return e1, e2


# ---------------------------------------------------------------- refinement


def refine(mesh):
    """Midpoint subdivision; element count doubles (k=1) or quadruples (k=2).

    Polylines generated from a parametrization are reprojected through it;
    otherwise chart chord midpoints are used, run through the mesh projector
    when one is attached.
    """
    if mesh.k == 1:
        return _refine_polyline(mesh)
    return _refine_triangles(mesh)


def _refine_polyline(mesh):
    n = len(mesh.vertices)
    m = len(mesh.elements)
    if mesh.params is not None and mesh.curve is not None:
        ta = mesh.params[mesh.elements[:, 0]]
        tb = mesh.params[mesh.elements[:, 1]]
        tb = np.where(tb <= ta, tb + 1.0, tb)
        tm = 0.5 * (ta + tb)
        new_pts = mesh.curve(np.mod(tm, 1.0))
        # keep unwrapped continuity with the parent edge
        a = mesh.vertices[mesh.elements[:, 0]]
        d = mesh.ambient.chart.delta(a, new_pts)
        new_pts = a + d
        params = np.concatenate([mesh.params, np.mod(tm, 1.0)])
    else:
        a = mesh.vertices[mesh.elements[:, 0]]
        d = mesh.edge_vectors()
        new_pts = a + 0.5 * d
        if mesh.projector is not None:
            new_pts = mesh.projector(new_pts, np.zeros(len(new_pts), dtype=bool))
        params = None
    vertices = np.concatenate([mesh.vertices, new_pts])
    mids = n + np.arange(m)
    elements = np.concatenate([
        np.stack([mesh.elements[:, 0], mids], axis=1),
        np.stack([mids, mesh.elements[:, 1]], axis=1)])
    return MeshSurface(mesh.ambient, 1, vertices, elements, params=params,
                       curve=mesh.curve, projector=mesh.projector,
                       name=mesh.name)


def _refine_triangles(mesh):
    tri = mesh.elements
    n = len(mesh.vertices)
    edge_index = {}
    new_pts = []
    boundary_keys = {(min(a, b), max(a, b)) for a, b in mesh.boundary_edges}
    new_on_boundary = []

    def midpoint(a, b):
        key = (min(a, b), max(a, b))
        if key not in edge_index:
            edge_index[key] = n + len(new_pts)
            new_pts.append(0.5 * (mesh.vertices[a] + mesh.vertices[b]))
            new_on_boundary.append(key in boundary_keys)
        return edge_index[key]

    elements = []
    for i, j, k in tri:
        ij, jk, ki = midpoint(i, j), midpoint(j, k), midpoint(k, i)
        elements.extend([[i, ij, ki], [ij, j, jk], [ki, jk, k], [ij, jk, ki]])
    new_pts = np.asarray(new_pts).reshape(-1, 3)
    if mesh.projector is not None and len(new_pts):
        new_pts = mesh.projector(new_pts, np.asarray(new_on_boundary, dtype=bool))
    vertices = np.concatenate([mesh.vertices, new_pts])
    return MeshSurface(mesh.ambient, 2, vertices, np.asarray(elements),
                       projector=mesh.projector, name=mesh.name)


# ---------------------------------------------------------------- generators


def curve_mesh(ambient, fn, n, closed=True, name="curve"):
    """Polyline sampling a chart parametrization t in [0, 1]."""
    if closed:
        params = np.arange(n) / n
        vertices = np.asarray(fn(params), dtype=float)
        elements = np.stack([np.arange(n), (np.arange(n) + 1) % n], axis=1)
    else:
        params = np.linspace(0.0, 1.0, n + 1)
        vertices = np.asarray(fn(params), dtype=float)
        elements = np.stack([np.arange(n), np.arange(n) + 1], axis=1)
    return MeshSurface(ambient, 1, vertices, elements, params=params,
                       curve=fn, name=name)


def segment_mesh(ambient, a, b, n=1, name="segment"):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)

    def fn(t):
        t = np.asarray(t, dtype=float)
        return a + t[..., None] * (b - a)

    return curve_mesh(ambient, fn, n, closed=False, name=name)


def circle_mesh(ambient, center, radius, n, name="circle"):
    center = np.asarray(center, dtype=float)

    def fn(t):
        ang = 2.0 * math.pi * np.asarray(t, dtype=float)
        return center + radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)

    return curve_mesh(ambient, fn, n, closed=True, name=name)


def latitude_mesh(ambient, level, n, name=None):
    """Closed coordinate circle {first chart coordinate == level}."""
    def fn(t):
        ang = 2.0 * math.pi * np.asarray(t, dtype=float)
        return np.stack([np.full_like(ang, float(level)), ang], axis=-1)

    return curve_mesh(ambient, fn, n, closed=True,
                      name=name or f"latitude({level})")


def meridian_mesh(ambient, theta, z_from, z_to, n, name="meridian"):
    a = np.array([z_from, theta], dtype=float)
    b = np.array([z_to, theta], dtype=float)
    return segment_mesh(ambient, a, b, n, name=name)


def chart_segment_mesh(ambient, a, b, n, name="chart-segment"):
    return segment_mesh(ambient, a, b, n, name=name)


def square_boundary_mesh(ambient, side=1.0, per_side=1, name="square"):
    s = float(side)
    corners = np.array([[0.0, 0.0], [s, 0.0], [s, s], [0.0, s]])
    pts = []
    for c in range(4):
        a, b = corners[c], corners[(c + 1) % 4]
        for i in range(per_side):
            pts.append(a + (b - a) * i / per_side)
    pts = np.asarray(pts)
    n = len(pts)
    elements = np.stack([np.arange(n), (np.arange(n) + 1) % n], axis=1)
    return MeshSurface(ambient, 1, pts, elements, name=name)


_E3 = None


def euclidean3(extent=2.0):
    global _E3
    if _E3 is None or _E3.chart.bounds[0, 1] != extent:
        _E3 = AmbientSurface.euclidean(3, [[-extent, extent]] * 3)
    return _E3


def two_triangle_square(ambient=None, name="unit-square"):
    amb = ambient or euclidean3()
    vertices = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                         [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
    elements = np.array([[0, 1, 2], [0, 2, 3]])
    return MeshSurface(amb, 2, vertices, elements, name=name)


def icosphere(level, radius=1.0, ambient=None, name=None):
    """Subdivided icosahedron reprojected to the sphere of given radius."""
    amb = ambient or euclidean3()
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1]], dtype=float)
    verts = radius * raw / np.linalg.norm(raw, axis=1, keepdims=True)
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]])

    def projector(pts, on_boundary):
        return radius * pts / np.linalg.norm(pts, axis=1, keepdims=True)

    m = MeshSurface(amb, 2, verts, faces, projector=projector,
                    name=name or f"icosphere({level})")
    for _ in range(level):
        m = refine(m)
    return m


def disk_mesh(level, radius=1.0, ambient=None, name=None):
    """Flat disk in the z=0 plane of E^3, hexagonal fan refined ``level`` times."""
    amb = ambient or euclidean3()
    ang = 2.0 * math.pi * np.arange(6) / 6
    verts = np.concatenate([
        np.zeros((1, 3)),
        np.stack([radius * np.cos(ang), radius * np.sin(ang),
                  np.zeros(6)], axis=1)])
    faces = np.array([[0, 1 + i, 1 + (i + 1) % 6] for i in range(6)])

    def projector(pts, on_boundary):
        out = np.array(pts, copy=True)
        if np.any(on_boundary):
            xy = out[on_boundary, :2]
            norm = np.linalg.norm(xy, axis=1, keepdims=True)
            out[on_boundary, :2] = radius * xy / norm
        return out

    m = MeshSurface(amb, 2, verts, faces, projector=projector,
                    name=name or f"disk({level})")
    for _ in range(level):
        m = refine(m)
    return m


# ------------------------------------------------------------------- file io


def save_mesh(mesh, path):
    """Plain text dump: header, vertex lines, element lines, boundary line."""
    lines = ["# isoperim-mesh v1",
             f"k {mesh.k}",
             f"ambient {mesh.ambient.spec_string()}",
             f"name {mesh.name}",
             f"counts {len(mesh.vertices)} {len(mesh.elements)}"]
    for v in mesh.vertices:
        lines.append("v " + " ".join(repr(float(x)) for x in v))
    for e in mesh.elements:
        lines.append("e " + " ".join(str(int(i)) for i in e))
    if mesh.k == 1:
        bnd = " ".join(str(int(i)) for i in mesh.boundary_vertices)
    else:
        bnd = " ".join(f"{int(a)},{int(b)}" for a, b in mesh.boundary_edges)
    lines.append("b " + bnd)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_mesh(path):
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != "# isoperim-mesh v1":
        raise InvalidMeshError(f"{path}: not an isoperim mesh file")
    k = int(lines[1].split()[1])
    ambient = AmbientSurface.from_spec_string(lines[2].split(" ", 1)[1])
    name = lines[3].split(" ", 1)[1] if " " in lines[3] else "mesh"
    vertices, elements = [], []
    for ln in lines[5:]:
        tag, _, rest = ln.partition(" ")
        if tag == "v":
            vertices.append([float(x) for x in rest.split()])
        elif tag == "e":
            elements.append([int(x) for x in rest.split()])
    return MeshSurface(ambient, k, np.asarray(vertices),
                       np.asarray(elements, dtype=int), name=name)


def load_off(path, ambient=None, name=None):
    """Import an OFF triangle mesh as a k=2 surface in E^3."""
    with open(path) as fh:
        tokens = []
        for ln in fh:
            ln = ln.split("#", 1)[0].strip()
            if ln:
                tokens.extend(ln.split())
    if not tokens or tokens[0] != "OFF":
        raise InvalidMeshError(f"{path}: missing OFF header")
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    vertices = np.array([float(t) for t in tokens[pos:pos + 3 * nv]],
                        dtype=float).reshape(nv, 3)
    pos += 3 * nv
    faces = []
    for _ in range(nf):
        arity = int(tokens[pos])
        if arity != 3:
            raise InvalidMeshError("only triangle OFF faces are supported")
        faces.append([int(t) for t in tokens[pos + 1:pos + 4]])
        pos += 1 + arity
    return MeshSurface(ambient or euclidean3(), 2, vertices,
                       np.asarray(faces, dtype=int),
                       name=name or "off-import")


# ----------------------------------------------------- ball-bound diagnostics


def ball_bound_slack(mesh):
    """Slack of |M| <= (r/k)(|dM| + int|H|) with r the min enclosing ball radius.

    Returns (lhs, rhs, r).  Euclidean ambients only.
    """
    if mesh.ambient.family != "euclidean":
        raise UnsupportedDimensionError("ball bound requires Euclidean ambient")
    from .miniball import min_enclosing_ball
    _, r = min_enclosing_ball(mesh.vertices)
    lhs = measure(mesh)
    rhs = (r / mesh.k) * (boundary_measure(mesh) + total_mean_curvature(mesh))
    return lhs, rhs, r
