"""Discrete varifolds and their first-variation calculus.

A discrete varifold is a finite list of weighted atoms (p, S, w): a chart
point, a g-orthonormal k-plane basis in the tangent space there, and a
nonnegative weight.  The module provides mass, spatial support, the first
variation dV(X), a certified lower bound for |dV| obtained by maximizing
dV over a finite-dimensional family of unit-sup-norm fields (an exact conic
program), and bounded-Lipschitz distances for convergence monitoring.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from . import mesh as meshmod
from .ambient import AmbientSurface
from .errors import (InvalidFieldError, InvalidMeshError, InvalidScaleError,
                     NumericError, PreconditionError)

ORTHO_TOL = 1e-10


# ------------------------------------------------------------- vector fields


class VectorField:
    """A tangent vector field given in chart components.

    ``fn`` maps (m, dim) chart points to (m, dim) chart vectors; ``jac``
    optionally supplies the component Jacobian d_b X^a as (m, dim, dim)
    indexed [a, b], otherwise central differences are used.  ``sup_norm``
    may declare a known exact sup of |X|_g; otherwise it is estimated by
    dense sampling with 10% inflation.
    """

    def __init__(self, fn, jac=None, name="field", sup_norm=None):
        self._fn = fn
        self._jac = jac
        self.name = name
        self.declared_sup = sup_norm

    def eval(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.asarray(self._fn(pts), dtype=float)
        return out if np.asarray(points).ndim > 1 else out[0]

    def jacobian(self, points, h=1e-6):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self._jac is not None:
            out = np.asarray(self._jac(pts), dtype=float)
        else:
            dim = pts.shape[-1]
            cols = []
            for b in range(dim):
                e = np.zeros(dim)
                e[b] = h
                cols.append((self._fn(pts + e) - self._fn(pts - e)) / (2 * h))
            out = np.stack(cols, axis=-1)  # [a, b] = d_b X^a
        return out if np.asarray(points).ndim > 1 else out[0]

    def sup_norm(self, ambient, resolution=65, inflation=1.1):
        if self.declared_sup is not None:
            return float(self.declared_sup)
        grid = ambient.chart.grid(resolution)
        return float(inflation * np.max(ambient.norm(grid, self.eval(grid))))

    def lipschitz_budget(self, ambient, resolution=33, inflation=1.1):
        grid = ambient.chart.grid(resolution)
        J = self.jacobian(grid)
        L = _metric_chol(ambient, grid)
        F = ambient.frame(grid)
        phys = np.einsum("mca,mab,mbd->mcd", np.swapaxes(L, -1, -2), J, F)
        op = np.linalg.norm(phys, axis=(-2, -1))
        return float(inflation * np.max(op))

    @classmethod
    def from_expressions(cls, exprs, var_names, name="field"):
        from .expressions import Expression
        comps = [Expression(e, tuple(var_names)) for e in exprs]

        def fn(pts):
            args = [pts[..., i] for i in range(pts.shape[-1])]
            return np.stack([c(*args) for c in comps], axis=-1)

        return cls(fn, name=name)

    @classmethod
    def from_embedding_components(cls, fn_e, ambient, check_points=None,
                                  name="embedded-field", tol=1e-8):
        """Convert a Euclidean-components field to chart components.

        The field must be tangent to the embedded surface; a normal component
        above ``tol`` raises InvalidFieldError.
        """
        # batched least squares with tangency check
        def fn(pts):
            Xe = np.asarray(fn_e(ambient.embed(pts)), dtype=float)
            J = ambient.embedding_jacobian(pts)
            JtJ = np.einsum("mea,meb->mab", J, J)
            JtX = np.einsum("mea,me->ma", J, Xe)
            a = np.linalg.solve(JtJ, JtX)
            resid = Xe - np.einsum("mea,ma->me", J, a)
            bad = np.linalg.norm(resid, axis=-1) > tol * (
                1.0 + np.linalg.norm(Xe, axis=-1))
            if np.any(bad):
                raise InvalidFieldError(
                    f"field {name!r} is not tangent to the surface")
            return a

        if check_points is not None:
            fn(np.atleast_2d(np.asarray(check_points, dtype=float)))
        return cls(fn, name=name)


def position_field(name="position"):
    """X(x) = x in a Euclidean chart (div_S == k on every k-plane)."""
    def fn(pts):
        return np.array(pts, copy=True)

    def jac(pts):
        dim = pts.shape[-1]
        J = np.zeros(pts.shape[:-1] + (dim, dim))
        idx = np.arange(dim)
        J[..., idx, idx] = 1.0
        return J

    return VectorField(fn, jac=jac, name=name, sup_norm=None)


def constant_field(vector, name="constant"):
    vector = np.asarray(vector, dtype=float)

    def fn(pts):
        return np.broadcast_to(vector, pts.shape).copy()

    def jac(pts):
        dim = pts.shape[-1]
        return np.zeros(pts.shape[:-1] + (dim, dim))

    return VectorField(fn, jac=jac, name=name,
                       sup_norm=float(np.linalg.norm(vector)))


def _metric_chol(ambient, points):
    """Lower Cholesky factor of the metric (L with g = L L^T)."""
    g = ambient.metric(points)
    if ambient.family == "euclidean":
        return g  # identity
    a = g[..., 0, 0]
    b = g[..., 0, 1]
    c = g[..., 1, 1]
    sa = np.sqrt(a)
    L = np.zeros_like(g)
    L[..., 0, 0] = sa
    L[..., 1, 0] = b / sa
    L[..., 1, 1] = np.sqrt(c - b * b / a)
    return L


# ----------------------------------------------------------------- varifolds


@dataclass
class VarifoldAtom:
    point: np.ndarray
    plane: np.ndarray  # (k, dim) g-orthonormal rows
    weight: float


class DiscreteVarifold:
    """Finite atomic measure on the bundle of (point, k-plane) pairs."""

    def __init__(self, ambient, k, points, planes, weights, source_mesh=None,
                 mesh_factor=1.0, validate=True):
        self.ambient = ambient
        self.k = int(k)
        self.points = np.asarray(points, dtype=float).reshape(-1, ambient.dim)
        self.planes = np.asarray(planes, dtype=float).reshape(
            len(self.points), self.k, ambient.dim)
        self.weights = np.asarray(weights, dtype=float).reshape(-1)
        self.source_mesh = source_mesh
        self.mesh_factor = float(mesh_factor)
        if len(self.weights) != len(self.points):
            raise PreconditionError("points/weights length mismatch")
        if validate and len(self.points):
            if np.min(self.weights) < 0:
                raise PreconditionError("atom weights must be nonnegative")
            g = ambient.metric(self.points)
            gram = np.einsum("mki,mij,mlj->mkl", self.planes, g, self.planes)
            eye = np.eye(self.k)
            if np.max(np.abs(gram - eye)) > 1e-8:
                raise PreconditionError("atom plane basis is not g-orthonormal")

    def __len__(self):
        return len(self.points)

    def atoms(self):
        for p, S, w in zip(self.points, self.planes, self.weights):
            yield VarifoldAtom(p, S, float(w))

    @classmethod
    def empty(cls, ambient, k):
        d = ambient.dim
        return cls(ambient, k, np.zeros((0, d)), np.zeros((0, k, d)),
                   np.zeros(0))

    def __add__(self, other):
        if other.ambient is not self.ambient or other.k != self.k:
            raise PreconditionError("varifolds live on different bundles")
        return DiscreteVarifold(
            self.ambient, self.k,
            np.concatenate([self.points, other.points]),
            np.concatenate([self.planes, other.planes]),
            np.concatenate([self.weights, other.weights]), validate=False)


def mass(V):
    """Total measure |V| (compensated summation, order independent)."""
    return math.fsum(V.weights)


def scale(V, lam):
    """Weights multiplied by lam >= 0; mass and dV scale linearly."""
    if lam < 0:
        raise InvalidScaleError("scale factor must be nonnegative")
    return DiscreteVarifold(V.ambient, V.k, V.points, V.planes,
                            lam * V.weights, source_mesh=V.source_mesh,
                            mesh_factor=lam * V.mesh_factor, validate=False)


def from_mesh(mesh):
    """Varifold associated to a mesh: one atom per element.

    Atom weights reuse the mesh element quadrature, so
    mass(from_mesh(M)) == measure(M) exactly.
    """
    amb = mesh.ambient
    w = meshmod.element_measures(mesh)
    if len(w) and np.min(w) <= 1e-12:
        raise InvalidMeshError("degenerate element")
    if mesh.k == 1:
        a = mesh.vertices[mesh.elements[:, 0]]
        d = mesh.edge_vectors()
        p = a + 0.5 * d
        e = d / amb.norm(p, d)[:, None]
        planes = e[:, None, :]
    else:
        p0 = mesh.vertices[mesh.elements[:, 0]]
        p1 = mesh.vertices[mesh.elements[:, 1]]
        p2 = mesh.vertices[mesh.elements[:, 2]]
        p = (p0 + p1 + p2) / 3.0
        e1, e2 = meshmod._triangle_frames(p0, p1, p2)
        planes = np.stack([e1, e2], axis=1)
    return DiscreteVarifold(amb, mesh.k, p, planes, w, source_mesh=mesh)


def thm75_value(V):
    """|dM| + int |H| of the backing mesh (equality case of the norm |dV|).

    None for varifolds that are not mesh backed.
    """
    if V.source_mesh is None:
        return None
    m = V.source_mesh
    return V.mesh_factor * (meshmod.boundary_measure(m) +
                            meshmod.total_mean_curvature(m))


def spatial_support(V, tol=1e-9):
    """Deduplicated base points of the atoms with positive weight."""
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    pts = V.points[V.weights > 0]
    if len(pts) == 0:
        return pts.reshape(0, V.ambient.dim)
    wrapped = V.ambient.chart.wrap(pts)
    keys = np.round(wrapped / tol).astype(np.int64)
    _, idx = np.unique(keys, axis=0, return_index=True)
    return wrapped[np.sort(idx)]


def cluster_count(points, radius):
    """Number of connected components linking points within ``radius``."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n == 0:
        return 0
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    d2 = np.einsum("ijk,ijk->ij", pts[:, None] - pts[None], pts[:, None] - pts[None])
    ii, jj = np.nonzero(d2 <= radius * radius)
    for i, j in zip(ii, jj):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    return len({find(i) for i in range(n)})


# ------------------------------------------------------------ first variation


def divergence_on_planes(ambient, points, planes, X):
    """div_S X(p) for each atom: sum_i g(nabla_{e_i} X, e_i)."""
    J = X.jacobian(points)
    Xv = X.eval(points)
    G = ambient.christoffel(points)
    g = ambient.metric(points)
    k = planes.shape[1]
    div = np.zeros(len(points))
    for i in range(k):
        e = planes[:, i, :]
        nabla = np.einsum("mab,mb->ma", J, e) + \
            np.einsum("mabd,mb,md->ma", G, e, Xv)
        div += np.einsum("mab,ma,mb->m", g, nabla, e)
    return div


def first_variation(V, X):
    """dV(X) = sum over atoms of w * div_S X(p); linear in both arguments."""
    if len(V) == 0:
        return 0.0
    div = divergence_on_planes(V.ambient, V.points, V.planes, X)
    return math.fsum(V.weights * div)


# ------------------------------------------------------------- basis machinery


class _AxisBasis:
    """Per-coordinate 1d basis: Chebyshev on intervals, Fourier on circles."""

    def __init__(self, lo, hi, periodic, degree):
        self.lo, self.hi = float(lo), float(hi)
        self.periodic = bool(periodic)
        self.degree = int(degree)
        if periodic:
            self.harmonics = degree // 2
            self.count = 1 + 2 * self.harmonics
            self.omega = 2.0 * math.pi / (self.hi - self.lo)
        else:
            self.count = degree + 1
            self.scale = 2.0 / (self.hi - self.lo)

    def values_and_derivs(self, x):
        x = np.asarray(x, dtype=float)
        if self.periodic:
            cols_v = [np.ones_like(x)]
            cols_d = [np.zeros_like(x)]
            for m in range(1, self.harmonics + 1):
                ang = m * self.omega * (x - self.lo)
                cols_v.append(np.cos(ang))
                cols_d.append(-m * self.omega * np.sin(ang))
                cols_v.append(np.sin(ang))
                cols_d.append(m * self.omega * np.cos(ang))
            return np.stack(cols_v, -1), np.stack(cols_d, -1)
        u = np.clip((x - self.lo) * self.scale - 1.0, -1.0, 1.0)
        eye = np.eye(self.count)
        V = _cheb.chebvander(u, self.degree)
        D = np.stack([_cheb.chebval(u, _cheb.chebder(eye[i]))
                      for i in range(self.count)], -1)
        return V, D * self.scale


class TensorBasis:
    """Tensor product of per-axis bases over the chart rectangle."""

    def __init__(self, chart, degree):
        self.axes = [_AxisBasis(chart.bounds[i, 0], chart.bounds[i, 1],
                                chart.periodic[i], degree)
                     for i in range(chart.dim)]
        self.dim = chart.dim
        self.count = int(np.prod([a.count for a in self.axes]))

    def values(self, points):
        return self._tensor(points, deriv_axis=None)

    def gradients(self, points):
        return np.stack([self._tensor(points, deriv_axis=b)
                         for b in range(self.dim)], axis=1)

    def _tensor(self, points, deriv_axis):
        pts = np.asarray(points, dtype=float)
        factors = []
        for i, axis in enumerate(self.axes):
            V, D = axis.values_and_derivs(pts[..., i])
            factors.append(D if deriv_axis == i else V)
        out = factors[0]
        for f in factors[1:]:
            out = np.einsum("...a,...b->...ab", out, f).reshape(
                out.shape[:-1] + (-1,))
        return out


# degree-4 symmetric triangle rule (6 points, positive weights)
_TRI_RULE = [
    (0.223381589678011, (0.108103018168070, 0.445948490915965,
                         0.445948490915965)),
    (0.109951743655322, (0.816847572980459, 0.091576213509771,
                         0.091576213509771)),
]


def _quadrature_atoms(V):
    """Atoms used to pair family fields with the varifold.

    Plain varifolds pair by their own atom sum.  Mesh-backed varifolds pair
    by per-element Gauss quadrature (the same rule that defines their element
    measures), so that the family bound estimates the first variation of the
    underlying mesh rather than the unbounded atomic one; the polygonal
    divergence theorem then keeps the bound at or below |dM| + int|H|.
    """
    if V.source_mesh is None:
        return V.points, V.planes, V.weights
    mesh = V.source_mesh
    amb = mesh.ambient
    if mesh.k == 1:
        a = mesh.vertices[mesh.elements[:, 0]]
        d = mesh.edge_vectors()
        pts, planes, wts = [], [], []
        for s, w in zip(meshmod.GAUSS3_NODES, meshmod.GAUSS3_WEIGHTS):
            q = a + s * d
            speed = amb.norm(q, d)
            pts.append(q)
            planes.append((d / speed[:, None])[:, None, :])
            wts.append(w * speed)
        return (np.concatenate(pts), np.concatenate(planes),
                V.mesh_factor * np.concatenate(wts))
    p0 = mesh.vertices[mesh.elements[:, 0]]
    p1 = mesh.vertices[mesh.elements[:, 1]]
    p2 = mesh.vertices[mesh.elements[:, 2]]
    areas = meshmod.element_measures(mesh)
    e1, e2 = meshmod._triangle_frames(p0, p1, p2)
    frame = np.stack([e1, e2], axis=1)
    pts, planes, wts = [], [], []
    for w, (l0, l1, l2) in _TRI_RULE:
        for bary in ((l0, l1, l2), (l1, l2, l0), (l2, l0, l1)):
            pts.append(bary[0] * p0 + bary[1] * p1 + bary[2] * p2)
            planes.append(frame)
            wts.append(w * areas)
    return (np.concatenate(pts), np.concatenate(planes),
            V.mesh_factor * np.concatenate(wts))


# ---------------------------------------------------------------- test family


class TestFamily:
    """Finite-dimensional surrogate for the sup over unit-sup-norm fields.

    Fields are spans of tensor-product basis functions (Chebyshev along
    interval coordinates, Fourier along periodic ones so members are honest
    single-valued fields on the manifold) times the coordinate frame, with
    |X|_g <= 1 enforced on a sample grid and a Lipschitz cap on a coarser one.
    Maximizing dV(X) over the family is an exact second-order cone program,
    so the returned bound is a certified lower bound for |dV| and is
    monotone nondecreasing in the degree.
    """

    def __init__(self, ambient, k=1, degree=4, grid_resolution=None,
                 lipschitz_cap=50.0, lip_resolution=9):
        self.ambient = ambient
        self.k = int(k)
        self.degree = int(degree)
        if grid_resolution is None:
            grid_resolution = 33 if ambient.dim == 2 else 13
        self.grid_resolution = int(grid_resolution)
        self.lipschitz_cap = float(lipschitz_cap)
        self.basis = TensorBasis(ambient.chart, degree)
        self.ncoef = ambient.dim * self.basis.count

        self.grid = ambient.chart.grid(self.grid_resolution)
        Bv = self.basis.values(self.grid)                    # (m, nb)
        L = _metric_chol(ambient, self.grid)                 # (m, d, d)
        # A[j]: coeffs -> frame components of X(p_j); coeff layout (a, alpha)
        self._norm_ops = np.einsum("mca,mn->mcan", np.swapaxes(L, -1, -2), Bv) \
            .reshape(len(self.grid), ambient.dim, self.ncoef)

        lip_grid = ambient.chart.grid(lip_resolution)
        Bg = self.basis.gradients(lip_grid)                  # (m, b, nb)
        Ll = _metric_chol(ambient, lip_grid)
        F = ambient.frame(lip_grid)
        # frame Jacobian of a basis field: L^T_{ca} delta-comp d_b B F_{bd}
        ops = np.einsum("mca,mbn,mbd->mcdan",
                        np.swapaxes(Ll, -1, -2), Bg, F)
        self._lip_ops = ops.reshape(len(lip_grid),
                                    ambient.dim * ambient.dim, self.ncoef)

    # objective vector: dV over each coefficient direction
    def objective(self, V):
        amb = self.ambient
        points, planes, weights = _quadrature_atoms(V)
        Bv = self.basis.values(points)            # (m, nb)
        Bg = self.basis.gradients(points)         # (m, b, nb)
        g = amb.metric(points)
        G = amb.christoffel(points)
        b = np.zeros((amb.dim, self.basis.count))
        for i in range(V.k):
            e = planes[:, i, :]
            ge = np.einsum("mab,mb->ma", g, e)
            dirD = np.einsum("mb,mbn->mn", e, Bg)
            T = np.einsum("mcba,mb,mc->ma", G, e, ge)
            b += np.einsum("m,ma,mn->an", weights, ge, dirD)
            b += np.einsum("m,ma,mn->an", weights, T, Bv)
        return b.reshape(-1)

    def field(self, coeffs, name="family-member"):
        coeffs = np.asarray(coeffs, dtype=float).reshape(
            self.ambient.dim, self.basis.count)

        def fn(pts):
            return np.einsum("an,...n->...a", coeffs, self.basis.values(pts))

        def jac(pts):
            return np.einsum("an,...bn->...ab", coeffs,
                             self.basis.gradients(pts))

        return VectorField(fn, jac=jac, name=name)

    def member_sup_norm(self, coeffs):
        vals = self._norm_ops @ np.asarray(coeffs, dtype=float)
        return float(np.max(np.linalg.norm(vals, axis=1)))

    def _norm_operators_at(self, points):
        Bv = self.basis.values(points)
        L = _metric_chol(self.ambient, points)
        ops = np.einsum("mca,mn->mcan", np.swapaxes(L, -1, -2), Bv)
        return ops.reshape(len(points), self.ambient.dim, self.ncoef)

    def _support_points(self, V):
        """Norm-constraint anchors on the varifold itself.

        The grid rarely contains exact vertex positions; pinning |X|_g <= 1 at
        the mesh vertices (plus boundary quadrature nodes for k=2) keeps the
        polygonal divergence identity valid for the maximizer, which is what
        certifies the bound against |dM| + int|H|.
        """
        if V.source_mesh is None:
            return V.points
        mesh = V.source_mesh
        pts = [mesh.vertices]
        if mesh.k == 2 and len(mesh.boundary_edges):
            a = mesh.vertices[mesh.boundary_edges[:, 0]]
            b = mesh.vertices[mesh.boundary_edges[:, 1]]
            for s in meshmod.GAUSS3_NODES:
                pts.append(a + s * (b - a))
        return np.concatenate(pts)

    def maximize(self, V):
        """Exact maximum of dV(X) over the family's unit-norm slice."""
        if len(V) == 0 or mass(V) == 0.0:
            return 0.0, np.zeros(self.ncoef)
        b = self.objective(V)
        if not np.all(np.isfinite(b)):
            raise NumericError("non-finite first-variation coefficients")
        import cvxpy as cp
        c = cp.Variable(self.ncoef)
        support = self._support_points(V)
        stacked = np.concatenate([
            self._norm_ops, self._norm_operators_at(support)])
        npts = stacked.shape[0]
        norms = cp.norm(cp.reshape(stacked.reshape(-1, self.ncoef) @ c,
                                   (npts, self.ambient.dim),
                                   order="C"), axis=1)
        lip_stacked = self._lip_ops.reshape(-1, self.ncoef)
        lips = cp.norm(cp.reshape(lip_stacked @ c,
                                  (self._lip_ops.shape[0],
                                   self.ambient.dim ** 2), order="C"), axis=1)
        problem = cp.Problem(cp.Maximize(b @ c),
                             [norms <= 1.0, lips <= self.lipschitz_cap])
        for solver in ("CLARABEL", "SCS"):
            try:
                problem.solve(solver=solver)
            except cp.error.SolverError:
                continue
            if problem.status in ("optimal", "optimal_inaccurate"):
                value = float(b @ c.value)
                if not math.isfinite(value):
                    raise NumericError("family optimization diverged")
                return max(value, 0.0), np.asarray(c.value)
        raise NumericError(f"family optimization failed: {problem.status}")


def first_variation_norm_lb(V, family):
    """Certified lower bound for |dV| via the family's unit-norm slice."""
    value, _ = family.maximize(V)
    return value


def stationarity_residual(V, family):
    """Alias of the norm lower bound; small residual certifies near-stationarity
    relative to the family."""
    return first_variation_norm_lb(V, family)


# ---------------------------------------------------- bounded-Lipschitz family


class BLFamily:
    """Fixed seeded family of 1-Lipschitz, bounded-by-1 functions on G_k(N).

    Includes the constant function 1 (so mass differences are always seen).
    Members are cosine waves in the chart coordinates and, for k=1, in the
    doubled tangent-line angle; amplitudes are normalized by the sampled
    Lipschitz constant of the wave.
    """

    def __init__(self, ambient, k=1, size=64, seed=1729):
        self.ambient = ambient
        self.k = int(k)
        rng = np.random.default_rng(seed)
        grid = ambient.chart.grid(17)
        ginv = ambient.metric_inv(grid)
        members = [None]  # slot 0 is the constant 1
        while len(members) < size:
            omega = rng.normal(size=ambient.dim) * \
                (2.0 / np.maximum(ambient.chart.widths, 1e-9))
            m_angle = int(rng.integers(-2, 3)) if k == 1 else 0
            phase = float(rng.uniform(0, 2 * math.pi))
            grad = np.sqrt(np.einsum("i,mij,j->m", omega, ginv, omega))
            lip = float(np.max(grad)) + 2.0 * abs(m_angle)
            amp = 1.0 / max(lip, 1.0)
            members.append((amp, omega, m_angle, phase))
        self.members = members

    def _angles(self, V):
        if self.k != 1:
            return np.zeros(len(V))
        ef = self.ambient.frame_coords(V.points, V.planes[:, 0, :])
        return np.arctan2(ef[..., 1], ef[..., 0])

    def integrals(self, V):
        """Integral of every member against the varifold."""
        out = np.zeros(len(self.members))
        if len(V) == 0:
            return out
        out[0] = mass(V)
        alpha = self._angles(V)
        for idx, member in enumerate(self.members[1:], start=1):
            amp, omega, m_angle, phase = member
            arg = V.points @ omega + 2.0 * m_angle * alpha + phase
            out[idx] = math.fsum(V.weights * amp * np.cos(arg))
        return out


def bl_distance(V1, V2, family):
    """Bounded-Lipschitz surrogate distance: sup over the fixed family."""
    if V1.k != V2.k or V1.ambient is not V2.ambient:
        raise PreconditionError("varifolds live on different bundles")
    return float(np.max(np.abs(family.integrals(V1) - family.integrals(V2))))


# ------------------------------------------------------------------- file io


def save_varifold(V, path):
    """Columnar text dump, one atom per line: point | basis rows | weight."""
    lines = ["# isoperim-varifold v1",
             f"k {V.k}",
             f"ambient {V.ambient.spec_string()}",
             f"atoms {len(V)}"]
    for p, S, w in zip(V.points, V.planes, V.weights):
        blocks = [" ".join(repr(float(x)) for x in p)]
        for row in S:
            blocks.append(" ".join(repr(float(x)) for x in row))
        blocks.append(repr(float(w)))
        lines.append(" | ".join(blocks))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_varifold(path, ambient=None):
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != "# isoperim-varifold v1":
        raise PreconditionError(f"{path}: not an isoperim varifold file")
    k = int(lines[1].split()[1])
    spec = lines[2].split(" ", 1)[1]
    if ambient is None:
        ambient = AmbientSurface.from_spec_string(spec)
    count = int(lines[3].split()[1])
    points, planes, weights = [], [], []
    for ln in lines[4:4 + count]:
        blocks = [blk.strip() for blk in ln.split("|")]
        points.append([float(x) for x in blocks[0].split()])
        planes.append([[float(x) for x in blk.split()]
                       for blk in blocks[1:1 + k]])
        weights.append(float(blocks[-1]))
    d = ambient.dim
    return DiscreteVarifold(ambient, k,
                            np.asarray(points, dtype=float).reshape(-1, d),
                            np.asarray(planes, dtype=float).reshape(-1, k, d),
                            np.asarray(weights, dtype=float))
