"""Riemannian ambient surfaces, compact domains, and curvature data.

An :class:`AmbientSurface` is a coordinate rectangle (with optional periodic
directions) carrying one of a few closed-form metric families, and optionally
a closed-form isometric embedding into Euclidean space.  Everything is
vectorized over arrays of chart points of shape ``(m, dim)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (ChartDomainError, InvalidDomainError,
                     MissingEmbeddingError, UnsupportedDimensionError)
from .expressions import Expression, derivative

_FD_STEP = 1e-4  # central difference step, Richardson-extrapolated

FAMILIES = ("euclidean", "round-sphere", "hyperbolic", "conformal",
            "revolution", "product")


class Chart:
    """Coordinate rectangle with per-axis periodicity."""

    def __init__(self, bounds, periodic):
        self.bounds = np.asarray(bounds, dtype=float).reshape(-1, 2)
        self.periodic = np.asarray(periodic, dtype=bool).reshape(-1)
        if self.bounds.shape[0] != self.periodic.shape[0]:
            raise ValueError("bounds/periodic length mismatch")
        self.dim = self.bounds.shape[0]
        self.widths = self.bounds[:, 1] - self.bounds[:, 0]

    def wrap(self, points):
        """Map periodic coordinates into their fundamental interval."""
        pts = np.array(points, dtype=float, copy=True)
        for i in range(self.dim):
            if self.periodic[i]:
                lo, w = self.bounds[i, 0], self.widths[i]
                pts[..., i] = lo + np.mod(pts[..., i] - lo, w)
        return pts

    def delta(self, a, b):
        """Shortest chart displacement b - a, wrapping periodic axes."""
        d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
        d = np.array(d, copy=True)
        for i in range(self.dim):
            if self.periodic[i]:
                w = self.widths[i]
                d[..., i] = (d[..., i] + 0.5 * w) % w - 0.5 * w
        return d

    def contains(self, points, tol=1e-9):
        pts = self.wrap(points)
        ok = np.ones(pts.shape[:-1], dtype=bool)
        for i in range(self.dim):
            if not self.periodic[i]:
                ok &= pts[..., i] >= self.bounds[i, 0] - tol
                ok &= pts[..., i] <= self.bounds[i, 1] + tol
        return ok

    def grid(self, resolution):
        """Regular grid of chart points; periodic axes omit the endpoint."""
        axes = []
        for i in range(self.dim):
            lo, hi = self.bounds[i]
            axes.append(np.linspace(lo, hi, resolution,
                                    endpoint=not self.periodic[i]))
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def random_points(self, rng, count):
        u = rng.random((count, self.dim))
        return self.bounds[:, 0] + u * self.widths


class AmbientSurface:
    """A Riemannian ambient space of dimension 2 or 3.

    Construct through the family-specific classmethods.  Instances are
    immutable and safe to share between threads.
    """

    def __init__(self, family, dim, chart, params=None):
        if family not in FAMILIES:
            raise ValueError(f"unknown metric family {family!r}")
        self.family = family
        self.dim = int(dim)
        self.chart = chart
        self.params = dict(params or {})
        self._profile = None
        if family == "revolution":
            self._profile = Expression(self.params["profile"], ("z",))
        if family == "conformal":
            self._factor = Expression(self.params["factor"], ("x", "y"))

    # ---------------------------------------------------------------- setup

    @classmethod
    def euclidean(cls, dim=2, bounds=None):
        if bounds is None:
            bounds = [[-1.5, 1.5]] * dim
        chart = Chart(bounds, [False] * dim)
        return cls("euclidean", dim, chart)

    @classmethod
    def round_sphere(cls, radius=1.0, theta_bounds=(1e-6, math.pi - 1e-6)):
        """Polar cap chart (theta, phi) on the round sphere of given radius."""
        chart = Chart([list(theta_bounds), [0.0, 2.0 * math.pi]], [False, True])
        return cls("round-sphere", 2, chart, {"radius": float(radius)})

    @classmethod
    def hyperbolic(cls, curvature=1.0, bounds=((-0.7, 0.7), (-0.7, 0.7))):
        """Poincare-disk style conformal chart with Gauss curvature -|a|."""
        a = abs(float(curvature))
        chart = Chart([list(b) for b in bounds], [False, False])
        corner = float(np.max(np.abs(np.asarray(bounds, dtype=float))))
        if 2.0 * corner * corner >= 1.0:
            raise InvalidDomainError("hyperbolic chart must stay inside the unit disk")
        return cls("hyperbolic", 2, chart, {"curvature": a})

    @classmethod
    def conformal(cls, factor, bounds, periodic=(False, False)):
        """Metric factor * identity with factor given as an expression in x, y."""
        chart = Chart([list(b) for b in bounds], list(periodic))
        return cls("conformal", 2, chart, {"factor": str(factor)})

    @classmethod
    def revolution(cls, profile, z_bounds=(-1.5, 1.5)):
        """Surface of revolution with radius profile r(z), chart (z, theta)."""
        chart = Chart([list(z_bounds), [0.0, 2.0 * math.pi]], [False, True])
        amb = cls("revolution", 2, chart, {"profile": str(profile)})
        rmin = np.min(amb.profile(np.linspace(z_bounds[0], z_bounds[1], 2049)))
        if rmin <= 0:
            raise InvalidDomainError("revolution profile must stay positive")
        return amb

    @classmethod
    def product(cls, radius=1.0, z_bounds=(-1.5, 1.5)):
        """Flat cylinder (circle of given radius) x interval, chart (z, theta)."""
        chart = Chart([list(z_bounds), [0.0, 2.0 * math.pi]], [False, True])
        return cls("product", 2, chart, {"radius": float(radius)})

    # ------------------------------------------------------------- identity

    def spec_string(self):
        parts = [f"family={self.family}", f"dim={self.dim}"]
        for key in sorted(self.params):
            parts.append(f"{key}={self.params[key]}")
        bounds = ",".join(repr(float(v)) for v in self.chart.bounds.ravel())
        periodic = ",".join("1" if p else "0" for p in self.chart.periodic)
        parts.append(f"bounds={bounds}")
        parts.append(f"periodic={periodic}")
        return ";".join(parts)

    @classmethod
    def from_spec_string(cls, text):
        kv = {}
        for part in text.strip().split(";"):
            key, _, value = part.partition("=")
            kv[key.strip()] = value.strip()
        family = kv.pop("family")
        dim = int(kv.pop("dim"))
        bounds = np.array([float(v) for v in kv.pop("bounds").split(",")])
        periodic = [v == "1" for v in kv.pop("periodic").split(",")]
        chart = Chart(bounds.reshape(-1, 2), periodic)
        params = {}
        for key, value in kv.items():
            try:
                params[key] = float(value)
            except ValueError:
                params[key] = value
        return cls(family, dim, chart, params)

    def __repr__(self):
        return f"AmbientSurface({self.spec_string()})"

    # --------------------------------------------------------------- metric

    def profile(self, z):
        return self._profile(z)

    def profile_d1(self, z):
        return derivative(self._profile, z, order=1, h=_FD_STEP)

    def profile_d2(self, z):
        return derivative(self._profile, z, order=2, h=_FD_STEP)

    def _conformal_factor(self, pts):
        if self.family == "hyperbolic":
            a = self.params["curvature"]
            s = 1.0 - pts[..., 0] ** 2 - pts[..., 1] ** 2
            return 4.0 / (a * s * s)
        return self._factor(pts[..., 0], pts[..., 1])

    def metric(self, points):
        """Metric tensor g_ij at chart points, shape (..., dim, dim)."""
        pts = self.chart.wrap(points)
        shape = pts.shape[:-1]
        if self.family == "euclidean":
            g = np.zeros(shape + (self.dim, self.dim))
            idx = np.arange(self.dim)
            g[..., idx, idx] = 1.0
            return g
        g = np.zeros(shape + (2, 2))
        if self.family == "round-sphere":
            R = self.params["radius"]
            g[..., 0, 0] = R * R
            g[..., 1, 1] = (R * np.sin(pts[..., 0])) ** 2
        elif self.family == "revolution":
            r = self.profile(pts[..., 0])
            rp = self.profile_d1(pts[..., 0])
            g[..., 0, 0] = 1.0 + rp * rp
            g[..., 1, 1] = r * r
        elif self.family == "product":
            g[..., 0, 0] = 1.0
            g[..., 1, 1] = self.params["radius"] ** 2
        else:  # hyperbolic / conformal
            phi = self._conformal_factor(pts)
            g[..., 0, 0] = phi
            g[..., 1, 1] = phi
        return g

    def metric_inv(self, points):
        g = self.metric(points)
        return np.linalg.inv(g)

    def frame(self, points):
        """g-orthonormal frame F (columns) with F^T g F = identity."""
        g = self.metric(points)
        if self.family == "euclidean":
            return g  # identity already
        a = g[..., 0, 0]
        b = g[..., 0, 1]
        c = g[..., 1, 1]
        sa = np.sqrt(a)
        sc = np.sqrt(c - b * b / a)
        F = np.zeros_like(g)
        F[..., 0, 0] = 1.0 / sa
        F[..., 0, 1] = -b / (a * sc)
        F[..., 1, 1] = 1.0 / sc
        return F

    def frame_coords(self, points, vectors):
        """Coordinates of chart vectors in the g-orthonormal frame (L^T v)."""
        g = self.metric(points)
        if self.family == "euclidean":
            return np.asarray(vectors, dtype=float)
        a = g[..., 0, 0]
        b = g[..., 0, 1]
        c = g[..., 1, 1]
        sa = np.sqrt(a)
        sc = np.sqrt(c - b * b / a)
        v = np.asarray(vectors, dtype=float)
        out = np.empty_like(v)
        out[..., 0] = sa * v[..., 0] + (b / sa) * v[..., 1]
        out[..., 1] = sc * v[..., 1]
        return out

    def inner(self, points, u, v):
        g = self.metric(points)
        return np.einsum("...ij,...i,...j->...", g, u, v)

    def norm(self, points, v):
        return np.sqrt(np.maximum(self.inner(points, v, v), 0.0))

    def unit(self, points, v):
        n = self.norm(points, v)
        return v / n[..., None]

    # ----------------------------------------------------------- christoffel

    def _metric_partials(self, pts):
        """d/dx_i of g_ab by Richardson central differences: (..., i, a, b)."""
        shape = pts.shape[:-1]
        out = np.zeros(shape + (self.dim, self.dim, self.dim))
        for i in range(self.dim):
            step = np.zeros(self.dim)
            step[i] = 1.0

            def diff(h):
                return (self.metric(pts + h * step) -
                        self.metric(pts - h * step)) / (2.0 * h)

            out[..., i, :, :] = (4.0 * diff(_FD_STEP / 2) - diff(_FD_STEP)) / 3.0
        return out

    def christoffel(self, points):
        """Christoffel symbols, shape (..., k, i, j) for Gamma^k_ij."""
        pts = self.chart.wrap(points)
        shape = pts.shape[:-1]
        G = np.zeros(shape + (self.dim,) * 3)
        if self.family in ("euclidean", "product"):
            return G
        if self.family == "round-sphere":
            th = pts[..., 0]
            G[..., 0, 1, 1] = -np.sin(th) * np.cos(th)
            cot = np.cos(th) / np.sin(th)
            G[..., 1, 0, 1] = cot
            G[..., 1, 1, 0] = cot
            return G
        if self.family == "revolution":
            z = pts[..., 0]
            r = self.profile(z)
            rp = self.profile_d1(z)
            rpp = self.profile_d2(z)
            E = 1.0 + rp * rp
            G[..., 0, 0, 0] = rp * rpp / E
            G[..., 0, 1, 1] = -r * rp / E
            G[..., 1, 0, 1] = rp / r
            G[..., 1, 1, 0] = rp / r
            return G
        # conformal-type metric phi * delta: use u = log(phi)/2 gradients.
        if self.family == "hyperbolic":
            s = 1.0 - pts[..., 0] ** 2 - pts[..., 1] ** 2
            ux = 2.0 * pts[..., 0] / s
            uy = 2.0 * pts[..., 1] / s
        else:
            phi = self._conformal_factor(pts)

            def fx(h):
                e = np.array([h, 0.0])
                return (self._conformal_factor(pts + e) -
                        self._conformal_factor(pts - e)) / (2 * h)

            def fy(h):
                e = np.array([0.0, h])
                return (self._conformal_factor(pts + e) -
                        self._conformal_factor(pts - e)) / (2 * h)

            px = (4.0 * fx(_FD_STEP / 2) - fx(_FD_STEP)) / 3.0
            py = (4.0 * fy(_FD_STEP / 2) - fy(_FD_STEP)) / 3.0
            ux = px / (2.0 * phi)
            uy = py / (2.0 * phi)
        G[..., 0, 0, 0] = ux
        G[..., 0, 0, 1] = uy
        G[..., 0, 1, 0] = uy
        G[..., 0, 1, 1] = -ux
        G[..., 1, 1, 1] = uy
        G[..., 1, 0, 1] = ux
        G[..., 1, 1, 0] = ux
        G[..., 1, 0, 0] = -uy
        return G

    # ------------------------------------------------------------ curvature

    def gauss_curvature(self, points):
        """Gauss curvature at chart points (dim 2 only)."""
        if self.dim != 2:
            raise UnsupportedDimensionError(
                "gauss_curvature is defined for 2-dimensional ambients")
        pts = self.chart.wrap(points)
        shape = pts.shape[:-1]
        if self.family == "euclidean" or self.family == "product":
            return np.zeros(shape)
        if self.family == "round-sphere":
            R = self.params["radius"]
            return np.full(shape, 1.0 / (R * R))
        if self.family == "hyperbolic":
            return np.full(shape, -self.params["curvature"])
        if self.family == "revolution":
            z = pts[..., 0]
            r = self.profile(z)
            rp = self.profile_d1(z)
            rpp = self.profile_d2(z)
            return -rpp / (r * (1.0 + rp * rp) ** 2)
        # conformal: K = -(laplacian log phi) / (2 phi)
        def logphi(q):
            return np.log(self._conformal_factor(q))

        lap = np.zeros(shape)
        for i in range(2):
            step = np.zeros(2)
            step[i] = 1.0

            def d2(h):
                return (logphi(pts + h * step) - 2.0 * logphi(pts) +
                        logphi(pts - h * step)) / (h * h)

            lap += (4.0 * d2(_FD_STEP / 2) - d2(_FD_STEP)) / 3.0
        return -lap / (2.0 * self._conformal_factor(pts))

    def ricci(self, points, v):
        """Ric(v, v) for chart vectors v; equals K * |v|_g^2 in dim 2."""
        if self.dim != 2:
            raise UnsupportedDimensionError("ricci evaluator requires dim 2")
        return self.gauss_curvature(points) * self.inner(points, v, v)

    def brioschi_curvature(self, points):
        """Gauss curvature by the Brioschi formula with finite differences.

        Independent of the closed forms above; used as a cross-check oracle.
        """
        if self.dim != 2:
            raise UnsupportedDimensionError("Brioschi formula requires dim 2")
        pts = self.chart.wrap(np.atleast_2d(np.asarray(points, dtype=float)))
        h = _FD_STEP

        def comp(q, a, b):
            return self.metric(q)[..., a, b]

        eu = np.array([1.0, 0.0])
        ev = np.array([0.0, 1.0])

        def d1(fn, q, e):
            def diff(s):
                return (fn(q + s * e) - fn(q - s * e)) / (2 * s)
            return (4.0 * diff(h / 2) - diff(h)) / 3.0

        def d2(fn, q, e):
            def diff(s):
                return (fn(q + s * e) - 2.0 * fn(q) + fn(q - s * e)) / (s * s)
            return (4.0 * diff(h / 2) - diff(h)) / 3.0

        def dmix(fn, q):
            def diff(s):
                return (fn(q + s * (eu + ev)) - fn(q + s * (eu - ev))
                        - fn(q + s * (ev - eu)) + fn(q - s * (eu + ev))) / (4 * s * s)
            return (4.0 * diff(h / 2) - diff(h)) / 3.0

        E = lambda q: comp(q, 0, 0)
        F = lambda q: comp(q, 0, 1)
        G = lambda q: comp(q, 1, 1)

        Ev, Eu = d1(E, pts, ev), d1(E, pts, eu)
        Gv, Gu = d1(G, pts, ev), d1(G, pts, eu)
        Fu, Fv = d1(F, pts, eu), d1(F, pts, ev)
        Evv = d2(E, pts, ev)
        Guu = d2(G, pts, eu)
        Fuv = dmix(F, pts)
        Ep, Fp, Gp = E(pts), F(pts), G(pts)

        m1 = np.stack([
            np.stack([-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev], -1),
            np.stack([Fv - 0.5 * Gu, Ep, Fp], -1),
            np.stack([0.5 * Gv, Fp, Gp], -1),
        ], -2)
        m2 = np.stack([
            np.stack([np.zeros_like(Ep), 0.5 * Ev, 0.5 * Gu], -1),
            np.stack([0.5 * Ev, Ep, Fp], -1),
            np.stack([0.5 * Gu, Fp, Gp], -1),
        ], -2)
        det = Ep * Gp - Fp * Fp
        K = (np.linalg.det(m1) - np.linalg.det(m2)) / det**2
        return K if np.asarray(points).ndim > 1 else float(K[0])

    # ------------------------------------------------------------ embedding

    @property
    def has_embedding(self):
        return self.family in ("euclidean", "round-sphere", "revolution",
                               "product")

    @property
    def embedding_dim(self):
        if not self.has_embedding:
            raise MissingEmbeddingError(
                f"family {self.family!r} has no closed-form embedding")
        return self.dim if self.family == "euclidean" else 3

    def embed(self, points):
        """Isometric embedding into Euclidean space, shape (..., d_E)."""
        pts = self.chart.wrap(points)
        if self.family == "euclidean":
            return np.array(pts, copy=True)
        if self.family == "round-sphere":
            R = self.params["radius"]
            th, ph = pts[..., 0], pts[..., 1]
            return R * np.stack([np.sin(th) * np.cos(ph),
                                 np.sin(th) * np.sin(ph),
                                 np.cos(th)], axis=-1)
        if self.family in ("revolution", "product"):
            z, th = pts[..., 0], pts[..., 1]
            r = (self.profile(z) if self.family == "revolution"
                 else np.full_like(z, self.params["radius"]))
            return np.stack([r * np.cos(th), r * np.sin(th), z], axis=-1)
        raise MissingEmbeddingError(
            f"family {self.family!r} has no closed-form embedding")

    def embedding_jacobian(self, points):
        """d(embed)/d(chart), shape (..., d_E, dim)."""
        pts = self.chart.wrap(points)
        if self.family == "euclidean":
            shape = pts.shape[:-1]
            J = np.zeros(shape + (self.dim, self.dim))
            idx = np.arange(self.dim)
            J[..., idx, idx] = 1.0
            return J
        if self.family == "round-sphere":
            R = self.params["radius"]
            th, ph = pts[..., 0], pts[..., 1]
            Jth = R * np.stack([np.cos(th) * np.cos(ph),
                                np.cos(th) * np.sin(ph),
                                -np.sin(th)], axis=-1)
            Jph = R * np.stack([-np.sin(th) * np.sin(ph),
                                np.sin(th) * np.cos(ph),
                                np.zeros_like(th)], axis=-1)
            return np.stack([Jth, Jph], axis=-1)
        if self.family in ("revolution", "product"):
            z, th = pts[..., 0], pts[..., 1]
            if self.family == "revolution":
                r = self.profile(z)
                rp = self.profile_d1(z)
            else:
                r = np.full_like(z, self.params["radius"])
                rp = np.zeros_like(z)
            Jz = np.stack([rp * np.cos(th), rp * np.sin(th),
                           np.ones_like(z)], axis=-1)
            Jth = np.stack([-r * np.sin(th), r * np.cos(th),
                            np.zeros_like(z)], axis=-1)
            return np.stack([Jz, Jth], axis=-1)
        raise MissingEmbeddingError(
            f"family {self.family!r} has no closed-form embedding")

    def _embedding_hessian(self, pts):
        """Second chart derivatives of the embedding, (..., d_E, dim, dim)."""
        if self.family == "round-sphere":
            R = self.params["radius"]
            th, ph = pts[..., 0], pts[..., 1]
            z0 = np.zeros_like(th)
            Hthth = R * np.stack([-np.sin(th) * np.cos(ph),
                                  -np.sin(th) * np.sin(ph), -np.cos(th)], -1)
            Hthph = R * np.stack([-np.cos(th) * np.sin(ph),
                                  np.cos(th) * np.cos(ph), z0], -1)
            Hphph = R * np.stack([-np.sin(th) * np.cos(ph),
                                  -np.sin(th) * np.sin(ph), z0], -1)
        elif self.family in ("revolution", "product"):
            z, th = pts[..., 0], pts[..., 1]
            if self.family == "revolution":
                r = self.profile(z)
                rp = self.profile_d1(z)
                rpp = self.profile_d2(z)
            else:
                r = np.full_like(z, self.params["radius"])
                rp = np.zeros_like(z)
                rpp = np.zeros_like(z)
            z0 = np.zeros_like(z)
            Hthth = np.stack([rpp * np.cos(th), rpp * np.sin(th), z0], -1)
            Hthph = np.stack([-rp * np.sin(th), rp * np.cos(th), z0], -1)
            Hphph = np.stack([-r * np.cos(th), -r * np.sin(th), z0], -1)
        else:
            raise MissingEmbeddingError("no curvature data for this embedding")
        H = np.stack([np.stack([Hthth, Hthph], -1),
                      np.stack([Hthph, Hphph], -1)], -1)
        # H currently (..., d_E, i, j); already in the desired layout.
        return H

    def principal_curvatures(self, points):
        """Principal curvatures of the embedded surface at chart points."""
        if not self.has_embedding:
            raise MissingEmbeddingError("surface ships no embedding")
        pts = self.chart.wrap(np.atleast_2d(np.asarray(points, dtype=float)))
        if self.family == "euclidean":
            return np.zeros(pts.shape[:-1] + (self.dim,))
        J = self.embedding_jacobian(pts)
        nrm = np.cross(J[..., 0], J[..., 1])
        nrm = nrm / np.linalg.norm(nrm, axis=-1, keepdims=True)
        H = self._embedding_hessian(pts)
        h = np.einsum("...e,...eij->...ij", nrm, H)
        F = self.frame(pts)
        h_frame = np.einsum("...ai,...ab,...bj->...ij", F, h, F)
        return np.linalg.eigvalsh(h_frame)


def metric_eval(ambient, p):
    """Metric tensor at a single chart point, with chart validation."""
    p = np.asarray(p, dtype=float)
    if not np.all(ambient.chart.contains(p)):
        raise ChartDomainError(f"point {p} outside chart")
    return ambient.metric(p)


def gauss_curvature(ambient, p):
    """Gauss curvature at a single chart point (dim 2 only)."""
    p = np.asarray(p, dtype=float)
    if not np.all(ambient.chart.contains(p)):
        raise ChartDomainError(f"point {p} outside chart")
    return float(ambient.gauss_curvature(p))


def second_fundamental_bound(ambient, k=1, samples=64, margin=1.1):
    """Certified upper bound for the |H_e| <= |H| + K correction constant.

    Maximizes, over a dense chart grid, the norm of the embedding's second
    fundamental form traced over k-planes, then inflates by ``margin`` as a
    sampling safety factor.  Totally geodesic embeddings return exactly 0.
    """
    if not ambient.has_embedding:
        raise MissingEmbeddingError("second_fundamental_bound needs an embedding")
    if ambient.family == "euclidean":
        return 0.0
    grid = ambient.chart.grid(samples)
    kappas = ambient.principal_curvatures(grid)
    if k == 1:
        worst = np.max(np.abs(kappas))
    elif k == 2:
        worst = np.max(np.abs(kappas.sum(axis=-1)))
    else:
        raise UnsupportedDimensionError("k must be 1 or 2")
    return float(margin * worst)


# ----------------------------------------------------------------- domains


class BoundaryCurve:
    """A closed boundary component given by a chart parametrization on [0, 1]."""

    def __init__(self, fn, name="component", orientation=1):
        self._fn = fn
        self.name = name
        self.orientation = int(orientation)

    @classmethod
    def from_expressions(cls, x_expr, y_expr, name="component"):
        ex = Expression(x_expr, ("t",))
        ey = Expression(y_expr, ("t",))

        def fn(t):
            t = np.asarray(t, dtype=float)
            return np.stack([ex(t), ey(t)], axis=-1)

        return cls(fn, name=name)

    def points(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self._fn(t), dtype=float)
        return out

    def velocity(self, t, h=3e-4):
        # 5-point central stencil keeps reparametrization noise near 1e-9
        p = self.points
        return (p(t - 2 * h) - 8 * p(t - h) + 8 * p(t + h) - p(t + 2 * h)) / (12 * h)

    def acceleration(self, t, h=3e-4):
        p = self.points
        return (-p(t - 2 * h) + 16 * p(t - h) - 30 * p(t) + 16 * p(t + h)
                - p(t + 2 * h)) / (12 * h * h)


@dataclass
class ComponentReport:
    name: str
    flag: str
    min_inward_curvature: float
    max_inward_curvature: float
    max_abs_curvature: float


@dataclass
class Domain:
    """Compact region of an ambient surface bounded by closed curves.

    ``region`` is a list of smooth constraints g_i(p) <= 0 given as
    expressions in the chart coordinate names.
    """

    ambient: AmbientSurface
    region: list = field(default_factory=list)
    boundary: list = field(default_factory=list)
    name: str = "domain"

    def __post_init__(self):
        self._region_fns = []
        names = _coordinate_names(self.ambient)
        for g in self.region:
            if isinstance(g, str):
                self._region_fns.append(Expression(g, names))
            else:
                self._region_fns.append(g)

    def region_value(self, points):
        """max_i g_i; nonpositive inside the region."""
        pts = np.asarray(points, dtype=float)
        if not self._region_fns:
            return np.full(pts.shape[:-1], -1.0)
        vals = [np.asarray(g(*(pts[..., i] for i in range(pts.shape[-1]))))
                for g in self._region_fns]
        return np.max(np.stack(vals, axis=0), axis=0)

    def contains(self, points, tol=1e-7):
        return np.all(self.region_value(points) <= tol) and \
            np.all(self.ambient.chart.contains(points))


def _coordinate_names(ambient):
    if ambient.family in ("revolution", "product"):
        return ("z", "theta")
    if ambient.family == "round-sphere":
        return ("theta", "phi")
    if ambient.dim == 3:
        return ("x", "y", "z")
    return ("x", "y")


def _polyline_self_intersects(pts, closed=True, tol=1e-12):
    """Exact segment-pair crossing test for a 2d polyline (vectorized)."""
    n = len(pts)
    a = pts
    b = np.roll(pts, -1, axis=0) if closed else pts[1:]
    if not closed:
        a = pts[:-1]
    m = len(a)
    d = b - a
    ia, ib = np.triu_indices(m, k=2)
    if closed:
        keep = ~((ia == 0) & (ib == m - 1))
        ia, ib = ia[keep], ib[keep]
    p, r = a[ia], d[ia]
    q, s = a[ib], d[ib]
    rxs = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    qp = q - p
    tnum = qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]
    unum = qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = tnum / rxs
        u = unum / rxs
    crossing = (np.abs(rxs) > tol) & (t > tol) & (t < 1 - tol) \
        & (u > tol) & (u < 1 - tol)
    return bool(np.any(crossing))


def classify_domain(domain, samples=512):
    """Mean-convexity report per boundary component.

    Samples each component at ``samples`` points equally spaced in
    g-arclength (so the report is reparametrization invariant), computes the
    inward geodesic curvature, and flags the component.
    """
    if samples < 16:
        raise InvalidDomainError("need at least 16 samples per component")
    amb = domain.ambient
    reports = []
    for comp in domain.boundary:
        dense_t = np.linspace(0.0, 1.0, 16 * samples, endpoint=False)
        dense_pts = comp.points(dense_t)
        if not np.all(amb.chart.contains(dense_pts)):
            raise InvalidDomainError(
                f"boundary component {comp.name!r} leaves the chart")
        if _polyline_self_intersects(_unwrapped(amb, dense_pts)):
            raise InvalidDomainError(
                f"boundary component {comp.name!r} self-intersects")
        ts = _equal_arclength_params(amb, comp, samples, len(dense_t))

        pts = comp.points(ts)
        vel = comp.velocity(ts)
        acc = comp.acceleration(ts)
        Gam = amb.christoffel(pts)
        acc_cov = acc + np.einsum("...kij,...i,...j->...k", Gam, vel, vel)
        speed = amb.norm(pts, vel)
        T = vel / speed[..., None]
        tang = amb.inner(pts, acc_cov, T)
        kvec = (acc_cov - tang[..., None] * T) / (speed**2)[..., None]

        # inward unit normal from the region indicator
        tf = amb.frame_coords(pts, T)
        nf = np.stack([-tf[..., 1], tf[..., 0]], axis=-1)
        F = amb.frame(pts)
        n_chart = np.einsum("...ij,...j->...i", F, nf)
        eps = 1e-5 * float(np.min(amb.chart.widths))
        plus = domain.region_value(pts + eps * n_chart)
        minus = domain.region_value(pts - eps * n_chart)
        sign = np.where(plus < minus, 1.0, -1.0)
        inward = sign[..., None] * n_chart

        kappa_in = amb.inner(pts, kvec, inward)
        kappa_abs = amb.norm(pts, kvec)
        max_abs = float(np.max(kappa_abs))
        if max_abs < 1e-6:
            flag = "minimal"
        elif float(np.min(kappa_in)) > 1e-9:
            flag = "strictly-convex"
        elif float(np.min(kappa_in)) >= -1e-6:
            flag = "convex"
        else:
            flag = "not-convex"
        reports.append(ComponentReport(
            name=comp.name, flag=flag,
            min_inward_curvature=float(np.min(kappa_in)),
            max_inward_curvature=float(np.max(kappa_in)),
            max_abs_curvature=max_abs))
    return reports


_GAUSS3_NODES = np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)])
_GAUSS3_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 18.0


def _equal_arclength_params(ambient, comp, samples, dense):
    """Parameter values splitting a closed curve into equal g-arclength bins.

    Cumulative length by 3-point Gauss per dense interval, inverted with two
    Newton steps so that reparametrized inputs sample identical points.
    """
    nodes = np.linspace(0.0, 1.0, dense + 1)
    h = 1.0 / dense
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    tq = (mids[:, None] + 0.5 * h * _GAUSS3_NODES[None, :]).ravel()
    speed_q = ambient.norm(comp.points(tq), comp.velocity(tq)).reshape(dense, 3)
    seg = h * speed_q @ _GAUSS3_WEIGHTS
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = cum[-1] * np.arange(samples) / samples
    ts = np.interp(targets, cum, nodes)
    for _ in range(2):
        idx = np.clip(np.searchsorted(nodes, ts, side="right") - 1, 0, dense - 1)
        t0 = nodes[idx]
        tm = 0.5 * (t0 + ts)
        local = ambient.norm(comp.points(tm), comp.velocity(tm)) * (ts - t0)
        val = cum[idx] + local
        speed = ambient.norm(comp.points(ts), comp.velocity(ts))
        ts = np.clip(ts - (val - targets) / speed, 0.0, 1.0)
    return ts


def _unwrapped(ambient, pts):
    """Continuous coordinates along a sampled closed curve (periodic axes)."""
    out = np.array(pts, copy=True)
    for i in range(ambient.chart.dim):
        if ambient.chart.periodic[i]:
            w = ambient.chart.widths[i]
            d = np.diff(out[:, i])
            jumps = np.round(d / w)
            out[1:, i] -= w * np.cumsum(jumps)
    return out
