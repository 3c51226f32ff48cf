"""Exact smallest enclosing ball in E^2 / E^3 (Welzl-style)."""

import numpy as np

_EPS = 1e-12


def _circumball(R):
    """Ball with the points of R on its boundary (R affinely independent)."""
    if not R:
        return None, -1.0
    base = R[0]
    if len(R) == 1:
        return np.array(base, dtype=float), 0.0
    u = np.asarray(R[1:], dtype=float) - base
    A = 2.0 * u
    b = np.einsum("ij,ij->i", u, u)
    # min-norm solution stays in the affine span of R
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    center = base + x
    radius = float(np.max(np.linalg.norm(np.asarray(R) - center, axis=1)))
    return center, radius


def _first_violator(points, start, center, radius):
    if center is None:
        return start if start < len(points) else None
    tail = points[start:]
    if len(tail) == 0:
        return None
    d2 = np.einsum("ij,ij->i", tail - center, tail - center)
    bad = np.nonzero(d2 > (radius + _EPS) ** 2)[0]
    return None if len(bad) == 0 else start + int(bad[0])


def _welzl(points, R, dim):
    center, radius = _circumball(R)
    if len(R) == dim + 1 or len(points) == 0:
        return center, radius
    i = 0
    while True:
        j = _first_violator(points, i, center, radius)
        if j is None:
            return center, radius
        center, radius = _welzl(points[:j], R + [points[j]], dim)
        i = j + 1


def min_enclosing_ball(points, seed=0):
    """Center and radius of the smallest ball containing the points.

    Exact (up to roundoff) for dimension 2 and 3; expected linear time after
    a seeded shuffle, so results are deterministic.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise ValueError("points must be (m, 2) or (m, 3)")
    if len(pts) == 0:
        raise ValueError("need at least one point")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pts))
    center, radius = _welzl(pts[order], [], pts.shape[1])
    # tighten radius to the true farthest distance
    radius = float(np.max(np.linalg.norm(pts - center, axis=1)))
    return center, radius
