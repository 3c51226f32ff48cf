"""Isoperimetric inequality checkers, certificates, and constant estimation.

The linear inequality |M| <= c(|dM| + int|H|) and its varifold form
|V| <= c |dV| are checked against mesh quadratures; the Euclidean ball bound
uses the smallest enclosing ball; the nonlinear small-mass inequality tracks
the threshold alpha = (2cK)^(-k) with c' = 2c.  Certificates are unit fields
with positive minimal tangential divergence, giving upper bounds c <= 1/mu;
lower bounds come from witness surfaces with large |M| / (|dM| + int|H|).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import mesh as meshmod
from . import varifold as vfold
from .errors import ContainmentError, PreconditionError, UnsupportedDimensionError

RATIO_DIVERGENCE_THRESHOLD = 1e6


@dataclass
class IsoperimetricReport:
    """Outcome of one inequality check."""

    kind: str
    lhs: float
    rhs: float              # geometric right side before the constant
    constant: float
    ratio: float            # lhs / rhs
    verdict: str            # holds | violated | inconclusive
    parts: dict = field(default_factory=dict)
    notes: str = ""

    def as_record(self):
        rec = {"kind": self.kind, "lhs": self.lhs, "rhs": self.rhs,
               "constant": self.constant, "ratio": self.ratio,
               "verdict": self.verdict, "notes": self.notes}
        rec.update({f"part_{k}": v for k, v in sorted(self.parts.items())})
        return rec


def _ratio(lhs, rhs):
    if rhs == 0.0:
        return math.inf if lhs > 0 else 0.0
    return lhs / rhs


def check_linear(M, c, domain=None):
    """|M| <= c (|dM| + int|H|) for a mesh surface."""
    if domain is not None and not domain.contains(M.vertices):
        raise ContainmentError(f"mesh {M.name!r} is not inside the domain")
    lhs = meshmod.measure(M)
    bd = meshmod.boundary_measure(M)
    th = meshmod.total_mean_curvature(M)
    rhs = bd + th
    ratio = _ratio(lhs, rhs)
    verdict = "holds" if ratio <= c * (1.0 + 1e-12) else "violated"
    return IsoperimetricReport(
        kind="linear", lhs=lhs, rhs=rhs, constant=float(c), ratio=ratio,
        verdict=verdict, parts={"boundary": bd, "curvature": th})


def check_ball_bound(M):
    """Euclidean ball bound |M| <= (r/k)(|dM| + int|H|)."""
    if M.ambient.family != "euclidean":
        raise UnsupportedDimensionError("ball bound requires Euclidean ambient")
    lhs, rhs_full, r = meshmod.ball_bound_slack(M)
    constant = r / M.k
    rhs = rhs_full / constant
    ratio = _ratio(lhs, rhs)
    verdict = "holds" if lhs <= rhs_full * (1.0 + 1e-12) else "violated"
    return IsoperimetricReport(
        kind="ball-bound", lhs=lhs, rhs=rhs, constant=constant, ratio=ratio,
        verdict=verdict,
        parts={"radius": r, "equality_ratio": _ratio(lhs, rhs_full)})


def nonlinear_threshold(c_euclidean, K, k):
    """alpha = (2cK)^(-k); infinite for totally geodesic embeddings (K = 0)."""
    if c_euclidean <= 0 or K < 0:
        raise PreconditionError("need c_euclidean > 0 and K >= 0")
    if K == 0.0:
        return math.inf
    return (2.0 * c_euclidean * K) ** (-k)


def check_nonlinear(M, c_euclidean, K, linear_constant=None):
    """|M|^(1-1/k) <= c'(|dM| + int|H|) below the small-mass threshold."""
    k = M.k
    alpha = nonlinear_threshold(c_euclidean, K, k)
    cprime = 2.0 * c_euclidean
    area = meshmod.measure(M)
    bd = meshmod.boundary_measure(M)
    th = meshmod.total_mean_curvature(M)
    rhs = bd + th
    lhs = area ** (1.0 - 1.0 / k)
    ratio = _ratio(lhs, rhs)
    parts = {"alpha": alpha, "mass": area, "boundary": bd, "curvature": th}
    if area <= alpha:
        verdict = "holds" if lhs <= cprime * rhs * (1.0 + 1e-12) else "violated"
        notes = ""
    else:
        verdict = "inconclusive"
        notes = "mass exceeds alpha; small-mass theorem does not apply"
        if linear_constant is not None:
            fallback = linear_constant * alpha ** (-1.0 / k)
            parts["fallback_constant"] = fallback
            notes += f"; linear fallback c' = {fallback!r}"
    return IsoperimetricReport(
        kind="nonlinear", lhs=lhs, rhs=rhs, constant=cprime, ratio=ratio,
        verdict=verdict, parts=parts, notes=notes)


def check_varifold_linear(V, c, family=None):
    """|V| <= c |dV| with the two-sided bookkeeping for atomic varifolds.

    Mesh-backed varifolds compare against the exact embedded value
    |dM| + int|H|; plain atomic varifolds only carry the family lower bound
    for |dV|, so a passing comparison is reported as inconclusive (the gap
    between the bound and the true norm is unknown) while mass exceeding the
    scaled bound is reported as the violation verdict.
    """
    lhs = vfold.mass(V)
    if lhs == 0.0:
        return IsoperimetricReport(
            kind="varifold-linear", lhs=0.0, rhs=0.0, constant=float(c),
            ratio=0.0, verdict="holds", parts={"basis": "zero-mass"})
    g = vfold.thm75_value(V)
    if g is not None:
        ratio = _ratio(lhs, g)
        verdict = "holds" if lhs <= c * g * (1.0 + 1e-12) else "violated"
        return IsoperimetricReport(
            kind="varifold-linear", lhs=lhs, rhs=g, constant=float(c),
            ratio=ratio, verdict=verdict, parts={"basis": "thm75-geometric"})
    if family is None:
        raise PreconditionError("atomic varifolds need a TestFamily")
    lb = vfold.first_variation_norm_lb(V, family)
    ratio = _ratio(lhs, lb)
    if lhs > c * lb:
        verdict = "violated"
        notes = "mass exceeds c times the family lower bound"
    else:
        verdict = "inconclusive"
        notes = "holds against the family lower bound only (one-sided)"
    return IsoperimetricReport(
        kind="varifold-linear", lhs=lhs, rhs=lb, constant=float(c),
        ratio=ratio, verdict=verdict,
        parts={"basis": "family-lower-bound", "gap": c * lb - lhs},
        notes=notes)


# ------------------------------------------------------------- certificates


@dataclass
class Certificate:
    """Unit field with tangential divergence bounded below by mu > 0.

    Any k-varifold V in the domain then satisfies mu |V| <= dV(X) <= |dV|,
    so c_N <= 1/mu.
    """

    field_name: str
    mu: float
    sup_norm: float
    k: int
    grid_resolution: int
    valid: bool

    @property
    def c_upper(self):
        return 1.0 / self.mu if self.valid else math.inf


def _covariant_jacobian_frame(ambient, points, X):
    """Symmetrized frame representation of the covariant derivative of X."""
    J = X.jacobian(points)
    Xv = X.eval(points)
    G = ambient.christoffel(points)
    A = J + np.einsum("mabd,md->mab", G, Xv)
    L = vfold._metric_chol(ambient, points)
    F = ambient.frame(points)
    P = np.einsum("mca,mab,mbd->mcd", np.swapaxes(L, -1, -2), A, F)
    return 0.5 * (P + np.swapaxes(P, -1, -2))


def min_divergence_over_planes(ambient, points, X, k):
    """min over k-planes of div_S X at each point (closed form via eigenvalues)."""
    P = _covariant_jacobian_frame(ambient, points, X)
    lam = np.linalg.eigvalsh(P)
    if k == 1:
        return lam[..., 0]
    if k == 2:
        return lam[..., 0] + lam[..., 1]
    raise UnsupportedDimensionError("k must be 1 or 2")


def direction_sweep_min(ambient, points, X, sweeps=64, refine_iters=3):
    """Cross-check for k=1 in dim 2: minimize div over unit tangents by a
    64-direction sweep with local refinement around the per-point argmin."""
    P = _covariant_jacobian_frame(ambient, points, X)
    best = np.full(len(points), np.inf)
    best_angle = np.zeros(len(points))
    step = math.pi / sweeps

    def visit(a):
        nonlocal best, best_angle
        u = np.stack([np.cos(a), np.sin(a)], -1)
        if u.ndim == 1:
            u = np.broadcast_to(u, (len(points), 2))
        q = np.einsum("mi,mij,mj->m", u, P, u)
        better = q < best
        best = np.where(better, q, best)
        best_angle = np.where(better, a, best_angle)

    for a in np.linspace(0.0, math.pi, sweeps, endpoint=False):
        visit(float(a))
    for _ in range(refine_iters):
        for off in np.linspace(-step, step, 9):
            visit(best_angle + off)
        step /= 4.0
    return best


def certificate_bound(X, domain, k, grid_resolution=65):
    """Certificate c_N <= 1/mu from a candidate field on the domain.

    The field is normalized by its sup norm (declared, or sampled with 10%
    inflation); mu is the minimum over the sampled domain of the minimal
    tangential divergence over k-planes.  mu <= 0 yields an invalid
    certificate (no bound).
    """
    amb = domain.ambient
    grid = amb.chart.grid(grid_resolution)
    inside = domain.region_value(grid) <= 1e-9
    if not np.any(inside):
        raise PreconditionError("no grid points inside the domain")
    pts = grid[inside]
    sup = X.sup_norm(amb)
    if sup <= 0:
        raise PreconditionError("field vanishes identically")
    mins = min_divergence_over_planes(amb, pts, X, k)
    mu = float(np.min(mins)) / sup
    return Certificate(field_name=X.name, mu=mu, sup_norm=sup, k=k,
                       grid_resolution=grid_resolution, valid=mu > 0.0)


# -------------------------------------------------------- constant estimation


@dataclass
class ConstantEstimate:
    """Two-sided estimate of the best constant c_N for a domain."""

    k: int
    domain_name: str
    lower: float
    lower_witness: str
    upper: float
    upper_certificate: Certificate = None
    diverged: bool = False
    witness_trace: list = field(default_factory=list)

    @property
    def consistent(self):
        if self.diverged or not math.isfinite(self.upper):
            return True
        return self.lower <= self.upper * (1.0 + 1e-9)


def mesh_ratio(M):
    """|M| / (|dM| + int|H|), the witness ratio for the linear inequality."""
    return _ratio(meshmod.measure(M),
                  meshmod.boundary_measure(M) + meshmod.total_mean_curvature(M))


def estimate_constant(domain, k, witnesses, fields, refine_witness=3,
                      grid_resolution=65, name=None):
    """Two-sided estimate: max witness ratio below, best certificate above.

    The extremal witness is refined ``refine_witness`` times; if its ratio
    grows past 1e6 the lower bound is flagged as divergent (the witness is
    behaving like a stationary surface).
    """
    best_ratio = 0.0
    best_witness = None
    for M in witnesses:
        r = mesh_ratio(M)
        if r > best_ratio:
            best_ratio, best_witness = r, M
    trace = []
    diverged = False
    if best_witness is not None:
        current = best_witness
        trace.append(best_ratio)
        for _ in range(refine_witness):
            current = meshmod.refine(current)
            trace.append(mesh_ratio(current))
        nondecreasing = all(b >= a * (1.0 - 1e-9) or not math.isfinite(a)
                            for a, b in zip(trace, trace[1:]))
        if trace[-1] > RATIO_DIVERGENCE_THRESHOLD and nondecreasing:
            diverged = True
    lower = math.inf if diverged else (trace[-1] if trace else 0.0)

    best_cert = None
    for X in fields:
        cert = certificate_bound(X, domain, k, grid_resolution)
        if cert.valid and (best_cert is None or cert.c_upper < best_cert.c_upper):
            best_cert = cert
    upper = best_cert.c_upper if best_cert is not None else math.inf
    return ConstantEstimate(
        k=k, domain_name=name or domain.name, lower=lower,
        lower_witness=best_witness.name if best_witness is not None else "",
        upper=upper, upper_certificate=best_cert, diverged=diverged,
        witness_trace=trace)


# ------------------------------------------------------------ ratio sequences


def ratio_sequence_probe(varifolds, family):
    """Normalized mass / residual table for a varifold sequence.

    Each varifold is scaled to unit mass; the residual is the family lower
    bound of the scaled term, the ratio its reciprocal (mass over residual of
    the raw term).  Also reports the bounded-Lipschitz distance to the final
    term and simple monotonicity diagnostics.
    """
    if not varifolds:
        raise PreconditionError("need a nonempty varifold sequence")
    bl = vfold.BLFamily(varifolds[0].ambient, k=varifolds[0].k)
    last = varifolds[-1]
    rows = []
    for i, V in enumerate(varifolds):
        m = vfold.mass(V)
        scaled = vfold.scale(V, 1.0 / m) if m > 0 else V
        residual = vfold.stationarity_residual(scaled, family)
        rows.append({
            "index": i,
            "mass": m,
            "residual": residual,
            "ratio": _ratio(1.0, residual),
            "bl_to_final": vfold.bl_distance(V, last, bl),
        })
    res = [r["residual"] for r in rows]
    for r in rows:
        r["residual_decreasing"] = all(a >= b - 1e-12
                                       for a, b in zip(res, res[1:]))
    return rows
