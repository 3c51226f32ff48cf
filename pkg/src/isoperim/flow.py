"""Curve-shortening flow in Riemannian surfaces and the dichotomy driver.

Closed polylines move with velocity H - delta*nu (forward Euler under a CFL
rule), remeshed against a fixed reference spacing; trajectories either go
extinct (total length collapses) or stall on a plateau with vanishing
curvature, in which case the limit is certified as an approximate geodesic
and its Jacobi stability spectrum is computed.  A perturbed tube variant and
an avoidance monitor against stationary supports reproduce the comparison
mechanism used by the maximum principle.
"""

import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from . import mesh as meshmod
from . import varifold as vfold
from .ambient import classify_domain
from .errors import (ChartDomainError, FlowInconclusiveError,
                     OffsetTooLargeError, PreconditionError, TopologyError)


@dataclass
class FlowConfig:
    """Step controls for the flow driver."""

    beta: float = 0.2              # CFL factor on (min spacing)^2
    delta: float = 0.0             # outward perturbation speed (H - delta nu)
    epsilon: float = 0.1           # tube offset for the perturbed variant
    split_factor: float = 2.0      # split edges longer than this x h_ref
    collapse_factor: float = 0.5   # collapse edges shorter than this x h_ref
    extinct_fraction: float = 1e-3
    stall_window: int = 50         # steps per plateau window
    stall_rel: float = 1e-6        # |dL|/L per window
    stall_max_h: float = 1e-4
    max_time: float = 50.0
    check_every: int = 10          # self-intersection test cadence
    nesting_check: bool = True
    min_vertices: int = 6
    record_every: int = 25
    contact_tol: float = 1e-3
    n_vertices: int = 128          # boundary sampling for run_dichotomy

    def __post_init__(self):
        if self.delta < 0:
            raise PreconditionError("delta must be nonnegative")
        if self.epsilon <= 0:
            raise PreconditionError("epsilon must be positive")


class FlowCurve:
    """One closed polyline of the moving front."""

    def __init__(self, ambient, vertices, outward_sign, name="curve",
                 h_ref=None, initial_length=None):
        self.ambient = ambient
        self.vertices = np.asarray(vertices, dtype=float)
        self.outward_sign = float(outward_sign)
        self.name = name
        lengths = self.edge_lengths()
        self.h_ref = float(np.mean(lengths)) if h_ref is None else float(h_ref)
        self.initial_length = (math.fsum(lengths) if initial_length is None
                               else float(initial_length))

    def _rolled(self):
        v = self.vertices
        return np.roll(v, 1, axis=0), v, np.roll(v, -1, axis=0)

    def edge_lengths(self):
        """3-point Gauss chord lengths of edges (i, i+1)."""
        amb = self.ambient
        a = self.vertices
        d = amb.chart.delta(a, np.roll(a, -1, axis=0))
        total = np.zeros(len(a))
        for s, w in zip(meshmod.GAUSS3_NODES, meshmod.GAUSS3_WEIGHTS):
            q = a + s * d
            total += w * amb.norm(q, d)
        return total

    def length(self):
        return math.fsum(self.edge_lengths())

    def geometry(self):
        """(H, kappa, outward unit normal, edge lengths) at the vertices."""
        amb = self.ambient
        u, v, w = self._rolled()
        lengths = self.edge_lengths()
        H, kappa, mean_dir = meshmod.turning_curvature(
            amb, u, v, w, np.roll(lengths, 1), lengths)
        normal_frame = np.stack([-mean_dir[:, 1], mean_dir[:, 0]], axis=-1)
        F = amb.frame(v)
        nu = self.outward_sign * np.einsum("mij,mj->mi", F, normal_frame)
        return H, kappa, nu, lengths

    def as_mesh(self, name=None):
        n = len(self.vertices)
        elements = np.stack([np.arange(n), (np.arange(n) + 1) % n], axis=1)
        return meshmod.MeshSurface(self.ambient, 1, self.vertices, elements,
                                   name=name or self.name)

    def copy_with(self, vertices):
        return FlowCurve(self.ambient, vertices, self.outward_sign,
                         name=self.name, h_ref=self.h_ref)


@dataclass
class FlowState:
    """Time-stamped front: a list of closed curves bounding the region K_t."""

    t: float
    curves: list
    history: deque = field(default_factory=lambda: deque(maxlen=4096))
    extinctions: list = field(default_factory=list)
    initial_total_length: float = None
    steps: int = 0

    def __post_init__(self):
        if self.initial_total_length is None:
            self.initial_total_length = self.total_length()

    def total_length(self):
        return math.fsum(c.length() for c in self.curves)


def state_from_domain(domain, config):
    """Initial front = the domain boundary, sampled at equal arclength."""
    from .ambient import _equal_arclength_params
    curves = []
    for comp in domain.boundary:
        ts = _equal_arclength_params(domain.ambient, comp,
                                     config.n_vertices, 4096)
        verts = comp.points(ts)
        curve = FlowCurve(domain.ambient, verts, +1.0, name=comp.name)
        curve.outward_sign = _outward_sign(domain, curve)
        curves.append(curve)
    return FlowState(t=0.0, curves=curves)


def _outward_sign(domain, curve):
    H, kappa, nu, lengths = curve.geometry()
    probe = 1e-5 * float(np.min(curve.ambient.chart.widths))
    inside_plus = domain.region_value(curve.vertices + probe * nu)
    inside_minus = domain.region_value(curve.vertices - probe * nu)
    votes = np.sign(inside_plus - inside_minus)  # +1 where nu exits the region
    return curve.outward_sign if np.median(votes) >= 0 else -curve.outward_sign


def _polyline_simple(ambient, verts):
    from .ambient import _polyline_self_intersects, _unwrapped
    return not _polyline_self_intersects(_unwrapped_closed(ambient, verts))


def _unwrapped_closed(ambient, verts):
    from .ambient import _unwrapped
    return _unwrapped(ambient, verts)


def _nesting_violation(ambient, old_curve, new_vertices, tol=1e-9):
    """Sampled containment: new vertices must not cross the old curve outward."""
    amb = ambient
    a = old_curve.vertices
    b = np.roll(a, 1, axis=0)  # segment (b -> a) covers every edge once
    seg_a, seg_b = b, a
    d = amb.chart.delta(seg_a, seg_b)
    p = new_vertices
    rel = amb.chart.delta(seg_a[None, :, :], p[:, None, :])
    dd = np.einsum("sj,sj->s", d, d)
    tt = np.clip(np.einsum("psj,sj->ps", rel, d) / dd, 0.0, 1.0)
    feet = seg_a[None] + tt[..., None] * d[None]
    diff = amb.chart.delta(feet, p[:, None, :])
    dist2 = np.einsum("psj,psj->ps", diff, diff)
    nearest = np.argmin(dist2, axis=1)
    rows = np.arange(len(p))
    foot = feet[rows, nearest]
    gap = amb.chart.delta(foot, p)
    tangent = d[nearest]
    F = amb.frame(foot)
    tf = amb.frame_coords(foot, tangent)
    tf = tf / np.linalg.norm(tf, axis=1, keepdims=True)
    normal_frame = np.stack([-tf[:, 1], tf[:, 0]], axis=-1)
    outward = old_curve.outward_sign * np.einsum("mij,mj->mi", F, normal_frame)
    side = amb.inner(foot, gap, outward)
    scale = float(np.max(old_curve.edge_lengths()))
    return bool(np.any(side > tol + 0.0 * scale))


def step(state, config):
    """One forward Euler step of all curves with velocity H - delta nu.

    dt follows the CFL rule beta (min spacing)^2 / max(1, speed * spacing);
    edges are split/collapsed against the reference spacing; steps producing
    self-intersections are retried with halved dt (up to 10 times).
    """
    if not state.curves:
        return replace(state, t=state.t, steps=state.steps + 1)
    geoms = [c.geometry() for c in state.curves]
    min_space = min(float(np.min(g[3])) for g in geoms)
    max_speed = max(float(np.max(np.abs(g[1]))) for g in geoms) + config.delta
    dt = config.beta * min_space ** 2 / max(1.0, max_speed * min_space)

    check_now = config.check_every > 0 and \
        (state.steps % config.check_every == 0)
    for attempt in range(11):
        if attempt == 10:
            raise TopologyError("step rejected 10 times (self-intersection)")
        ok = True
        new_curves = []
        for curve, (H, kappa, nu, lengths) in zip(state.curves, geoms):
            velocity = H - config.delta * nu
            verts = curve.vertices + dt * velocity
            if not np.all(curve.ambient.chart.contains(verts)):
                ok = False
                break
            if check_now and not _polyline_simple(curve.ambient, verts):
                ok = False
                break
            if config.nesting_check and \
                    _nesting_violation(curve.ambient, curve, verts):
                ok = False
                break
            new_curves.append(curve.copy_with(verts))
        if ok:
            break
        dt *= 0.5

    survivors = []
    extinctions = list(state.extinctions)
    for curve in new_curves:
        curve = _remesh(curve, config)
        if curve.length() < config.extinct_fraction * curve.initial_length \
                or len(curve.vertices) < config.min_vertices:
            extinctions.append((curve.name, state.t + dt))
            continue
        survivors.append(curve)
    new_state = FlowState(t=state.t + dt, curves=survivors,
                          history=state.history, extinctions=extinctions,
                          initial_total_length=state.initial_total_length,
                          steps=state.steps + 1)
    total = new_state.total_length()
    max_h = max((float(np.max(np.abs(c.geometry()[1]))) for c in survivors),
                default=0.0)
    min_sp = min((float(np.min(c.edge_lengths())) for c in survivors),
                 default=0.0)
    new_state.history.append((new_state.t, total, max_h, min_sp))
    return new_state


def _remesh(curve, config):
    verts = curve.vertices
    amb = curve.ambient
    # collapse short edges first (keeps the vertex budget above the floor)
    changed = True
    while changed and len(verts) > config.min_vertices:
        c = curve.copy_with(verts)
        lengths = c.edge_lengths()
        short = np.nonzero(lengths < config.collapse_factor * curve.h_ref)[0]
        if len(short) == 0:
            changed = False
            break
        drop = int((short[0] + 1) % len(verts))   # merge edge into one vertex
        verts = np.delete(verts, drop, axis=0)
    c = curve.copy_with(verts)
    lengths = c.edge_lengths()
    long_edges = np.nonzero(lengths > config.split_factor * curve.h_ref)[0]
    if len(long_edges):
        d = amb.chart.delta(verts, np.roll(verts, -1, axis=0))
        pieces = []
        for i in range(len(verts)):
            pieces.append(verts[i])
            if i in long_edges:
                pieces.append(verts[i] + 0.5 * d[i])
        verts = np.asarray(pieces)
    return curve.copy_with(verts)


class FlowRecorder:
    """Keeps periodic snapshots (t, list of vertex arrays) of a trajectory."""

    def __init__(self, every=25):
        self.every = max(1, int(every))
        self.snapshots = []
        self._count = 0

    def record(self, state, force=False):
        if force or self._count % self.every == 0:
            self.snapshots.append(
                (state.t, [np.array(c.vertices, copy=True)
                           for c in state.curves]))
        self._count += 1


def evolve(state, config, until_t=None, max_steps=10 ** 7, recorder=None,
           stop=None):
    """Drive the flow until a stop condition, a horizon, or extinction."""
    if recorder is not None:
        recorder.record(state, force=True)
    for _ in range(max_steps):
        if until_t is not None and state.t >= until_t:
            break
        if not state.curves:
            break
        if stop is not None and stop(state):
            break
        state = step(state, config)
        if recorder is not None:
            recorder.record(state)
    if recorder is not None:
        recorder.record(state, force=True)
    return state


# ------------------------------------------------------------------ dichotomy


@dataclass
class DichotomyOutcome:
    """Either extinction in finite time or convergence to a stable geodesic."""

    variant: str                    # "extinct" | "converged"
    t_final: float
    extinction_time: float = None
    geodesic: object = None         # MeshSurface of the limit curve
    residual: float = None
    stability_eigenvalue: float = None
    curve_count: int = 0
    near_coincident: bool = False
    symmetry_defect: float = None
    history: list = field(default_factory=list)


def run_dichotomy(domain, config=None, family_degree=4):
    """Flow the domain boundary inward and classify the limit.

    Requires every boundary component to be mean convex and none minimal.
    Extinction is declared when the total length collapses; convergence on a
    three-window length plateau with max |H| below the stall threshold.
    """
    config = config or FlowConfig()
    reports = classify_domain(domain, samples=max(64, config.n_vertices))
    for rep in reports:
        if rep.flag == "minimal":
            raise PreconditionError(
                f"boundary component {rep.name!r} is minimal; "
                "the flow dichotomy requires non-minimal mean-convex data")
        if rep.flag == "not-convex":
            raise PreconditionError(
                f"boundary component {rep.name!r} is not mean convex")

    state = state_from_domain(domain, config)
    window_lengths = [state.total_length()]
    plateaus = 0
    steps_in_window = 0

    while True:
        if state.t > config.max_time:
            raise FlowInconclusiveError(
                "flow exceeded the time horizon without extinction or stall",
                diagnostics={"t": state.t,
                             "history": list(state.history)[-10:]})
        if not state.curves:
            return DichotomyOutcome(
                variant="extinct", t_final=state.t, extinction_time=state.t,
                curve_count=0, history=list(state.history))
        state = step(state, config)
        steps_in_window += 1
        if steps_in_window >= config.stall_window:
            steps_in_window = 0
            total = state.total_length()
            prev = window_lengths[-1]
            window_lengths.append(total)
            max_h = max((float(np.max(np.abs(c.geometry()[1])))
                         for c in state.curves), default=0.0)
            if prev > 0 and abs(total - prev) / prev < config.stall_rel \
                    and max_h < config.stall_max_h:
                plateaus += 1
            else:
                plateaus = 0
            if plateaus >= 3:
                break

    return _converged_outcome(domain, state, family_degree)


def _converged_outcome(domain, state, family_degree):
    best = max(state.curves, key=lambda c: c.length())
    limit_mesh = best.as_mesh(name="flow-limit")
    V = vfold.from_mesh(limit_mesh)
    family = vfold.TestFamily(domain.ambient, k=1, degree=family_degree)
    residual = vfold.stationarity_residual(V, family)
    problem = StabilityProblem.from_curve(domain.ambient, best)
    eigenvalue, _ = stability_spectrum(problem)

    near = False
    if len(state.curves) > 1:
        sep = _min_curve_distance(domain.ambient, state.curves)
        near = sep < 5.0 * max(c.h_ref for c in state.curves)
    defect = max(float(np.ptp(c.vertices[:, 0])) for c in state.curves)
    return DichotomyOutcome(
        variant="converged", t_final=state.t, geodesic=limit_mesh,
        residual=residual, stability_eigenvalue=eigenvalue,
        curve_count=len(state.curves), near_coincident=near,
        symmetry_defect=defect, history=list(state.history))


def _min_curve_distance(ambient, curves):
    best = math.inf
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            d = point_set_distance(ambient, curves[i].vertices,
                                   curves[j].vertices)
            best = min(best, d)
    return best


def point_set_distance(ambient, pts_a, pts_b):
    """Minimum local metric distance between two chart point sets."""
    rel = ambient.chart.delta(pts_a[:, None, :], pts_b[None, :, :])
    mids = pts_a[:, None, :] + 0.5 * rel
    g = ambient.metric(mids)
    d2 = np.einsum("pqij,pqi,pqj->pq", g, rel, rel)
    return float(np.sqrt(max(np.min(d2), 0.0)))


# ------------------------------------------------------------------ stability


@dataclass
class StabilityProblem:
    """Periodic Jacobi eigenproblem -f'' - q f on a circle of length L."""

    length: float
    q: np.ndarray          # samples on a uniform periodic arclength grid
    grid: int = 256

    def __post_init__(self):
        if self.grid < 64:
            raise PreconditionError("stability grid must be at least 64")
        self.q = np.asarray(self.q, dtype=float)
        if len(self.q) != self.grid:
            s_old = np.linspace(0.0, 1.0, len(self.q), endpoint=False)
            s_new = np.linspace(0.0, 1.0, self.grid, endpoint=False)
            self.q = np.interp(s_new, np.concatenate([s_old, [1.0]]),
                               np.concatenate([self.q, self.q[:1]]))

    @classmethod
    def from_curve(cls, ambient, curve, grid=256):
        """Sample Ric(nu,nu) + |A|^2 along a closed polyline."""
        if isinstance(curve, meshmod.MeshSurface):
            verts = curve.vertices
            cf = meshmod.mean_curvature(curve)
            kappa = cf.signed
            lengths = meshmod.element_measures(curve)
        else:
            verts = curve.vertices
            _, kappa, _, lengths = curve.geometry()
        K = ambient.gauss_curvature(verts)
        q = K + kappa ** 2
        L = math.fsum(lengths)
        s = np.concatenate([[0.0], np.cumsum(lengths)])[:-1] / L
        s_new = np.linspace(0.0, 1.0, grid, endpoint=False)
        q_new = np.interp(s_new, np.concatenate([s, [1.0]]),
                          np.concatenate([q, q[:1]]))
        return cls(length=L, q=q_new, grid=grid)


def stability_spectrum(problem):
    """Smallest eigenpair of -f'' - q f (periodic, second-order differences).

    The matrix is symmetric tridiagonal plus periodic corners; the smallest
    eigenpair comes from inverse iteration with a Gershgorin shift.  The
    geodesic is stable iff the eigenvalue is >= -1e-6.
    """
    n = problem.grid
    h = problem.length / n
    A = np.zeros((n, n))
    idx = np.arange(n)
    A[idx, idx] = 2.0 / h ** 2 - problem.q
    A[idx, (idx + 1) % n] = -1.0 / h ** 2
    A[idx, (idx - 1) % n] = -1.0 / h ** 2
    shift = -float(np.max(problem.q)) - 1.0
    M = A - shift * np.eye(n)
    x = np.ones(n) + 1e-3 * np.cos(2.0 * math.pi * idx / n)
    x /= np.linalg.norm(x)
    lam = None
    for _ in range(500):
        y = np.linalg.solve(M, x)
        y /= np.linalg.norm(y)
        new_lam = float(y @ A @ y)
        if lam is not None and abs(new_lam - lam) < 1e-13 * max(1.0, abs(new_lam)):
            lam = new_lam
            x = y
            break
        lam, x = new_lam, y
    if x[int(np.argmax(np.abs(x)))] < 0:
        x = -x
    return lam, x


def is_stable(eigenvalue, tol=1e-6):
    return eigenvalue >= -tol


# ------------------------------------------------------------------ avoidance


def avoidance_monitor(snapshots, ambient, support, tol=1e-3):
    """Distance-to-support series along a trajectory, with the PASS verdict.

    PASS means the distance stays positive at every recorded time and never
    drops more than ``tol`` below its running infimum (monotone approach
    toward zero is a PASS).  Empty supports pass vacuously.
    """
    support = np.asarray(support, dtype=float)
    if support.size == 0:
        return [], [], True
    times, dists = [], []
    for t, curve_list in snapshots:
        d = min((point_set_distance(ambient, verts, support)
                 for verts in curve_list), default=math.inf)
        times.append(t)
        dists.append(d)
    if not dists or dists[0] <= 0:
        raise PreconditionError("support must start at positive distance")
    verdict = True
    running = math.inf
    for d in dists:
        if d <= 0 or d < running - tol:
            verdict = False
        running = min(running, d)
    return times, dists, verdict


# ------------------------------------------------------------------ tube flow


def offset_curves(ambient, base_curve, epsilon):
    """The two curves at g-distance epsilon on either side of a closed curve."""
    H, kappa, nu, lengths = base_curve.geometry()
    outer = base_curve.vertices + epsilon * nu
    inner = base_curve.vertices - epsilon * nu
    for verts in (outer, inner):
        if not _polyline_simple(ambient, verts):
            raise OffsetTooLargeError(
                "offset curves self-intersect; reduce epsilon")
        if not np.all(ambient.chart.contains(verts)):
            raise OffsetTooLargeError("offset curve leaves the chart")
    out_curve = FlowCurve(ambient, outer, base_curve.outward_sign,
                          name=base_curve.name + "+eps")
    in_curve = FlowCurve(ambient, inner, -base_curve.outward_sign,
                         name=base_curve.name + "-eps")
    return out_curve, in_curve


def perturbed_tube_flow(base_curve, config, until_t, support=None):
    """Evolve the epsilon-tube boundary with velocity H - delta nu.

    nu is the outward normal of the tube region, so a positive delta slows
    the collapse of the outer wall and pushes the inner wall outward (the
    comparison-flow mechanism).  Reports the trajectory and the first time
    the tube touches ``support`` (or None).
    """
    ambient = base_curve.ambient
    outer, inner = offset_curves(ambient, base_curve, config.epsilon)
    state = FlowState(t=0.0, curves=[outer, inner])
    tube_config = replace(config, nesting_check=False)
    recorder = FlowRecorder(every=config.record_every)
    contact_time = None

    def stop(s):
        nonlocal contact_time
        if support is not None and len(support) and s.curves:
            d = min(point_set_distance(ambient, c.vertices, support)
                    for c in s.curves)
            if d < config.contact_tol and contact_time is None:
                contact_time = s.t
                return True
        return False

    state = evolve(state, tube_config, until_t=until_t, recorder=recorder,
                   stop=stop)
    return state, recorder.snapshots, contact_time
