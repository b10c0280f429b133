"""Face projections, barycentric plot coordinates, and hull volume estimates.

The 15 pyramid rays are linearly independent, so their joint-entropy-one
normalizations span a 14-simplex; every vector in the pyramid's cross
section has a unique nonnegative weight vector over the rays summing to
one.  All volume work happens in that weight space: uniform sampling of the
cross section is a symmetric Dirichlet draw, and hull membership is linear
feasibility over generator weights.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

from .entropy import EntropicVector, ingleton
from .rays import PYRAMID_RAY_NAMES, pyramid_rays, ray_matrix

_M3, _M4, _M34 = 1 << 2, 1 << 3, (1 << 2) | (1 << 3)
_M123, _M124, _FULL = 7, 11, 15


def _compact(v):
    """Coerce a vector-like to its 15 nonempty-subset coordinates."""
    if isinstance(v, EntropicVector):
        return v.values[1:].astype(float)
    if hasattr(v, "compact"):
        return np.array([float(x) for x in v.compact()])
    arr = np.asarray(v, dtype=float)
    if arr.shape == (16,):
        return arr[1:].copy()
    if arr.shape == (15,):
        return arr.copy()
    raise ValueError("expected 15 or 16 coordinates")


def _as_vector(v):
    if isinstance(v, EntropicVector):
        return v
    return EntropicVector(4, np.concatenate([[0.0], _compact(v)]))


def modular_component(v):
    """Largest modular vector matching the top-rank increments of v.

    Sends W to the sum over its members i of h(all) - h(all minus i); the
    difference v minus this component is "tight": removing any single
    variable from the full set costs nothing.
    """
    v = _as_vector(v)
    n = v.n
    full = (1 << n) - 1
    inc = [v[full] - v[full ^ (1 << i)] for i in range(n)]
    vals = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        vals[mask] = sum(inc[i] for i in range(n) if mask >> i & 1)
    return EntropicVector(n, vals)


def tight_component(v):
    v = _as_vector(v)
    return EntropicVector(v.n, v.values - modular_component(v).values)


def _ray_values(name):
    return np.array([float(x) for x in pyramid_rays()[name].values])


def push_onto_face(v):
    """Slide a tight vector onto the two hyperplanes bounding the pyramid face.

    Adds multiples of (r1_3 - r1_0) and (r2_1 - r3_0) so that the output
    satisfies h3 + h4 = h34 and h123 + h124 = h34 + h1234 exactly, leaving
    the Ingleton value untouched.
    """
    v = _as_vector(v)
    if v.n != 4:
        raise ValueError("face geometry is four-variable only")
    u = v[_M3] + v[_M4] - v[_M34]
    w = v[_M123] + v[_M124] - v[_M34] - v[_FULL]
    vals = (
        v.values
        + u * (_ray_values("r1_3") - _ray_values("r1_0"))
        + w * (_ray_values("r2_1") - _ray_values("r3_0"))
    )
    return EntropicVector(4, vals)


@dataclass(frozen=True)
class FaceCoords:
    """Normalized barycentric coordinates over the face basis.

    alpha weights the apex direction (positive exactly when the (3,4)
    Ingleton value is negative), beta/gamma/delta weight three symmetrized
    boundary directions; the four sum to one unless the expansion is
    degenerate (all components vanish).
    """

    alpha: float
    beta: float
    gamma: float
    delta: float
    degenerate: bool = False

    def coords3(self):
        """Plot coordinates (beta+delta, gamma+delta, alpha)."""
        return (self.beta + self.delta, self.gamma + self.delta, self.alpha)


def face_expansion(v, tol=1e-9):
    """Expand a face vector over the apex and symmetrized boundary directions.

    The input must already satisfy the two face hyperplanes (the output of
    push_onto_face); its r1_0 and r3_0 components then vanish and the
    remaining expansion has four coefficients, which are normalized to sum
    to one.
    """
    v = _as_vector(v)
    h = v.values
    c_f = -float(ingleton(v, 2, 3))
    c_beta = 0.5 * (
        h[5] + h[6] - h[4] - h[7] + h[9] + h[10] - h[8] - h[11]
    )
    c_gamma = 0.5 * (
        h[5] + h[9] - h[1] - h[13] + h[6] + h[10] - h[2] - h[14]
    )
    c_delta = 0.25 * (
        h[3] + h[9] - h[1] - h[11]
        + h[3] + h[5] - h[1] - h[7]
        + h[3] + h[10] - h[2] - h[11]
        + h[3] + h[6] - h[2] - h[7]
    )
    raw = np.array([4 * c_f, 2 * c_beta, 4 * c_gamma, 4 * c_delta])
    total = raw.sum()
    if total < tol:
        return FaceCoords(0.0, 0.0, 0.0, 0.0, True)
    a, b, g, d = raw / total
    return FaceCoords(float(a), float(b), float(g), float(d))


def face_pipeline(v, tol=1e-9):
    """Full reduction of an entropic vector to plot coordinates.

    Strips the modular component, pushes onto the face, expands; returns
    the (x, y, z) triple or None when the expansion is degenerate.
    """
    coords = face_expansion(push_onto_face(tight_component(v)), tol)
    if coords.degenerate:
        return None
    return coords.coords3()


def pyramid_basis():
    """Normalized pyramid rays (joint entropy one), as rows in fixed order."""
    mat = ray_matrix(pyramid_rays().values())
    return mat / mat[:, 14:15]


def to_weights(points, basis=None):
    """Expand points (compact coords) over the normalized pyramid rays."""
    if basis is None:
        basis = pyramid_basis()
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return np.linalg.solve(basis.T, pts.T).T


@dataclass(frozen=True)
class VolumeEstimate:
    fraction: float
    samples: int
    stderr: float
    hits: int


def normalize_generators(generators):
    """Stack generator vectors and scale each to joint entropy one."""
    rows = np.array([_compact(g) for g in generators])
    h_all = rows[:, 14]
    if (h_all <= 1e-12).any():
        raise ValueError("every generator needs positive joint entropy")
    return rows / h_all[:, None]


@njit(cache=True)
def _nnls_residual(a, b, eps, maxiter):
    """Sup-norm residual of min ||a x - b|| over x >= 0 (Lawson-Hanson).

    Classic active-set iteration: grow the passive set by the most
    positive dual coordinate, solve the unconstrained subproblem, and
    step back along the segment whenever a passive coordinate would turn
    negative.  Converges exactly for these small well-scaled systems.
    """
    n, m = a.shape
    x = np.zeros(m)
    passive = np.zeros(m, dtype=np.bool_)
    resid = b.copy()
    for _ in range(maxiter):
        grad = a.T @ resid
        j = -1
        best = eps
        for i in range(m):
            if not passive[i] and grad[i] > best:
                best = grad[i]
                j = i
        if j < 0:
            break
        passive[j] = True
        while True:
            cols = np.flatnonzero(passive)
            sub = np.empty((n, cols.size))
            for c in range(cols.size):
                sub[:, c] = a[:, cols[c]]
            z = np.linalg.lstsq(sub, b)[0]
            if z.min() > 0.0:
                x[:] = 0.0
                for c in range(cols.size):
                    x[cols[c]] = z[c]
                break
            alpha = 1.0
            for c in range(cols.size):
                if z[c] <= 0.0:
                    denom = x[cols[c]] - z[c]
                    if denom > 0.0:
                        step = x[cols[c]] / denom
                        if step < alpha:
                            alpha = step
            for c in range(cols.size):
                i = cols[c]
                x[i] += alpha * (z[c] - x[i])
                if x[i] <= 1e-14:
                    x[i] = 0.0
                    passive[i] = False
        resid = b - a @ x
    return np.abs(resid).max()


def _membership_lp(gw_t, w, tol):
    """Feasibility of w as a convex combination of generator weight rows.

    gw_t is the (15, m) transposed generator-weight matrix.  Solved as a
    phase-1 problem — minimize the sup-norm residual t of gw_t @ lam = w
    over the probability simplex — which is always feasible, so solver
    status stays clean; membership is t <= tol.
    """
    dim, m = gw_t.shape
    c = np.zeros(m + 1)
    c[-1] = 1.0
    col = -np.ones((dim, 1))
    a_ub = np.block([[gw_t, col], [-gw_t, col]])
    b_ub = np.concatenate([w, -w])
    a_eq = np.concatenate([np.ones(m), [0.0]])[None, :]
    res = linprog(
        c=c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=(0, None),
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError("membership LP failed with status %d" % res.status)
    return res.fun <= tol


def _unit_rows(gw, tol=1e-9):
    """Map coordinate -> generator index for generators that are basis rays."""
    out = {}
    for i, row in enumerate(gw):
        top = int(np.argmax(row))
        if abs(row[top] - 1.0) <= tol and np.abs(np.delete(row, top)).max() <= tol:
            out[top] = i
    return out


def volume_fraction(generators, n_samples=200_000, seed=0, tol=1e-8):
    """Monte Carlo fraction of the pyramid cross section covered by a hull.

    Samples the joint-entropy-one cross section uniformly (symmetric
    Dirichlet over the 15 normalized rays) and tests membership in the
    convex hull of the normalized generators.  Sandwiches the LP work
    between exact reject/accept certificates so only genuinely ambiguous
    samples pay for a solver call.
    """
    basis = pyramid_basis()
    gw = to_weights(normalize_generators(generators), basis)
    gw = np.unique(np.round(gw, 12), axis=0)
    m = len(gw)
    rng = np.random.default_rng(seed)
    samples = rng.dirichlet(np.ones(15), n_samples)

    if m == 15 and np.linalg.matrix_rank(gw) == 15:
        lam = np.linalg.solve(gw.T, samples.T)
        hits = int(((lam >= -1e-9).all(axis=0)).sum())
        frac = hits / n_samples
        return VolumeEstimate(
            frac, n_samples, float(np.sqrt(frac * (1 - frac) / n_samples)), hits
        )

    undecided = np.ones(n_samples, dtype=bool)
    hits = np.zeros(n_samples, dtype=bool)

    lo = gw.min(axis=0) - tol
    hi = gw.max(axis=0) + tol
    undecided &= ~((samples < lo) | (samples > hi)).any(axis=1)

    dir_rng = np.random.default_rng((seed, 0xD1CE))
    dirs = dir_rng.standard_normal((15, 64))
    dirs /= np.linalg.norm(dirs, axis=0)
    bound = (gw @ dirs).max(axis=0)
    idx = np.flatnonzero(undecided)
    outside = ((samples[idx] @ dirs) > bound + 1e-9).any(axis=1)
    undecided[idx[outside]] = False

    units = _unit_rows(gw)
    interior = [i for i in range(m) if i not in units.values()]
    if len(units) == 14 and 0 not in units:
        for i in interior:
            u = gw[i]
            if u[0] <= tol:
                continue
            idx = np.flatnonzero(undecided & ~hits)
            if not idx.size:
                break
            lam = samples[idx, 0] / u[0]
            rest = samples[idx, 1:] - lam[:, None] * u[1:]
            ok = (rest >= -1e-12).all(axis=1)
            hits[idx[ok]] = True

    # samples and generator weights both sum to one, so hull membership
    # degenerates to cone membership and a nonnegative least-squares
    # residual decides it far faster than a per-sample LP; residuals in
    # the gray band around the cutoff are re-judged by the LP
    gw_t = np.ascontiguousarray(gw.T)
    for i in np.flatnonzero(undecided & ~hits):
        resid = _nnls_residual(gw_t, samples[i], 1e-11, 10 * m)
        if resid <= tol:
            hits[i] = True
        elif resid < 100 * tol:
            hits[i] = _membership_lp(gw_t, samples[i], tol)
    total = int(hits.sum())
    frac = total / n_samples
    return VolumeEstimate(
        frac, n_samples, float(np.sqrt(frac * (1 - frac) / n_samples)), total
    )


def hull_contains(generators, vector, tol=1e-8):
    """LP membership of one normalized vector in the generators' hull."""
    basis = pyramid_basis()
    gw = to_weights(normalize_generators(generators), basis)
    w = to_weights(normalize_generators([vector]), basis)[0]
    return _membership_lp(np.ascontiguousarray(gw.T), w, tol)


@dataclass
class Hull3:
    points: np.ndarray
    vertices: np.ndarray
    simplices: np.ndarray
    degenerate: bool


def hull3(points):
    """Convex hull of 3-d points; flags rank-deficient (flat) inputs."""
    pts = np.unique(np.round(np.asarray(points, dtype=float), 9), axis=0)
    if len(pts) >= 2:
        centered = pts - pts.mean(axis=0)
        rank = np.linalg.matrix_rank(centered, tol=1e-9)
    else:
        rank = 0
    if len(pts) < 4 or rank < 3:
        return Hull3(pts, np.arange(len(pts)), np.empty((0, 3), dtype=int), True)
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return Hull3(pts, np.arange(len(pts)), np.empty((0, 3), dtype=int), True)
    return Hull3(pts, hull.vertices.copy(), hull.simplices.copy(), False)


def hull3_slice(hull, z, tol=1e-9):
    """Ordered boundary loop of a hull's cross section at height z.

    Intersects every facet triangle with the plane, then chains the
    resulting segments into a closed polygon; returns a list of (x, y)
    pairs, empty when the plane misses the hull.
    """
    if hull.degenerate:
        raise ValueError("no 3-d hull to slice")
    segs = []
    for tri in hull.simplices:
        pts = hull.points[tri]
        cuts = []
        for a in range(3):
            p, q = pts[a], pts[(a + 1) % 3]
            dp, dq = p[2] - z, q[2] - z
            if abs(dp) <= tol:
                cuts.append(p[:2])
            if dp * dq < -tol * tol:
                t = dp / (dp - dq)
                cuts.append(p[:2] + t * (q[:2] - p[:2]))
        if len(cuts) >= 2:
            uniq = []
            for c in cuts:
                if not any(np.allclose(c, u, atol=1e-9) for u in uniq):
                    uniq.append(c)
            if len(uniq) == 2:
                segs.append((uniq[0], uniq[1]))
    if not segs:
        return []
    loop = [segs[0][0], segs[0][1]]
    used = {0}
    while len(used) < len(segs):
        found = False
        for i, (a, b) in enumerate(segs):
            if i in used:
                continue
            if np.allclose(loop[-1], a, atol=1e-7):
                loop.append(b)
                used.add(i)
                found = True
            elif np.allclose(loop[-1], b, atol=1e-7):
                loop.append(a)
                used.add(i)
                found = True
        if not found:
            break
    if len(loop) > 1 and np.allclose(loop[0], loop[-1], atol=1e-7):
        loop.pop()
    return [(float(x), float(y)) for x, y in loop]
