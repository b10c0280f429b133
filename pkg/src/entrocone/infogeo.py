"""Dual coordinates, m-projections, and divergence identities.

Strictly positive joint distributions on a product alphabet form an
exponential family: the mass array itself (minus one redundant entry)
gives the mixture coordinates eta, and entrywise log-ratios against a
reference outcome give the exponential coordinates theta.  In theta
coordinates, conditional-independence constraints become intersections
of hyperplanes, m-projections onto the corresponding submanifolds have
closed forms, and every elemental Shannon inequality is the
nonnegativity of a KL divergence between two such projections.

The four-atom section of this module specializes to distributions on
the canonical Ingleton-violating support, where the violation region is
an open half-space in theta coordinates: below the threshold returned
by :func:`fouratom_threshold` every distribution violates Ingleton, and
the boundary is affine (flat).  The analogous five-atom boundary is
curved, which the planarity probes quantify by fitting an affine
functional to root-found boundary samples.
"""

import itertools

import numpy as np
from dataclasses import dataclass

from .entropy import Distribution, entropic_vector, ingleton, INGLETON_PAIRS
from .optimize import four_atom_support, five_atom_support

__all__ = [
    "ProductDistribution",
    "eta",
    "theta",
    "from_eta",
    "from_theta",
    "kl",
    "conditional_mi",
    "ci_residuals",
    "m_project_independent",
    "m_project_markov",
    "submodularity_divergence",
    "example2_suite",
    "FourAtomPoint",
    "alpha0",
    "fouratom_threshold",
    "fouratom_classify",
    "PlanarityProbe",
    "planarity_probe",
    "fouratom_planarity_probe",
    "fiveatom_planarity_probe",
]

_LOG2 = np.log(2.0)


class ProductDistribution:
    """Strictly positive joint pmf over a Cartesian product alphabet."""

    def __init__(self, probs):
        probs = np.asarray(probs, dtype=float)
        if probs.ndim < 1:
            raise ValueError("joint mass array needs at least one axis")
        if not (probs > 0).all():
            raise ValueError("full support required: all masses must be positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("masses must sum to 1 within 1e-12")
        self.probs = probs

    @property
    def sizes(self):
        return self.probs.shape

    @property
    def nvars(self):
        return self.probs.ndim

    @classmethod
    def uniform(cls, sizes):
        total = int(np.prod(sizes))
        return cls(np.full(tuple(sizes), 1.0 / total))

    @classmethod
    def random(cls, sizes, rng):
        """Dirichlet(1) draw; strictly positive with probability one."""
        flat = rng.dirichlet(np.ones(int(np.prod(sizes))))
        flat = np.maximum(flat, 1e-15)
        return cls((flat / flat.sum()).reshape(tuple(sizes)))

    def _axes(self, subset):
        axes = tuple(sorted(set(int(v) for v in subset)))
        if any(v < 0 or v >= self.nvars for v in axes):
            raise ValueError("variable index out of range")
        return axes

    def marginal(self, subset, keepdims=False):
        """Marginal mass array over ``subset`` (axes in sorted order)."""
        keep = self._axes(subset)
        drop = tuple(a for a in range(self.nvars) if a not in keep)
        return self.probs.sum(axis=drop, keepdims=keepdims) if drop else self.probs

    def entropy(self, subset=None):
        """Shannon entropy of the marginal on ``subset``, in bits."""
        if subset is None:
            subset = range(self.nvars)
        m = self.marginal(subset).ravel()
        return float(-(m @ np.log2(m)))


def eta(p):
    """Mixture coordinates: all masses except the reference outcome.

    The reference outcome is all-first-symbols (flat index 0 in C
    order); its mass is recovered as one minus the rest.
    """
    return p.probs.ravel()[1:].copy()


def theta(p):
    """Exponential coordinates log2(p(x)/p(reference)), reference dropped."""
    flat = p.probs.ravel()
    return np.log2(flat[1:] / flat[0])


def from_eta(values, sizes):
    values = np.asarray(values, dtype=float)
    first = 1.0 - values.sum()
    flat = np.concatenate(([first], values))
    if not (flat > 0).all():
        raise ValueError("eta coordinates must leave every mass positive")
    return ProductDistribution(flat.reshape(tuple(sizes)))


def from_theta(values, sizes):
    values = np.asarray(values, dtype=float)
    flat = np.concatenate(([1.0], np.exp2(values)))
    return ProductDistribution((flat / flat.sum()).reshape(tuple(sizes)))


def kl(p, q):
    """Relative entropy D(p || q) in bits."""
    if p.sizes != q.sizes:
        raise ValueError("distributions live on different alphabets")
    a = p.probs.ravel()
    b = q.probs.ravel()
    return float(a @ (np.log2(a) - np.log2(b)))


def conditional_mi(p, A, B):
    """I(X_{A\\B}; X_{B\\A} | X_{A&B}) in bits, via marginal entropies."""
    A = set(A)
    B = set(B)
    return (
        p.entropy(A) + p.entropy(B) - p.entropy(A & B) - p.entropy(A | B)
    )


def _grouped(p, A, B):
    # reorder the A|B marginal so axes come as (A\B..., B\A..., A&B...),
    # then flatten each group
    A = set(A)
    B = set(B)
    left = sorted(A - B)
    right = sorted(B - A)
    mid = sorted(A & B)
    keep = sorted(A | B)
    marg = p.marginal(keep)
    pos = {v: i for i, v in enumerate(keep)}
    order = [pos[v] for v in left + right + mid]
    arr = np.transpose(marg, order)
    m = int(np.prod(arr.shape[: len(left)])) if left else 1
    n = int(np.prod(arr.shape[len(left) : len(left) + len(right)])) if right else 1
    q = int(np.prod(arr.shape[len(left) + len(right) :])) if mid else 1
    return arr.reshape(m, n, q)


def ci_residuals(p, A, B):
    """Log cross-ratios whose joint vanishing is the CI statement.

    For every value c of X_{A&B} and every non-reference pair (i, j) of
    values of X_{A\\B} and X_{B\\A}, the residual is

        log2( p(0,j,c) p(i,0,c) / (p(0,0,c) p(i,j,c)) )

    and all (m-1)(n-1)q of them vanish exactly when
    I(X_{A\\B}; X_{B\\A} | X_{A&B}) = 0.
    """
    arr = _grouped(p, A, B)
    m, n, q = arr.shape
    if m < 2 or n < 2:
        return np.zeros(0)
    logs = np.log2(arr)
    res = logs[0:1, 1:, :] + logs[1:, 0:1, :] - logs[0:1, 0:1, :] - logs[1:, 1:, :]
    return res.reshape(-1)


def m_project_independent(p, A):
    """Closest distribution making X_A independent of the rest.

    The m-projection has the closed form p_{X_A} * p_{X_rest}; its KL
    distance from p is the mutual information between the two blocks.
    """
    A = p._axes(A)
    rest = tuple(v for v in range(p.nvars) if v not in A)
    pa = p.marginal(A, keepdims=True)
    pr = p.marginal(rest, keepdims=True) if rest else 1.0
    return ProductDistribution(pa * pr)


def m_project_markov(p, A, B):
    """Closest distribution with X_{A\\B} -- X_{A&B} -- X_{B\\A} Markov.

    Closed form p_{X_A} / p_{X_{A&B}} * p_{X_B} * p_{X_rest}; variables
    outside A | B are split off independently.  KL distance from p is
    the conditional mutual information plus the block independence term.
    """
    A = set(p._axes(A))
    B = set(p._axes(B))
    rest = tuple(v for v in range(p.nvars) if v not in (A | B))
    pa = p.marginal(A, keepdims=True)
    pb = p.marginal(B, keepdims=True)
    mid = A & B
    pm = p.marginal(mid, keepdims=True) if mid else 1.0
    pr = p.marginal(rest, keepdims=True) if rest else 1.0
    return ProductDistribution(pa / pm * pb * pr)


def submodularity_divergence(p, A, B):
    """KL between the two nested projections; equals the submodular slack.

    D( proj onto {X_{A|B} indep rest}  ||  proj onto the Markov family )
    = h_A + h_B - h_{A&B} - h_{A|B}, nonnegative by construction.
    """
    A = set(A)
    B = set(B)
    outer = m_project_independent(p, A | B)
    inner = m_project_markov(p, A, B)
    return kl(outer, inner)


def _block_product(p, blocks, uniform_vars=()):
    # product of marginals over the given blocks, uniform on the rest
    uniform_vars = set(uniform_vars)
    out = 1.0
    for block in blocks:
        out = out * p.marginal(block, keepdims=True)
    for v in uniform_vars:
        shape = [1] * p.nvars
        shape[v] = p.sizes[v]
        out = out * np.full(shape, 1.0 / p.sizes[v])
    return ProductDistribution(np.broadcast_to(out, p.sizes).copy())


def example2_suite(p):
    """Eleven (label, divergence, slack) triples along a projection chain.

    ``p`` is a three-variable distribution.  The chain of nested
    submanifolds is: Markov(1-0-2) > indep({0,2} vs {1}) > fully
    independent > independent with var 2 uniform > var 0 free with 1,2
    uniform > uniform.  Labels (i)-(vi) are divergences from p to each
    projection; labels (1)-(5) are divergences between consecutive
    projections.  Each divergence equals the slack of one elemental
    Shannon inequality (in bits) for three variables.
    """
    if p.nvars != 3:
        raise ValueError("the suite is defined for three variables")
    s0, s1, s2 = (float(np.log2(sz)) for sz in p.sizes)
    h = lambda *vs: p.entropy(vs)

    pB = m_project_markov(p, (0, 1), (0, 2))
    pQ = m_project_independent(p, (0, 2))
    pE = _block_product(p, ((0,), (1,), (2,)))
    pEU3 = _block_product(p, ((0,), (1,)), uniform_vars=(2,))
    pU23 = _block_product(p, ((0,),), uniform_vars=(1, 2))
    pU123 = ProductDistribution.uniform(p.sizes)

    h012 = h(0, 1, 2)
    rows = [
        ("(i)", kl(p, pB), h(0, 1) + h(0, 2) - h(0) - h012),
        ("(ii)", kl(p, pQ), h(0, 2) + h(1) - h012),
        ("(iii)", kl(p, pE), h(0) + h(1) + h(2) - h012),
        ("(iv)", kl(p, pEU3), h(0) + h(1) + s2 - h012),
        ("(v)", kl(p, pU23), h(0) + s1 + s2 - h012),
        ("(vi)", kl(p, pU123), s0 + s1 + s2 - h012),
        ("(1)", kl(pB, pQ), h(0) + h(1) - h(0, 1)),
        ("(2)", kl(pQ, pE), h(0) + h(2) - h(0, 2)),
        ("(3)", kl(pE, pEU3), s2 - h(2)),
        ("(4)", kl(pEU3, pU23), s1 - h(1)),
        ("(5)", kl(pU23, pU123), s0 - h(0)),
    ]
    return rows


# ---------------------------------------------------------------------------
# the four-atom violation half-space


@dataclass(frozen=True)
class FourAtomPoint:
    """Distribution on the canonical four-atom support, (alpha,beta,gamma).

    Atom masses are (alpha, beta-alpha, gamma-alpha, 1+alpha-beta-gamma)
    on the support's outcomes in sorted order; all four must be
    positive.  theta_i = log2(mass_i / mass_4) for i = 1, 2, 3.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if min(self.masses()) <= 0:
            raise ValueError("all four atom masses must be positive")

    def masses(self):
        a, b, g = self.alpha, self.beta, self.gamma
        return (a, b - a, g - a, 1.0 + a - b - g)

    def theta(self):
        m = self.masses()
        return tuple(np.log2(m[i] / m[3]) for i in range(3))

    def stat(self):
        """The half-space functional -theta_1 + theta_2 + theta_3."""
        t = self.theta()
        return -t[0] + t[1] + t[2]

    def distribution(self):
        return Distribution(four_atom_support(), self.masses())


def alpha0(tol=1e-14):
    """Root of H_b(a) = (1+2a)/2 on (0, 1/2), by bisection."""

    def g(a):
        return -a * np.log2(a) - (1 - a) * np.log2(1 - a) - (1 + 2 * a) / 2

    lo, hi = 1e-9, 0.45
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol:
            break
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fouratom_threshold():
    """Boundary level of -theta_1+theta_2+theta_3: 2*log2((1/2-a0)/a0)."""
    a0 = alpha0()
    return 2.0 * np.log2((0.5 - a0) / a0)


def fouratom_classify(pt, tol=1e-9):
    """'violating', 'boundary', or 'satisfying' by the theta half-space."""
    s = pt.stat()
    tau = fouratom_threshold()
    if abs(s - tau) <= tol:
        return "boundary"
    return "violating" if s < tau else "satisfying"


# ---------------------------------------------------------------------------
# planarity probes for Ingleton boundaries in theta coordinates


@dataclass(frozen=True)
class PlanarityProbe:
    """Affine fit of root-found Ingleton-boundary points in theta space."""

    support_size: int
    pair: tuple
    points: np.ndarray
    residual: float
    functional: np.ndarray
    separated: bool


def _pair_ingleton(support, pair):
    a, b = pair

    def score(th):
        w = np.concatenate(([1.0], np.exp2(th)))
        probs = w / w.sum()
        vec = entropic_vector(Distribution(support, probs))
        return ingleton(vec, a, b)

    return score


def _dominant_pair(support, seed):
    """The Ingleton pair a support actually violates.

    Scans seeded random theta points and returns the pair with the most
    negative value seen; different supports violate differently-labeled
    pairs, so the probe must be told which zero set to chase.
    """
    rng = np.random.default_rng((seed, 8))
    best_pair, best_val = None, np.inf
    for _ in range(200):
        th = rng.normal(0.0, 2.0, support.k - 1)
        w = np.concatenate(([1.0], np.exp2(th)))
        vec = entropic_vector(Distribution(support, w / w.sum()))
        vals = [ingleton(vec, a, b) for a, b in INGLETON_PAIRS]
        idx = int(np.argmin(vals))
        if vals[idx] < best_val:
            best_val = vals[idx]
            best_pair = INGLETON_PAIRS[idx]
    if best_val >= 0:
        raise RuntimeError("support shows no Ingleton violation to probe")
    return best_pair


def planarity_probe(support, samples=60, seed=0, iters=80, pair=None):
    """Fit an affine functional to Ingleton-zero crossings in theta space.

    ``pair`` names the inequality whose zero set is probed (default: the
    pair the support violates, found by a seeded scan).  Random segments
    in theta coordinates whose endpoints give that pair opposite signs
    are bisected to the boundary.  The returned residual is the largest
    deviation of the boundary samples from their best affine fit
    (unit-norm functional): tiny for a flat boundary, macroscopic for a
    curved one.  ``separated`` reports whether every violating endpoint
    fell strictly on one side of the fitted plane.
    """
    if pair is None:
        pair = _dominant_pair(support, seed)
    k = support.k
    score = _pair_ingleton(support, pair)
    dim = k - 1
    rng = np.random.default_rng((seed, 7))
    points = []
    violators = []
    attempts = 0
    while len(points) < samples and attempts < 400 * samples:
        attempts += 1
        a = rng.normal(0.0, 2.0, dim)
        b = rng.normal(0.0, 2.0, dim)
        fa, fb = score(a), score(b)
        if fa * fb >= 0:
            continue
        if fa > 0:
            a, b, fa, fb = b, a, fb, fa
        violators.append(a.copy())
        for _ in range(iters):
            mid = 0.5 * (a + b)
            if score(mid) < 0:
                a = mid
            else:
                b = mid
        points.append(0.5 * (a + b))
    if len(points) < max(4, dim + 2):
        raise RuntimeError("not enough boundary crossings found")
    pts = np.array(points)
    design = np.hstack([pts, np.ones((len(pts), 1))])
    _, _, vt = np.linalg.svd(design, full_matrices=False)
    func = vt[-1]
    func = func / np.linalg.norm(func[:-1])
    resid = float(np.abs(design @ func).max())
    vals = np.array([v @ func[:-1] + func[-1] for v in violators])
    side = vals[np.abs(vals) > 1e-9]
    separated = bool(side.size == 0 or (side > 0).all() or (side < 0).all())
    return PlanarityProbe(k, pair, pts, resid, func, separated)


def fouratom_planarity_probe(samples=60, seed=0):
    return planarity_probe(four_atom_support(), samples=samples, seed=seed)


def fiveatom_planarity_probe(samples=60, seed=0):
    return planarity_probe(five_atom_support(), samples=samples, seed=seed)
