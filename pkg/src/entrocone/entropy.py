"""Entropic vectors, Shannon inequalities, and related functionals.

Subsets of the n variables are encoded as bitmasks, bit v standing for
variable v, so for n=4 the mask 13 = 1101 in binary is {0,2,3}.  A vector
stores one real per mask, indexed directly by the mask, with the empty set
pinned to zero.  All entropies are in bits.

Linear functionals over subset space are plain integer coefficient lists of
length 2**n; applying one to a vector with Fraction entries stays exact.
"""

from dataclasses import dataclass, field

import numpy as np

from .partitions import meet


def mask_of(vars_, n=None):
    """Bitmask of an iterable of variable indices."""
    m = 0
    for v in vars_:
        m |= 1 << v
    return m


def mask_vars(mask):
    """Variable indices present in a mask, ascending."""
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def subset_label(mask):
    """Subset name with 1-based digits: mask 5 -> "13"."""
    return "".join(str(v + 1) for v in mask_vars(mask))


class EntropicVector:
    """Real vector over nonempty subsets of n variables, in bits."""

    __slots__ = ("n", "values")

    def __init__(self, n, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (1 << n,):
            raise ValueError("need exactly 2**n entries, empty set first")
        if values[0] != 0.0:
            raise ValueError("the empty-set entry must be zero")
        self.n = n
        self.values = values

    @classmethod
    def from_compact(cls, n, compact):
        """Build from the 2**n - 1 nonempty-subset entries in mask order."""
        return cls(n, np.concatenate([[0.0], np.asarray(compact, dtype=float)]))

    def compact(self):
        return self.values[1:].copy()

    def __getitem__(self, mask):
        return float(self.values[mask])

    @staticmethod
    def csv_header(n):
        return ",".join("h_" + subset_label(m) for m in range(1, 1 << n))

    def __repr__(self):
        return "EntropicVector(n=%d, %s)" % (self.n, self.values[1:])


class Distribution:
    """Strictly positive probabilities on the atoms of a support."""

    __slots__ = ("support", "probs")

    def __init__(self, support, probs):
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (support.k,):
            raise ValueError("need one probability per atom")
        if (probs <= 0).any():
            raise ValueError("probabilities must be strictly positive")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to one")
        self.support = support
        self.probs = probs

    def __repr__(self):
        return "Distribution(%r, %s)" % (self.support, self.probs)


def subset_meets(partitions):
    """Meet partition for every nonempty subset of an ordered partition list.

    Entry at index ``mask`` is the meet of the partitions selected by the
    mask's bits (index 0 stays None); atoms sharing a block of that meet are
    indistinguishable to every variable in the subset.
    """
    n = len(partitions)
    meets = [None] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        v = low.bit_length() - 1
        if mask == low:
            meets[mask] = partitions[v]
        else:
            meets[mask] = meet(meets[mask ^ low], partitions[v])
    return meets


def entropic_vector(dist):
    """Joint entropies of every subset of variables of a distribution.

    The entropy of a subset is taken over the blocks of the meet of its
    partitions, since masses of atoms in one meet block add.
    """
    sup = dist.support
    n = sup.n
    probs = dist.probs
    meets = subset_meets(sup.partitions)
    h = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        part = meets[mask]
        q = np.bincount(
            np.fromiter(part.rgs, dtype=np.int64, count=sup.k),
            weights=probs,
            minlength=part.num_blocks,
        )
        h[mask] = -(q * np.log2(q)).sum()
    return EntropicVector(n, h)


def permute_vars(values, image):
    """Relabel variables of a subset-indexed vector: new index of v is image[v].

    Accepts an EntropicVector or a length-2**n array (entropy vector or
    functional coefficients) and returns the same kind.  Applying the
    inverse image to a functional's coefficients gives the functional that
    sees a relabeled vector through the original's eyes:
    dot(coeffs, permute_vars(h, img)) == dot(permute_vars(coeffs, inv), h).
    """
    if isinstance(values, EntropicVector):
        return EntropicVector(values.n, permute_vars(values.values, image))
    values = np.asarray(values)
    n = len(image)
    if values.shape != (1 << n,):
        raise ValueError("vector length must be 2**len(image)")
    out = np.empty_like(values)
    for mask in range(1 << n):
        new = 0
        for v in range(n):
            if mask >> v & 1:
                new |= 1 << image[v]
        out[new] = values[mask]
    return out


def apply_functional(coeffs, v):
    """Exact dot product of integer coefficients with a subset vector."""
    total = 0
    for m, c in enumerate(coeffs):
        if c:
            total = total + c * v[m]
    return total


def cmi_coeffs(a_mask, b_mask, k_mask, n):
    """Coefficients of I(X_A; X_B | X_K) = h_AK + h_BK - h_K - h_ABK."""
    coeffs = [0] * (1 << n)
    coeffs[a_mask | k_mask] += 1
    coeffs[b_mask | k_mask] += 1
    coeffs[k_mask] -= 1
    coeffs[a_mask | b_mask | k_mask] -= 1
    return coeffs


def cmi(v, a_vars, b_vars, k_vars=()):
    """Conditional mutual information read off an entropic vector."""
    a, b, k = mask_of(a_vars), mask_of(b_vars), mask_of(k_vars)
    return apply_functional(cmi_coeffs(a, b, k, v.n), v)


def elemental_inequalities(n):
    """The minimal generating set of Shannon inequalities.

    One monotonicity per variable, h(all) - h(all minus i) >= 0, and one
    conditional independence bound per pair i<j and context K disjoint from
    both; n + C(n,2) * 2**(n-2) functionals in total.
    """
    full = (1 << n) - 1
    out = []
    for i in range(n):
        coeffs = [0] * (1 << n)
        coeffs[full] += 1
        coeffs[full ^ (1 << i)] -= 1
        out.append(("mono(%d)" % i, coeffs))
    for i in range(n):
        for j in range(i + 1, n):
            rest = [v for v in range(n) if v not in (i, j)]
            for bits in range(1 << len(rest)):
                k_mask = mask_of(rest[t] for t in range(len(rest)) if bits >> t & 1)
                name = "submod(%d,%d|%s)" % (i, j, sorted(mask_vars(k_mask)))
                out.append((name, cmi_coeffs(1 << i, 1 << j, k_mask, n)))
    return out


def shannon_violations(v, tol=1e-9):
    """Elemental inequalities violated by more than tol, as (name, value)."""
    out = []
    for name, coeffs in elemental_inequalities(v.n):
        val = apply_functional(coeffs, v)
        if val < -tol:
            out.append((name, val))
    return out


def in_shannon_cone(v, tol=1e-9):
    return not shannon_violations(v, tol)


INGLETON_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def ingleton_coeffs(i, j, n=4):
    """Coefficients of the Ingleton expression for the pair (i, j).

    With {k,l} the complementary pair, this is
    I(k;l|i) + I(k;l|j) + I(i;j) - I(k;l); nonnegative for linearly
    representable polymatroids, but not on all of the entropy region.
    """
    if n != 4:
        raise ValueError("the Ingleton expression is for four variables")
    if i == j or not (0 <= i < 4 and 0 <= j < 4):
        raise ValueError("need two distinct variables out of 0..3")
    k, l = (v for v in range(4) if v not in (i, j))
    coeffs = [0] * 16
    for part in (
        cmi_coeffs(1 << k, 1 << l, 1 << i, 4),
        cmi_coeffs(1 << k, 1 << l, 1 << j, 4),
        cmi_coeffs(1 << i, 1 << j, 0, 4),
    ):
        for m, c in enumerate(part):
            coeffs[m] += c
    for m, c in enumerate(cmi_coeffs(1 << k, 1 << l, 0, 4)):
        coeffs[m] -= c
    return coeffs


def ingleton(v, i, j):
    """Ingleton expression of a vector for an unordered pair of variables."""
    return apply_functional(ingleton_coeffs(i, j, v.n), v)


def ingleton_all(v):
    """All six pair values, ordered as INGLETON_PAIRS."""
    return [ingleton(v, i, j) for i, j in INGLETON_PAIRS]


def ingleton_score(v):
    """Minimum pair Ingleton value divided by the joint entropy.

    Negative scores witness vectors outside the linearly representable
    region; the normalization makes scores scale-free.
    """
    full = (1 << v.n) - 1
    h_all = v[full]
    if not h_all > 0:
        raise ValueError("joint entropy must be positive for a score")
    return min(ingleton_all(v)) / h_all


def zhang_yeung(v, roles=(0, 1, 2, 3)):
    """Slack of the non-Shannon inequality
    2 I(C;D) <= I(A;B) + I(A;CD) + 3 I(C;D|A) + I(C;D|B)
    for the given variable roles (A, B, C, D); nonnegative on entropic
    vectors, negative slack witnesses a point outside the closure.
    """
    a, b, c, d = roles
    return (
        cmi(v, [a], [b])
        + cmi(v, [a], [c, d])
        + 3 * cmi(v, [c], [d], [a])
        + cmi(v, [c], [d], [b])
        - 2 * cmi(v, [c], [d])
    )


def matus_slack(v, s, roles=(0, 1, 2, 3)):
    """Slack of the s-th member of an infinite non-Shannon family:

    s[I(A;B|C) + I(A;B|D) + I(C;D) - I(A;B)] + I(B;C|A)
      + s(s+1)/2 [I(A;C|B) + I(A;B|C)] >= 0.

    s = 1 coincides with the zhang_yeung slack under the role mapping
    (A,B,C,D) -> (C,D,A,B) with scale one.
    """
    if not (isinstance(s, int) and s >= 1):
        raise ValueError("the family is indexed by integer s >= 1")
    a, b, c, d = roles
    base = (
        cmi(v, [a], [b], [c])
        + cmi(v, [a], [b], [d])
        + cmi(v, [c], [d])
        - cmi(v, [a], [b])
    )
    return (
        s * base
        + cmi(v, [b], [c], [a])
        + (s * (s + 1) // 2) * (cmi(v, [a], [c], [b]) + cmi(v, [a], [b], [c]))
    )


@dataclass(frozen=True, order=True)
class Couple:
    """A conditional independence statement (i, j | K), 0-based, i <= j.

    i == j encodes functional dependence of variable i on K (zero
    conditional entropy); i < j encodes conditional independence.
    """

    i: int
    j: int
    K: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.i > self.j or self.i in self.K or self.j in self.K:
            raise ValueError("need i <= j with both outside K")
        object.__setattr__(self, "K", frozenset(self.K))

    def __repr__(self):
        ks = "".join(str(v) for v in sorted(self.K))
        if self.i == self.j:
            return "(%d|%s)" % (self.i, ks)
        return "(%d,%d|%s)" % (self.i, self.j, ks)


def couple_universe(n):
    """All couples on n variables; 18 for n=3 and 56 for n=4."""
    out = []
    for i in range(n):
        for j in range(i, n):
            rest = [v for v in range(n) if v not in (i, j)]
            for bits in range(1 << len(rest)):
                K = frozenset(rest[t] for t in range(len(rest)) if bits >> t & 1)
                out.append(Couple(i, j, K))
    return out


def couple_slack(v, couple):
    """Value of h_iK + h_jK - h_ijK - h_K; zero iff the couple holds."""
    k_mask = mask_of(couple.K)
    i_mask = 1 << couple.i
    j_mask = 1 << couple.j
    return (
        v[i_mask | k_mask]
        + v[j_mask | k_mask]
        - v[i_mask | j_mask | k_mask]
        - v[k_mask]
    )


def semimatroid_of(v, tol=0.0):
    """Couples whose slack vanishes on the vector (within tol)."""
    sats = set()
    for c in couple_universe(v.n):
        if abs(couple_slack(v, c)) <= tol:
            sats.add(c)
    return frozenset(sats)
