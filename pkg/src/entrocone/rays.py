"""Integer-valued extreme rays of the four-variable Shannon cone.

These polymatroid rank functions span the pyramid over the face of the
Shannon outer bound cut out by one Ingleton expression; 14 of the 15 lie on
the Ingleton hyperplane and one (``f34``) sits strictly on its negative
side.  Values are exact Fractions so rank and face-membership checks carry
no floating error.  Variable labels in ray names are 1-based; the subset
API is the same bitmask convention as everywhere else (bit v = variable
v, 0-based).
"""

from fractions import Fraction

import numpy as np

from .entropy import EntropicVector


class RayVector:
    """Exact rational vector over subsets of n variables."""

    __slots__ = ("n", "values", "name")

    def __init__(self, n, values, name=""):
        values = tuple(Fraction(x) for x in values)
        if len(values) != 1 << n:
            raise ValueError("need exactly 2**n entries, empty set first")
        if values[0] != 0:
            raise ValueError("the empty-set entry must be zero")
        self.n = n
        self.values = values
        self.name = name

    def __getitem__(self, mask):
        return self.values[mask]

    def compact(self):
        return self.values[1:]

    def to_entropic(self):
        return EntropicVector(self.n, [float(x) for x in self.values])

    def scaled(self, factor):
        factor = Fraction(factor)
        return RayVector(self.n, [x * factor for x in self.values], self.name)

    def __eq__(self, other):
        return (
            isinstance(other, RayVector)
            and self.n == other.n
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.n, self.values))

    def __repr__(self):
        return "RayVector(%s, %s)" % (self.name or self.n, self.values[1:])


def _popcount(mask):
    return bin(mask).count("1")


def _from_rank(fun, n, name):
    return RayVector(n, [fun(m) for m in range(1 << n)], name)


def _label_mask(labels):
    m = 0
    for lab in labels:
        m |= 1 << (int(lab) - 1)
    return m


def ray_r(K, t, n=4):
    """Rank function W -> min(t, |W \\ K|)."""
    k_mask = _label_mask(K)
    name = "r%d_%s" % (t, "".join(str(x) for x in sorted(K)) or "0")
    return _from_rank(lambda m: min(t, _popcount(m & ~k_mask)), n, name)


def ray_g2(i, n=4):
    """Rank function equal to 2 on {i} and min(2, |W|) elsewhere."""
    im = 1 << (i - 1)
    return _from_rank(lambda m: 2 if m == im else min(2, _popcount(m)), n, "g2_%d" % i)


def ray_g3(i, n=4):
    """Rank function |W| when i is absent, min(3, |W|+1) when present."""
    im = 1 << (i - 1)
    return _from_rank(
        lambda m: min(3, _popcount(m) + 1) if m & im else _popcount(m), n, "g3_%d" % i
    )


def ray_f(i, j, n=4):
    """The non-representable pyramid apex for the pair (i, j).

    Takes value 3 on every 2-subset except {i,j} and min(4, 2|W|)
    elsewhere; its (i,j) Ingleton value is -1.
    """
    if n != 4:
        raise ValueError("defined for four variables")
    k, l = (v for v in (1, 2, 3, 4) if v not in (i, j))
    pairs = {
        _label_mask(p) for p in ((i, k), (j, k), (i, l), (j, l), (k, l))
    }
    return _from_rank(
        lambda m: 3 if m in pairs else min(4, 2 * _popcount(m)), n, "f%d%d" % (i, j)
    )


PYRAMID_RAY_NAMES = (
    "f34",
    "r1_123",
    "r1_124",
    "r1_134",
    "r1_234",
    "r1_0",
    "r3_0",
    "r1_3",
    "r1_4",
    "r1_13",
    "r1_23",
    "r1_14",
    "r1_24",
    "r2_1",
    "r2_2",
)


def pyramid_rays():
    """The 15 extreme rays spanning the pyramid, apex first.

    The 14 non-apex rays satisfy the (3,4) Ingleton expression with
    equality; together the 15 are linearly independent, so the pyramid is a
    simplicial cone.
    """
    rays = [ray_f(3, 4)]
    for K in ((1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)):
        rays.append(ray_r(K, 1))
    rays.append(ray_r((), 1))
    rays.append(ray_r((), 3))
    for K in ((3,), (4,), (1, 3), (2, 3), (1, 4), (2, 4)):
        rays.append(ray_r(K, 1))
    rays.append(ray_r((1,), 2))
    rays.append(ray_r((2,), 2))
    return dict(zip(PYRAMID_RAY_NAMES, rays))


def boundary_rays():
    """The 14 pyramid rays on the Ingleton hyperplane (everything but the apex)."""
    rays = pyramid_rays()
    return {name: rays[name] for name in PYRAMID_RAY_NAMES[1:]}


def ray_matrix(rays):
    """Float matrix of compact coordinates, one ray per row."""
    return np.array([[float(x) for x in r.compact()] for r in rays])


def exact_rank(rows):
    """Rank over the rationals of a list of coordinate rows."""
    mat = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, len(mat)):
            if mat[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        inv = 1 / mat[rank][col]
        mat[rank] = [x * inv for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col] != 0:
                factor = mat[r][col]
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank
