"""Set partitions of {0, ..., k-1} in restricted-growth form.

A partition is stored as its restricted growth string (RGS): entry ``a`` of
``rgs`` is the block index of atom ``a``, with block indices assigned in
order of first appearance, so ``rgs[0] == 0`` and each entry exceeds the
running maximum of its prefix by at most one.  This labeling is canonical:
two partitions are equal iff their RGS tuples are equal, and lexicographic
order on RGS tuples is the enumeration order used throughout the package.

The text form writes one character per atom, digits then lowercase letters,
so ``"0011"`` is {{0,1},{2,3}} and ``"0123"`` is the partition into
singletons.
"""

from itertools import permutations

RGS_ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyz"


class SetPartition:
    """A set partition of {0, ..., k-1} with canonical block labels."""

    __slots__ = ("rgs",)

    def __init__(self, rgs):
        rgs = tuple(rgs)
        running = -1
        for b in rgs:
            if not 0 <= b <= running + 1:
                raise ValueError("not a restricted growth string: %r" % (rgs,))
            if b > running:
                running = b
        self.rgs = rgs

    @property
    def k(self):
        return len(self.rgs)

    @property
    def num_blocks(self):
        return max(self.rgs) + 1 if self.rgs else 0

    @property
    def blocks(self):
        """Blocks as a tuple of tuples, ordered by smallest member."""
        out = [[] for _ in range(self.num_blocks)]
        for atom, b in enumerate(self.rgs):
            out[b].append(atom)
        return tuple(tuple(blk) for blk in out)

    @classmethod
    def from_blocks(cls, blocks, k=None):
        atoms = sorted(a for blk in blocks for a in blk)
        if k is None:
            k = len(atoms)
        if atoms != list(range(k)):
            raise ValueError("blocks must partition 0..k-1 exactly")
        raw = [0] * k
        for i, blk in enumerate(blocks):
            for a in blk:
                raw[a] = i
        return cls(_canonical_labels(raw))

    @classmethod
    def singletons(cls, k):
        return cls(range(k))

    @classmethod
    def one_block(cls, k):
        return cls([0] * k)

    def to_text(self):
        return "".join(RGS_ALPHABET[b] for b in self.rgs)

    @classmethod
    def from_text(cls, text):
        return cls(RGS_ALPHABET.index(c) for c in text)

    def __eq__(self, other):
        return isinstance(other, SetPartition) and self.rgs == other.rgs

    def __hash__(self):
        return hash(self.rgs)

    def __lt__(self, other):
        return self.rgs < other.rgs

    def __le__(self, other):
        return self.rgs <= other.rgs

    def __repr__(self):
        return "SetPartition(%r)" % (self.to_text(),)


def _canonical_labels(raw):
    """Relabel arbitrary block ids by first appearance."""
    seen = {}
    return tuple(seen.setdefault(b, len(seen)) for b in raw)


def enumerate_partitions(k):
    """Yield every partition of {0,...,k-1} in lexicographic RGS order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    parts = [0] * k
    maxes = [0] * k
    while True:
        yield SetPartition(parts)
        i = k - 1
        while i > 0 and parts[i] > maxes[i - 1]:
            i -= 1
        if i == 0:
            return
        parts[i] += 1
        m = maxes[i - 1] if maxes[i - 1] >= parts[i] else parts[i]
        maxes[i] = m
        for j in range(i + 1, k):
            parts[j] = 0
            maxes[j] = m


def meet(p, q):
    """Coarsest common refinement: atoms share a block iff they do in both."""
    seen = {}
    return SetPartition(
        seen.setdefault(ab, len(seen)) for ab in zip(p.rgs, q.rgs)
    )


def refines(p, q):
    """True iff every block of p lies inside a single block of q."""
    img = {}
    for a, b in zip(p.rgs, q.rgs):
        if img.setdefault(a, b) != b:
            return False
    return True


class Permutation:
    """A bijection of {0,...,k-1}; image[a] is where atom a is sent."""

    __slots__ = ("image",)

    def __init__(self, image):
        image = tuple(image)
        if sorted(image) != list(range(len(image))):
            raise ValueError("not a permutation of 0..k-1: %r" % (image,))
        self.image = image

    @property
    def k(self):
        return len(self.image)

    @classmethod
    def identity(cls, k):
        return cls(range(k))

    def __call__(self, a):
        return self.image[a]

    def __mul__(self, other):
        """Composition: (self * other)(a) == self(other(a))."""
        return Permutation(self.image[b] for b in other.image)

    def inverse(self):
        inv = [0] * len(self.image)
        for a, b in enumerate(self.image):
            inv[b] = a
        return Permutation(inv)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.image == other.image

    def __hash__(self):
        return hash(self.image)

    def __repr__(self):
        return "Permutation(%r)" % (self.image,)


def all_permutations(k):
    """All k! permutations, in lexicographic order of their image tuples."""
    return [Permutation(img) for img in permutations(range(k))]


def apply_perm(perm, p):
    """Relabel atoms of a partition by a permutation.

    Atoms a and b share a block in the result iff their preimages share a
    block in p; the result is re-canonicalized.
    """
    raw = [0] * len(p.rgs)
    for atom, b in enumerate(p.rgs):
        raw[perm.image[atom]] = b
    return SetPartition(_canonical_labels(raw))
