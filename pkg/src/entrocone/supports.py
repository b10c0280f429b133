"""Canonical k-atom supports for n finite random variables.

A support is a set of n distinct partitions of the atom set {0,...,k-1},
one partition per variable (atoms in the same block are indistinguishable
to that variable), whose common meet is the partition into singletons (no
two atoms are globally redundant).  Supports that differ only by a
relabeling of atoms generate the same distributions up to nothing at all,
so enumeration is done up to the symmetric group S_k acting on atoms;
treating the support as a *set* of partitions likewise absorbs variable
permutations.

Constant variables (one-block partitions) add nothing to any entropy and
are excluded from enumeration; the degenerate k=1 case keeps its unique
partition.

Two enumeration backends are provided.  ``brute`` materializes every
n-subset of partitions, filters by the singleton-meet condition and
canonicalizes each survivor by explicit minimization over all k! atom
relabelings; orbit sizes fall out of the multiplicity counts.  It is the
oracle, and is kept to small k.  ``leiterspiel`` grows an orbit transversal
one subset size at a time: each canonical i-subset is extended by one
partition per orbit of its stabilizer, the extension is canonicalized, and
duplicates are merged; the meet filter runs only at the final size.  Both
report (canonical support, stabilizer order, orbit size) and must agree
exactly.
"""

import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .partitions import (
    SetPartition,
    Permutation,
    apply_perm,
    enumerate_partitions,
    meet,
)

MAX_ATOMS = 6
MAX_VARS = 6
LONG_RUN_ATOMS = 6
BRUTE_MAX_ATOMS = 5


class Support:
    """A set of distinct variable partitions with singleton meet.

    Partitions are kept sorted by RGS, one per variable; the support is a
    set, so variable order carries no meaning.  Atom indices, in contrast,
    are significant: probabilities attach to atoms.
    """

    __slots__ = ("partitions",)

    def __init__(self, parts):
        parts = tuple(sorted(parts))
        if not parts:
            raise ValueError("a support needs at least one partition")
        k = parts[0].k
        if any(p.k != k for p in parts):
            raise ValueError("all partitions must share the same atom count")
        for a, b in zip(parts, parts[1:]):
            if a == b:
                raise ValueError("duplicate variable partition %r" % (a,))
        if not _meet_is_singletons(parts):
            raise ValueError("the meet of the partitions must be singletons")
        self.partitions = parts

    @property
    def k(self):
        return self.partitions[0].k

    @property
    def n(self):
        return len(self.partitions)

    @classmethod
    def from_rgs(cls, texts):
        return cls(SetPartition.from_text(t) for t in texts)

    def to_rgs(self):
        return [p.to_text() for p in self.partitions]

    @classmethod
    def from_outcomes(cls, rows):
        """Build a support from explicit outcomes, one row per atom.

        Column v lists the value variable v takes on each atom; atoms with
        equal values fall in the same block of that variable's partition.
        """
        k = len(rows)
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ValueError("ragged outcome rows")
        parts = []
        for v in range(n):
            col = [rows[a][v] for a in range(k)]
            seen = {}
            parts.append(SetPartition(seen.setdefault(x, len(seen)) for x in col))
        return cls(parts)

    def apply_perm(self, perm):
        return Support(apply_perm(perm, p) for p in self.partitions)

    def __eq__(self, other):
        return isinstance(other, Support) and self.partitions == other.partitions

    def __hash__(self):
        return hash(self.partitions)

    def __lt__(self, other):
        return tuple(p.rgs for p in self.partitions) < tuple(
            p.rgs for p in other.partitions
        )

    def __repr__(self):
        return "Support(%s)" % (", ".join(self.to_rgs()),)


def _meet_is_singletons(parts):
    m = parts[0]
    for p in parts[1:]:
        m = meet(m, p)
        if m.num_blocks == m.k:
            return True
    return m.num_blocks == m.k


def is_valid_support(parts):
    """True iff the partitions are pairwise distinct with singleton meet."""
    parts = list(parts)
    if not parts:
        return False
    if len(set(parts)) != len(parts):
        return False
    if any(p.k != parts[0].k for p in parts):
        return False
    return _meet_is_singletons(parts)


def canonical_form(support):
    """Least atom-relabeling of a support, with a permutation achieving it.

    Minimizes the sorted tuple of RGS tuples over all k! relabelings;
    returns ``(canonical, g)`` where ``support.apply_perm(g) == canonical``.
    """
    k = support.k
    best = None
    best_img = None
    for img in permutations(range(k)):
        relabeled = []
        for p in support.partitions:
            raw = [0] * k
            for atom, b in enumerate(p.rgs):
                raw[img[atom]] = b
            seen = {}
            relabeled.append(tuple(seen.setdefault(b, len(seen)) for b in raw))
        relabeled.sort()
        key = tuple(relabeled)
        if best is None or key < best:
            best = key
            best_img = img
    canon = Support(SetPartition(r) for r in best)
    return canon, Permutation(best_img)


@dataclass(frozen=True)
class OrbitRecord:
    """One atom-relabeling class: canonical support plus orbit data."""

    support: Support
    stabilizer_order: int
    orbit_size: int

    def __post_init__(self):
        if self.stabilizer_order * self.orbit_size != math.factorial(self.support.k):
            raise ValueError("stabilizer order times orbit size must be k!")


def _ground_set(k):
    """Non-constant partitions of {0..k-1} in lex RGS order (all of them at k=1)."""
    parts = list(enumerate_partitions(k))
    if k >= 2:
        parts = [p for p in parts if p.num_blocks >= 2]
    return parts


def _action_table(k, parts):
    """action[g, i] = index of parts[i] after relabeling by permutation g.

    Permutations are indexed in lexicographic order of their image tuples,
    matching ``all_permutations``.
    """
    index = {p.rgs: i for i, p in enumerate(parts)}
    nparts = len(parts)
    table = np.empty((math.factorial(k), nparts), dtype=np.int16)
    for g, img in enumerate(permutations(range(k))):
        row = table[g]
        for i, p in enumerate(parts):
            raw = [0] * k
            for atom, b in enumerate(p.rgs):
                raw[img[atom]] = b
            seen = {}
            rgs = tuple(seen.setdefault(b, len(seen)) for b in raw)
            row[i] = index[rgs]
    return table


class _Canonicalizer:
    """Canonicalize index subsets under a tabled group action.

    The canonical form of a subset is the lexicographically least sorted
    index tuple over its orbit.  The number of permutations achieving the
    minimum equals the stabilizer order of the canonical representative.
    """

    def __init__(self, table):
        self.table = table
        self.nperm = table.shape[0]
        nparts = table.shape[1]
        self.bits = max(1, (max(nparts - 1, 1)).bit_length())

    def _weights(self, m):
        return np.array(
            [1 << (self.bits * (m - 1 - j)) for j in range(m)], dtype=np.int64
        )

    def __call__(self, subset):
        """Return (canonical tuple, stabilizer order, achieving-perm mask)."""
        rows = np.sort(self.table[:, subset], axis=1)
        m = rows.shape[1]
        if self.bits * m <= 63:
            packed = rows.astype(np.int64) @ self._weights(m)
            mask = packed == packed.min()
        else:
            order = np.lexsort(rows.T[::-1])
            mask = (rows == rows[order[0]]).all(axis=1)
        gi = int(np.argmax(mask))
        return tuple(int(x) for x in rows[gi]), int(mask.sum()), mask


def _check_limits(n, k, backend, long_run):
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    if n > MAX_VARS:
        raise ValueError("n=%d exceeds the supported limit n<=%d" % (n, MAX_VARS))
    if k > MAX_ATOMS:
        raise ValueError("k=%d exceeds the enumeration capacity k<=%d" % (k, MAX_ATOMS))
    if backend == "brute":
        if k > BRUTE_MAX_ATOMS and not (k == 6 and n <= 4 and long_run):
            raise ValueError(
                "brute backend handles k<=%d (k=6 needs n<=4 and long_run=True)"
                % (BRUTE_MAX_ATOMS,)
            )
    elif k == LONG_RUN_ATOMS and not long_run:
        raise ValueError("k=6 enumeration is gated behind long_run=True")


def enumerate_supports(n, k, backend="leiterspiel", long_run=False):
    """All atom-relabeling classes of valid n-variable k-atom supports.

    Returns a list of OrbitRecord sorted by canonical support; the two
    backends return identical lists.
    """
    _check_limits(n, k, backend, long_run)
    if k == 1:
        if n == 1:
            sup = Support([SetPartition((0,))])
            return [OrbitRecord(sup, 1, 1)]
        return []
    parts = _ground_set(k)
    if n > len(parts):
        return []
    if backend == "brute":
        records = _enumerate_brute(n, k, parts)
    elif backend == "leiterspiel":
        records = _enumerate_leiterspiel(n, k, parts)
    else:
        raise ValueError("unknown backend %r" % (backend,))
    records.sort(key=lambda r: tuple(p.rgs for p in r.support.partitions))
    return records


def _meet_table(k, parts):
    index = {p.rgs: i for i, p in enumerate(parts)}
    npart = len(parts)
    table = np.empty((npart, npart), dtype=np.int16)
    for i, p in enumerate(parts):
        table[i, i] = i
        for j in range(i + 1, npart):
            m = meet(p, parts[j])
            table[i, j] = table[j, i] = index[m.rgs]
    return table


def _enumerate_brute(n, k, parts):
    meet_tab = _meet_table(k, parts)
    singleton = len(parts) - 1  # singletons partition is lex-greatest
    canon = _Canonicalizer(_action_table(k, parts))
    counts = {}
    for combo in combinations(range(len(parts)), n):
        m = combo[0]
        for i in combo[1:]:
            m = meet_tab[m, i]
            if m == singleton:
                break
        else:
            if m != singleton:
                continue
        key, _, _ = canon(combo)
        counts[key] = counts.get(key, 0) + 1
    order = math.factorial(k)
    records = []
    for key, orbit in counts.items():
        if order % orbit:
            raise AssertionError("orbit size %d does not divide %d!" % (orbit, order))
        sup = Support(parts[i] for i in key)
        records.append(OrbitRecord(sup, order // orbit, orbit))
    return records


def _enumerate_leiterspiel(n, k, parts):
    """Incremental transversal: canonical i-subsets extended one size at a time."""
    table = _action_table(k, parts)
    canon = _Canonicalizer(table)
    npart = len(parts)
    order = math.factorial(k)

    level = {}
    for i in range(npart):
        key, _, _ = canon((i,))
        level[key] = None
    for _size in range(1, n):
        nxt = {}
        for subset in level:
            _, stab_order, stab_mask = canon(subset)
            in_subset = np.zeros(npart, dtype=bool)
            in_subset[list(subset)] = True
            if stab_order == 1:
                candidates = np.flatnonzero(~in_subset)
            else:
                reps = table[stab_mask].min(axis=0)
                is_rep = np.zeros(npart, dtype=bool)
                is_rep[reps] = True
                candidates = np.flatnonzero(is_rep & ~in_subset)
            for p in candidates:
                extended = tuple(sorted(subset + (int(p),)))
                key, _, _ = canon(extended)
                nxt[key] = None
        level = nxt

    meet_tab = _meet_table(k, parts)
    singleton = npart - 1
    records = []
    for subset in level:
        m = subset[0]
        for i in subset[1:]:
            m = meet_tab[m, i]
            if m == singleton:
                break
        if m != singleton:
            continue
        _, stab_order, _ = canon(subset)
        sup = Support(parts[i] for i in subset)
        records.append(OrbitRecord(sup, stab_order, order // stab_order))
    return records


def census(n_values, k_values, backend="leiterspiel", long_run=False):
    """Count support classes for each (n, k) cell; dict keyed by the pair."""
    out = {}
    for n in n_values:
        for k in k_values:
            out[(n, k)] = len(enumerate_supports(n, k, backend, long_run))
    return out
