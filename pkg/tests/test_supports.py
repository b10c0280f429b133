"""Support enumeration: census table, backend agreement, canonical forms."""

import math

import pytest

from entrocone.partitions import SetPartition, all_permutations
from entrocone.supports import (
    Support,
    canonical_form,
    census,
    enumerate_supports,
    is_valid_support,
)

# non-isomorphic (vars, atoms) class counts
EXPECTED = {
    (2, 3): 2,
    (2, 4): 8,
    (2, 5): 18,
    (3, 3): 2,
    (3, 4): 31,
    (3, 5): 256,
    (4, 3): 1,
    (4, 4): 75,
    (5, 4): 132,
}


def test_census_counts():
    for (n, k), want in EXPECTED.items():
        assert len(enumerate_supports(n, k)) == want, (n, k)


def test_backends_agree_on_small_cells():
    for (n, k) in ((2, 3), (2, 4), (3, 3), (3, 4), (4, 3), (4, 4), (5, 4)):
        lad = enumerate_supports(n, k, backend="leiterspiel")
        raw = enumerate_supports(n, k, backend="brute")
        assert [r.support for r in lad] == [r.support for r in raw]
        assert [r.orbit_size for r in lad] == [r.orbit_size for r in raw]


def test_enumerated_supports_are_valid_and_canonical():
    for rec in enumerate_supports(3, 4):
        sup = rec.support
        assert is_valid_support(sup.partitions)
        assert canonical_form(sup)[0] == sup
        assert rec.stabilizer_order * rec.orbit_size == math.factorial(sup.k)


def test_constant_variables_valid_but_not_enumerated():
    # a one-block partition is a legal set member (it is distinct and the
    # meet is still singletons) but adds nothing to any entropy, so the
    # enumeration never emits supports containing one
    parts = (SetPartition((0, 0, 0)), SetPartition((0, 1, 2)))
    assert is_valid_support(parts)
    for rec in enumerate_supports(2, 3):
        for p in rec.support.partitions:
            assert max(p.rgs) > 0


def test_meet_must_separate_atoms():
    # two atoms never separated by any variable collapse to a smaller support
    parts = (SetPartition((0, 0, 1)), SetPartition((0, 0, 1)))
    assert not is_valid_support(parts)


def test_canonical_form_is_orbit_invariant():
    sup = Support.from_rgs(["0001", "0010", "0101", "0110"])
    canon = canonical_form(sup)[0]
    for g in all_permutations(4):
        relabeled = sup.apply_perm(g)
        assert canonical_form(relabeled)[0] == canon


def test_canonical_form_reports_witness_permutation():
    sup = Support.from_rgs(["0011", "0101", "0110", "0001"])
    canon, perm = canonical_form(sup)
    assert sup.apply_perm(perm) == canon


def test_from_outcomes_sorts_columns_into_rgs():
    rows = ((0, 0, 0, 0), (0, 1, 1, 0), (1, 0, 1, 0), (1, 1, 1, 1))
    sup = Support.from_outcomes(rows)
    texts = sorted(p.to_text() for p in sup.partitions)
    assert texts == [p.to_text() for p in sup.partitions]
    # round trip through rgs text
    assert Support.from_rgs(sup.to_rgs()) == sup


def test_capacity_limits():
    with pytest.raises(ValueError):
        enumerate_supports(4, 6)  # k=6 sits behind long_run
    with pytest.raises(ValueError):
        enumerate_supports(4, 7, long_run=True)
    with pytest.raises(ValueError):
        enumerate_supports(4, 6, backend="brute", long_run=False)


def test_census_helper_table():
    table = census((2, 3), (3, 4))
    assert table[(2, 3)] == 2
    assert table[(3, 4)] == 31
