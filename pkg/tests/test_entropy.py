"""Entropy vectors: marginalization oracle, inequalities, semimatroids."""

import math

import numpy as np
import pytest

from entrocone.entropy import (
    Couple,
    Distribution,
    EntropicVector,
    INGLETON_PAIRS,
    cmi,
    couple_slack,
    couple_universe,
    elemental_inequalities,
    entropic_vector,
    in_shannon_cone,
    ingleton,
    ingleton_all,
    ingleton_score,
    matus_slack,
    permute_vars,
    semimatroid_of,
    shannon_violations,
    zhang_yeung,
)
from entrocone.supports import Support, enumerate_supports


def _oracle_vector(support, probs):
    """Joint entropies by materializing outcome tuples, no meet machinery."""
    n, k = support.n, support.k
    h = [0.0] * (1 << n)
    for mask in range(1, 1 << n):
        marg = {}
        for a in range(k):
            key = tuple(
                support.partitions[v].rgs[a] for v in range(n) if mask >> v & 1
            )
            marg[key] = marg.get(key, 0.0) + probs[a]
        h[mask] = -sum(p * math.log2(p) for p in marg.values() if p > 0)
    return np.array(h)


def _random_distribution(rng, n=4, k=5):
    records = enumerate_supports(n, k)
    support = records[rng.integers(len(records))].support
    probs = rng.dirichlet(np.ones(k))
    probs = np.maximum(probs, 1e-9)
    return Distribution(support, probs / probs.sum())


def test_meet_entropies_match_materialized_marginals():
    rng = np.random.default_rng(7)
    for _ in range(40):
        dist = _random_distribution(rng, 4, int(rng.integers(3, 6)))
        got = entropic_vector(dist).values
        want = _oracle_vector(dist.support, dist.probs)
        assert np.abs(got - want).max() < 1e-12


def test_entropic_vector_shape_and_base_cases():
    sup = Support.from_outcomes(((0, 0), (0, 1), (1, 0), (1, 1)))
    v = entropic_vector(Distribution(sup, np.full(4, 0.25)))
    # two independent fair bits
    assert v[0] == 0.0
    assert abs(v[1] - 1.0) < 1e-12 and abs(v[2] - 1.0) < 1e-12
    assert abs(v[3] - 2.0) < 1e-12
    with pytest.raises(ValueError):
        EntropicVector(2, [0.5, 1.0, 1.0, 2.0])


def test_elemental_inequality_counts():
    assert len(elemental_inequalities(3)) == 9
    assert len(elemental_inequalities(4)) == 28
    rng = np.random.default_rng(11)
    for _ in range(25):
        dist = _random_distribution(rng)
        v = entropic_vector(dist)
        assert in_shannon_cone(v)
        assert shannon_violations(v) == []


def test_ingleton_matches_explicit_subset_form():
    # I(k;l|i) + I(k;l|j) + I(i;j) - I(k;l) expanded into joint entropies
    rng = np.random.default_rng(3)
    for _ in range(30):
        dist = _random_distribution(rng)
        v = entropic_vector(dist)
        for i, j in INGLETON_PAIRS:
            k, l = (x for x in range(4) if x not in (i, j))
            direct = (
                cmi(v, [k], [l], [i])
                + cmi(v, [k], [l], [j])
                + cmi(v, [i], [j])
                - cmi(v, [k], [l])
            )
            assert abs(ingleton(v, i, j) - direct) < 1e-11
        assert abs(min(ingleton_all(v)) - ingleton_score(v) * v[15]) < 1e-11


def test_permute_vars_tracks_relabeled_distribution():
    rng = np.random.default_rng(5)
    dist = _random_distribution(rng)
    v = entropic_vector(dist)
    image = (2, 0, 3, 1)
    # place old variable i at position image[i] and recompute marginals
    # from scratch (Support's set semantics would forget the order)
    placed = [None] * 4
    for old, new in enumerate(image):
        placed[new] = dist.support.partitions[old]
    want = np.zeros(16)
    for mask in range(1, 16):
        marg = {}
        for a in range(dist.support.k):
            key = tuple(placed[j].rgs[a] for j in range(4) if mask >> j & 1)
            marg[key] = marg.get(key, 0.0) + dist.probs[a]
        want[mask] = -sum(p * math.log2(p) for p in marg.values() if p > 0)
    assert np.abs(permute_vars(v, image).values - want).max() < 1e-12


def test_matus_reduces_to_zhang_yeung_at_s_one():
    rng = np.random.default_rng(13)
    for _ in range(200):
        v = EntropicVector.from_compact(4, rng.uniform(0.0, 3.0, 15))
        lhs = matus_slack(v, 1, roles=(0, 1, 2, 3))
        rhs = zhang_yeung(v, roles=(2, 3, 0, 1))
        assert abs(lhs - rhs) < 1e-12


def test_matus_family_rejects_bad_index():
    v = EntropicVector.from_compact(4, np.ones(15))
    with pytest.raises(ValueError):
        matus_slack(v, 0)
    with pytest.raises(ValueError):
        matus_slack(v, 1.5)


def test_couple_universe_sizes():
    assert len(couple_universe(3)) == 18
    assert len(couple_universe(4)) == 56


def test_semimatroid_reads_off_vanishing_couples():
    # two independent bits plus their XOR: pairwise independent triple
    sup = Support.from_outcomes(((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)))
    v = entropic_vector(Distribution(sup, np.full(4, 0.25)))
    sm = semimatroid_of(v, tol=1e-12)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        assert Couple(i, j) in sm
        assert abs(couple_slack(v, Couple(i, j))) < 1e-12
    # any two determine the third
    assert Couple(2, 2, frozenset({0, 1})) in sm
    assert Couple(0, 1, frozenset({2})) not in sm


def test_zero_vector_semimatroid_is_everything():
    v = EntropicVector(3, np.zeros(8))
    assert semimatroid_of(v) == set(couple_universe(3))
