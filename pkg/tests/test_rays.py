"""The 15 pyramid rays: exact rank, Ingleton values, elemental feasibility."""

from fractions import Fraction

import pytest

from entrocone.entropy import elemental_inequalities, ingleton_coeffs
from entrocone.rays import (
    PYRAMID_RAY_NAMES,
    RayVector,
    boundary_rays,
    exact_rank,
    pyramid_rays,
    ray_f,
    ray_r,
)


def _exact_apply(coeffs, ray):
    # rational evaluation; functional coefficients are small integers
    return sum(Fraction(int(round(c))) * x for c, x in zip(coeffs, ray.values))


def test_ray_set_is_linearly_independent():
    rays = pyramid_rays()
    assert tuple(rays) == PYRAMID_RAY_NAMES
    rows = [r.compact() for r in rays.values()]
    assert exact_rank(rows) == 15


def test_apex_carries_the_only_negative_ingleton():
    coeffs = ingleton_coeffs(2, 3)
    values = {name: _exact_apply(coeffs, ray) for name, ray in pyramid_rays().items()}
    assert values["f34"] == -1
    for name, val in values.items():
        if name != "f34":
            assert val == 0, name


def test_all_rays_satisfy_elemental_inequalities_exactly():
    rays = pyramid_rays()
    for label, coeffs in elemental_inequalities(4):
        for name, ray in rays.items():
            assert _exact_apply(coeffs, ray) >= 0, (label, name)


def test_boundary_rays_exclude_apex():
    names = set(boundary_rays())
    assert "f34" not in names
    assert len(names) == 14


def test_ray_constructors_are_rank_functions():
    r = ray_r((1, 2), 1)
    # r^K_t: min(t, |W ∩ K^c| + t·[W ⊄ K]) pattern gives integer entries
    assert all(x == int(x) for x in r.values)
    f = ray_f(3, 4)
    assert f.values[0] == 0
    with_scale = f.scaled(Fraction(1, 2))
    assert with_scale.values[-1] == f.values[-1] / 2


def test_ray_vector_validation():
    with pytest.raises(ValueError):
        RayVector(2, [1, 1, 1, 2])  # empty-set entry must be zero
    with pytest.raises(ValueError):
        RayVector(2, [0, 1, 1])  # wrong length
