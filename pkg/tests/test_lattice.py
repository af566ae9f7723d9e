import random

import pytest

from scatterkit.errors import ConstraintConflict, DimensionMismatch
from scatterkit.lattice import (
    NOT_IN_P,
    Seed,
    SkewForm,
    degree,
    generic_point,
    dot,
    int_kernel_basis,
    pair,
    vadd,
)


@pytest.fixture
def a2_form():
    return SkewForm.from_rows([[0, 1], [-1, 0]])


def test_pair_matrix_entry(a2_form):
    assert pair(a2_form, (1, 0), (0, 1)) == 1


def test_pair_self_is_zero(a2_form):
    assert pair(a2_form, (3, -5), (3, -5)) == 0


def test_pair_antisymmetry_example(a2_form):
    assert pair(a2_form, (0, 1), (1, 0)) == -1


def test_pair_dimension_mismatch(a2_form):
    with pytest.raises(DimensionMismatch):
        pair(a2_form, (1, 0, 0), (0, 1))


def test_pair_bilinear_antisymmetric_random():
    rng = random.Random(0)
    form = SkewForm.from_rows([[0, 2, -1], [-2, 0, 3], [1, -3, 0]])
    for _ in range(1000):
        u, v, w = (
            tuple(rng.randint(-9, 9) for _ in range(3)) for _ in range(3)
        )
        a, b = rng.randint(-4, 4), rng.randint(-4, 4)
        left = pair(form, tuple(a * x + b * y for x, y in zip(u, v)), w)
        assert left == a * pair(form, u, w) + b * pair(form, v, w)
        assert pair(form, u, v) == -pair(form, v, u)


def test_form_must_be_antisymmetric():
    with pytest.raises(ValueError):
        SkewForm.from_rows([[0, 1], [1, 0]])


def test_degree_generator(a2):
    assert degree(a2, (1, 0)) == 1


def test_degree_free_generation(a2):
    assert degree(a2, (2, 3)) == 5


def test_degree_not_in_p(a2):
    assert degree(a2, (-1, 0)) is NOT_IN_P


def test_degree_respects_frozen_index():
    seed = Seed.make([[0, 1, 0], [-1, 0, 0], [0, 0, 0]], [0])
    assert degree(seed, (2, 0, 0)) == 2
    assert degree(seed, (1, 1, 0)) is NOT_IN_P
    assert degree(seed, (0, 0, 1)) is NOT_IN_P


def test_degree_additive(a2):
    rng = random.Random(1)
    for _ in range(200):
        m = (rng.randint(0, 6), rng.randint(0, 6))
        n = (rng.randint(0, 6), rng.randint(0, 6))
        assert degree(a2, vadd(m, n)) == degree(a2, m) + degree(a2, n)


def test_kronecker_seed_constructs_despite_imprimitive_pairings(kronecker2):
    # ⟨e₁,·⟩ has content 2; the predicate reports it, construction succeeds
    assert not kronecker2.has_primitive_pairings()
    assert not kronecker2.is_unimodular()


def test_a2_seed_advisory_predicates(a2):
    assert a2.has_primitive_pairings()
    assert a2.is_unimodular()


def test_generic_point_unconstrained():
    avoid = [(1, 0), (0, 1), (1, 1)]
    p = generic_point(2, avoid=avoid)
    for n in avoid:
        assert dot(n, p.coords) != 0
    assert p.avoided == tuple(avoid)


def test_generic_point_on_hyperplane():
    p = generic_point(2, constraint=(1, -1), avoid=[(1, 0)])
    assert p.coords[0] == p.coords[1] != 0
    assert dot((1, 0), p.coords) != 0


def test_generic_point_constraint_conflict():
    with pytest.raises(ConstraintConflict):
        generic_point(2, constraint=(1, 0), avoid=[(1, 0)])
    with pytest.raises(ConstraintConflict):
        generic_point(2, constraint=(1, 0), avoid=[(3, 0)])  # parallel normal


def test_generic_point_deterministic():
    a = generic_point(3, avoid=[(1, 1, 1), (1, -1, 0)])
    b = generic_point(3, avoid=[(1, 1, 1), (1, -1, 0)])
    assert a.coords == b.coords


def test_generic_point_exhaustive_exclusions():
    rng = random.Random(2)
    for _ in range(50):
        avoid = [
            tuple(rng.randint(-3, 3) for _ in range(2)) for _ in range(rng.randint(1, 6))
        ]
        avoid = [a for a in avoid if any(a)]
        p = generic_point(2, avoid=avoid)
        assert all(dot(a, p.coords) != 0 for a in avoid)


def test_int_kernel_basis_saturated():
    # kernel of (2, 4) is generated by (2, -1), not (4, -2)
    basis = int_kernel_basis([(2, 4)])
    assert len(basis) == 1
    g = basis[0]
    assert 2 * g[0] + 4 * g[1] == 0
    from math import gcd

    assert gcd(abs(g[0]), abs(g[1])) == 1
