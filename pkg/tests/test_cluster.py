import pytest

from scatterkit.cluster import (
    ClusterSeed,
    LaurentPolynomial,
    compare_exchange,
    exchange_binomial,
    initial_variables,
    laurent_to_theta_vector,
    mutate_matrix,
    mutate_variable,
    mutation_class,
)
from scatterkit.errors import InexactDivision
from scatterkit.scattering import ScatteringDiagram


@pytest.fixture
def a2_cluster():
    return ClusterSeed.make([[0, 1], [-1, 0]], [0, 1])


def test_mutate_matrix_a2(a2_cluster):
    assert mutate_matrix(a2_cluster, 0).matrix == ((0, -1), (1, 0))


def test_mutate_matrix_involution(a2_cluster):
    rng_matrices = [
        [[0, 1], [-1, 0]],
        [[0, 2], [-2, 0]],
        [[0, 2, -2], [-2, 0, 2], [2, -2, 0]],
    ]
    for rows in rng_matrices:
        s = ClusterSeed.make(rows, range(len(rows)))
        for k in s.unfrozen:
            assert mutate_matrix(mutate_matrix(s, k), k).matrix == s.matrix


def test_mutate_matrix_markov():
    s = ClusterSeed.make([[0, 2, -2], [-2, 0, 2], [2, -2, 0]], [0, 1, 2])
    m = mutate_matrix(s, 0).matrix
    # b'_23 = 2 + sgn(b_21)·max(b_21·b_13, 0) = 2 - 4 = -2
    assert m[1][2] == -2
    for i in range(3):
        for j in range(3):
            assert m[i][j] + m[j][i] == 0


def test_mutate_frozen_rejected():
    s = ClusterSeed.make([[0, 1], [-1, 0]], [0])
    with pytest.raises(ValueError):
        mutate_matrix(s, 1)
    with pytest.raises(ValueError):
        mutate_variable(s, initial_variables(s), 1)


def test_mutate_variable_a2_step(a2_cluster):
    vs = mutate_variable(a2_cluster, initial_variables(a2_cluster), 0)
    assert vs[0].table == {(-1, 0): 1, (-1, 1): 1}  # (1 + x2)/x1
    assert vs[1].table == {(0, 1): 1}


def test_mutate_variable_involution(a2_cluster):
    vs0 = initial_variables(a2_cluster)
    vs1 = mutate_variable(a2_cluster, vs0, 0)
    s1 = mutate_matrix(a2_cluster, 0)
    vs2 = mutate_variable(s1, vs1, 0)
    assert vs2 == vs0


def test_a2_pentagon_periodicity(a2_cluster):
    variables, relations = mutation_class(a2_cluster)
    assert len(variables) == 5
    expected = [
        {(1, 0): 1},
        {(0, 1): 1},
        {(-1, 0): 1, (-1, 1): 1},
        {(-1, -1): 1, (-1, 0): 1, (0, -1): 1},
        {(0, -1): 1, (1, -1): 1},
    ]
    got = sorted(sorted(v.table.items()) for v in variables)
    want = sorted(sorted(e.items()) for e in expected)
    assert got == want
    assert len(relations) == 5


def test_mutation_sequence_returns_initial_cluster(a2_cluster):
    # μ1 μ2 μ1 μ2 μ1 restores the initial cluster up to the index swap
    seed, vars_ = a2_cluster, initial_variables(a2_cluster)
    for k in (0, 1, 0, 1, 0):
        vars_ = mutate_variable(seed, vars_, k)
        seed = mutate_matrix(seed, k)
    assert {v for v in vars_} == {v for v in initial_variables(a2_cluster)}
    assert vars_ != initial_variables(a2_cluster)  # indices swapped, not fixed


def test_laurent_positivity_depth6(a2_cluster):
    for rows in ([[0, 1], [-1, 0]], [[0, 2], [-2, 0]]):
        s = ClusterSeed.make(rows, [0, 1])
        variables, _ = mutation_class(s, depth=6)
        for v in variables:
            assert v.is_positive()


def test_frozen_variable_never_in_denominator():
    s = ClusterSeed.make([[0, 1, -1], [-1, 0, 1], [1, -1, 0]], [0, 1])
    variables, _ = mutation_class(s, depth=4)
    for v in variables:
        for e, _c in v.terms:
            assert e[2] >= 0  # the frozen variable x3 never acquires a pole


def test_exact_division_error():
    one_plus = LaurentPolynomial.make(2, {(0, 0): 1, (1, 0): 1})
    x2 = LaurentPolynomial.variable(2, 1)
    with pytest.raises(InexactDivision):
        one_plus.exact_divide(x2.add(LaurentPolynomial.one(2)).add(one_plus))


def test_division_by_monomial_always_exact():
    one_plus = LaurentPolynomial.make(2, {(0, 0): 1, (1, 0): 1})
    x2 = LaurentPolynomial.variable(2, 1)
    q = one_plus.exact_divide(x2)
    assert q.table == {(0, -1): 1, (1, -1): 1}


def test_exact_division_roundtrip():
    f = LaurentPolynomial.make(2, {(-1, 0): 1, (-1, 1): 2, (0, 2): 3})
    g = LaurentPolynomial.make(2, {(1, -1): 2, (0, 0): 5})
    assert f.mul(g).exact_divide(g) == f


def test_laurent_to_theta_vector(a2, a2_cluster):
    variables, _ = mutation_class(a2_cluster)
    ms = {laurent_to_theta_vector(a2, v) for v in variables}
    assert ms == {(1, 0), (0, 1), (-1, 0), (0, -1), (-1, -1)}


def test_compare_exchange_a2(a2, a2_diagram, a2_cluster):
    rep = compare_exchange(a2_diagram, a2_cluster, 4)
    assert rep["ok"]
    assert len(rep["relations"]) == 5
    assert all(item["match"] for item in rep["relations"])
    assert all(item["oracle_identity"] for item in rep["relations"])
    assert all(v["theta_matches"] for v in rep["variables"])


def test_compare_exchange_detects_missing_wall(a2, a2_diagram, a2_cluster):
    removed = ScatteringDiagram(a2, a2_diagram.order, a2_diagram.initial_walls)
    rep = compare_exchange(removed, a2_cluster, 4)
    assert not rep["ok"]
    assert any(not item["match"] for item in rep["relations"])


def test_compare_exchange_empty_seed(torus_seed, torus_diagram):
    cs = ClusterSeed.make(torus_seed.form.matrix, [])
    rep = compare_exchange(torus_diagram, cs, 4)
    assert rep == {"relations": [], "variables": [], "ok": True}


def test_exchange_binomial_shape(a2_cluster):
    pos, neg = exchange_binomial(a2_cluster, initial_variables(a2_cluster), 0)
    tables = {tuple(sorted(pos.table.items())), tuple(sorted(neg.table.items()))}
    assert tables == {(((0, 1), 1),), (((0, 0), 1),)}  # {x2, 1}
