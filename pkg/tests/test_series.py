import random

import pytest

from scatterkit.errors import NonUnitConstantTerm, OrderMismatch
from scatterkit.series import TruncatedMonoidSeries, WallFunction, power


def mono(seed, exp, order, coeff=1):
    return TruncatedMonoidSeries.monomial(seed, exp, order, coeff)


def one_plus(seed, exp, order):
    return TruncatedMonoidSeries.make(seed, (0, 0), {(0, 0): 1, exp: 1}, order)


def test_multiply_binomial_expansion(a2):
    f = one_plus(a2, (1, 0), 2)
    g = one_plus(a2, (0, 1), 2)
    prod = f.mul(g)
    assert prod.term_dict == {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1}


def test_multiply_truncation_drops(a2):
    f = one_plus(a2, (1, 0), 1)
    prod = f.mul(f)
    assert prod.term_dict == {(0, 0): 1, (1, 0): 2}


def test_multiply_base_shifts_cancel(a2):
    a = mono(a2, (-1, 0), 3)
    b = mono(a2, (1, 0), 3)
    prod = a.mul(b)
    assert prod.base == (0, 0)
    assert prod.is_one()


def test_multiply_order_mismatch(a2):
    with pytest.raises(OrderMismatch):
        one_plus(a2, (1, 0), 2).mul(one_plus(a2, (1, 0), 3))


def test_power_geometric_inverse(a2):
    f = one_plus(a2, (1, 0), 3)
    inv = f.power(-1)
    assert inv.term_dict == {(0, 0): 1, (1, 0): -1, (2, 0): 1, (3, 0): -1}


def test_power_square_truncated(a2):
    f = one_plus(a2, (1, 0), 1)
    assert f.power(2).term_dict == {(0, 0): 1, (1, 0): 2}


def test_power_zero_is_one(a2):
    f = TruncatedMonoidSeries.make(a2, (0, 0), {(0, 0): 1, (2, 1): 7}, 4)
    assert f.power(0).is_one()


def test_power_wall_function_surface(a2):
    wf = WallFunction.make(a2, (1, 1), (1,), 6)
    s = power(wf, -1, 6)
    assert s.term_dict == {(0, 0): 1, (1, 1): -1, (2, 2): 1, (3, 3): -1}


def test_inverse_requires_unit_constant_term(a2):
    f = TruncatedMonoidSeries.make(a2, (0, 0), {(0, 0): 2}, 3)
    with pytest.raises(NonUnitConstantTerm):
        f.inverse()


def test_non_p_offset_rejected(a2):
    with pytest.raises(ValueError):
        TruncatedMonoidSeries.make(a2, (0, 0), {(-1, 0): 1}, 3)


def _random_series(rng, seed, order, allow_negative=True):
    terms = {(0, 0): 1}
    for _ in range(rng.randint(1, 4)):
        off = (rng.randint(0, order), rng.randint(0, order))
        if sum(off) == 0 or sum(off) > order:
            continue
        lo = -5 if allow_negative else 1
        terms[off] = rng.randint(lo, 5)
    return TruncatedMonoidSeries.make(seed, (0, 0), terms, order)


def test_multiply_commutative_associative_random(a2):
    rng = random.Random(3)
    for _ in range(60):
        f, g, h = (_random_series(rng, a2, 4) for _ in range(3))
        assert f.mul(g) == g.mul(f)
        assert f.mul(g).mul(h) == f.mul(g.mul(h))


def test_power_additivity_random(a2):
    rng = random.Random(4)
    for _ in range(40):
        f = _random_series(rng, a2, 4)
        a, b = rng.randint(-4, 4), rng.randint(-4, 4)
        assert f.power(a).mul(f.power(b)) == f.power(a + b)


def test_truncation_is_ring_map(a2):
    rng = random.Random(5)
    for _ in range(40):
        f, g = _random_series(rng, a2, 5), _random_series(rng, a2, 5)
        kp = rng.randint(0, 4)
        assert f.mul(g).truncate(kp) == f.truncate(kp).mul(g.truncate(kp))


def test_rebase_window(a2):
    t = TruncatedMonoidSeries.make(a2, (1, 1), {(0, 0): 1, (1, 0): 2}, 2)
    r = t.rebase((0, 0))
    # offsets shift by (1,1); (1,0)-offset lands at degree 3 > 2 and is dropped
    assert r.base == (0, 0)
    assert r.term_dict == {(1, 1): 1}


def test_wall_function_canonical_strip(a2):
    wf = WallFunction.make(a2, (1, 0), (1, 0, 0), 6)
    assert wf.coeffs == (1,)
    assert wf.coefficient(0) == 1 and wf.coefficient(1) == 1 and wf.coefficient(2) == 0


def test_wall_function_direction_outside_p(a2):
    with pytest.raises(ValueError):
        WallFunction.make(a2, (-1, 0), (1,), 4)
