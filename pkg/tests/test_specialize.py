import random
from math import comb

import pytest
from hypothesis import given, strategies as st

from cobordism.checks import random_element
from cobordism.classifying import chern_of_character, monomial_count, ring_BGL, ring_BSL, ring_BT
from cobordism.fgl import (
    InsufficientTableError,
    UniSeries,
    additive_fgl,
    beta_ring,
    custom_fgl,
    fgl_sum,
    multiplicative_fgl,
    n_series,
    universal_fgl,
)
from cobordism.gps import eliminate, substitute
from cobordism.lazard import generator_element
from cobordism.specialize import (
    RelationNotKilledError,
    apply_specialization,
    make_specialization,
    named_specialization,
)

seeds = st.integers(0, 2**32 - 1)


@pytest.fixture(scope="module")
def chow(table):
    return named_specialization("chow", table)


@pytest.fixture(scope="module")
def ktheory(table):
    return named_specialization("ktheory", table)


def test_additive_kills_generators(table, chow):
    for g in [(1, 1), (1, 2), (2, 2), (1, 5), (3, 4)]:
        assert apply_specialization(chow, generator_element(table, *g)).is_zero()
    assert apply_specialization(chow, table.ring.one()) == 1


def test_multiplicative_images(table, ktheory):
    beta = ktheory.ring
    assert apply_specialization(ktheory, generator_element(table, 1, 1)) == beta.value(1, -1)
    for g in [(1, 2), (2, 2), (1, 3), (2, 3)]:
        assert apply_specialization(ktheory, generator_element(table, *g)).is_zero()


def test_cobordism_is_identity(table):
    assert named_specialization("cobordism", table) is None
    with pytest.raises(ValueError):
        named_specialization("hodge", table)


def test_broken_associativity_rejected(table):
    ring = beta_ring(8)
    # u + v + beta*uv + beta^2*(u^2 v + u v^2) is commutative but not associative
    bad = custom_fgl(9, ring, {(1, 1): ring.value(1, 1), (1, 2): ring.value(2, 1),
                               (2, 1): ring.value(2, 1)})
    with pytest.raises(RelationNotKilledError):
        make_specialization(bad, table)


def test_shallow_target_rejected(table):
    with pytest.raises(InsufficientTableError):
        make_specialization(additive_fgl(3), table)


def test_n_series_specializes(table, ktheory):
    F = universal_fgl(3, table)
    two = apply_specialization(ktheory, n_series(F, 2))
    assert str(two) == "2*u - beta*u^2"


def test_chow_bt_is_polynomial_ring(table, chow):
    for n in (1, 2, 3):
        for order in range(7):
            bt = apply_specialization(chow, ring_BT(n, order, table, range(-1, order + 1)))
            for i in bt.degrees:
                expected = monomial_count([1] * n, i) if 0 <= i <= order else 0
                assert bt.rank(i) == expected


def test_chow_bgl2(table, chow):
    bgl = apply_specialization(chow, ring_BGL(2, 3, table))
    assert {i: bgl.rank(i) for i in bgl.degrees} == {0: 1, 1: 1, 2: 2, 3: 2}
    assert sorted(bgl.label(e) for e in bgl.piece(2)) == ["gamma1^2", "gamma2"]
    assert bgl.restriction is not None


def test_chow_bsl2(table, chow):
    bsl = apply_specialization(chow, ring_BSL(2, 4, table))
    assert str(bsl.relations[0]) == "gamma1"
    assert [bsl.rank(i) for i in range(5)] == [1, 0, 1, 0, 1]


def test_additive_chern_is_linear(table, chow):
    F = universal_fgl(4, table)
    bt = ring_BT(3, 4, table)
    for chi in ([2, -1, 0], [1, 1, 1], [-3, 2, 1]):
        img = apply_specialization(chow, chern_of_character(chi, F, bt))
        assert img.terms == {
            tuple(int(j == k) for j in range(3)): {0: n} for k, n in enumerate(chi) if n
        }


@given(seeds, st.integers(1, 3), st.integers(1, 5))
def test_functorial_over_products(table, chow, ktheory, seed, n, order):
    bt = ring_BT(n, order, table, degrees=[0, 1])
    rng = random.Random(seed)
    x = random_element(rng, bt, 0)
    y = random_element(rng, bt, 1)
    for s in (chow, ktheory):
        assert apply_specialization(s, x * y) == apply_specialization(s, x) * apply_specialization(s, y)
        assert apply_specialization(s, x + y) == apply_specialization(s, x) + apply_specialization(s, y)


@given(seeds, st.integers(1, 5))
def test_functorial_over_substitution_and_law(table, ktheory, seed, order):
    bt = ring_BT(2, order, table, degrees=[0])
    x = random_element(random.Random(seed), bt, 0)
    t1, t2 = bt.series_ring().generators()
    a11 = generator_element(table, 1, 1)
    images = {"t1": t1 + t1 * t2 * a11, "t2": t1 + t2}
    s = ktheory
    spec_images = {k: apply_specialization(s, v) for k, v in images.items()}
    assert apply_specialization(s, substitute(x, images)) == substitute(apply_specialization(s, x), spec_images)
    F = universal_fgl(order, table)
    K = multiplicative_fgl(order, s.ring)
    assert apply_specialization(s, fgl_sum(F, t1, t2)) == fgl_sum(
        K, apply_specialization(s, t1), apply_specialization(s, t2)
    )


@pytest.mark.parametrize("n", [2, 3])
def test_functorial_over_elimination(table, ktheory, n):
    bsl = ring_BSL(n, 4, table)
    rel = apply_specialization(ktheory, bsl.relations[0])
    el = eliminate(rel)
    assert el.sigma == apply_specialization(ktheory, bsl.elimination.sigma)
    assert el.residual().is_zero()


@given(seeds, st.integers(1, 3), st.integers(0, 6))
def test_truncation_coherence(table, chow, ktheory, seed, n, low):
    high = 6
    bgl = ring_BGL(n, high, table, degrees=[1])
    x = random_element(random.Random(seed), bgl, 1)
    for s in (chow, ktheory):
        assert apply_specialization(s, x).truncate(low) == apply_specialization(s, x.truncate(low))


@pytest.mark.parametrize("n", range(1, 5))
def test_multiplicative_n_series_closed_form(table, ktheory, n):
    F = universal_fgl(6, table)
    ring = ktheory.ring
    got = apply_specialization(ktheory, n_series(F, n))
    coeffs = [ring.value(k - 1, -comb(n, k) * (-1) ** k) for k in range(1, 7)]
    assert got == UniSeries.from_coefficients(ring, coeffs)
