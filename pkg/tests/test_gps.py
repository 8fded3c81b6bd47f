import random

import pytest
from hypothesis import given, strategies as st

from cobordism.checks import random_element
from cobordism.classifying import ring_BGL, ring_BT
from cobordism.fgl import integer_ring, universal_fgl, fgl_sum
from cobordism.gps import (
    DegreeError,
    EliminationError,
    GradedSeries,
    NotSymmetricError,
    elementary_symmetric,
    eliminate,
    gamma_ring,
    monomials_of_weight,
    series_from_json,
    series_mul,
    substitute,
    to_elementary_basis,
)
from cobordism.lazard import generator_element
from cobordism.rings import MismatchError, TruncationError

seeds = st.integers(0, 2**32 - 1)


def tring(table, n, order):
    return GradedSeries(table.ring, [f"t{k}" for k in range(1, n + 1)], order=order)


def rand(table, n, order, degree, seed):
    pres = ring_BT(n, order, table, degrees=[degree])
    return random_element(random.Random(seed), pres, degree)


def test_monomials_of_weight():
    assert sorted(monomials_of_weight([1, 2], 3)) == [(1, 1), (3, 0)]
    assert monomials_of_weight([1, 1, 1], 0) == [(0, 0, 0)]


def test_mul_examples(table):
    t1, t2 = tring(table, 2, 3).generators()
    assert str(t1 * t2) == "t1*t2"
    assert (t1 + t2) * (t1 * t2) == t1 ** 2 * t2 + t1 * t2 ** 2
    low = tring(table, 2, 2)
    x = low.generator(0) * low.generator(1)
    prod = x * low.generator(0)
    assert prod.is_zero() and prod.truncated


def test_mul_shape_mismatch(table):
    with pytest.raises(MismatchError):
        series_mul(tring(table, 2, 3).generator(0), tring(table, 2, 4).generator(0))
    with pytest.raises(MismatchError):
        series_mul(tring(table, 2, 3).generator(0), tring(table, 3, 3).generator(0))


@given(seeds, st.integers(1, 3), st.integers(1, 5))
def test_ring_laws(table, seed, n, order):
    rng = random.Random(seed)
    degs = [rng.randint(-1, 2) for _ in range(3)]
    x, y, z = (rand(table, n, order, d, seed + k) for k, d in enumerate(degs))
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    p = x * y
    if not p.is_zero():
        p.check_bidegree(degs[0] + degs[1])


@given(seeds, st.integers(1, 3), st.integers(1, 5))
def test_truncation_is_a_ring_map(table, seed, n, order):
    x = rand(table, n, order, 0, seed)
    y = rand(table, n, order, 1, seed + 1)
    for low in range(order + 1):
        assert (x * y).truncate(low).terms == (x.truncate(low) * y.truncate(low)).terms
        assert (x + y).truncate(low) == x.truncate(low) + y.truncate(low)
    with pytest.raises(TruncationError):
        x.truncate(order + 1)


def test_substitute_examples(table):
    t = tring(table, 2, 4)
    t1, t2 = t.generators()
    g = gamma_ring(t, ["gamma1", "gamma2"])
    g1, g2 = g.generators()
    e = {"gamma1": t1 + t2, "gamma2": t1 * t2}
    assert substitute(g1, e) == t1 + t2
    assert substitute(g1 * g1 - g2 * 2, e) == t1 ** 2 + t2 ** 2
    x = t1 * t2 + t1 ** 3
    assert substitute(x, {"t1": t1, "t2": t2}) == x


def test_substitute_errors(table):
    t = tring(table, 2, 3)
    t1, t2 = t.generators()
    with pytest.raises(DegreeError):
        substitute(t1, {"t1": t1 + 1})
    with pytest.raises(DegreeError):
        substitute(t1, {"t1": t1 * t2})


@given(seeds, st.integers(1, 5))
def test_substitute_is_a_ring_map(table, seed, order):
    rng = random.Random(seed)
    t = tring(table, 2, order)
    t1, t2 = t.generators()
    a11 = generator_element(table, 1, 1)
    images = {"t1": t1 + t1 * t2 * a11, "t2": t1 + t2}
    x = rand(table, 2, order, rng.randint(0, 2), seed)
    y = rand(table, 2, order, rng.randint(0, 2), seed + 7)
    assert substitute(x * y, images) == substitute(x, images) * substitute(y, images)


def test_to_elementary_examples(table):
    t = tring(table, 2, 3)
    t1, t2 = t.generators()
    assert str(to_elementary_basis(t1 + t2, ["gamma1", "gamma2"])) == "gamma1"
    sq = to_elementary_basis(t1 ** 2 + t2 ** 2, ["gamma1", "gamma2"])
    assert str(sq) == "gamma1^2 - 2*gamma2"
    F = universal_fgl(3, table)
    law = to_elementary_basis(fgl_sum(F, t1, t2), ["gamma1", "gamma2"])
    assert str(law) == "gamma1 + a11*gamma2 + a12*gamma1*gamma2"
    with pytest.raises(NotSymmetricError):
        to_elementary_basis(t1 + t2 * 2)


@given(seeds, st.integers(1, 3), st.integers(1, 5), st.integers(-1, 3))
def test_elementary_round_trip(table, seed, n, order, degree):
    bgl = ring_BGL(n, order, table, degrees=[degree])
    g = random_element(random.Random(seed), bgl, degree)
    t = tring(table, n, order)
    x = substitute(g, {nm: elementary_symmetric(t, k + 1) for k, nm in enumerate(g.names)})
    assert x.is_symmetric()
    back = to_elementary_basis(x, g.names)
    assert back.series.terms == g.terms
    assert back.expand(t) == x


def test_eliminate_trivial(table):
    g = GradedSeries(table.ring, ["gamma1"], order=3)
    el = eliminate(g.generator(0))
    assert el.sigma.is_zero() and el.quotient_names() == []
    assert el.residual().is_zero()


def test_eliminate_rank_two(table):
    g = GradedSeries(table.ring, ["gamma1", "gamma2"], [1, 2], order=4)
    g1, g2 = g.generators()
    a11 = generator_element(table, 1, 1)
    a12 = generator_element(table, 1, 2)
    r = g1 + g2 * a11 + g1 * g2 * a12
    el = eliminate(r)
    q = GradedSeries(table.ring, ["gamma2"], [2], order=4).generator(0)
    assert el.sigma == q * (-a11) + q * q * (a11 * a12)
    assert el.residual().is_zero()
    assert el.apply(g1) == el.sigma


def test_eliminate_non_unit(table):
    g = GradedSeries(table.ring, ["gamma1", "gamma2"], [1, 2], order=3)
    g1, g2 = g.generators()
    with pytest.raises(EliminationError):
        eliminate(g1 * 2 + g2 * generator_element(table, 1, 1))


def test_eliminate_inhomogeneous(table):
    g = GradedSeries(table.ring, ["gamma1", "gamma2"], [1, 2], order=3)
    g1, g2 = g.generators()
    with pytest.raises(DegreeError):
        eliminate(g1 + g2)


@given(seeds, st.integers(2, 3), st.integers(1, 5))
def test_set_zero_quotient(table, seed, n, order):
    x = rand(table, n, order, 0, seed)
    y = rand(table, n, order, 1, seed + 1)
    drop = [n - 1]
    qx, qy = x.set_zero(drop), y.set_zero(drop)
    assert len(qx.names) == n - 1
    assert (x * y).set_zero(drop).terms == (qx * qy).terms
    assert (x + y).set_zero(drop) == qx + qy
    # surjective: every series in the smaller ring lifts
    small = qx.embed(x.names)
    assert small.set_zero(drop) == qx


@given(seeds, st.integers(1, 3), st.integers(2, 5))
def test_regular_sequence(table, seed, n, order):
    x = rand(table, n, order, 0, seed)
    for k in range(n):
        tk = x.generator(k)
        if (x * tk).is_zero():
            assert x.truncate(order - 1).is_zero()
        assert (x * tk).truncate(order).terms.keys() >= {
            tuple(e + (j == k) for j, e in enumerate(m)) for m in x.truncate(order - 1).terms
        }


def test_bidegree_check(table):
    t = tring(table, 1, 2)
    a11 = generator_element(table, 1, 1)
    x = t.generator(0) * a11
    x.check_bidegree(0)
    with pytest.raises(DegreeError):
        x.check_bidegree(1)


def test_json_round_trip(table):
    t = tring(table, 2, 4)
    x = rand(table, 2, 4, 1, 3) + t.generator(0)
    back = series_from_json(x.to_json(), table.ring, t.names, order=4)
    assert back == x


def test_integer_coefficients_are_plain_polynomials():
    t = GradedSeries(integer_ring(), ["t1", "t2"], order=4)
    t1, t2 = t.generators()
    assert str((t1 + t2) ** 2) == "t1^2 + 2*t1*t2 + t2^2"
