import json

import pytest
from hypothesis import given, strategies as st
from sympy.functions.combinatorial.numbers import partition

from cobordism.fgl import universal_fgl, fgl_sum
from cobordism.gps import GradedSeries, evaluate_law
from cobordism.intlattice import LatticeSizeError
from cobordism.lazard import (
    CacheError,
    LazardBasisTable,
    build_lazard_basis,
    generator_element,
    harvest_relations,
    is_torsion_free,
    lazard_mul,
    lift,
    normalize,
    oracle_basis_independent,
    oracle_rank,
    relation_images_vanish,
    to_log_presentation,
)
from cobordism.rings import MismatchError, generators_upto


def m(*exps):
    """Exponent tuple over m1..m8."""
    return tuple(exps) + (0,) * (8 - len(exps))


# a_ij images in Q[m1..m4], frozen from an independent sympy expansion of
# exp(log u + log v) with log x = x + m1 x^2 + m2 x^3 + ...
LOG_IMAGES = {
    (1, 1): {m(1): -2},
    (1, 2): {m(2): 4, m(0, 1): -3},
    (1, 3): {m(3): -8, m(1, 1): 12, m(0, 0, 1): -4},
    (2, 2): {m(3): -20, m(1, 1): 24, m(0, 0, 1): -6},
    (1, 4): {m(4): 16, m(2, 1): -36, m(1, 0, 1): 16, m(0, 2): 9, m(0, 0, 0, 1): -5},
    (2, 3): {m(4): 72, m(2, 1): -132, m(1, 0, 1): 44, m(0, 2): 27, m(0, 0, 0, 1): -10},
}


def test_codegree_zero_and_one():
    t0 = build_lazard_basis(0)
    assert t0.ranks() == [1]
    t1 = build_lazard_basis(1)
    assert t1.ranks() == [1, 1]
    assert t1.basis_label(1, 0) == "a11"


def test_ranks_are_partition_counts(table):
    assert table.ranks() == [int(partition(d)) for d in range(9)]


@pytest.mark.parametrize("d", range(6))
def test_oracle_rank_matches(table, d):
    assert oracle_rank(8, d) == table.rank(d)
    assert oracle_basis_independent(table, d)


@pytest.mark.parametrize("d", range(9))
def test_relations_vanish_under_oracle(table, d):
    assert relation_images_vanish(table, d)


def test_harvested_relations_vanish_under_oracle(table):
    harvested = harvest_relations(6, table.free)
    for d, rows in harvested.items():
        assert relation_images_vanish(table, d, rows)


def test_torsion_free(table):
    assert all(is_torsion_free(table, d) for d in range(9))


@pytest.mark.parametrize("g", sorted(LOG_IMAGES))
def test_log_images_frozen(table, g):
    assert to_log_presentation(generator_element(table, *g)) == LOG_IMAGES[g]


def test_log_of_one(table):
    assert to_log_presentation(table.ring.one()) == {m(): 1}


def test_log_map_is_multiplicative(table):
    a11 = generator_element(table, 1, 1)
    a12 = generator_element(table, 1, 2)
    # (-2 m1)(4 m1^2 - 3 m2)
    assert to_log_presentation(a11 * a12) == {m(3): -8, m(1, 1): 6}


def test_commutativity_relation(table):
    x = normalize({(((1, 2), 1),): 1, (((2, 1), 1),): -1}, table)
    assert x.is_zero() and not x.truncated
    assert generator_element(table, 3, 2) == generator_element(table, 2, 3)


def test_associativity_uvw_coefficient(table):
    free = table.free
    names = ("u", "v", "w")
    ring = GradedSeries(free, names, order=3)
    u, v, w = ring.generators()
    coeffs = {g: free.generator(*g) for g in generators_upto(2)}
    lhs = evaluate_law(coeffs, evaluate_law(coeffs, u, v), w)
    rhs = evaluate_law(coeffs, u, evaluate_law(coeffs, v, w))
    defect = (lhs - rhs).coefficient((1, 1, 1))
    expr = {}
    for f, c in defect.flat.items():
        d, j = free.unflat(f)
        expr[free.monomials[d][j]] = c
    assert expr, "the uvw defect is a nontrivial expression in the free ring"
    assert normalize(expr, table).is_zero()


def test_normalize_unit(table):
    one = normalize({"1": 1}, table)
    assert one.parts() == {0: (1,)}


def test_normalize_truncates(table):
    x = normalize({(((1, 1), 9),): 1, (((1, 1), 1),): 2}, table)
    assert x.truncated
    assert x == generator_element(table, 1, 1) * 2


@given(st.dictionaries(
    st.sampled_from([(((1, 1), 2),), (((1, 2), 1),), (((2, 1), 1), ((1, 1), 1)), (((2, 2), 1),),
                     (((1, 3), 1),), (((3, 1), 1),), "1"]),
    st.integers(-50, 50),
))
def test_normalize_idempotent_and_linear(table, expr):
    x = normalize(expr, table)
    assert normalize(lift(x), table) == x
    doubled = normalize({k: 2 * v for k, v in expr.items()}, table)
    assert doubled == x * 2


def test_mul_examples(table):
    one = table.ring.one()
    a11 = generator_element(table, 1, 1)
    assert lazard_mul(one, a11) == a11
    sq = lazard_mul(a11, a11)
    assert sq == normalize({(((1, 1), 2),): 1}, table)
    assert sq.codegrees() == [2]


def test_mul_truncation_flag(table):
    x = generator_element(table, 2, 3)  # codegree 4
    y = generator_element(table, 1, 4)  # codegree 4
    assert not lazard_mul(x, generator_element(table, 1, 1)).truncated
    prod = lazard_mul(x, y * generator_element(table, 1, 1))
    assert prod.is_zero() and prod.truncated


def test_mul_mismatched_tables(table):
    other = build_lazard_basis(2)
    with pytest.raises(MismatchError):
        lazard_mul(generator_element(table, 1, 1), generator_element(other, 1, 1))


gens = st.sampled_from([(1, 1), (1, 2), (1, 3), (2, 2), (1, 4)])


@given(gens, gens, gens)
def test_mul_commutative_associative(table, g1, g2, g3):
    x, y, z = (generator_element(table, *g) for g in (g1, g2, g3))
    assert lazard_mul(x, y) == lazard_mul(y, x)
    assert lazard_mul(lazard_mul(x, y), z) == lazard_mul(x, lazard_mul(y, z))
    cds = sum(sum(g) - 1 for g in (g1, g2))
    assert lazard_mul(x, y).codegrees() in ([cds], [])


def test_rank_stability(table):
    small = build_lazard_basis(6)
    assert small.ranks() == table.ranks()[:7]
    restricted = table.restrict(6)
    assert restricted.ranks() == small.ranks()
    assert restricted.to_json() == small.to_json()


def test_build_is_deterministic():
    a = json.dumps(build_lazard_basis(5).to_json(), sort_keys=True)
    b = json.dumps(build_lazard_basis(5).to_json(), sort_keys=True)
    assert a == b


def test_cache_round_trip(tmp_path, table):
    path = tmp_path / "lazard_basis_8.json"
    table.save(path)
    loaded = LazardBasisTable.load(path)
    assert loaded.ranks() == table.ranks()
    assert loaded.to_json() == table.to_json()
    data = json.loads(path.read_text())
    assert data["version"] == 1 and data["maxCodegree"] == 8
    assert {"i", "j", "codegree"} <= set(data["generators"][0])
    assert [b["rank"] for b in data["bases"]] == table.ranks()


def test_cache_corruption_detected(tmp_path, table):
    path = tmp_path / "bad.json"
    data = table.to_json()
    data["bases"][3]["vectors"][0] = data["bases"][3]["vectors"][1]
    path.write_text(json.dumps(data))
    with pytest.raises(CacheError):
        LazardBasisTable.load(path)
    path.write_text("{not json")
    with pytest.raises(CacheError):
        LazardBasisTable.load(path)
    data = table.to_json()
    data["version"] = 99
    path.write_text(json.dumps(data))
    with pytest.raises(CacheError):
        LazardBasisTable.load(path)


def test_size_bound():
    with pytest.raises(LatticeSizeError):
        build_lazard_basis(6, size_bound=50)


def test_fgl_axioms_after_reduction(table):
    F = universal_fgl(5, table)
    ring = GradedSeries(table.ring, ("u", "v", "w"), order=5)
    u, v, w = ring.generators()
    zero = ring.like({})
    assert fgl_sum(F, u, zero) == u
    assert fgl_sum(F, u, v) == fgl_sum(F, v, u)
    assert fgl_sum(F, fgl_sum(F, u, v), w).terms == fgl_sum(F, u, fgl_sum(F, v, w)).terms
