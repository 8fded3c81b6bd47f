"""Acceptance suite shared by ``cobordism check`` and the test-suite.

Each criterion returns a :class:`Outcome` whose ``details`` are plain JSON
data independent of timing, so reports are reproducible byte for byte.
Wall-clock time is recorded separately in ``seconds``.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from math import comb

from sympy.functions.combinatorial.numbers import partition

from .classifying import (
    compare_with_gl,
    monomial_count,
    relation_quotient,
    ring_BGL,
    ring_BSL,
    ring_BT,
)
from .fgl import fgl_sum, formal_inverse, multiplicative_fgl, n_series, universal_fgl
from .gps import GradedSeries
from .lazard import (
    LazardBasisTable,
    build_lazard_basis,
    is_torsion_free,
    oracle_basis_independent,
    oracle_rank,
)
from .specialize import apply_specialization, named_specialization

LAZARD_DEPTH = 8
SEED = 20240229


@dataclass
class Outcome:
    id: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0
    limit: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f" (limit {self.limit:.0f}s)" if self.limit else ""
        return f"[{status}] criterion {self.id}: {self.title} [{self.seconds:.2f}s{budget}]"

    def to_json(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed, "details": self.details}


def random_element(rng: random.Random, pres, degree: int, density: float = 0.5, bound: int = 3) -> GradedSeries:
    """Random integer combination of the degree-``degree`` basis of ``pres``."""
    ring = pres.ring
    terms: dict = {}
    for e in pres.piece(degree):
        if rng.random() < density:
            v = rng.randint(-bound, bound)
            if v:
                terms.setdefault(e.monomial, {})[ring.flat(e.codegree, e.index)] = v
    return pres.series_ring().like(terms)


# ---------------------------------------------------------------------------


def criterion_1(depth: int = LAZARD_DEPTH) -> tuple[Outcome, LazardBasisTable]:
    t0 = time.perf_counter()
    table = build_lazard_basis(depth)
    ranks = table.ranks()
    partitions = [int(partition(d)) for d in range(depth + 1)]
    oracle = [oracle_rank(depth, d) for d in range(depth + 1)]
    independent = all(oracle_basis_independent(table, d) for d in range(depth + 1))
    torsion_free = all(is_torsion_free(table, d) for d in range(depth + 1))
    seconds = time.perf_counter() - t0
    passed = ranks == partitions == oracle and independent and seconds <= 300
    out = Outcome(
        1, "Lazard ranks equal partition counts, cross-checked by the log oracle", passed,
        {
            "max_codegree": depth,
            "ranks": ranks,
            "partitions": partitions,
            "oracle_ranks": oracle,
            "basis_independent_under_oracle": independent,
            "torsion_free": torsion_free,
        },
        seconds, 300,
    )
    return out, table


def criterion_2(table: LazardBasisTable, max_order: int = 6) -> Outcome:
    rows = []
    for order in range(1, max_order + 1):
        F = universal_fgl(order, table)
        two = GradedSeries(F.ring, ("u", "v"), order=order)
        u, v = two.generators()
        unit = fgl_sum(F, u, two.like({})) == u
        comm = fgl_sum(F, u, v).terms == fgl_sum(F, v, u).terms
        three = GradedSeries(F.ring, ("u", "v", "w"), order=order)
        x, y, z = three.generators()
        assoc = fgl_sum(F, fgl_sum(F, x, y), z).terms == fgl_sum(F, x, fgl_sum(F, y, z)).terms
        rows.append({"order": order, "unit": unit, "commutative": comm, "associative": assoc})
    passed = all(r["unit"] and r["commutative"] and r["associative"] for r in rows)
    return Outcome(2, "FGL axioms hold as truncated identities", passed, {"orders": rows})


def criterion_3(table: LazardBasisTable, max_order: int = 5, bound: int = 3) -> Outcome:
    rows = []
    for order in range(1, max_order + 1):
        F = universal_fgl(order, table)
        chi = formal_inverse(F, order)
        u = chi.variable(F.ring, order)
        inverse_ok = fgl_sum(F, u, chi).series.is_zero()
        series = {m: n_series(F, m, order) for m in range(-2 * bound, 2 * bound + 1)}
        failures = [
            [m, n] for m in range(-bound, bound + 1) for n in range(-bound, bound + 1)
            if series[m + n].series.terms != fgl_sum(F, series[m], series[n]).series.terms
        ]
        rows.append({"order": order, "inverse": inverse_ok, "n_series_failures": failures})
    passed = all(r["inverse"] and not r["n_series_failures"] for r in rows)
    return Outcome(3, "formal inverse and n-series identities", passed, {"orders": rows})


def _gps_laws(table: LazardBasisTable, n: int, order: int, rng: random.Random) -> dict:
    pres = ring_BT(n, order, table, degrees=range(-1, 3))
    base = pres.series_ring()
    ts = base.generators()

    def sample(i):
        return random_element(rng, pres, i)

    x, y, z = sample(0), sample(1), sample(-1)
    # ring structure extending the polynomial ring
    ring_ok = (
        (x * y).terms == (y * x).terms
        and ((x * y) * z).terms == (x * (y * z)).terms
        and (x * (y + z)).terms == (x * y + x * z).terms
    )
    deg_ok = all(
        (a * b).is_zero() or (a * b).degree == a.degree + b.degree
        for a, b in ((x, y), (y, z), (x, z))
        if a.degree is not None and b.degree is not None
    )
    poly = ts[0] + ts[-1] * 2
    lowered = poly ** 2
    poly_ok = not lowered.truncated if order >= 2 else True
    # S^(n-1)[[t_n]] = S^(n): split by the last exponent and rebuild
    last = n - 1
    rebuilt = base.like({})
    for k in range(order + 1):
        coef = x.like({m: c for m, c in x.terms.items() if m[last] == k})
        if coef.is_zero():
            continue
        stripped = coef.like({m[:last] + (0,) + m[last + 1:]: c for m, c in coef.terms.items()})
        rebuilt = rebuilt + stripped * ts[last] ** k
    split_ok = rebuilt.terms == x.terms
    extra = sample(1)
    img = ts[last] + extra.like({m: c for m, c in extra.terms.items() if sum(m) >= 2})
    subst_ok = (x * y).substitute({pres.names[last]: img}).terms == (
        x.substitute({pres.names[last]: img}) * y.substitute({pres.names[last]: img})
    ).terms
    # quotient by a set of variables
    quot_ok = True
    for r in range(1, n + 1):
        drop = list(range(r))
        q = lambda s: s.set_zero(drop)
        quot_ok &= q(x * y).terms == (q(x) * q(y)).terms
        quot_ok &= q(x + y).terms == (q(x) + q(y)).terms
        small = q(x)
        quot_ok &= q(small.embed(pres.names)).terms == small.terms
    # t_1..t_n is a regular sequence up to the truncation margin
    reg_ok = True
    for k in range(n):
        rest = x.set_zero(range(k)).embed(pres.names) if k else x
        prod = (rest * ts[k]).truncate(order)
        if prod.is_zero() != rest.truncate(order - 1).is_zero():
            reg_ok = False
    return {
        "n": n, "t_degree": order,
        "ring_laws": ring_ok and deg_ok and poly_ok,
        "substitution": split_ok and subst_ok,
        "quotient": quot_ok,
        "regular_sequence": reg_ok,
    }


def criterion_4(table: LazardBasisTable, max_n: int = 3, max_order: int = 5, trials: int = 3) -> Outcome:
    rng = random.Random(SEED)
    rows = []
    for n in range(1, max_n + 1):
        for order in range(1, max_order + 1):
            merged = None
            for _ in range(trials):
                r = _gps_laws(table, n, order, rng)
                if merged is None:
                    merged = r
                else:
                    for key in ("ring_laws", "substitution", "quotient", "regular_sequence"):
                        merged[key] = merged[key] and r[key]
            rows.append(merged)
    keys = ("ring_laws", "substitution", "quotient", "regular_sequence")
    passed = all(all(r[k] for k in keys) for r in rows)
    return Outcome(
        4, "graded series rings: products, substitution, quotients, regular sequence",
        passed, {"cases": rows},
    )


def criterion_5(table: LazardBasisTable, max_order: int = 5) -> Outcome:
    ranks = table.ranks()
    rows = []
    for order in range(max_order + 1):
        pres = ring_BT(1, order, table, degrees=range(-2, 3))
        for i in range(-2, 3):
            expected = sum(ranks[p - i] for p in range(order + 1) if p - i >= 0)
            rows.append({"t_degree": order, "degree": i, "rank": pres.rank(i), "expected": expected})
    passed = all(r["rank"] == r["expected"] for r in rows)
    return Outcome(5, "BT(1) pieces follow the product formula", passed, {"cases": rows})


def criterion_6(table: LazardBasisTable, max_n: int = 3, max_order: int = 6) -> Outcome:
    t0 = time.perf_counter()
    rows = []
    for n in range(1, max_n + 1):
        for order in range(max_order + 1):
            comp = compare_with_gl(n, order, table)
            rows.append({
                "n": n, "t_degree": order, "slices": len(comp),
                "rational_equal": all(c.rational_equal for c in comp),
                "integral_equal": all(c.integral_equal for c in comp),
                "invariant_ranks": [c.invariant_rank for c in comp],
            })
    seconds = time.perf_counter() - t0
    passed = all(r["rational_equal"] for r in rows) and seconds <= 600
    return Outcome(
        6, "GL restriction image equals the symmetric invariants (rational)", passed,
        {"cases": rows, "integral_equal_everywhere": all(r["integral_equal"] for r in rows)},
        seconds, 600,
    )


def criterion_7(table: LazardBasisTable, max_n: int = 3, max_order: int = 5) -> Outcome:
    ranks = table.ranks()
    rows = []
    for n in range(1, max_n + 1):
        for order in range(max_order + 1):
            degrees = range(-2, order + 1)
            bsl = ring_BSL(n, order, table, degrees)
            residual = bsl.elimination.residual()
            rel = bsl.relations[0]
            bgl = ring_BGL(n, order, table, range(-3, order + 1))
            weights = list(range(2, n + 1))
            mismatches = []
            for i in degrees:
                expected = sum(
                    monomial_count(weights, p) * ranks[p - i]
                    for p in range(order + 1) if p - i >= 0
                )
                quotient, torsion_free = relation_quotient(bgl, rel, i)
                if not (bsl.rank(i) == expected == quotient and torsion_free):
                    mismatches.append(
                        {"degree": i, "rank": bsl.rank(i), "expected": expected,
                         "quotient": quotient, "torsion_free": torsion_free}
                    )
            rows.append({
                "n": n, "t_degree": order, "relation": str(rel),
                "residual_zero": residual.is_zero(), "mismatches": mismatches,
            })
    passed = all(r["residual_zero"] and not r["mismatches"] for r in rows)
    return Outcome(7, "SL_n presentation ranks and back-substitution", passed, {"cases": rows})


def _closed_form_n_series(ring, n: int, order: int):
    """``(1 - (1 - beta*u)^n) / beta`` expanded."""
    coeffs = [0] * order
    for k in range(1, min(n, order) + 1):
        coeffs[k - 1] = (-1) ** (k + 1) * comb(n, k)
    terms = {(k,): {ring.flat(k - 1, 0): c} for k, c in enumerate(coeffs, start=1) if c}
    return GradedSeries(ring, ("u",), order=order, terms=terms)


def criterion_8(table: LazardBasisTable, max_n: int = 3, max_order: int = 6, trials: int = 4) -> Outcome:
    chow = named_specialization("chow", table)
    kt = named_specialization("ktheory", table)
    rank_rows = []
    for n in range(1, max_n + 1):
        for order in range(max_order + 1):
            pres = apply_specialization(chow, ring_BT(n, order, table, range(-1, order + 1)))
            got = [pres.rank(i) for i in range(-1, order + 1)]
            want = [0] + [comb(i + n - 1, n - 1) for i in range(order + 1)]
            rank_rows.append({"n": n, "t_degree": order, "ranks": got, "match": got == want})
    order = table.max_codegree
    F = universal_fgl(order, table)
    M = multiplicative_fgl(table.max_codegree + 1)
    mult_rows = []
    for n in range(0, 5):
        closed = _closed_form_n_series(M.ring, n, order)
        direct = n_series(M, n, order).series
        via_l = apply_specialization(kt, n_series(F, n, order)).series
        mult_rows.append({
            "n": n, "series": str(closed),
            "direct": direct.terms == closed.terms, "specialized": via_l.terms == closed.terms,
        })
    rng = random.Random(SEED + 8)
    coherent = True
    homomorphic = True
    cases = 0
    for s in (chow, kt):
        for n in range(1, max_n + 1):
            high = ring_BT(n, max_order, table, range(-1, 3))
            for _ in range(trials):
                x = random_element(rng, high, rng.randint(-1, 2))
                y = random_element(rng, high, rng.randint(-1, 2))
                for low in range(max_order + 1):
                    cases += 1
                    coherent &= (
                        apply_specialization(s, x).truncate(low).terms
                        == apply_specialization(s, x.truncate(low)).terms
                    )
                homomorphic &= (
                    apply_specialization(s, x * y).terms
                    == (apply_specialization(s, x) * apply_specialization(s, y)).terms
                )
    passed = (
        all(r["match"] for r in rank_rows)
        and all(r["direct"] and r["specialized"] for r in mult_rows)
        and coherent and homomorphic
    )
    return Outcome(
        8, "specializations: Chow ranks, K-theory n-series, truncation coherence", passed,
        {
            "chow_ranks": rank_rows,
            "multiplicative_n_series": mult_rows,
            "truncation_coherence": {"cases": cases, "coherent": coherent, "homomorphic": homomorphic},
        },
    )


def run_all(selected=None, depth: int = LAZARD_DEPTH) -> list[Outcome]:
    """Run criteria 1-8 (criterion 9 compares two runs of this report)."""
    selected = set(selected or range(1, 9))
    first, table = criterion_1(depth)
    results = [first] if 1 in selected else []
    suite = {
        2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
        6: criterion_6, 7: criterion_7, 8: criterion_8,
    }
    for k in sorted(selected - {1}):
        t0 = time.perf_counter()
        out = suite[k](table)
        if not out.seconds:
            out.seconds = time.perf_counter() - t0
        results.append(out)
    return results


def report(results: list[Outcome]) -> dict:
    return {
        "criteria": [r.to_json() for r in results],
        "passed": all(r.passed for r in results),
    }

