"""The Lazard ring in codegrees ``0..N``.

``L`` is presented as ``Z[A_ij] / I`` where ``I`` is generated by the
coefficients of ``F(u, v) - F(v, u)`` and ``F(F(u, v), w) - F(u, F(v, w))``
for the generic law ``F = u + v + sum A_ij u^i v^j``.  Codegree ``d`` of a
monomial is the sum of ``i + j - 1`` over its factors (so ``a_ij`` lies in
``L_{1-i-j}``).

Each graded piece gets an integral basis: the coordinate map ``P_d`` is the
Hermite form of the integer annihilator of ``I_d``, and basis vectors are
the reduced coset representatives of ``P_d^{-1}(e_k)``.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Mapping

from . import intlattice as lat
from .gps import GradedSeries, evaluate_law
from .rings import (
    CoefficientRing,
    FreeMonomialRing,
    MismatchError,
    RingElement,
    TruncationError,
    gen_key,
    generators_upto,
    mono_mul,
    monomial_codegree,
    monomial_str,
)

log = logging.getLogger(__name__)

CACHE_VERSION = 1
DEFAULT_SIZE_BOUND = 4_000_000  # rows * columns of one codegree's relation matrix

LazardElement = RingElement


class CacheError(ValueError):
    """A cache file is unreadable, from another version, or fails validation."""


def parse_monomial(spec) -> tuple:
    """Accept ``[[i, j, e], ...]``, ``{(i, j): e}`` or a sorted monomial tuple."""
    if isinstance(spec, Mapping):
        items = spec.items()
    elif spec and isinstance(spec[0], (list, tuple)) and len(spec[0]) == 3:
        items = (((i, j), e) for i, j, e in spec)
    else:
        items = spec
    out: dict = {}
    for (i, j), e in items:
        if i < 1 or j < 1 or e < 0:
            raise ValueError(f"bad factor a_{i}{j}^{e}")
        if e:
            out[(i, j)] = out.get((i, j), 0) + e
    return tuple(sorted(out.items(), key=lambda t: gen_key(t[0])))


def harvest_relations(n: int, free: FreeMonomialRing | None = None) -> dict[int, list[dict]]:
    """Coefficients of the commutativity, unit and associativity defects.

    Returns ``{codegree: [sparse vectors over free.monomials[codegree]]}`` for
    codegrees ``<= n``; the axioms are expanded in ``u, v, w`` to total
    degree ``n + 1`` since the coefficient of ``u^a v^b w^c`` has codegree
    ``a + b + c - 1``.
    """
    free = free or FreeMonomialRing(n)
    coeffs = {g: free.generator(*g) for g in free.generators}
    rels: dict[int, list[dict]] = {}

    def collect(series: GradedSeries):
        for m, coef in series.sorted_terms():
            vec: dict = {}
            d = None
            for f, v in sorted(coef.items()):
                d, b = free.unflat(f)
                vec[b] = v
            rels.setdefault(d, []).append(vec)

    two = GradedSeries(free, ("u", "v"), order=n + 1)
    u, v = two.generators()
    collect(evaluate_law(coeffs, u, v) - evaluate_law(coeffs, v, u))
    collect(evaluate_law(coeffs, u, two.like({})) - u)
    three = GradedSeries(free, ("u", "v", "w"), order=n + 1)
    u, v, w = three.generators()
    left = evaluate_law(coeffs, evaluate_law(coeffs, u, v), w)
    right = evaluate_law(coeffs, u, evaluate_law(coeffs, v, w))
    collect(left - right)
    return rels


class LazardBasisTable:
    """Integral bases of ``L_{-d}`` for ``d <= max_codegree``.

    Per codegree ``d`` the table holds the a-monomials (``free.monomials[d]``),
    the Hermite basis of the relation lattice ``relations[d]``, the
    coordinate map ``coords[d]`` (one sparse row per basis element) and the
    basis vectors ``basis[d]`` as sparse combinations of monomials.
    """

    def __init__(self, max_codegree: int, free: FreeMonomialRing, relations, coords, basis):
        self.max_codegree = max_codegree
        self.free = free
        self.relations = relations
        self.coords = coords
        self.basis = basis
        # normal form of each monomial, column of the coordinate map
        self.normal_forms: list[list[dict]] = []
        for d in range(max_codegree + 1):
            cols: list[dict] = [dict() for _ in free.monomials[d]]
            for k, row in enumerate(coords[d]):
                for j, v in row.items():
                    cols[j][k] = v
            self.normal_forms.append(cols)
        self._ring: LazardRing | None = None

    def rank(self, d: int) -> int:
        if 0 <= d <= self.max_codegree:
            return len(self.basis[d])
        if d < 0:
            return 0
        raise TruncationError(f"codegree {d} beyond table depth {self.max_codegree}")

    def ranks(self) -> list[int]:
        return [self.rank(d) for d in range(self.max_codegree + 1)]

    @property
    def ring(self) -> "LazardRing":
        if self._ring is None:
            self._ring = LazardRing(self)
        return self._ring

    def restrict(self, n: int) -> "LazardBasisTable":
        """The table truncated to codegrees ``<= n``."""
        if n > self.max_codegree:
            raise TruncationError("cannot restrict to a deeper table")
        free = FreeMonomialRing(n)
        return LazardBasisTable(
            n, free, self.relations[: n + 1], self.coords[: n + 1], self.basis[: n + 1]
        )

    def reduce_vector(self, d: int, vec: Mapping[int, int]) -> tuple[int, ...]:
        """Coordinates of a combination of codegree-``d`` monomial indices."""
        out = [0] * self.rank(d)
        nf = self.normal_forms[d]
        for j, v in vec.items():
            for k, c in nf[j].items():
                out[k] += v * c
        return tuple(out)

    def basis_label(self, d: int, k: int) -> str:
        vec = self.basis[d][k]
        if len(vec) == 1:
            (j, v), = vec.items()
            if v == 1:
                return monomial_str(self.free.monomials[d][j])
        return f"x{d}_{k}"

    def basis_expression(self, d: int, k: int) -> str:
        vec = self.basis[d][k]
        terms = []
        for j, v in sorted(vec.items()):
            ms = monomial_str(self.free.monomials[d][j])
            terms.append(ms if v == 1 else f"-{ms}" if v == -1 else f"{v}*{ms}")
        return " + ".join(terms).replace("+ -", "- ")

    # validation -----------------------------------------------------------
    def validate(self) -> None:
        """Check the table invariants; raise ``CacheError`` on failure."""
        free = self.free
        if self.rank(0) != 1 or self.basis[0] != [{0: 1}]:
            raise CacheError("codegree 0 must have basis {1}")
        if self.max_codegree >= 1 and self.rank(1) != 1:
            raise CacheError("codegree 1 must have rank 1")
        for d in range(self.max_codegree + 1):
            m = len(free.monomials[d])
            rels = self.relations[d]
            if len(rels) + self.rank(d) != m:
                raise CacheError(f"codegree {d}: relation rank and basis rank do not add up")
            for row in rels:
                if any(self.reduce_vector(d, row)):
                    raise CacheError(f"codegree {d}: a relation does not reduce to zero")
            for k, vec in enumerate(self.basis[d]):
                want = tuple(1 if i == k else 0 for i in range(self.rank(d)))
                if self.reduce_vector(d, vec) != want:
                    raise CacheError(f"codegree {d}: basis vector {k} is not a section")
        for d, rows in harvest_relations(self.max_codegree, free).items():
            for row in rows:
                if any(self.reduce_vector(d, row)):
                    raise CacheError(f"codegree {d}: a law relation survives reduction")

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        free = self.free

        def mono(d, j):
            return [[i, jj, e] for (i, jj), e in free.monomials[d][j]]

        bases = []
        for d in range(self.max_codegree + 1):
            bases.append({
                "codegree": d,
                "rank": self.rank(d),
                "vectors": [[[mono(d, j), v] for j, v in sorted(vec.items())] for vec in self.basis[d]],
                "relations": [[[mono(d, j), v] for j, v in sorted(r.items())] for r in self.relations[d]],
            })
        return {
            "version": CACHE_VERSION,
            "maxCodegree": self.max_codegree,
            "generators": [{"i": i, "j": j, "codegree": i + j - 1} for i, j in free.generators],
            "bases": bases,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LazardBasisTable":
        try:
            if data.get("version") != CACHE_VERSION:
                raise CacheError(f"cache version {data.get('version')} != {CACHE_VERSION}")
            n = int(data["maxCodegree"])
            free = FreeMonomialRing(n)
            gens = [(g["i"], g["j"]) for g in data["generators"]]
            if gens != free.generators:
                raise CacheError("generator list does not match")
            relations, basis = [], []
            for d, entry in enumerate(data["bases"]):
                if entry["codegree"] != d:
                    raise CacheError("bases out of order")

                def vec(items):
                    out = {}
                    for spec, v in items:
                        m = parse_monomial(spec)
                        if monomial_codegree(m) != d:
                            raise CacheError(f"monomial {spec} not in codegree {d}")
                        out[free.index[d][m]] = v
                    return out

                relations.append(lat.hermite(vec(r) for r in entry["relations"]))
                basis.append([vec(v) for v in entry["vectors"]])
                if len(basis[-1]) != entry["rank"]:
                    raise CacheError(f"codegree {d}: rank field disagrees with vectors")
            if len(basis) != n + 1:
                raise CacheError("missing codegrees")
        except (KeyError, TypeError, IndexError) as exc:
            raise CacheError(f"malformed cache: {exc}") from exc
        coords = [_coordinate_map(relations[d], len(free.monomials[d])) for d in range(n + 1)]
        table = cls(n, free, relations, coords, basis)
        table.validate()
        return table

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "LazardBasisTable":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CacheError(f"cannot read {path}: {exc}") from exc
        return cls.from_json(data)


def _coordinate_map(relations: list[dict], ncols: int) -> list[dict]:
    if not relations:
        return [{j: 1} for j in range(ncols)]
    return lat.integer_kernel(relations, ncols)


def build_lazard_basis(max_codegree: int, size_bound: int = DEFAULT_SIZE_BOUND) -> LazardBasisTable:
    """Construct the Lazard ring through codegree ``max_codegree``.

    Raises ``LatticeSizeError`` when a codegree's relation matrix would exceed
    ``size_bound`` entries (rows times columns).
    """
    if max_codegree < 0:
        raise ValueError("max_codegree must be non-negative")
    free = FreeMonomialRing(max_codegree)
    harvested = harvest_relations(max_codegree, free)
    relations: list[list[dict]] = [[]]
    coords: list[list[dict]] = [[{0: 1}]]
    basis: list[list[dict]] = [[{0: 1}]]
    for d in range(1, max_codegree + 1):
        monos = free.monomials[d]
        ncols = len(monos)
        h = lat.HermiteBasis(max_rows=max(1, size_bound // max(ncols, 1)))
        h.extend(harvested.get(d, []))
        # I_d = R_d + sum_g g * I_{d - cd(g)}
        for g in free.generators:
            c = g[0] + g[1] - 1
            if c >= d:
                break
            gm = ((g, 1),)
            lower = free.monomials[d - c]
            for row in relations[d - c]:
                h.add({free.index[d][mono_mul(lower[j], gm)]: v for j, v in row.items()})
        rels = h.rows()
        p_rows = _coordinate_map(rels, ncols)
        sections = lat.solve_sections(p_rows, ncols) if p_rows else []
        vecs = [h.reduce_vector(s) for s in sections]
        relations.append(rels)
        coords.append(p_rows)
        basis.append([dict(sorted(v.items())) for v in vecs])
        log.debug("codegree %d: %d monomials, rank %d", d, ncols, len(p_rows))
    return LazardBasisTable(max_codegree, free, relations, coords, basis)


def is_torsion_free(table: LazardBasisTable, d: int) -> bool:
    """Whether the relation lattice in codegree ``d`` is saturated."""
    ncols = len(table.free.monomials[d])
    sat = lat.integer_kernel(table.coords[d], ncols) if table.coords[d] else [
        {j: 1} for j in range(ncols)
    ]
    return lat.hermite(sat) == table.relations[d]


class LazardRing(CoefficientRing):
    """``L`` truncated at ``table.max_codegree`` as a coefficient ring."""

    def __init__(self, table: LazardBasisTable):
        self.tab = table
        self.max_codegree = table.max_codegree
        self.name = f"L<={table.max_codegree}"

    def rank(self, d):
        if 0 <= d <= self.max_codegree:
            return len(self.tab.basis[d])
        return 0

    def _product(self, c1, b1, c2, b2):
        tab = self.tab
        free = tab.free
        acc: dict = {}
        for j1, v1 in tab.basis[c1][b1].items():
            m1 = free.monomials[c1][j1]
            for j2, v2 in tab.basis[c2][b2].items():
                j = free.index[c1 + c2][mono_mul(m1, free.monomials[c2][j2])]
                acc[j] = acc.get(j, 0) + v1 * v2
        return dict(enumerate(tab.reduce_vector(c1 + c2, acc)))

    def label(self, c, b):
        if c == 0:
            return "1"
        return self.tab.basis_label(c, b)


# ---------------------------------------------------------------------------
# element-level operations


def normalize(expr: Mapping, table: LazardBasisTable) -> LazardElement:
    """Canonical coordinates of an integer combination of a-monomials.

    ``expr`` maps monomials (any form accepted by :func:`parse_monomial`, or
    the string ``"1"``) to integers.  Terms above ``table.max_codegree`` are
    dropped and flag the result as truncated.
    """
    ring = table.ring
    per_cd: dict[int, dict] = {}
    truncated = False
    for spec, v in expr.items():
        if not v:
            continue
        m = () if spec in ("1", 1, ()) else parse_monomial(spec)
        d = monomial_codegree(m)
        if d > table.max_codegree:
            truncated = True
            continue
        j = table.free.index[d][m]
        vec = per_cd.setdefault(d, {})
        vec[j] = vec.get(j, 0) + v
    flat = {}
    for d, vec in per_cd.items():
        for k, c in enumerate(table.reduce_vector(d, vec)):
            if c:
                flat[ring.flat(d, k)] = c
    return RingElement(ring, flat, truncated)


def generator_element(table: LazardBasisTable, i: int, j: int) -> LazardElement:
    """Canonical image of ``a_ij``."""
    return normalize({(((i, j), 1),): 1}, table)


def lazard_mul(x: LazardElement, y: LazardElement) -> LazardElement:
    if x.ring is not y.ring or not isinstance(x.ring, LazardRing):
        raise MismatchError("elements were built against different Lazard tables")
    return x * y


def lift(x: LazardElement) -> dict[tuple, int]:
    """Representative of ``x`` as ``{a-monomial: int}``."""
    tab = x.ring.tab
    out: dict = {}
    for f, v in x.flat.items():
        d, k = x.ring.unflat(f)
        for j, c in tab.basis[d][k].items():
            m = tab.free.monomials[d][j]
            out[m] = out.get(m, 0) + v * c
    return {m: v for m, v in out.items() if v}


# ---------------------------------------------------------------------------
# rational logarithm oracle


class LogOracle:
    """``a_ij -> [u^i v^j] exp(log u + log v)`` with ``log u = u + sum m_d u^(d+1)``.

    Images are polynomials in ``m_1, m_2, ...`` (dicts from exponent tuples to
    integers: the compositional inverse of ``log`` has integral
    coefficients).  Independent of the relation harvesting: it only expands
    a power series.
    """

    def __init__(self, max_codegree: int):
        self.n = max_codegree
        n = self.n
        # polynomials over Z[m_1..m_n] as {exponent tuple: int}
        self.nvars = n
        self._gen_images = self._expand()

    def _mono_m(self, d):
        e = [0] * self.nvars
        if d:
            e[d - 1] = 1
        return tuple(e)

    def _expand(self):
        n = self.n
        nv = self.nvars
        zero = (0,) * nv

        def padd(a, b, k=1):
            out = dict(a)
            for m, v in b.items():
                nv_ = out.get(m, 0) + k * v
                if nv_:
                    out[m] = nv_
                else:
                    out.pop(m, None)
            return out

        def pmul(a, b):
            out: dict = {}
            for m1, v1 in a.items():
                for m2, v2 in b.items():
                    m = tuple(x + y for x, y in zip(m1, m2))
                    out[m] = out.get(m, 0) + v1 * v2
            return {m: v for m, v in out.items() if v}

        # univariate series in s: list index = power; entries are m-polynomials
        top = n + 1
        log = [dict() for _ in range(top + 1)]
        log[1] = {zero: 1}
        for d in range(1, n + 1):
            log[d + 1] = {self._mono_m(d): 1}
        # compositional inverse exp with exp(log(s)) = s, solved degree by degree
        def smul(a, b):
            out = [dict() for _ in range(top + 1)]
            for i, ai in enumerate(a):
                if not ai:
                    continue
                for j, bj in enumerate(b):
                    if i + j > top or not bj:
                        continue
                    out[i + j] = padd(out[i + j], pmul(ai, bj))
            return out

        def compose(outer, inner):
            out = [dict() for _ in range(top + 1)]
            power = [dict() for _ in range(top + 1)]
            power[0] = {zero: 1}
            for k in range(1, top + 1):
                power = smul(power, inner)
                if outer[k]:
                    for i in range(top + 1):
                        if power[i]:
                            out[i] = padd(out[i], pmul(outer[k], power[i]))
            return out

        exp = [dict() for _ in range(top + 1)]
        exp[1] = {zero: 1}
        for k in range(2, top + 1):
            err = compose(exp, log)
            exp[k] = padd(exp[k], err[k], -1)
        # F(u, v) = exp(log u + log v): bivariate, entries (i, j) -> polynomial
        # s = log u + log v; keep as dict (i, j) -> poly
        def bmul(a, b):
            out: dict = {}
            for (i1, j1), p1 in a.items():
                for (i2, j2), p2 in b.items():
                    if i1 + i2 + j1 + j2 > top:
                        continue
                    key = (i1 + i2, j1 + j2)
                    out[key] = padd(out.get(key, {}), pmul(p1, p2))
            return {k: v for k, v in out.items() if v}

        s = {}
        for k, p in enumerate(log):
            if p:
                s[(k, 0)] = padd(s.get((k, 0), {}), p)
                s[(0, k)] = padd(s.get((0, k), {}), p)
        result: dict = {}
        power = {(0, 0): {zero: 1}}
        for k in range(1, top + 1):
            power = bmul(power, s)
            if exp[k]:
                for key, p in power.items():
                    result[key] = padd(result.get(key, {}), pmul(exp[k], p))
        return {(i, j): p for (i, j), p in result.items() if i >= 1 and j >= 1 and p}

    def generator_image(self, i: int, j: int) -> dict:
        if i + j - 1 > self.n:
            raise TruncationError("generator beyond oracle depth")
        return dict(self._gen_images.get((i, j), {}))

    def monomial_image(self, mono: tuple) -> dict:
        zero = (0,) * self.nvars
        out = {zero: 1}
        for (i, j), e in mono:
            g = self._gen_images.get((i, j), {})
            for _ in range(e):
                new: dict = {}
                for m1, v1 in out.items():
                    for m2, v2 in g.items():
                        m = tuple(x + y for x, y in zip(m1, m2))
                        new[m] = new.get(m, 0) + v1 * v2
                out = {m: v for m, v in new.items() if v}
        return out

    def combination_image(self, expr: Mapping[tuple, int]) -> dict:
        out: dict = {}
        for mono, v in expr.items():
            for m, c in self.monomial_image(mono).items():
                out[m] = out.get(m, 0) + v * c
        return {m: v for m, v in out.items() if v}


def format_log_polynomial(poly: Mapping[tuple, int]) -> str:
    terms = []
    for m in sorted(poly, key=lambda m: (sum((k + 1) * e for k, e in enumerate(m)), m), reverse=False):
        v = poly[m]
        mono = "*".join(
            (f"m{k + 1}" if e == 1 else f"m{k + 1}^{e}") for k, e in enumerate(m) if e
        )
        if not mono:
            terms.append(str(v))
        elif v == 1:
            terms.append(mono)
        elif v == -1:
            terms.append("-" + mono)
        else:
            terms.append(f"{v}*{mono}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


_oracles: dict[int, LogOracle] = {}


def log_oracle(n: int) -> LogOracle:
    for k, o in _oracles.items():
        if k >= n:
            return o
    o = LogOracle(n)
    _oracles[n] = o
    return o


def to_log_presentation(x: LazardElement) -> dict:
    """Image of ``x`` in ``Q[m_1, m_2, ...]`` (integral here) as
    ``{exponent tuple: int}``, exponents indexed ``m_1, m_2, ...``."""
    n = max(x.ring.max_codegree, 1)
    oracle = log_oracle(n)
    img = oracle.combination_image(lift(x))
    return {m[:n]: v for m, v in img.items()}


def oracle_rank(n: int, d: int) -> int:
    """Rational dimension spanned by images of all codegree-``d`` monomials."""
    free = FreeMonomialRing(n) if n >= d else FreeMonomialRing(d)
    oracle = log_oracle(max(n, d, 1))
    images = [oracle.monomial_image(m) for m in free.monomials[d]]
    return _rank_polys(images)


def _rank_polys(images) -> int:
    keys = sorted({m for img in images for m in img})
    idx = {m: k for k, m in enumerate(keys)}
    return lat.rank_q([{idx[m]: v for m, v in img.items()} for img in images])


def oracle_basis_independent(table: LazardBasisTable, d: int) -> bool:
    oracle = log_oracle(max(table.max_codegree, 1))
    free = table.free
    images = [
        oracle.combination_image({free.monomials[d][j]: v for j, v in vec.items()})
        for vec in table.basis[d]
    ]
    return _rank_polys(images) == len(images)


def relation_images_vanish(table: LazardBasisTable, d: int, harvested=None) -> bool:
    oracle = log_oracle(max(table.max_codegree, 1))
    free = table.free
    rels = table.relations[d] if harvested is None else harvested
    for r in rels:
        if oracle.combination_image({free.monomials[d][j]: v for j, v in r.items()}):
            return False
    return True


def generators_of_codegree(d: int) -> list[tuple[int, int]]:
    return [g for g in generators_upto(d) if g[0] + g[1] - 1 == d]

