"""Cobordism rings of classifying spaces of tori, GL_n and SL_n.

Each ring is a graded power series ring over a coefficient ring, truncated
at weighted degree ``D`` in its generators.  For a torus the generators are
the Chern roots ``t_1..t_n`` (``t_k = c_1`` of the k-th basis character; for
rank one, ``t_1 = zeta = c_1(O(-1))``).  For ``GL_n`` they are
``gamma_k = e_k(t)`` and for ``SL_n`` the relation ``c_1(det) = 0`` removes
``gamma_1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import intlattice as lat
from .fgl import FglTable, InsufficientTableError, fgl_sum, n_series, universal_fgl
from .gps import (
    Elimination,
    GradedSeries,
    eliminate,
    elementary_symmetric,
    format_monomial,
    monomials_of_weight,
    series_from_json,
    substitute,
    symmetric_group_generators,
    to_elementary_basis,
)
from .lazard import LazardBasisTable
from .rings import CoefficientRing, MismatchError, RingElement, TruncationError

SCHEMA_VERSION = 1


def _ring_of(source) -> CoefficientRing:
    return source.ring if isinstance(source, LazardBasisTable) else source


def torus_names(n: int) -> list[str]:
    return [f"t{k}" for k in range(1, n + 1)]


def gamma_names(n: int, start: int = 1) -> list[str]:
    return [f"gamma{k}" for k in range(start, n + 1)]


@dataclass(frozen=True)
class BasisEntry:
    """``label(codegree, index) * monomial`` in one graded piece."""

    monomial: tuple
    codegree: int
    index: int


class RingPresentation:
    """Truncated ``A[[g_1..g_m]]_gr`` with its graded pieces listed.

    ``relations`` hold series that vanish in the ring; when a relation has
    been solved for a generator the solution is kept in ``eliminated`` and
    the generator no longer appears in ``generators``.
    """

    def __init__(
        self,
        name: str,
        ring: CoefficientRing,
        generators: Sequence[tuple[str, int]],
        order: int,
        degrees: Iterable[int] | None = None,
        relations: Sequence[GradedSeries] = (),
        eliminated: Mapping[str, GradedSeries] | None = None,
    ):
        self.name = name
        self.ring = ring
        self.generators = tuple((str(nm), int(w)) for nm, w in generators)
        self.order = order
        self.relations = tuple(relations)
        self.eliminated = dict(eliminated or {})
        for r in self.relations:
            if not r.is_homogeneous():
                raise ValueError("relations must be homogeneous")
        self.degrees = tuple(range(order + 1) if degrees is None else sorted(set(degrees)))
        self.pieces = {i: self._piece(i) for i in self.degrees}
        self.restriction: Restriction | None = None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(nm for nm, _ in self.generators)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(w for _, w in self.generators)

    def series_ring(self) -> GradedSeries:
        return GradedSeries(self.ring, self.names, self.weights, self.order)

    def _piece(self, i: int) -> list[BasisEntry]:
        out = []
        for p in range(self.order + 1):
            c = p - i
            try:
                r = self.ring.piece_rank(c)
            except TruncationError as exc:
                raise InsufficientTableError(
                    f"degree {i} at truncation {self.order} needs coefficients in codegree {c}"
                ) from exc
            if not r:
                continue
            for m in monomials_of_weight(self.weights, p):
                out.extend(BasisEntry(m, c, b) for b in range(r))
        return out

    def piece(self, i: int) -> list[BasisEntry]:
        if i not in self.pieces:
            self.pieces[i] = self._piece(i)
        return self.pieces[i]

    def rank(self, i: int) -> int:
        return len(self.piece(i))

    def basis_series(self, i: int) -> list[GradedSeries]:
        ring = self.ring
        zero = self.series_ring()
        return [
            zero.like({e.monomial: {ring.flat(e.codegree, e.index): 1}})
            for e in self.piece(i)
        ]

    def label(self, e: BasisEntry) -> str:
        coef = self.ring.label(e.codegree, e.index)
        mono = format_monomial(e.monomial, self.names)
        return "*".join(s for s in (coef if coef != "1" else "", mono) if s) or "1"

    def coordinates(self, x: GradedSeries, i: int) -> dict:
        """Coordinates of the degree-``i`` part of ``x`` in :meth:`piece`."""
        index = {(e.monomial, e.codegree, e.index): k for k, e in enumerate(self.piece(i))}
        ring = self.ring
        out = {}
        for m, coef in x.terms.items():
            for f, v in coef.items():
                c, b = ring.unflat(f)
                if x.weight(m) - c != i:
                    continue
                out[index[(m, c, b)]] = v
        return out

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        def rel(s):
            return {"series": str(s), "terms": s.to_json()}

        return {
            "name": self.name,
            "coefficients": self.ring.name,
            "t_degree": self.order,
            "generators": [{"name": nm, "degree": w} for nm, w in self.generators],
            "relations": [dict(rel(r), generators=list(r.names)) for r in self.relations],
            "eliminated": [
                dict(rel(s), generator=nm, generators=list(s.names))
                for nm, s in sorted(self.eliminated.items())
            ],
            "graded_pieces": [
                {"degree": i, "rank": self.rank(i), "basis": [self.label(e) for e in self.piece(i)]}
                for i in self.degrees
            ],
        }

    @classmethod
    def from_json(cls, data: dict, ring: CoefficientRing) -> "RingPresentation":
        if data["coefficients"] != ring.name:
            raise MismatchError(f"presentation is over {data['coefficients']}, not {ring.name}")
        order = data["t_degree"]
        gens = [(g["name"], g["degree"]) for g in data["generators"]]

        def load(entry):
            names = entry["generators"]
            ws = [_weight_of(nm, gens) for nm in names]
            return series_from_json(entry["terms"], ring, names, ws, order)

        pres = cls(
            data["name"], ring, gens, order,
            [p["degree"] for p in data["graded_pieces"]],
            [load(r) for r in data["relations"]],
            {e["generator"]: load(e) for e in data["eliminated"]},
        )
        for p in data["graded_pieces"]:
            if [pres.label(e) for e in pres.piece(p["degree"])] != p["basis"]:
                raise MismatchError(f"degree {p['degree']} basis does not match")
        return pres

    def __eq__(self, other):
        if not isinstance(other, RingPresentation):
            return NotImplemented
        return (
            self.name == other.name
            and self.ring is other.ring
            and self.generators == other.generators
            and self.order == other.order
            and self.degrees == other.degrees
            and self.relations == other.relations
            and self.eliminated == other.eliminated
            and self.pieces == other.pieces
        )

    def __repr__(self):
        ranks = {i: self.rank(i) for i in self.degrees}
        return f"RingPresentation({self.name}, {self.ring.name}, D={self.order}, ranks={ranks})"


def _weight_of(name: str, gens) -> int:
    for nm, w in gens:
        if nm == name:
            return w
    # eliminated generators: gamma_k has weight k, t_k weight 1
    if name.startswith("gamma"):
        return int(name[5:])
    return 1


class Restriction:
    """``Omega(BGL_n) -> Omega(BT)``: ``gamma_k -> e_k(t_1..t_n)``."""

    def __init__(self, source: RingPresentation, target: RingPresentation):
        self.source = source
        self.target = target
        roots = target.series_ring()
        self.images = {
            nm: elementary_symmetric(roots, k + 1) for k, nm in enumerate(source.names)
        }

    def __call__(self, x: GradedSeries) -> GradedSeries:
        return substitute(x, self.images)


def _check_depth(ring: CoefficientRing, order: int) -> None:
    if ring.truncates and ring.max_codegree < order:
        raise InsufficientTableError(
            f"truncation {order} needs coefficients through codegree {order}, have {ring.max_codegree}"
        )


def ring_BT(n: int, order: int, source, degrees: Iterable[int] | None = None) -> RingPresentation:
    """``L[[t_1..t_n]]`` truncated at ``order`` (``source``: table or coefficient ring)."""
    ring = _ring_of(source)
    _check_depth(ring, order)
    return RingPresentation(f"BT{n}", ring, [(nm, 1) for nm in torus_names(n)], order, degrees)


def ring_BGL(n: int, order: int, source, degrees: Iterable[int] | None = None) -> RingPresentation:
    """``L[[gamma_1..gamma_n]]``; the ``restriction`` attribute maps it to ``ring_BT(n)``."""
    ring = _ring_of(source)
    _check_depth(ring, order)
    pres = RingPresentation(
        f"BGL{n}", ring, [(nm, k) for k, nm in enumerate(gamma_names(n), start=1)], order, degrees
    )
    pres.restriction = Restriction(pres, ring_BT(n, order, ring, degrees))
    return pres


def determinant_relation(n: int, order: int, F: FglTable) -> GradedSeries:
    """``c_1(det) = F(t_1, ..., t_n)`` rewritten in ``gamma_1..gamma_n``."""
    roots = GradedSeries(F.ring, torus_names(n), order=order)
    ts = roots.generators()
    acc = ts[0]
    for t in ts[1:]:
        acc = fgl_sum(F, acc, t)
    acc.truncated = False
    return to_elementary_basis(acc, gamma_names(n)).series


def ring_BSL(
    n: int, order: int, table: LazardBasisTable, degrees: Iterable[int] | None = None,
    F: FglTable | None = None,
) -> RingPresentation:
    """``Omega(BGL_n)`` modulo ``c_1(det)``, solved for ``gamma_1``."""
    if n < 1:
        raise ValueError("rank must be positive")
    F = F or universal_fgl(max(order, 1), table)
    ring = F.ring
    _check_depth(ring, order)
    rel = determinant_relation(n, order, F)
    elim = eliminate(rel, 0)
    pres = RingPresentation(
        f"BSL{n}", ring, [(nm, k) for k, nm in enumerate(gamma_names(n), start=1) if k > 1],
        order, degrees, [rel], {"gamma1": elim.sigma},
    )
    pres.elimination = elim
    return pres


def relation_quotient(pres: RingPresentation, relation: GradedSeries, degree: int) -> tuple[int, bool]:
    """Rank of ``piece(degree) / (relation * piece(degree - w))`` and whether
    the quotient is torsion-free (the ideal lattice is saturated).

    ``pres`` must have the relation's generators; ``w`` is the relation's degree.
    """
    if relation.names != pres.names:
        raise MismatchError("relation is not in the presentation's generators")
    w = relation.degree
    size = pres.rank(degree)
    if w is None:
        if not relation.is_zero():
            raise ValueError("relation must be homogeneous")
        return size, True
    vecs = []
    for b in pres.basis_series(degree - w):
        prod = relation * b
        vec = pres.coordinates(prod, degree)
        if vec:
            vecs.append(vec)
    r = lat.rank_q(vecs)
    ideal = lat.hermite(vecs)
    if not ideal:
        return size, True
    sat = lat.integer_kernel(lat.integer_kernel(ideal, size), size)
    return size - r, lat.hermite(sat) == ideal


def chern_of_character(chi: Sequence[int], F: FglTable, ambient) -> GradedSeries:
    """``[n_1](t_1) +_F ... +_F [n_k](t_k)`` in the torus ring ``ambient``."""
    base = ambient.series_ring() if isinstance(ambient, RingPresentation) else ambient
    if len(chi) != len(base.names):
        raise MismatchError(f"character has {len(chi)} entries for a rank-{len(base.names)} torus")
    if base.ring is not F.ring:
        raise MismatchError("law and ambient ring have different coefficients")
    if F.order < base.order:
        raise TruncationError(f"law known to order {F.order}, ambient truncated at {base.order}")
    acc = base.like({})
    for k, nk in enumerate(chi):
        if not nk:
            continue
        ser = n_series(F, nk, base.order).series
        acc = fgl_sum(F, acc, substitute(ser, {"u": base.generator(k)}))
    return acc


class CharacterMap:
    """Characters of a torus, as integer rows over a basis ``chi_1..chi_n``."""

    def __init__(self, matrix: Sequence[Sequence[int]], rank: int | None = None):
        rows = [tuple(int(v) for v in row) for row in matrix]
        self.rank = rank if rank is not None else (len(rows[0]) if rows else 0)
        if any(len(r) != self.rank for r in rows):
            raise ValueError("every character needs one entry per basis character")
        self.matrix = tuple(rows)

    def compose(self, inner: "CharacterMap") -> "CharacterMap":
        """Rows of ``self`` are over the characters listed by ``inner``."""
        if len(inner.matrix) != self.rank:
            raise MismatchError("inner map lists the wrong number of characters")
        rows = [
            tuple(sum(r[k] * inner.matrix[k][j] for k in range(self.rank)) for j in range(inner.rank))
            for r in self.matrix
        ]
        return CharacterMap(rows, inner.rank)

    def chern_classes(self, F: FglTable, ambient) -> list[GradedSeries]:
        return [chern_of_character(row, F, ambient) for row in self.matrix]

    def __eq__(self, other):
        return isinstance(other, CharacterMap) and (self.matrix, self.rank) == (other.matrix, other.rank)


# ---------------------------------------------------------------------------
# Weyl group invariants


@dataclass
class InvariantSlice:
    """Integer basis of the invariants in one (t-degree, codegree) slice.

    Coordinates index ``monomials x range(rank)`` in that order.
    """

    t_degree: int
    codegree: int
    monomials: list
    rank: int
    basis: list

    @property
    def size(self) -> int:
        return len(self.monomials) * self.rank


def _slice_action(monos, rank, perm):
    """Rows of ``perm - id`` acting on a slice (only the nonzero ones)."""
    index = {m: k for k, m in enumerate(monos)}
    rows: dict[int, dict] = {}
    for k, m in enumerate(monos):
        pm = [0] * len(m)
        for v, e in enumerate(m):
            pm[perm[v]] = e
        k2 = index[tuple(pm)]
        if k2 == k:
            continue
        for b in range(rank):
            src, dst = k * rank + b, k2 * rank + b
            rows.setdefault(dst, {})[src] = 1
            rows.setdefault(src, {})[src] = -1
    return [rows[k] for k in sorted(rows)]


def weyl_invariants(
    n: int,
    group: Sequence[Sequence[int]] | None,
    window: Iterable[tuple[int, int]] | None,
    ambient: RingPresentation,
) -> dict[tuple[int, int], InvariantSlice]:
    """Fixed lattices of a permutation group on the torus slices.

    ``group`` is a list of generating permutations of ``0..n-1`` (default:
    adjacent transpositions, so ``S_n``); ``window`` lists ``(t_degree,
    codegree)`` slices (default: all within the truncation).
    """
    if len(ambient.names) != n:
        raise MismatchError("ambient torus has the wrong rank")
    group = symmetric_group_generators(n) if group is None else [list(g) for g in group]
    ring = ambient.ring
    if window is None:
        top = ambient.order if not ring.truncates else min(ambient.order, ring.max_codegree)
        window = [(p, c) for p in range(ambient.order + 1) for c in range(top + 1)]
    out = {}
    for p, c in window:
        if p > ambient.order:
            raise TruncationError(f"t-degree {p} beyond truncation {ambient.order}")
        monos = monomials_of_weight(ambient.weights, p)
        rank = ring.rank(c)
        size = len(monos) * rank
        rows = [r for g in group for r in _slice_action(monos, rank, g)]
        if not size:
            basis = []
        elif rows:
            basis = lat.integer_kernel(rows, size)
        else:
            basis = [{k: 1} for k in range(size)]
        out[(p, c)] = InvariantSlice(p, c, monos, rank, basis)
    return out


@dataclass
class SliceComparison:
    t_degree: int
    codegree: int
    invariant_rank: int
    image_rank: int
    rational_equal: bool
    integral_equal: bool


def restriction_image(bgl: RingPresentation, p: int, c: int, monos: list) -> list[dict]:
    """Images of ``gamma^a * e_{c,b}`` (weight ``p``) in slice coordinates."""
    res = bgl.restriction
    ring = bgl.ring
    rank = ring.rank(c)
    index = {m: k for k, m in enumerate(monos)}
    zero = bgl.series_ring()
    vecs = []
    for a in monomials_of_weight(bgl.weights, p):
        expanded = res(zero.like({a: {0: 1}}))
        for b in range(rank):
            img = expanded * RingElement(ring, {ring.flat(c, b): 1})
            vec = {}
            for m, coef in img.terms.items():
                if sum(m) != p:
                    continue
                for f, v in coef.items():
                    c2, b2 = ring.unflat(f)
                    if c2 == c:
                        vec[index[m] * rank + b2] = v
            vecs.append(vec)
    return vecs


def compare_with_gl(n: int, order: int, table: LazardBasisTable, window=None) -> list[SliceComparison]:
    """Slicewise comparison of the ``S_n`` invariants with the image of ``BGL_n``.

    Rational equality: every image vector is invariant and the ranks agree.
    Integral equality: the two lattices have the same Hermite form.
    """
    bt = ring_BT(n, order, table)
    bgl = ring_BGL(n, order, table)
    group = symmetric_group_generators(n)
    slices = weyl_invariants(n, group, window, bt)
    out = []
    for (p, c), sl in sorted(slices.items()):
        img = restriction_image(bgl, p, c, sl.monomials)
        rows = [r for g in group for r in _slice_action(sl.monomials, sl.rank, g)]
        fixed = all(lat.dot(r, v) == 0 for r in rows for v in img)
        img_rank = lat.rank_q(img)
        rational = fixed and img_rank == len(sl.basis)
        integral = lat.hermite(img) == lat.hermite(sl.basis)
        out.append(SliceComparison(p, c, len(sl.basis), img_rank, rational, integral))
    return out


def expected_torus_rank(n: int, order: int, degree: int, lazard_ranks: Sequence[int]) -> int:
    """``sum_{p <= D} #monomials(p) * rank L_{p - degree}``."""
    total = 0
    for p in range(order + 1):
        c = p - degree
        if c < 0:
            continue
        if c >= len(lazard_ranks):
            raise InsufficientTableError(f"need Lazard rank in codegree {c}")
        total += len(monomials_of_weight([1] * n, p)) * lazard_ranks[c]
    return total


def monomial_count(weights: Sequence[int], p: int) -> int:
    return len(monomials_of_weight(weights, p))


def iter_characters(n: int, bound: int):
    return itertools.product(range(-bound, bound + 1), repeat=n)
