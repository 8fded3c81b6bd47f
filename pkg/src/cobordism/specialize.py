"""Ring maps out of the Lazard ring, classified by a target formal group law.

``a_ij -> b_ij`` extends to a ring map ``L -> A`` exactly when the target
coefficients satisfy the law's axioms; the map is built once on the
canonical basis and then applied coefficientwise to elements, series and
presentations.  At a finite truncation the completed tensor product is the
levelwise image, so specialization commutes with lowering the truncation.
"""
from __future__ import annotations

from .classifying import Restriction, RingPresentation
from .fgl import FglTable, InsufficientTableError, UniSeries, additive_fgl, multiplicative_fgl
from .gps import GradedSeries
from .lazard import LazardBasisTable, harvest_relations
from .rings import MismatchError, RingElement


class RelationNotKilledError(ValueError):
    """The target coefficients violate a defining relation of ``L``."""


class SpecializationMap:
    """``L -> target.ring`` given by ``a_ij -> target.coefficient(i, j)``."""

    def __init__(self, target: FglTable, table: LazardBasisTable, images: dict[int, dict]):
        self.target = target
        self.table = table
        self.source = table.ring
        self.ring = target.ring
        self.images = images

    @property
    def kind(self) -> str:
        return self.target.name

    def assignment(self) -> dict[tuple[int, int], RingElement]:
        return {g: self.target.coefficient(*g) for g in self.table.free.generators}

    def map_flat(self, flat: dict) -> dict:
        out: dict = {}
        for f, v in flat.items():
            for g, c in self.images[f].items():
                nv = out.get(g, 0) + v * c
                if nv:
                    out[g] = nv
                else:
                    del out[g]
        return out

    def __repr__(self):
        return f"SpecializationMap({self.source.name} -> {self.ring.name}, {self.kind})"


def _evaluate(free, d, vec, values, ring) -> RingElement:
    """Image of a combination of codegree-``d`` a-monomials."""
    acc = RingElement(ring, {})
    for j, v in vec.items():
        term = RingElement(ring, {0: v})
        for g, e in free.monomials[d][j]:
            for _ in range(e):
                term = term * values[g]
        acc = acc + term
    return acc


def make_specialization(target: FglTable, table: LazardBasisTable) -> SpecializationMap:
    n = table.max_codegree
    if target.order < n + 1:
        raise InsufficientTableError(
            f"target law known to order {target.order}; the table needs order {n + 1}"
        )
    ring = target.ring
    if ring.truncates and ring.max_codegree < n:
        raise InsufficientTableError(f"target ring {ring.name} stops below codegree {n}")
    free = table.free
    values = {g: target.coefficient(*g) for g in free.generators}
    for d, rows in sorted(harvest_relations(n, free).items()):
        for row in rows:
            img = _evaluate(free, d, row, values, ring)
            if not img.is_zero():
                raise RelationNotKilledError(
                    f"a codegree-{d} relation maps to {img}; the target is not a formal group law"
                )
    for d in range(n + 1):
        for row in table.relations[d]:
            if not _evaluate(free, d, row, values, ring).is_zero():
                raise RelationNotKilledError(f"a codegree-{d} relation survives")
    src = table.ring
    images = {}
    for d in range(n + 1):
        for k, vec in enumerate(table.basis[d]):
            images[src.flat(d, k)] = _evaluate(free, d, vec, values, ring).flat
    return SpecializationMap(target, table, images)


def apply_specialization(s: SpecializationMap, x):
    """Image of an element, series, ``UniSeries`` or presentation over ``s.ring``."""
    if isinstance(x, RingElement):
        if x.ring is not s.source:
            raise MismatchError("element is not over the specialization's Lazard table")
        return RingElement(s.ring, s.map_flat(x.flat), x.truncated)
    if isinstance(x, UniSeries):
        return UniSeries(apply_specialization(s, x.series))
    if isinstance(x, GradedSeries):
        if x.ring is not s.source:
            raise MismatchError("series is not over the specialization's Lazard table")
        return x.map_coefficients(s.ring, s.map_flat)
    if isinstance(x, RingPresentation):
        if x.ring is not s.source:
            raise MismatchError("presentation is not over the specialization's Lazard table")
        out = RingPresentation(
            x.name, s.ring, x.generators, x.order, x.degrees,
            [apply_specialization(s, r) for r in x.relations],
            {nm: apply_specialization(s, v) for nm, v in x.eliminated.items()},
        )
        if x.restriction is not None:
            out.restriction = Restriction(out, apply_specialization(s, x.restriction.target))
        return out
    raise TypeError(f"cannot specialize {type(x).__name__}")


def named_specialization(kind: str, table: LazardBasisTable) -> SpecializationMap | None:
    """``cobordism`` (identity, returns None), ``chow`` or ``ktheory``."""
    order = table.max_codegree + 1
    if kind == "cobordism":
        return None
    if kind == "chow":
        return make_specialization(additive_fgl(order), table)
    if kind == "ktheory":
        return make_specialization(multiplicative_fgl(order), table)
    raise ValueError(f"unknown specialization {kind!r}")

