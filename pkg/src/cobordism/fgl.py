"""Formal group laws as truncated coefficient tables, and their derived series.

A law is stored as ``{(i, j): b_ij}`` with ``i, j >= 1`` and ``i + j <= N``;
the linear part ``u + v`` is implicit.  Coefficients live in a graded
:class:`~cobordism.rings.CoefficientRing` and ``b_ij`` must sit in codegree
``i + j - 1`` so that ``F(u, v)`` is homogeneous of degree 1.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Mapping, Sequence

from .gps import DegreeError, GradedSeries, evaluate_law, substitute
from .lazard import LazardBasisTable, generator_element
from .rings import BetaRing, CoefficientRing, MismatchError, RingElement, TruncationError


class InsufficientTableError(TruncationError):
    """The Lazard table is too shallow for the requested truncation."""


@lru_cache(maxsize=None)
def beta_ring(max_codegree: int, laurent: bool = True) -> BetaRing:
    """Shared ``Z[beta]`` instances; series arithmetic compares rings by identity."""
    return BetaRing(max_codegree, laurent=laurent)


@lru_cache(maxsize=None)
def integer_ring() -> BetaRing:
    """``Z`` concentrated in degree 0."""
    return BetaRing(0, laurent=False, name="Z")


class FglTable:
    """Coefficients of ``F(u, v) = u + v + sum b_ij u^i v^j`` modulo degree ``order + 1``."""

    KINDS = ("universal", "additive", "multiplicative", "custom")

    def __init__(self, name: str, order: int, ring: CoefficientRing, coeffs: Mapping, check: bool = True):
        if name not in self.KINDS:
            raise ValueError(f"unknown law kind {name!r}")
        if order < 1:
            raise ValueError("order must be at least 1")
        self.name = name
        self.order = order
        self.ring = ring
        clean = {}
        for (i, j), c in coeffs.items():
            if isinstance(c, int):
                c = RingElement(ring, {0: c}) if c else RingElement(ring, {})
            if c.ring is not ring:
                raise MismatchError(f"coefficient b{i}{j} is not in {ring.name}")
            if i < 1 or j < 1:
                raise ValueError(f"b{i}{j}: F(u, 0) = u forbids pure powers")
            if i + j > order or c.is_zero():
                continue
            if any(cd != i + j - 1 for cd in c.codegrees()):
                raise DegreeError(f"b{i}{j} must have codegree {i + j - 1}, got {c.codegrees()}")
            clean[(i, j)] = c
        self.coeffs = dict(sorted(clean.items()))
        if check:
            for (i, j), c in self.coeffs.items():
                if self.coefficient(j, i) != c:
                    raise ValueError(f"b{i}{j} != b{j}{i}: law is not commutative")

    def coefficient(self, i: int, j: int) -> RingElement:
        c = self.coeffs.get((i, j))
        return c if c is not None else RingElement(self.ring, {})

    def series_ring(self, names=("u", "v"), order: int | None = None) -> GradedSeries:
        return GradedSeries(self.ring, names, order=self.order if order is None else order)

    def expansion(self, order: int | None = None) -> GradedSeries:
        """``F(u, v)`` as a two-variable series."""
        u, v = self.series_ring(order=order).generators()
        return fgl_sum(self, u, v)

    def truncate(self, order: int) -> "FglTable":
        if order > self.order:
            raise TruncationError(f"law known only to order {self.order}")
        return FglTable(self.name, order, self.ring, self.coeffs, check=False)

    def __str__(self):
        return f"F(u,v) = {self.expansion()}"

    def __repr__(self):
        return f"FglTable({self.name}, N={self.order}, {self.ring.name})"


def universal_fgl(order: int, table: LazardBasisTable) -> FglTable:
    if order < 1:
        raise ValueError("order must be at least 1")
    if table.max_codegree < order - 1:
        raise InsufficientTableError(
            f"order {order} needs a Lazard table through codegree {order - 1}, have {table.max_codegree}"
        )
    coeffs = {
        (i, s - i): generator_element(table, i, s - i)
        for s in range(2, order + 1)
        for i in range(1, s)
    }
    return FglTable("universal", order, table.ring, coeffs)


def additive_fgl(order: int, ring: CoefficientRing | None = None) -> FglTable:
    return FglTable("additive", order, ring or integer_ring(), {})


def multiplicative_fgl(order: int, ring: BetaRing | None = None) -> FglTable:
    """``u + v - beta*u*v`` over ``Z[beta, 1/beta]`` (beta in codegree 1)."""
    ring = ring or beta_ring(max(order - 1, 1))
    return FglTable("multiplicative", order, ring, {(1, 1): ring.value(1, -1)})


def custom_fgl(order: int, ring: CoefficientRing, coeffs: Mapping) -> FglTable:
    return FglTable("custom", order, ring, coeffs)


class UniSeries:
    """``c_1 u + c_2 u^2 + ... + c_N u^N`` with ``c_k`` in codegree ``k - 1``."""

    __slots__ = ("series",)

    def __init__(self, series: GradedSeries):
        if series.names != ("u",):
            raise MismatchError("a UniSeries is a series in the single variable u")
        series.check_bidegree(1)
        self.series = series

    @classmethod
    def from_coefficients(cls, ring: CoefficientRing, coeffs: Sequence, order: int | None = None) -> "UniSeries":
        order = len(coeffs) if order is None else order
        terms = {}
        for k, c in enumerate(coeffs, start=1):
            if isinstance(c, int):
                c = RingElement(ring, {0: c}) if c else RingElement(ring, {})
            terms[(k,)] = c.flat
        return cls(GradedSeries(ring, ("u",), order=order, terms=terms))

    @classmethod
    def variable(cls, ring: CoefficientRing, order: int) -> "UniSeries":
        return cls(GradedSeries.gen(ring, ("u",), 0, order=order))

    @property
    def order(self) -> int:
        return self.series.order

    @property
    def ring(self) -> CoefficientRing:
        return self.series.ring

    @property
    def truncated(self) -> bool:
        return self.series.truncated

    def coefficient(self, k: int) -> RingElement:
        return self.series.coefficient((k,))

    def coefficients(self) -> list[RingElement]:
        return [self.coefficient(k) for k in range(1, self.order + 1)]

    def is_invertible(self) -> bool:
        return self.coefficient(1).flat in ({0: 1}, {0: -1})

    def compose(self, inner: "UniSeries") -> "UniSeries":
        """``self(inner(u))``."""
        return UniSeries(substitute(self.series, {"u": inner.series}))

    def reversion(self) -> "UniSeries":
        """Compositional inverse ``g`` with ``self(g(u)) = u``."""
        if not self.is_invertible():
            raise ValueError("linear coefficient is not a unit; no compositional inverse")
        unit = self.coefficient(1).flat[0]
        u = UniSeries.variable(self.ring, self.order)
        higher = UniSeries(self.series - u.series * unit)
        g = UniSeries(u.series * unit)
        for _ in range(self.order):
            new = (u.series - higher.compose(g).series) * unit
            new.truncated = False
            if new.terms == g.series.terms:
                break
            g = UniSeries(new)
        return g

    def truncate(self, order: int) -> "UniSeries":
        return UniSeries(self.series.truncate(order))

    def __eq__(self, other):
        if isinstance(other, UniSeries):
            return self.series == other.series
        return NotImplemented

    def __hash__(self):
        return hash(self.series)

    def __str__(self):
        return str(self.series)

    def __repr__(self):
        return f"UniSeries(N={self.order}; {self.series})"


def _unwrap(x):
    return (x.series, True) if isinstance(x, UniSeries) else (x, False)


def fgl_sum(F: FglTable, x, y):
    """``F(x, y)`` for two series of the same shape (UniSeries or GradedSeries)."""
    xs, wrapped = _unwrap(x)
    ys, _ = _unwrap(y)
    xs._check(ys)
    if xs.ring is not F.ring:
        raise MismatchError(f"series over {xs.ring.name}, law over {F.ring.name}")
    if xs.order > F.order:
        raise TruncationError(f"series truncated at {xs.order} but law known only to order {F.order}")
    out = evaluate_law(F.coeffs, xs, ys)
    return UniSeries(out) if wrapped else out


def formal_inverse(F: FglTable, order: int | None = None) -> UniSeries:
    """``chi(u)`` with ``F(u, chi(u)) = 0``, found one degree per iteration."""
    order = F.order if order is None else order
    if order > F.order:
        raise TruncationError(f"law known only to order {F.order}")
    u = UniSeries.variable(F.ring, order).series
    chi = -u
    for _ in range(order):
        # F(u, chi) = u + chi + rest(u, chi), so chi = -u - rest(u, chi)
        new = chi - fgl_sum(F, u, chi)
        new.truncated = False
        if new.terms == chi.terms:
            break
        chi = new
    return UniSeries(chi)


def n_series(F: FglTable, n: int, order: int | None = None) -> UniSeries:
    """The formal multiple ``[n](u)``; negative ``n`` composes with the inverse."""
    order = F.order if order is None else order
    if order > F.order:
        raise TruncationError(f"law known only to order {F.order}")
    u = UniSeries.variable(F.ring, order)
    acc = UniSeries(u.series.like({}))
    for _ in range(abs(n)):
        acc = fgl_sum(F, acc, u)
    if n < 0:
        acc = formal_inverse(F, order).compose(acc)
    return acc
