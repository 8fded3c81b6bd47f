"""Graded coefficient rings with finite-rank pieces indexed by codegree.

Every ring exposes a flat basis index ``f`` covering all of its graded
pieces inside a codegree window ``[0, max_codegree]`` and a table of
structure constants used by the series kernel.
"""
from __future__ import annotations

from functools import cached_property
from typing import Iterable

import numpy as np


class TruncationError(ValueError):
    """An operation needs data beyond a truncation order."""


class MismatchError(ValueError):
    """Operands come from incompatible rings, tables or truncations."""


class StructureTable:
    """Structure constants ``e_f1 * e_f2 = sum c * e_f`` on flat indices."""

    def __init__(self, nflat: int, pairs: dict, beyond: set):
        self.nflat = nflat
        self.pairs = pairs
        self.beyond = beyond
        self._csr = None

    def csr(self):
        if self._csr is None:
            n = self.nflat
            counts = np.zeros(n * n + 1, dtype=np.int64)
            for (f1, f2), entries in self.pairs.items():
                counts[f1 * n + f2 + 1] = len(entries)
            row_ptr = np.cumsum(counts).astype(np.int64)
            col_f = np.zeros(int(row_ptr[-1]), dtype=np.int32)
            col_c = np.zeros(int(row_ptr[-1]), dtype=np.int64)
            for (f1, f2), entries in self.pairs.items():
                s = row_ptr[f1 * n + f2]
                for k, (f, c) in enumerate(entries):
                    col_f[s + k] = f
                    col_c[s + k] = c
            beyond = np.zeros(n * n, dtype=np.uint8)
            for f1, f2 in self.beyond:
                beyond[f1 * n + f2] = 1
            self._csr = (n, row_ptr, col_f, col_c, beyond)
        return self._csr


class CoefficientRing:
    """Base class: subclasses define ``name``, ``max_codegree``, ``rank`` and
    ``_product(c1, b1, c2, b2) -> {b: coef}`` for codegree ``c1 + c2``."""

    name = "ring"
    max_codegree = 0
    # False when products leaving the window are genuinely zero rather than
    # cut off by a truncation order.
    truncates = True

    def rank(self, d: int) -> int:
        raise NotImplementedError

    def _product(self, c1, b1, c2, b2) -> dict:
        raise NotImplementedError

    def label(self, c: int, b: int) -> str:
        return f"e{c}_{b}"

    def piece_rank(self, c: int) -> int:
        """Rank in codegree ``c`` of the untruncated ring, when it is known."""
        if c < 0:
            return 0
        if c > self.max_codegree:
            if self.truncates:
                raise TruncationError(f"codegree {c} is beyond truncation {self.max_codegree}")
            return 0
        return self.rank(c)

    @cached_property
    def offsets(self) -> list[int]:
        out, acc = [], 0
        for d in range(self.max_codegree + 1):
            out.append(acc)
            acc += self.rank(d)
        out.append(acc)
        return out

    @property
    def nflat(self) -> int:
        return self.offsets[-1]

    def flat(self, c: int, b: int) -> int:
        return self.offsets[c] + b

    @cached_property
    def _unflat(self) -> list[tuple[int, int]]:
        return [(d, b) for d in range(self.max_codegree + 1) for b in range(self.rank(d))]

    def unflat(self, f: int) -> tuple[int, int]:
        return self._unflat[f]

    def codegree_of(self, f: int) -> int:
        return self._unflat[f][0]

    @cached_property
    def table(self) -> StructureTable:
        pairs, beyond = {}, set()
        top = self.max_codegree
        for f1, (c1, b1) in enumerate(self._unflat):
            for f2, (c2, b2) in enumerate(self._unflat):
                if c1 + c2 > top:
                    if self.truncates:
                        beyond.add((f1, f2))
                    continue
                prod = self._product(c1, b1, c2, b2)
                base = self.offsets[c1 + c2]
                entries = tuple((base + b, v) for b, v in sorted(prod.items()) if v)
                if entries:
                    pairs[(f1, f2)] = entries
        return StructureTable(self.nflat, pairs, beyond)

    # element helpers -------------------------------------------------
    def mul_flat(self, x: dict, y: dict) -> tuple[dict, bool]:
        tab = self.table
        out: dict = {}
        truncated = False
        for f1, v1 in x.items():
            for f2, v2 in y.items():
                entries = tab.pairs.get((f1, f2))
                if entries is None:
                    truncated |= (f1, f2) in tab.beyond
                    continue
                p = v1 * v2
                for f, c in entries:
                    nv = out.get(f, 0) + p * c
                    if nv:
                        out[f] = nv
                    else:
                        del out[f]
        return out, truncated

    def one(self) -> "RingElement":
        return RingElement(self, {0: 1})

    def zero(self) -> "RingElement":
        return RingElement(self, {})

    def element(self, parts: dict) -> "RingElement":
        """Build from ``{codegree: coordinate sequence}``."""
        flat = {}
        for c, coords in parts.items():
            if c > self.max_codegree or c < 0:
                raise TruncationError(f"codegree {c} outside 0..{self.max_codegree}")
            coords = tuple(coords)
            if len(coords) != self.rank(c):
                raise MismatchError(
                    f"codegree {c} has rank {self.rank(c)}, got {len(coords)} coordinates"
                )
            for b, v in enumerate(coords):
                if v:
                    flat[self.offsets[c] + b] = v
        return RingElement(self, flat)

    def basis_element(self, c: int, b: int) -> "RingElement":
        return RingElement(self, {self.flat(c, b): 1})


class RingElement:
    """Element of a :class:`CoefficientRing`, stored as ``{flat index: int}``.

    Components above ``ring.max_codegree`` are absent, not zero: asking for
    one raises :class:`TruncationError`.
    """

    __slots__ = ("ring", "flat", "truncated")

    def __init__(self, ring: CoefficientRing, flat: dict, truncated: bool = False):
        self.ring = ring
        self.flat = {f: v for f, v in flat.items() if v}
        self.truncated = truncated

    def codegrees(self) -> list[int]:
        return sorted({self.ring.codegree_of(f) for f in self.flat})

    def component(self, c: int) -> tuple[int, ...]:
        ring = self.ring
        if c < 0:
            return ()
        if c > ring.max_codegree:
            raise TruncationError(f"codegree {c} is beyond truncation {ring.max_codegree}")
        base = ring.offsets[c]
        return tuple(self.flat.get(base + b, 0) for b in range(ring.rank(c)))

    def parts(self) -> dict[int, tuple[int, ...]]:
        return {c: self.component(c) for c in self.codegrees()}

    def is_zero(self) -> bool:
        return not self.flat

    def is_homogeneous(self) -> bool:
        return len(self.codegrees()) <= 1

    def _check(self, other):
        if isinstance(other, int):
            return RingElement(self.ring, {0: other}) if other else RingElement(self.ring, {})
        if not isinstance(other, RingElement) or other.ring is not self.ring:
            raise MismatchError("elements belong to different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.flat)
        for f, v in other.flat.items():
            out[f] = out.get(f, 0) + v
        return RingElement(self.ring, out, self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ring, {f: -v for f, v in self.flat.items()}, self.truncated)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return RingElement(self.ring, {f: other * v for f, v in self.flat.items()}, self.truncated)
        other = self._check(other)
        prod, trunc = self.ring.mul_flat(self.flat, other.flat)
        return RingElement(self.ring, prod, trunc or self.truncated or other.truncated)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            return self.flat == ({0: other} if other else {})
        return isinstance(other, RingElement) and other.ring is self.ring and other.flat == self.flat

    def __hash__(self):
        return hash(tuple(sorted(self.flat.items())))

    def __repr__(self):
        return f"{type(self).__name__}({self.ring.name}: {format_element(self)})"

    def __str__(self):
        return format_element(self)


def format_element(x: RingElement) -> str:
    ring = x.ring
    terms = []
    for f in sorted(x.flat):
        v = x.flat[f]
        c, b = ring.unflat(f)
        lab = ring.label(c, b)
        if lab == "1":
            terms.append(str(v))
        elif v == 1:
            terms.append(lab)
        elif v == -1:
            terms.append("-" + lab)
        else:
            terms.append(f"{v}*{lab}")
    if not terms:
        return "0"
    s = " + ".join(terms)
    return s.replace("+ -", "- ")


# ---------------------------------------------------------------------------
# Free polynomial ring on the symbols A_ij


def gen_key(g: tuple) -> tuple:
    """Order on symbols: codegree, then ``j``.

    Relations are eliminated from the front, so within a codegree the
    symbols with ``i <= j`` are the ones that survive in normal forms.
    """
    return (g[0] + g[1], g[1])


def generators_upto(n: int) -> list[tuple[int, int]]:
    """Symbols ``(i, j)`` with ``i, j >= 1`` and codegree ``i + j - 1 <= n``,
    in :func:`gen_key` order."""
    return [(c + 1 - j, j) for c in range(1, n + 1) for j in range(1, c + 1)]


def _multisets(gens_by_cd: dict, d: int, min_idx: int, order: list) -> Iterable[tuple]:
    if d == 0:
        yield ()
        return
    for k in range(min_idx, len(order)):
        g = order[k]
        cd = g[0] + g[1] - 1
        if cd > d:
            break
        for rest in _multisets(gens_by_cd, d - cd, k, order):
            yield (g,) + rest


def _as_monomial(factors: tuple) -> tuple:
    out: dict = {}
    for g in factors:
        out[g] = out.get(g, 0) + 1
    return tuple(sorted(out.items(), key=lambda t: gen_key(t[0])))


def monomial_codegree(mono: tuple) -> int:
    return sum((i + j - 1) * e for (i, j), e in mono)


def monomial_str(mono: tuple) -> str:
    if not mono:
        return "1"
    parts = []
    for (i, j), e in mono:
        s = f"a{i}{j}" if i < 10 and j < 10 else f"a{i}_{j}"
        parts.append(s if e == 1 else f"{s}^{e}")
    return "*".join(parts)


def monomial_sort_key(mono: tuple):
    """Order used to list a-monomials inside one codegree.

    Monomials with fewer factors come first; ties break on the reversed
    list of generator exponents, so powers of low generators precede
    products involving higher ones.
    """
    gens = sorted({g for g, _ in mono}, key=gen_key)
    nfac = sum(e for _, e in mono)
    vec = tuple(sorted((gen_key(g), e) for g, e in mono))
    return (nfac, vec, gens)


class FreeMonomialRing(CoefficientRing):
    """``Z[A_ij]`` truncated at codegree ``max_codegree`` (monomial basis)."""

    truncates = True

    def __init__(self, max_codegree: int, symmetric: bool = False):
        self.max_codegree = max_codegree
        self.name = f"Z[A]<={max_codegree}"
        gens = generators_upto(max_codegree)
        if symmetric:
            gens = [g for g in gens if g[0] <= g[1]]
        self.generators = gens
        self.monomials: list[list[tuple]] = []
        self.index: list[dict] = []
        for d in range(max_codegree + 1):
            monos = sorted(
                {_as_monomial(f) for f in _multisets(None, d, 0, gens)}, key=monomial_sort_key
            )
            self.monomials.append(monos)
            self.index.append({m: k for k, m in enumerate(monos)})

    def rank(self, d: int) -> int:
        if 0 <= d <= self.max_codegree:
            return len(self.monomials[d])
        return 0

    def _product(self, c1, b1, c2, b2):
        m = mono_mul(self.monomials[c1][b1], self.monomials[c2][b2])
        return {self.index[c1 + c2][m]: 1}

    def label(self, c, b):
        return monomial_str(self.monomials[c][b])

    def monomial_element(self, mono: tuple) -> RingElement:
        c = monomial_codegree(mono)
        return RingElement(self, {self.flat(c, self.index[c][mono]): 1})

    def generator(self, i: int, j: int) -> RingElement:
        return self.monomial_element((((i, j), 1),))


def mono_mul(m1: tuple, m2: tuple) -> tuple:
    out = dict(m1)
    for g, e in m2:
        out[g] = out.get(g, 0) + e
    return tuple(sorted(out.items(), key=lambda t: gen_key(t[0])))


class BetaRing(CoefficientRing):
    """``Z[beta]`` with ``beta`` in codegree 1, truncated at ``max_codegree``.

    With ``max_codegree=0`` this is ``Z`` in degree 0 (the Chow target), where
    higher products are genuinely zero.  ``laurent`` records whether the target
    is the Laurent ring ``Z[beta, 1/beta]``; it only affects rank counting of
    completed graded pieces, since images of ``L`` never need ``1/beta``.
    """

    def __init__(self, max_codegree: int, laurent: bool = False, name: str | None = None):
        self.max_codegree = max_codegree
        self.laurent = laurent
        self.truncates = max_codegree > 0
        self.name = name or ("Z[beta,1/beta]" if laurent else "Z[beta]")

    def rank(self, d):
        return 1 if 0 <= d <= self.max_codegree else 0

    def _product(self, c1, b1, c2, b2):
        return {0: 1}

    def label(self, c, b):
        if c == 0:
            return "1"
        return "beta" if c == 1 else f"beta^{c}"

    def piece_rank(self, c: int) -> int:
        if self.laurent:
            return 1
        if not self.truncates:
            return 1 if c == 0 else 0
        return 1 if c >= 0 else 0

    def value(self, c: int, v: int) -> RingElement:
        return RingElement(self, {self.flat(c, 0): v})
