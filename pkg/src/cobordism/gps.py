"""Truncated graded power series ``A[[g_1..g_m]]_gr`` over a coefficient ring.

Generators carry positive weights (``t_i`` weight 1, ``gamma_k`` weight k).
A term ``a * g^m`` has weighted degree ``|m|`` and cohomological degree
``|m| - codegree(a)``; terms with ``|m|`` above the truncation order are
dropped, and any operation that drops a nonzero contribution sets the
``truncated`` flag on its result.
"""
from __future__ import annotations

import itertools
from typing import Mapping, Sequence

from . import kernel
from .intlattice import HermiteBasis
from .rings import CoefficientRing, MismatchError, RingElement, TruncationError


class DegreeError(ValueError):
    """A grading constraint is violated."""


class NotSymmetricError(ValueError):
    pass


class EliminationError(ValueError):
    """The relation cannot be solved for its leading generator over Z."""


def monomials_of_weight(weights: Sequence[int], p: int) -> list[tuple]:
    """All exponent vectors of weighted degree exactly ``p``, in graded-lex
    order (larger leading exponent first)."""
    n = len(weights)
    out: list[tuple] = []

    def rec(k, left, acc):
        if k == n - 1:
            if left % weights[k] == 0:
                out.append(tuple(acc) + (left // weights[k],))
            return
        for e in range(left // weights[k], -1, -1):
            rec(k + 1, left - e * weights[k], acc + [e])

    if n == 0:
        return [()] if p == 0 else []
    rec(0, p, [])
    return out


class GradedSeries:
    """Sparse truncated series; ``terms`` maps exponent tuples to
    ``{flat coefficient index: int}``."""

    __slots__ = ("ring", "names", "weights", "order", "terms", "truncated")

    def __init__(
        self,
        ring: CoefficientRing,
        names: Sequence[str],
        weights: Sequence[int] | None = None,
        order: int = 0,
        terms: Mapping | None = None,
        truncated: bool = False,
    ):
        self.ring = ring
        self.names = tuple(names)
        self.weights = tuple(weights) if weights is not None else (1,) * len(self.names)
        if len(self.weights) != len(self.names) or any(w < 1 for w in self.weights):
            raise ValueError("need one positive weight per generator")
        self.order = order
        clean = {}
        for m, coef in (terms or {}).items():
            if isinstance(coef, RingElement):
                coef = coef.flat
            coef = {f: v for f, v in coef.items() if v}
            if not coef:
                continue
            if self.weight(m) > order:
                truncated = True
                continue
            clean[tuple(m)] = coef
        self.terms = clean
        self.truncated = truncated

    # construction ---------------------------------------------------------
    def like(self, terms=None, truncated=False, order=None) -> "GradedSeries":
        return GradedSeries(
            self.ring, self.names, self.weights,
            self.order if order is None else order, terms or {}, truncated,
        )

    @classmethod
    def gen(cls, ring, names, k, weights=None, order=0) -> "GradedSeries":
        names = tuple(names)
        exps = tuple(1 if i == k else 0 for i in range(len(names)))
        return cls(ring, names, weights, order, {exps: {0: 1}})

    @classmethod
    def constant(cls, value, ring, names, weights=None, order=0) -> "GradedSeries":
        if isinstance(value, int):
            value = RingElement(ring, {0: value})
        return cls(ring, names, weights, order, {(0,) * len(tuple(names)): value.flat})

    def generator(self, k: int | str) -> "GradedSeries":
        if isinstance(k, str):
            k = self.names.index(k)
        return GradedSeries.gen(self.ring, self.names, k, self.weights, self.order)

    def generators(self) -> list["GradedSeries"]:
        return [self.generator(k) for k in range(len(self.names))]

    def scalar(self, value) -> "GradedSeries":
        return GradedSeries.constant(value, self.ring, self.names, self.weights, self.order)

    # inspection -----------------------------------------------------------
    def weight(self, m) -> int:
        return sum(e * w for e, w in zip(m, self.weights))

    @property
    def shape(self):
        return (id(self.ring), self.names, self.weights, self.order)

    def _check(self, other: "GradedSeries") -> None:
        if not isinstance(other, GradedSeries):
            raise MismatchError(f"expected GradedSeries, got {type(other).__name__}")
        if other.ring is not self.ring:
            raise MismatchError("series have different coefficient rings")
        if other.names != self.names or other.weights != self.weights:
            raise MismatchError("series have different generators")
        if other.order != self.order:
            raise MismatchError(f"truncation orders differ: {self.order} vs {other.order}")

    def coefficient(self, m) -> RingElement:
        return RingElement(self.ring, self.terms.get(tuple(m), {}))

    def degrees(self) -> set[int]:
        cd = self.ring.codegree_of
        return {self.weight(m) - cd(f) for m, coef in self.terms.items() for f in coef}

    @property
    def degree(self) -> int | None:
        """Cohomological degree if homogeneous and nonzero, else None."""
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self) -> RingElement:
        return self.coefficient((0,) * len(self.names))

    def homogeneous_part(self, p: int) -> "GradedSeries":
        return self.like({m: c for m, c in self.terms.items() if self.weight(m) == p})

    def check_bidegree(self, degree: int) -> None:
        """Raise unless every term obeys ``codegree = weight - degree``."""
        cd = self.ring.codegree_of
        for m, coef in self.terms.items():
            for f in coef:
                if self.weight(m) - cd(f) != degree:
                    raise DegreeError(
                        f"term {m} has codegree {cd(f)}, expected {self.weight(m) - degree}"
                    )

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, RingElement)):
            other = self.scalar(other)
        self._check(other)
        out = {m: dict(c) for m, c in self.terms.items()}
        for m, coef in other.terms.items():
            tgt = out.setdefault(m, {})
            for f, v in coef.items():
                nv = tgt.get(f, 0) + v
                if nv:
                    tgt[f] = nv
                else:
                    del tgt[f]
        return self.like(out, self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return self.like(
            {m: {f: -v for f, v in c.items()} for m, c in self.terms.items()}, self.truncated
        )

    def __sub__(self, other):
        if isinstance(other, (int, RingElement)):
            other = self.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return self.like({}, self.truncated)
            return self.like(
                {m: {f: other * v for f, v in c.items()} for m, c in self.terms.items()},
                self.truncated,
            )
        if isinstance(other, RingElement):
            other = self.scalar(other)
        return series_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = self.scalar(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return (
            other.ring is self.ring
            and other.names == self.names
            and other.weights == self.weights
            and other.order == self.order
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((self.names, self.order, len(self.terms)))

    def equal_upto(self, other: "GradedSeries", order: int) -> bool:
        return self.truncate(order).terms == other.truncate(order).terms

    # structure maps -------------------------------------------------------
    def truncate(self, order: int) -> "GradedSeries":
        """Image under the surjection to a lower truncation order."""
        if order > self.order:
            raise TruncationError(f"cannot raise truncation order {self.order} to {order}")
        kept = {m: c for m, c in self.terms.items() if self.weight(m) <= order}
        return self.like(kept, self.truncated or len(kept) < len(self.terms), order=order)

    def set_zero(self, indices: Sequence[int]) -> "GradedSeries":
        """Quotient by the generators at ``indices``: a series in the rest."""
        drop = set(indices)
        keep = [k for k in range(len(self.names)) if k not in drop]
        out = {}
        for m, c in self.terms.items():
            if any(m[k] for k in drop):
                continue
            out[tuple(m[k] for k in keep)] = c
        return GradedSeries(
            self.ring, [self.names[k] for k in keep], [self.weights[k] for k in keep],
            self.order, out, self.truncated,
        )

    def permute(self, perm: Sequence[int]) -> "GradedSeries":
        """Apply ``g_k -> g_perm[k]`` (equal weights required along orbits)."""
        n = len(self.names)
        if sorted(perm) != list(range(n)) or any(
            self.weights[k] != self.weights[perm[k]] for k in range(n)
        ):
            raise ValueError("not a weight-preserving permutation")
        out = {}
        for m, c in self.terms.items():
            nm = [0] * n
            for k, e in enumerate(m):
                nm[perm[k]] = e
            out[tuple(nm)] = c
        return self.like(out, self.truncated)

    def is_symmetric(self, group: Sequence[Sequence[int]] | None = None) -> bool:
        n = len(self.names)
        if group is None:
            group = symmetric_group_generators(n)
        return all(self.permute(g).terms == self.terms for g in group)

    def map_coefficients(self, ring: CoefficientRing, fn) -> "GradedSeries":
        """Apply ``fn: flat dict -> flat dict`` of ``ring`` to each coefficient."""
        out = {m: fn(c) for m, c in self.terms.items()}
        return GradedSeries(ring, self.names, self.weights, self.order, out, self.truncated)

    def embed(self, names, weights=None, order=None) -> "GradedSeries":
        """View in a ring with more generators (matched by name)."""
        names = tuple(names)
        idx = [names.index(nm) for nm in self.names]
        out = {}
        for m, c in self.terms.items():
            nm = [0] * len(names)
            for k, e in zip(idx, m):
                nm[k] = e
            out[tuple(nm)] = c
        return GradedSeries(
            self.ring, names, weights, self.order if order is None else order, out, self.truncated
        )

    def substitute(self, assignment: Mapping) -> "GradedSeries":
        return substitute(self, assignment)

    # output ---------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (self.weight(t[0]), tuple(-e for e in t[0])))

    def to_json(self) -> list:
        ring = self.ring
        out = []
        for m, coef in self.sorted_terms():
            parts: dict = {}
            for f, v in sorted(coef.items()):
                c, b = ring.unflat(f)
                parts.setdefault(c, [0] * ring.rank(c))[b] = v
            out.append({"monomial": list(m), "coefficient": {str(c): p for c, p in sorted(parts.items())}})
        return out

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"GradedSeries[{self.ring.name}; {','.join(self.names)}; D={self.order}]({self})"


def series_from_json(data, ring: CoefficientRing, names, weights=None, order: int = 0) -> GradedSeries:
    """Inverse of :meth:`GradedSeries.to_json`."""
    terms = {}
    for entry in data:
        flat = {}
        for c, coords in entry["coefficient"].items():
            c = int(c)
            if len(coords) != ring.rank(c):
                raise MismatchError(f"codegree {c} expects {ring.rank(c)} coordinates")
            for b, v in enumerate(coords):
                if v:
                    flat[ring.flat(c, b)] = v
        terms[tuple(entry["monomial"])] = flat
    return GradedSeries(ring, names, weights, order, terms)


def format_monomial(m, names) -> str:
    parts = []
    for e, nm in zip(m, names):
        if e == 1:
            parts.append(nm)
        elif e:
            parts.append(f"{nm}^{e}")
    return "*".join(parts)


def format_series(x: GradedSeries) -> str:
    pieces = []
    for m, coef in x.sorted_terms():
        mono = format_monomial(m, x.names)
        for f in sorted(coef):
            v = coef[f]
            lab = x.ring.label(*x.ring.unflat(f))
            body = "*".join(s for s in (lab if lab != "1" else "", mono) if s) or "1"
            if v == 1:
                pieces.append(body)
            elif v == -1:
                pieces.append("-" + body)
            elif body == "1":
                pieces.append(str(v))
            else:
                pieces.append(f"{v}*{body}")
    if not pieces:
        return "0"
    return " + ".join(pieces).replace("+ -", "- ")


def _flatten(x: GradedSeries):
    w = x.weights
    out = []
    for m, coef in x.terms.items():
        key = kernel.pack(m)
        wt = sum(e * wk for e, wk in zip(m, w))
        for f, v in coef.items():
            out.append((key, wt, f, v))
    return out


def series_mul(x: GradedSeries, y: GradedSeries, backend: str | None = None) -> GradedSeries:
    """Truncated product; sets ``truncated`` if any contribution was cut."""
    x._check(y)
    n = len(x.names)
    acc, trunc = kernel.mul_terms(_flatten(x), _flatten(y), x.order, x.ring.table, n, backend)
    terms: dict = {}
    for (key, f), v in acc.items():
        terms.setdefault(kernel.unpack(key, n), {})[f] = v
    return x.like(terms, trunc or x.truncated or y.truncated)


# ---------------------------------------------------------------------------
# substitution


def substitute(x: GradedSeries, assignment: Mapping) -> GradedSeries:
    """Ring map sending each generator of ``x`` to a series.

    ``assignment`` maps generator names (or indices) to series in a common
    target ring; generators left out must also be generators of the target
    and map to themselves.  Assigned series need zero constant term and
    cohomological degree equal to the generator's weight.
    """
    amap = {}
    for k, v in assignment.items():
        idx = x.names.index(k) if isinstance(k, str) else k
        amap[idx] = v
    target = next(iter(amap.values()), None)
    if target is None:
        return x
    for v in amap.values():
        target._check(v)
    images = []
    for k, nm in enumerate(x.names):
        if k in amap:
            img = amap[k]
        elif nm in target.names:
            img = target.generator(nm)
        else:
            raise KeyError(f"no image for generator {nm}")
        if not img.constant_term().is_zero():
            raise DegreeError(f"image of {nm} has a nonzero constant term")
        if not img.is_zero():
            d = img.degree
            if d != x.weights[k]:
                raise DegreeError(f"image of {nm} has degree {d}, generator has {x.weights[k]}")
        images.append(img)
    if target.order > x.order:
        raise TruncationError("target truncation exceeds the source truncation")

    powers = [[target.scalar(1)] for _ in images]

    def power(k, e):
        lst = powers[k]
        while len(lst) <= e:
            lst.append(lst[-1] * images[k])
        return lst[e]

    if x.ring is not target.ring:
        raise MismatchError("substitution target must share the coefficient ring")
    result = target.like({}, x.truncated)
    # Terms sorted by exponent tuple share prefixes; cache partial products.
    partial: dict = {(): target.scalar(1)}
    for m in sorted(x.terms):
        start = max(d for d in range(len(m) + 1) if m[:d] in partial)
        prod = partial[m[:start]]
        for k in range(start, len(m)):
            if m[k]:
                prod = prod * power(k, m[k])
            partial[m[: k + 1]] = prod
        result = result + prod * RingElement(x.ring, x.terms[m])
    return result


def symmetric_group_generators(n: int) -> list[list[int]]:
    """Adjacent transpositions generating S_n."""
    gens = []
    for k in range(n - 1):
        p = list(range(n))
        p[k], p[k + 1] = p[k + 1], p[k]
        gens.append(p)
    return gens


def elementary_symmetric(target: GradedSeries, k: int, idx: Sequence[int] | None = None) -> GradedSeries:
    """``e_k`` of the generators at ``idx`` (default all) of ``target``."""
    idx = list(range(len(target.names))) if idx is None else list(idx)
    n = len(target.names)
    terms = {}
    for combo in itertools.combinations(idx, k):
        m = [0] * n
        for c in combo:
            m[c] = 1
        terms[tuple(m)] = {0: 1}
    return target.like(terms)


# ---------------------------------------------------------------------------
# symmetric functions


class SymmetricPresentation:
    """A series in elementary symmetric generators ``gamma_1..gamma_n``.

    ``series`` lives in ``A[[gamma]]`` with ``deg gamma_k = k``; ``roots`` is
    the ambient ``t``-ring it came from.
    """

    def __init__(self, series: GradedSeries, roots_names: Sequence[str]):
        self.series = series
        self.roots_names = tuple(roots_names)

    def expand(self, roots: GradedSeries) -> GradedSeries:
        """Substitute ``gamma_k -> e_k(t)``."""
        assign = {
            nm: elementary_symmetric(roots, k + 1) for k, nm in enumerate(self.series.names)
        }
        return substitute(self.series, assign)

    def __str__(self):
        return str(self.series)


def gamma_ring(x: GradedSeries, names: Sequence[str] | None = None) -> GradedSeries:
    n = len(x.names)
    names = tuple(names) if names else tuple(f"g{k}" for k in range(1, n + 1))
    return GradedSeries(x.ring, names, tuple(range(1, n + 1)), x.order)


def to_elementary_basis(x: GradedSeries, names: Sequence[str] | None = None) -> SymmetricPresentation:
    """Rewrite a symmetric series in the elementary symmetric functions.

    Works degree by degree: the lexicographically largest remaining monomial
    ``t^a`` (with ``a`` non-increasing) is cancelled by
    ``coef * prod_k e_k^(a_k - a_{k+1})``.
    """
    if any(w != 1 for w in x.weights):
        raise DegreeError("elementary basis conversion needs weight-1 roots")
    if not x.is_symmetric():
        raise NotSymmetricError("series is not invariant under permutations of the roots")
    n = len(x.names)
    gring = gamma_ring(x, names)
    es = [elementary_symmetric(x, k) for k in range(1, n + 1)]
    cache: dict = {}

    def e_monomial(g):
        if g not in cache:
            prod = x.scalar(1)
            for k, e in enumerate(g):
                if e:
                    prod = prod * es[k] ** e
            cache[g] = prod
        return cache[g]

    rest = x.like(dict(x.terms))
    out: dict = {}
    while rest.terms:
        lead = max(rest.terms, key=lambda m: (sum(m), m))
        if any(lead[k] < lead[k + 1] for k in range(n - 1)):
            raise NotSymmetricError("leading monomial is not a partition; series not symmetric")
        g = tuple(lead[k] - (lead[k + 1] if k + 1 < n else 0) for k in range(n))
        coef = RingElement(x.ring, rest.terms[lead])
        out[g] = coef.flat
        rest = rest - e_monomial(g) * coef
    return SymmetricPresentation(gring.like(out), x.names)


# ---------------------------------------------------------------------------
# elimination


class Elimination:
    """Solution ``g_k -> sigma`` of a relation ``r = u*g_k + ...`` with unit ``u``."""

    def __init__(self, relation: GradedSeries, index: int, sigma: GradedSeries, iterations: int):
        self.relation = relation
        self.index = index
        self.sigma = sigma
        self.iterations = iterations

    @property
    def name(self) -> str:
        return self.relation.names[self.index]

    def quotient_names(self):
        r = self.relation
        return [nm for k, nm in enumerate(r.names) if k != self.index]

    def apply(self, x: GradedSeries) -> GradedSeries:
        """Image of ``x`` in the quotient ring (generators other than g_k)."""
        target = GradedSeries(
            x.ring, self.quotient_names(),
            [w for k, w in enumerate(x.weights) if k != self.index], x.order,
        )
        sig = self.sigma
        assign = {}
        for k, nm in enumerate(x.names):
            assign[nm] = sig if k == self.index else target.generator(nm)
        return substitute(x, assign)

    def residual(self) -> GradedSeries:
        return self.apply(self.relation)


def eliminate(relation: GradedSeries, index: int = 0) -> Elimination:
    """Solve ``relation = 0`` for generator ``index`` by degreewise iteration.

    The relation must be homogeneous with linear part ``u * g`` in that
    generator, ``u = +-1``.  Each iteration of
    ``sigma <- -u * (relation - u*g)(g = sigma)`` fixes one more weighted
    degree, so at most ``order`` iterations are needed.
    """
    r = relation
    n = len(r.names)
    target = GradedSeries(
        r.ring, [nm for k, nm in enumerate(r.names) if k != index],
        [w for k, w in enumerate(r.weights) if k != index], r.order,
    )
    if r.weights[index] > r.order:
        # the generator is already zero at this truncation
        if not r.is_zero():
            raise EliminationError("relation survives although its generator is truncated away")
        return Elimination(r, index, target.like({}), 0)
    lin = tuple(1 if k == index else 0 for k in range(n))
    u = r.coefficient(lin)
    if u.flat not in ({0: 1}, {0: -1}):
        raise EliminationError(
            f"linear coefficient of {r.names[index]} is {u}, not a unit integer"
        )
    if not r.is_homogeneous() or r.degree != r.weights[index]:
        raise DegreeError("relation must be homogeneous of the eliminated generator's degree")
    unit = u.flat[0]
    rest = r - r.generator(index) * unit
    sigma = target.like({})
    iterations = 0
    for iterations in range(1, r.order + 2):
        assign = {nm: (sigma if k == index else target.generator(nm)) for k, nm in enumerate(r.names)}
        new = substitute(rest, assign) * (-unit)
        new.truncated = False
        if new.terms == sigma.terms:
            break
        sigma = new
    return Elimination(r, index, sigma, iterations)


def lattice_of(vectors) -> HermiteBasis:
    h = HermiteBasis()
    h.extend(vectors)
    return h


def evaluate_law(coeffs: Mapping, x: GradedSeries, y: GradedSeries) -> GradedSeries:
    """``x + y + sum c_ij x^i y^j`` for a coefficient table ``{(i, j): element}``.

    ``x`` and ``y`` need zero constant term; terms with ``i + j`` above the
    truncation order cannot contribute and are skipped.
    """
    x._check(y)
    for s in (x, y):
        if not s.constant_term().is_zero():
            raise DegreeError("formal group law arguments need zero constant term")
    order = x.order
    by_i: dict = {}
    for (i, j), c in coeffs.items():
        if i + j <= order:
            by_i.setdefault(i, []).append((j, c))
    if not by_i:
        return x + y
    ypow = [x.scalar(1), y]
    top_j = max(j for lst in by_i.values() for j, _ in lst)
    while len(ypow) <= top_j:
        ypow.append(ypow[-1] * y)
    result = x + y
    xp = x.scalar(1)
    for i in range(1, max(by_i) + 1):
        xp = xp * x
        if i not in by_i or xp.is_zero():
            continue
        inner = x.like({})
        for j, c in sorted(by_i[i]):
            inner = inner + ypow[j] * c
        result = result + xp * inner
    return result
