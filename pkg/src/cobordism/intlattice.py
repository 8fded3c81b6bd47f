"""Exact integer lattice routines on sparse rows.

Rows are ``dict[int, int]`` mapping a column index to a nonzero integer.
Column 0 is the leading (most significant) column.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

SparseRow = dict


class LatticeSizeError(RuntimeError):
    """Raised when a lattice exceeds the configured size budget."""


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _axpy(row: dict, k: int, other: dict) -> None:
    """row += k * other, in place, dropping zeros."""
    for c, v in other.items():
        nv = row.get(c, 0) + k * v
        if nv:
            row[c] = nv
        else:
            row.pop(c, None)


def _combine(a: dict, ka: int, b: dict, kb: int) -> dict:
    out = {c: ka * v for c, v in a.items()} if ka else {}
    if kb:
        _axpy(out, kb, b)
    return {c: v for c, v in out.items() if v}


class HermiteBasis:
    """Incrementally maintained row-style Hermite normal form.

    Rows are inserted one at a time; :meth:`rows` returns the reduced
    echelon basis (positive pivots, entries above each pivot reduced into
    ``[0, pivot)``).
    """

    def __init__(self, max_rows: int | None = None):
        self._piv: dict[int, dict] = {}
        self._reduced = True
        self.max_rows = max_rows

    def __len__(self) -> int:
        return len(self._piv)

    def add(self, row: dict) -> bool:
        """Insert a row; return True if the lattice grew.

        Rows already in the basis are kept tail-reduced (nearest-integer
        quotients) so entries stay small; :meth:`rows` finishes the exact
        Hermite reduction.
        """
        r = {c: v for c, v in row.items() if v}
        piv = self._piv
        grew = False
        while r:
            lead = min(r)
            p_row = piv.get(lead)
            if p_row is None:
                self._install(lead, r)
                return True
            p = p_row[lead]
            q = r[lead]
            if q % p == 0:
                _axpy(r, -(q // p), p_row)
                continue
            g, s, t = _xgcd(p, q)
            new_p = _combine(p_row, s, r, t)
            r = _combine(p_row, -(q // g), r, p // g)
            self._install(lead, new_p)
            grew = True
        return grew

    def _install(self, lead: int, r: dict) -> None:
        piv = self._piv
        if r[lead] < 0:
            r = {c: -v for c, v in r.items()}
        # tail-reduce the new row against later pivots
        c = lead
        while True:
            later = [x for x in r if x > c and x in piv]
            if not later:
                break
            c = min(later)
            p = piv[c][c]
            k = (2 * r[c] + p) // (2 * p)
            if k:
                _axpy(r, -k, piv[c])
        piv[lead] = r
        p = r[lead]
        for pc, other in piv.items():
            if pc < lead:
                v = other.get(lead)
                if v:
                    k = (2 * v + p) // (2 * p)
                    if k:
                        _axpy(other, -k, r)
        self._reduced = False
        if self.max_rows is not None and len(piv) > self.max_rows:
            raise LatticeSizeError(f"lattice rank exceeds budget of {self.max_rows} rows")

    def extend(self, rows: Iterable[dict]) -> None:
        for r in sorted(rows, key=lambda r: (len(r), sorted(r.items()))):
            self.add(r)

    def _reduce(self) -> None:
        if self._reduced:
            return
        cols = sorted(self._piv)
        # Row by row, left to right: subtracting row pc only touches columns
        # >= pc, so entries already reduced stay reduced.
        for j, cj in enumerate(cols):
            row = self._piv[cj]
            for pc in cols[j + 1:]:
                v = row.get(pc, 0)
                if v:
                    prow = self._piv[pc]
                    p = prow[pc]
                    if not 0 <= v < p:
                        _axpy(row, -(v // p), prow)
        self._reduced = True

    def pivots(self) -> list[int]:
        return sorted(self._piv)

    def rows(self) -> list[dict]:
        self._reduce()
        return [dict(sorted(self._piv[c].items())) for c in sorted(self._piv)]

    def reduce_vector(self, vec: dict) -> dict:
        """Reduce ``vec`` modulo the lattice (pivot entries into [0, p))."""
        self._reduce()
        r = {c: v for c, v in vec.items() if v}
        for pc in sorted(self._piv):
            v = r.get(pc, 0)
            if not v:
                continue
            prow = self._piv[pc]
            k = v // prow[pc]
            if k:
                _axpy(r, -k, prow)
        return r

    def contains(self, vec: dict) -> bool:
        return not self.reduce_vector(vec)


def hermite(rows: Iterable[dict], max_rows: int | None = None) -> list[dict]:
    h = HermiteBasis(max_rows)
    h.extend(rows)
    return h.rows()


def integer_kernel(rows: Sequence[dict], ncols: int) -> list[dict]:
    """Basis of ``{y in Z^ncols : row . y = 0 for every row}`` in Hermite form.

    The result spans a saturated lattice.
    """
    nr = len(rows)
    # Column-major elimination on [A^T | I]: each column j of A becomes a row
    # (A[:, j], e_j); the entries of A occupy the leading positions.
    aug = []
    for j in range(ncols):
        r = {i: row[j] for i, row in enumerate(rows) if row.get(j)}
        r[nr + j] = 1
        aug.append(r)
    h = HermiteBasis()
    h.extend(aug)
    kern = []
    for r in h.rows():
        if min(r) >= nr:
            kern.append({c - nr: v for c, v in r.items()})
    return hermite(kern)


def rank_q(vectors: Sequence[dict]) -> int:
    """Rank over the rationals (fraction-free elimination)."""
    piv: dict[int, dict] = {}
    for vec in vectors:
        r = {c: Fraction(v) for c, v in vec.items() if v}
        while r:
            lead = min(r)
            prow = piv.get(lead)
            if prow is None:
                inv = 1 / r[lead]
                piv[lead] = {c: v * inv for c, v in r.items()}
                break
            k = r[lead]
            for c, v in prow.items():
                nv = r.get(c, 0) - k * v
                if nv:
                    r[c] = nv
                else:
                    r.pop(c, None)
    return len(piv)


def solve_sections(p_rows: Sequence[dict], ncols: int) -> list[dict]:
    """Integer vectors ``b_k`` with ``P b_k = e_k`` for a surjective ``P``.

    ``P`` (given by its rows) must map ``Z^ncols`` onto ``Z^len(P)``.
    """
    r = len(p_rows)
    # Row-reduce [P^T | I_ncols]: unimodular U with U P^T in Hermite form.
    aug = []
    for j in range(ncols):
        row = {i: p_rows[i][j] for i in range(r) if p_rows[i].get(j)}
        row[r + j] = 1
        aug.append(row)
    h = HermiteBasis()
    h.extend(aug)
    top = [row for row in h.rows() if min(row) < r]
    if len(top) != r or any(top[k].get(k) != 1 for k in range(r)):
        raise ValueError("map is not surjective onto Z^r")
    # top[k] = (e_k + upper-triangular tail in P-coords, u_k), unimodular rows.
    # Back-substitute to obtain exact unit vectors.
    sols: list[dict] = [dict() for _ in range(r)]
    for k in range(r - 1, -1, -1):
        row = top[k]
        u = {c - r: v for c, v in row.items() if c >= r}
        for i in range(k + 1, r):
            v = row.get(i, 0)
            if v:
                _axpy(u, -v, sols[i])
        sols[k] = u
    return sols


def dot(a: dict, b: dict) -> int:
    if len(a) > len(b):
        a, b = b, a
    return sum(v * b.get(c, 0) for c, v in a.items())
