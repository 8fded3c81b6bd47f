"""Pure-Python truncated sparse product (fallback for ``_ckernel``)."""
from __future__ import annotations


def mul_terms(a, b, max_weight, table):
    """Multiply two flattened series.

    ``a`` and ``b`` are sequences of ``(key, weight, f, coef)`` where ``key``
    packs the monomial exponents (so monomial product is key addition),
    ``weight`` is the weighted degree and ``f`` a flat coefficient-basis index.
    Returns ``(acc, truncated)`` with ``acc`` mapping ``(key, f)`` to nonzero
    coefficients.
    """
    pairs = table.pairs
    beyond = table.beyond
    acc: dict = {}
    truncated = False
    b = sorted(b, key=lambda t: t[1])
    for ka, wa, fa, ca in a:
        room = max_weight - wa
        for kb, wb, fb, cb in b:
            if wb > room:
                truncated = True
                break
            entries = pairs.get((fa, fb))
            if entries is None:
                if (fa, fb) in beyond:
                    truncated = True
                continue
            key = ka + kb
            p = ca * cb
            for f, c in entries:
                k = (key, f)
                v = acc.get(k, 0) + p * c
                if v:
                    acc[k] = v
                else:
                    del acc[k]
    return acc, truncated
