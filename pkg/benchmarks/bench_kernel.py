"""Compare the compiled and pure-Python series product kernels.

    python3 benchmarks/bench_kernel.py [--repeat 3] [--seed 7]
"""
from __future__ import annotations

import argparse
import random
import time

from cobordism import kernel
from cobordism.classifying import ring_BT
from cobordism.fgl import integer_ring
from cobordism.gps import GradedSeries, _flatten
from cobordism.lazard import build_lazard_basis


def dense_series(rng, ring, nvars, order, degrees, bound=5):
    """Every basis term in the given cohomological degrees, random coefficients."""
    pres = ring_BT(nvars, order, ring, degrees=degrees)
    terms = {}
    for i in degrees:
        for e in pres.piece(i):
            terms.setdefault(e.monomial, {})[ring.flat(e.codegree, e.index)] = rng.randint(-bound, bound)
    return GradedSeries(ring, pres.names, order=order, terms=terms)


def cases(rng):
    lz = build_lazard_basis(8).ring
    zz = integer_ring()
    for label, ring, nvars, order, da, db in (
        ("Z[t1..t3], D=24", zz, 3, 24, range(25), range(25)),
        ("Z[t1..t4], D=16", zz, 4, 16, range(17), range(17)),
        ("L[[t1,t2]], D=8", lz, 2, 8, [0, 1], [0, 1]),
        ("L[[t1..t3]], D=8", lz, 3, 8, [0, 1], [0]),
    ):
        yield label, dense_series(rng, ring, nvars, order, da), dense_series(rng, ring, nvars, order, db)


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)
    if kernel.BACKEND != "compiled":
        print("compiled kernel unavailable; build with `pip install -e . --no-build-isolation`")
        return 1
    rng = random.Random(args.seed)
    print(f"{'case':<26} {'terms':>12} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, x, y in cases(rng):
        a, b = _flatten(x), _flatten(y)
        n, table = len(x.names), x.ring.table
        tp, rp = timed(lambda: kernel.mul_terms(a, b, x.order, table, n, "python"), args.repeat)
        tc, rc = timed(lambda: kernel.mul_terms(a, b, x.order, table, n, "compiled"), args.repeat)
        if rp != rc:
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<26} {len(a):>5} x {len(b):<5} {tp:>10.3f} {tc:>11.4f} {tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
