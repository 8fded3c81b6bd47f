"""Command-line front end.

Every command writes one report to stdout, JSON by default (``fgl``
defaults to text).  Failures exit nonzero with a JSON error object on
stderr.  Lazard tables are cached as ``lazard_basis_<N>.json`` in the
directory given by ``--cache-dir``, else ``$COBORD_CACHE_DIR``, else
``~/.cache/cobordism``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from pathlib import Path

from . import checks
from .classifying import (
    InsufficientTableError,
    RingPresentation,
    compare_with_gl,
    ring_BGL,
    ring_BSL,
    ring_BT,
    weyl_invariants,
)
from .fgl import additive_fgl, formal_inverse, multiplicative_fgl, n_series, universal_fgl
from .gps import EliminationError
from .kernel import MAX_WEIGHT
from .lazard import CacheError, LazardBasisTable, build_lazard_basis
from .intlattice import LatticeSizeError
from .rings import MismatchError, TruncationError
from .specialize import apply_specialization, named_specialization

SCHEMA_VERSION = 1
EXIT_FAILED_CHECK = 1
EXIT_CACHE = 3
EXIT_COMPUTE = 4

log = logging.getLogger("cobordism")


class CliError(Exception):
    def __init__(self, kind: str, message: str, status: int):
        super().__init__(message)
        self.kind = kind
        self.status = status


# ---------------------------------------------------------------------------
# cache


def cache_dir(flag: str | None) -> Path:
    if flag:
        return Path(flag)
    env = os.environ.get("COBORD_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "cobordism"


def load_table(depth: int, directory: Path, rebuild: bool = False) -> LazardBasisTable:
    path = directory / f"lazard_basis_{depth}.json"
    if path.exists() and not rebuild:
        try:
            return LazardBasisTable.load(path)
        except CacheError as exc:
            raise CliError(
                "cache-corruption", f"{path}: {exc} (rerun with --rebuild-cache)", EXIT_CACHE
            ) from exc
    table = build_lazard_basis(depth)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".json.tmp")
        table.save(tmp)
        tmp.replace(path)
    except OSError as exc:
        log.warning("could not write cache %s: %s", path, exc)
    return table


def _table_for(args, depth: int) -> LazardBasisTable:
    return load_table(max(depth, 0), cache_dir(args.cache_dir), args.rebuild_cache)


# ---------------------------------------------------------------------------
# argument types


def _bounded(lo: int, hi: int | None = None):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < lo or (hi is not None and v > hi):
            span = f"{lo}..{hi}" if hi is not None else f">= {lo}"
            raise argparse.ArgumentTypeError(f"{v} outside {span}")
        return v

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default=None, help="report format")
    common.add_argument("--cache-dir", default=None, help="Lazard cache directory (beats $COBORD_CACHE_DIR)")
    common.add_argument("--rebuild-cache", action="store_true", help="rebuild the Lazard table even if cached")

    parser = argparse.ArgumentParser(
        prog="cobordism",
        description="Lazard ring, formal group laws and cobordism of classifying spaces.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lazard", parents=[common], help="ranks and bases of the Lazard ring")
    p.add_argument("--max-codegree", type=_bounded(0, 16), default=8)

    p = sub.add_parser("fgl", parents=[common], help="expand a formal group law")
    p.add_argument("--order", type=_bounded(1, MAX_WEIGHT), default=3)
    p.add_argument("--law", choices=["universal", "additive", "multiplicative"], default="universal")
    p.add_argument("--inverse", action="store_true", help="also print the formal inverse")
    p.add_argument("--n-series", type=int, default=None, metavar="K", help="also print [K](u)")

    p = sub.add_parser("ring", parents=[common], help="presentation of a classifying-space ring")
    p.add_argument("--group", choices=["torus", "gl", "sl"], default="torus")
    p.add_argument("--rank", type=_bounded(1, 6), default=1)
    p.add_argument("--t-degree", type=_bounded(0, 12), default=3)
    p.add_argument("--degree", type=int, action="append", default=None,
                   help="graded piece to list (repeatable; default 0..D)")
    p.add_argument("--specialize", choices=["cobordism", "chow", "ktheory"], default="cobordism")

    p = sub.add_parser("invariants", parents=[common], help="symmetric-group invariants of the torus ring")
    p.add_argument("--rank", type=_bounded(1, 4), default=2)
    p.add_argument("--t-degree", type=_bounded(0, 8), default=3)
    p.add_argument("--compare-gl", action="store_true", help="compare with the image of BGL_n")

    p = sub.add_parser("check", parents=[common], help="run the acceptance suite")
    p.add_argument("--criteria", default=None, help="comma-separated subset of 1-8")
    return parser


# ---------------------------------------------------------------------------
# commands


def _legend(table: LazardBasisTable, texts) -> dict:
    """Expansions of composite basis labels appearing in ``texts``."""
    found = set()
    for t in texts:
        found.update(re.findall(r"x(\d+)_(\d+)", t))
    return {
        f"x{d}_{k}": table.basis_expression(int(d), int(k))
        for d, k in sorted(found, key=lambda p: (int(p[0]), int(p[1])))
    }


def cmd_lazard(args) -> tuple[dict, str]:
    n = args.max_codegree
    table = _table_for(args, n)
    ranks = table.ranks()
    pieces = [
        {
            "degree": -d,
            "codegree": d,
            "rank": ranks[d],
            "basis": [table.basis_expression(d, k) for k in range(ranks[d])],
        }
        for d in range(n + 1)
    ]
    result = {
        "generators": [{"name": f"a{i}{j}", "i": i, "j": j, "codegree": i + j - 1}
                       for i, j in table.free.generators],
        "relations": [{"codegree": d, "count": len(table.relations[d])} for d in range(n + 1)],
        "graded_pieces": pieces,
        "ranks": ranks,
    }
    lines = [f"{'codegree':>8}  {'rank':>4}  basis"]
    for p in pieces:
        lines.append(f"{p['codegree']:>8}  {p['rank']:>4}  " + ", ".join(p["basis"]))
    return result, "\n".join(lines)


def _law(name: str, order: int, args):
    if name == "universal":
        return universal_fgl(order, _table_for(args, order - 1)), True
    if name == "additive":
        return additive_fgl(order), False
    return multiplicative_fgl(order), False


def cmd_fgl(args) -> tuple[dict, str]:
    F, universal = _law(args.law, args.order, args)
    lines = [str(F)]
    result = {
        "law": F.name,
        "order": F.order,
        "coefficients": {f"{i},{j}": str(c) for (i, j), c in F.coeffs.items()},
        "expansion": str(F.expansion()),
    }
    if args.inverse:
        chi = formal_inverse(F)
        result["inverse"] = str(chi)
        lines.append(f"chi(u) = {chi}")
    if args.n_series is not None:
        k = args.n_series
        ser = n_series(F, k)
        result["n_series"] = {"n": k, "series": str(ser)}
        lines.append(f"[{k}](u) = {ser}")
    if universal:
        legend = _legend(F.ring.tab, lines)
        if legend:
            result["legend"] = legend
            lines.extend(f"  where {lab} = {expr}" for lab, expr in legend.items())
    return result, "\n".join(lines)


def _presentation_text(pres: RingPresentation) -> list[str]:
    gens = ", ".join(f"{nm} (deg {w})" for nm, w in pres.generators) or "none"
    lines = [f"{pres.name} over {pres.ring.name}, truncated at t-degree {pres.order}",
             f"generators: {gens}"]
    for r in pres.relations:
        lines.append(f"relation: {r} = 0")
    for nm, s in sorted(pres.eliminated.items()):
        lines.append(f"eliminated: {nm} = {s}")
    lines.append(f"{'degree':>6}  {'rank':>5}  basis")
    for i in pres.degrees:
        labels = [pres.label(e) for e in pres.piece(i)]
        lines.append(f"{i:>6}  {len(labels):>5}  " + ", ".join(labels))
    return lines


def cmd_ring(args) -> tuple[dict, str]:
    D = args.t_degree
    degrees = sorted(set(args.degree)) if args.degree else list(range(D + 1))
    depth = max(D - min(degrees), D, 1)
    table = _table_for(args, depth)
    builders = {"torus": ring_BT, "gl": ring_BGL, "sl": ring_BSL}
    pres = builders[args.group](args.rank, D, table, degrees)
    s = named_specialization(args.specialize, table)
    if s is not None:
        pres = apply_specialization(s, pres)
    result = pres.to_json()
    lines = _presentation_text(pres)
    if s is None:
        texts = [b for p in result["graded_pieces"] for b in p["basis"]]
        texts += [r["series"] for r in result["relations"] + result["eliminated"]]
        legend = _legend(table, texts)
        if legend:
            result["legend"] = legend
            lines.extend(f"  where {lab} = {expr}" for lab, expr in legend.items())
    return result, "\n".join(lines)


def _vector_text(sl, vec, ring, names) -> str:
    from .gps import format_monomial

    parts = []
    for k, v in sorted(vec.items()):
        m = sl.monomials[k // sl.rank]
        lab = ring.label(sl.codegree, k % sl.rank)
        body = "*".join(x for x in (lab if lab != "1" else "", format_monomial(m, names)) if x) or "1"
        parts.append(body if v == 1 else f"-{body}" if v == -1 else f"{v}*{body}")
    return " + ".join(parts).replace("+ -", "- ") or "0"


def cmd_invariants(args) -> tuple[dict, str]:
    n, D = args.rank, args.t_degree
    table = _table_for(args, D)
    bt = ring_BT(n, D, table)
    slices = weyl_invariants(n, None, None, bt)
    rows = []
    for (p, c), sl in sorted(slices.items()):
        rows.append({
            "t_degree": p, "codegree": c, "degree": p - c,
            "rank": len(sl.basis),
            "basis": [_vector_text(sl, v, bt.ring, bt.names) for v in sl.basis],
        })
    result = {"group": f"S{n}", "rank": n, "t_degree": D, "slices": rows}
    lines = [f"{'t-deg':>5}  {'codeg':>5}  {'rank':>4}  basis"]
    lines += [f"{r['t_degree']:>5}  {r['codegree']:>5}  {r['rank']:>4}  " + ", ".join(r["basis"]) for r in rows]
    if args.compare_gl:
        comp = compare_with_gl(n, D, table)
        result["comparison"] = [
            {"t_degree": c.t_degree, "codegree": c.codegree, "invariant_rank": c.invariant_rank,
             "image_rank": c.image_rank, "rational_equal": c.rational_equal,
             "integral_equal": c.integral_equal}
            for c in comp
        ]
        result["rational_equal"] = all(c.rational_equal for c in comp)
        result["integral_equal"] = all(c.integral_equal for c in comp)
        lines.append(f"BGL{n} image: rationally equal {result['rational_equal']}, "
                     f"integrally equal {result['integral_equal']}")
    return result, "\n".join(lines)


def cmd_check(args) -> tuple[dict, str]:
    selected = None
    if args.criteria:
        try:
            selected = sorted({int(x) for x in args.criteria.split(",")})
        except ValueError:
            raise CliError("flag-validation", f"bad --criteria {args.criteria!r}", 2) from None
        if not set(selected) <= set(range(1, 9)):
            raise CliError("flag-validation", "criteria are numbered 1-8", 2)
    results = checks.run_all(selected)
    rep = checks.report(results)
    if not rep["passed"]:
        args._status = EXIT_FAILED_CHECK
    return rep, "\n".join(r.line() for r in results)


COMMANDS = {
    "lazard": (cmd_lazard, "json"),
    "fgl": (cmd_fgl, "text"),
    "ring": (cmd_ring, "json"),
    "invariants": (cmd_invariants, "json"),
    "check": (cmd_check, "json"),
}


def _query(args) -> dict:
    skip = {"format", "cache_dir", "rebuild_cache", "verbose", "_status"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    fn, default_format = COMMANDS[args.command]
    fmt = args.format or default_format
    args._status = 0
    try:
        result, text = fn(args)
    except CliError as exc:
        status, kind, msg = exc.status, exc.kind, str(exc)
    except (InsufficientTableError, TruncationError, MismatchError, EliminationError,
            LatticeSizeError, CacheError, ValueError) as exc:
        status, kind, msg = EXIT_COMPUTE, type(exc).__name__, str(exc)
    else:
        if fmt == "json":
            doc = {"version": SCHEMA_VERSION, "query": _query(args), "result": result}
            out.write(json.dumps(doc, indent=2) + "\n")
        else:
            out.write(text + "\n")
        return args._status
    doc = {"version": SCHEMA_VERSION, "query": _query(args), "error": {"type": kind, "message": msg}}
    err.write(json.dumps(doc, indent=2) + "\n")
    return status


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
