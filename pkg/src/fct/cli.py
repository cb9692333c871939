"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 domain refusal,
3 internal limit (monomial cap or failed rational lift).
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Optional, Sequence

from fct.algebra.text import format_polynomial, parse_polynomial, parse_variable
from fct.dimension import best_lower_bound, dimension_report, max_valid_collection, zero_pattern_bound
from fct.errors import CapExceeded, DomainRefusal, FctError, LiftFailed, NotTwoFactor
from fct.graph import FactorGraph, expected_dimension, load_graph, zuta_labeling
from fct.invariants import (
    GeneratorSet,
    OneFactorSplit,
    degree_one_monomials,
    monomials_and_tetrads,
    one_factor_groebner,
    two_factor_groebner,
    two_factor_order,
)
from fct.oracle import DEFAULT_CAP, VanishingBasisRequest, reduction_evidence, vanishing_basis_detailed, verify_vanishes

EXIT_OK, EXIT_USAGE, EXIT_REFUSED, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("graph", help="graph JSON file")
    common.add_argument(
        "--format", choices=("table", "json"), default=None,
        help="output format (default: table; json for invariants and oracle)",
    )
    parser = _Parser(prog="fct", description="Dimension and invariants of sparse factor analysis models.")
    sub = parser.add_subparsers(dest="verb", metavar="VERB")
    sub.required = True

    p = sub.add_parser("dim", parents=[common], help="full dimension report")
    p.add_argument("--trials", type=int, default=3, help="random Jacobian trials (default: 3)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default: 0)")
    p.add_argument("--labeling-budget", type=int, default=10_000, help="ZUTA labelings to try (default: 10000)")

    p = sub.add_parser("bounds", parents=[common], help="combinatorial bounds only")
    p.add_argument("--labeling-budget", type=int, default=10_000, help="ZUTA labelings to try (default: 10000)")

    sub.add_parser("zuta", parents=[common], help="a ZUTA labeling or 'none'")

    p = sub.add_parser("invariants", parents=[common], help="generator set of the ideal of invariants")
    p.add_argument("--provenance", action="store_true", help="include provenance tags in JSON output")

    p = sub.add_parser("verify", parents=[common], help="check that polynomials vanish on the model")
    p.add_argument("--poly-file", required=True, help="file with one polynomial per line")

    p = sub.add_parser("oracle", parents=[common], help="interpolate vanishing polynomials")
    p.add_argument("--degree", type=int, required=True, help="maximal total degree")
    p.add_argument("--support", default=None, help="comma-separated pairs like 1_2,3_4 (default: all pairs)")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help=f"monomial cap (default: {DEFAULT_CAP})")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (default: 0)")
    p.add_argument("--homogeneous", action="store_true", help="only the given degree")
    p.add_argument("--reduce", action="store_true", help="report reduction against the known generators")
    return parser


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _table(rows: Sequence[tuple]) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {'-' if v is None else v}" for k, v in rows)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def generators_for(g: FactorGraph) -> GeneratorSet:
    """The closed-form generator set available for ``g``; refuses three or more latent nodes."""
    if g.m == 0:
        order = two_factor_order(g)
        return GeneratorSet(degree_one_monomials(g), [], [], order, graph=g)
    if g.m == 1:
        (h,) = g.latent
        A = g.children(h)
        split = OneFactorSplit(A, tuple(v for v in g.observed if v not in A))
        gens = one_factor_groebner(split)
        gens.graph = g
        return gens
    if g.m == 2:
        return two_factor_groebner(g)
    raise NotTwoFactor(f"{g.m} latent nodes: no closed form is available, use the oracle verb")


def _cmd_dim(g, args, out) -> int:
    rep = dimension_report(g, args.trials, args.seed, args.labeling_budget)
    if args.format == "json":
        out.write(_dump(rep.to_dict()) + "\n")
    else:
        d = rep.to_dict()
        keys = ("expected", "zero_pattern_bound", "upper", "lower", "exact", "exact_is_probabilistic",
                "defective", "lower_exhaustive", "trials", "seed")
        out.write(_table([(k, _fmt(d[k])) for k in keys]) + "\n")
    return EXIT_OK


def _cmd_bounds(g, args, out) -> int:
    coll, total = max_valid_collection(g)
    low = best_lower_bound(g, args.labeling_budget)
    d = {
        "expected": expected_dimension(g),
        "zero_pattern_bound": zero_pattern_bound(g),
        "upper": g.p + total,
        "lower": None if low is None else low.value,
        "lower_exhaustive": None if low is None else low.exhaustive,
        "witness_upper": coll.to_dict(),
        "witness_lower": None if low is None else {
            "collection": low.collection.to_dict(), "labeling": low.labeling.to_dict()},
    }
    if args.format == "json":
        out.write(_dump(d) + "\n")
    else:
        keys = ("expected", "zero_pattern_bound", "upper", "lower", "lower_exhaustive")
        out.write(_table([(k, _fmt(d[k])) for k in keys]) + "\n")
    return EXIT_OK


def _cmd_zuta(g, args, out) -> int:
    lab = zuta_labeling(g)
    if args.format == "json":
        out.write(_dump(None if lab is None else lab.to_dict()) + "\n")
    elif lab is None:
        out.write("none\n")
    else:
        out.write(_table([(h, v) for h, v in zip(lab.latent_order, lab.witnesses)]) + "\n")
    return EXIT_OK


def _cmd_invariants(g, args, out) -> int:
    gens = generators_for(g)
    if (args.format or "json") == "json":
        out.write(_dump(gens.to_dict(with_provenance=args.provenance)) + "\n")
    else:
        for key in ("monomials", "tetrads", "hexads"):
            polys = getattr(gens, key)
            out.write(f"{key} ({len(polys)})\n")
            for f in polys:
                out.write(f"  {format_polynomial(f, gens.order)}\n")
    return EXIT_OK


def _read_polys(path) -> list:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    return [parse_polynomial(ln) for ln in lines if ln and not ln.startswith("#")]


def _cmd_verify(g, args, out) -> int:
    polys = _read_polys(args.poly_file)
    results = [(f, verify_vanishes(f, g)) for f in polys]
    if args.format == "json":
        out.write(_dump({"results": [{"polynomial": format_polynomial(f), "vanishes": ok} for f, ok in results]}) + "\n")
    else:
        for f, ok in results:
            out.write(f"{'OK' if ok else 'NONZERO'}  {format_polynomial(f)}\n")
    return EXIT_OK


def _parse_support(g: FactorGraph, text: Optional[str]) -> Optional[tuple]:
    if text is None:
        return None
    out = []
    for item in text.split(","):
        item = item.strip()
        if item:
            out.append(parse_variable(f"s_{item}"))
    return tuple(out)


def _cmd_oracle(g, args, out) -> int:
    support = _parse_support(g, args.support)
    fmt = args.format or "json"
    if args.reduce:
        try:
            cand = generators_for(g)
        except DomainRefusal:
            cand = monomials_and_tetrads(g)
        rep = reduction_evidence(g, cand, args.degree, support, args.homogeneous, args.seed, args.cap)
        if fmt == "json":
            out.write(_dump(rep.to_dict()) + "\n")
        else:
            d = rep.to_dict()
            out.write(_table([(k, d[k]) for k in ("found", "certified", "reduced_to_zero")]) + "\n")
            for ex in d["irreducible_examples"]:
                out.write(f"  {ex}\n")
        return EXIT_OK
    req = VanishingBasisRequest(g, args.degree, support, args.homogeneous)
    res = vanishing_basis_detailed(req, args.seed, args.cap)
    order = two_factor_order(g)
    texts = [format_polynomial(f, order) for f in res.basis]
    if fmt == "json":
        out.write(_dump({"found": res.found, "certified": len(res.basis), "basis": texts}) + "\n")
    else:
        for t in texts:
            out.write(t + "\n")
    return EXIT_OK


_COMMANDS = {
    "dim": _cmd_dim,
    "bounds": _cmd_bounds,
    "zuta": _cmd_zuta,
    "invariants": _cmd_invariants,
    "verify": _cmd_verify,
    "oracle": _cmd_oracle,
}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"fct: error: {exc}\n")
        return EXIT_USAGE
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            g = load_graph(args.graph)
            code = _COMMANDS[args.verb](g, args, out)
        except (OSError, FctError, ValueError) as exc:
            code = _exit_code(exc)
            err.write(f"fct: {_describe(exc)}\n")
        for w in caught:
            err.write(f"fct: warning: {w.message}\n")
    return code


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, DomainRefusal):
        return EXIT_REFUSED
    if isinstance(exc, (CapExceeded, LiftFailed)):
        return EXIT_LIMIT
    return EXIT_USAGE


def _describe(exc: BaseException) -> str:
    kind = type(exc).__name__
    msg = exc.args[0] if exc.args else ""
    return f"{kind}: {msg}" if msg else kind


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
