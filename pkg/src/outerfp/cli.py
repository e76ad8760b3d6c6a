"""Command-line front end.  Every command prints a JSON report with sorted
keys and rationals as "p/q" strings.

Exit codes: 0 success, 1 validation failure, 2 inconclusive bounded search,
3 input/output or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .automorphisms import InverseNotVerified, NotAHomomorphism, NotInvariant, automorphism_from_json
from .bass_serre import build_ball, crossing_vector, is_elliptic, oracle_translation_length, translation_length
from .factor_systems import InvalidConfiguration, build_thistle, ffs_of
from .graphs import (
    fraction_str,
    graph_from_json,
    graph_to_json,
    rank_and_factors,
    to_fraction,
    validate_graph_of_groups,
)
from .groups import GroupTableError, group_from_shorthand
from .lipschitz import (
    SimplexCoords,
    StretchOracle,
    displacement_on_simplex,
    grid_scan,
    is_simplex_center,
    metric_vector,
)
from .representatives import (
    NoneWithinBound,
    NotAForest,
    NotProper,
    SubgraphSelection,
    collapse_subforest,
    edge_orbit_cycle_check,
    find_isometric_representative,
    reducibility_scan,
)
from .words import WordError, format_word, parse_word, standard_generators, syllable_str

EXIT_OK, EXIT_INVALID, EXIT_INCONCLUSIVE, EXIT_IO = 0, 1, 2, 3


class InputError(Exception):
    pass


class ValidationFailure(Exception):
    def __init__(self, report: dict):
        super().__init__("validation failed")
        self.report = report


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _graph(args, validate: bool = True):
    if not args.graph:
        raise InputError("--graph is required")
    try:
        X = graph_from_json(_load_json(args.graph))
    except (KeyError, TypeError, ValueError, GroupTableError) as exc:
        raise InputError(f"malformed graph: {exc}") from exc
    if validate:
        rep = validate_graph_of_groups(X)
        if not rep.ok:
            raise ValidationFailure(_validation_json(rep))
    if args.metric:
        try:
            values = json.loads(args.metric)
            vec = metric_vector(X, values)
        except (json.JSONDecodeError, ValueError, TypeError) as exc:
            raise InputError(f"bad --metric: {exc}") from exc
        X = X.with_lengths(dict(zip(X.unoriented, vec)))
    return X


def _auto(args, X):
    if not args.auto:
        raise InputError("--auto is required")
    obj = _load_json(args.auto)
    try:
        return automorphism_from_json(obj, X)
    except (NotAHomomorphism, NotInvariant, InverseNotVerified) as exc:
        raise ValidationFailure({"error": str(exc), "valid": False}) from exc
    except (KeyError, ValueError, WordError) as exc:
        raise InputError(f"malformed automorphism: {exc}") from exc


def _validation_json(rep) -> dict:
    return {"valid": rep.ok, "violations": [{"code": c, "message": m} for c, m in rep.violations]}


def _coords(X) -> SimplexCoords:
    vec = metric_vector(X)
    total = sum(vec, Fraction(0))
    return SimplexCoords(X.unoriented, tuple(v / total for v in vec))


# -- commands -------------------------------------------------------------

def cmd_validate(args):
    X = _graph(args, validate=False)
    rep = validate_graph_of_groups(X)
    return (EXIT_OK if rep.ok else EXIT_INVALID), _validation_json(rep)


def cmd_pi1(args):
    X = _graph(args)
    k, r = rank_and_factors(X)
    return EXIT_OK, {
        "factors": k,
        "rank": r,
        "free_factor_system": ffs_of(X).describe(),
        "generators": [syllable_str(s) for s in standard_generators(X)],
        "spanning_tree": sorted(X.spanning_tree),
    }


def cmd_thistle(args):
    try:
        factors = [group_from_shorthand(t.strip()) for t in args.factors.split(",") if t.strip()] if args.factors else []
        lengths = json.loads(args.metric) if args.metric else None
        X = build_thistle(factors, args.rank, lengths)
    except (ValueError, json.JSONDecodeError) as exc:
        if isinstance(exc, InvalidConfiguration):
            raise ValidationFailure({"error": str(exc), "valid": False}) from exc
        raise InputError(str(exc)) from exc
    rep = validate_graph_of_groups(X)
    out = graph_to_json(X)
    if not rep.ok:
        out["validation"] = _validation_json(rep)
    return EXIT_OK, out


def cmd_tlen(args):
    X = _graph(args)
    try:
        u = parse_word(args.word or "", X)
    except WordError as exc:
        raise InputError(str(exc)) from exc
    out = {"word": format_word(u), "length": fraction_str(translation_length(u, X)), "elliptic": is_elliptic(u, X)}
    if u.syllables and not out["elliptic"]:
        out["crossing"] = crossing_vector(u, X)
    if args.radius is not None:
        lam = oracle_translation_length(u, build_ball(X, to_fraction(args.radius)))
        out["oracle_length"] = None if lam is None else fraction_str(lam)
        if lam is None:
            return EXIT_INCONCLUSIVE, out
    return EXIT_OK, out


def cmd_ball(args):
    X = _graph(args)
    ball = build_ball(X, to_fraction(args.radius if args.radius is not None else 1))
    out = {"vertices": len(ball), "edges": len(ball.edges()), "radius": fraction_str(to_fraction(ball.radius))}
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(ball.to_dot())
        out["dot"] = args.dot
    return EXIT_OK, out


def cmd_stretch(args):
    X = _graph(args)
    alpha = _auto(args, X)
    out = StretchOracle.candidates(alpha, X).report().to_json()
    if args.word_bound is not None:
        out["brute_force"] = StretchOracle.brute_force(alpha, X, args.word_bound).report().to_json()
    return EXIT_OK, out


def cmd_displacement(args):
    X = _graph(args)
    alpha = _auto(args, X)
    oracle = StretchOracle.candidates(alpha, X)
    rep = displacement_on_simplex(alpha, X, to_fraction(args.tolerance), oracle=oracle)
    out = rep.to_json()
    if args.grid_check:
        scan = grid_scan(alpha, X, args.grid, oracle)
        out["grid"] = {
            "resolution": scan.resolution,
            "points": scan.points,
            "minimum": fraction_str(scan.minimum),
            "beats_displacement": scan.minimum < rep.bracket[0],
        }
    return EXIT_OK, out


def cmd_fixpoint(args):
    X = _graph(args)
    alpha = _auto(args, X)
    rep = StretchOracle.candidates(alpha, X).report()
    out = rep.to_json()
    out["fixed"] = rep.lambdaR == 1 and rep.lambdaL == 1
    out["metric"] = _coords(X).strings()
    return EXIT_OK, out


def _representative(args, X, alpha):
    return find_isometric_representative(alpha, X, None, args.search_bound)


def cmd_fixrep(args):
    X = _graph(args)
    alpha = _auto(args, X)
    try:
        rep = _representative(args, X, alpha)
    except NoneWithinBound as exc:
        return EXIT_INCONCLUSIVE, {"result": "NoneWithinBound", "lambdaR": fraction_str(exc.lambdaR)}
    out = rep.to_json()
    out["single_cycle"] = edge_orbit_cycle_check(rep).single_cycle
    return EXIT_OK, out


def cmd_redscan(args):
    X = _graph(args)
    alpha = _auto(args, X)
    try:
        rep = _representative(args, X, alpha)
    except NoneWithinBound as exc:
        return EXIT_INCONCLUSIVE, {"result": "NoneWithinBound", "lambdaR": fraction_str(exc.lambdaR)}
    cert = reducibility_scan(rep, X)
    if cert is None:
        return EXIT_OK, {"result": "NoneFound", "edge_cycles": edge_orbit_cycle_check(rep).notation}
    out = cert.to_json()
    out["result"] = "Reducible"
    return EXIT_OK, out


def cmd_collapse(args):
    X = _graph(args)
    if not args.edges:
        raise InputError("--edges is required")
    edges = [e.strip() for e in args.edges.split(",") if e.strip()]
    unknown = [e for e in edges if e not in X.graph.reverse]
    if unknown:
        raise InputError(f"unknown edges: {', '.join(unknown)}")
    try:
        col = collapse_subforest(X, SubgraphSelection.of(X, edges))
    except (NotAForest, NotProper) as exc:
        return EXIT_INVALID, {"error": type(exc).__name__, "message": str(exc)}
    out = col.to_json()
    out["validation"] = _validation_json(validate_graph_of_groups(col.new))
    return EXIT_OK, out


def cmd_certify_unique(args):
    X = _graph(args)
    alpha = _auto(args, X)
    oracle = StretchOracle.candidates(alpha, X)
    disp = displacement_on_simplex(alpha, X, to_fraction(args.tolerance), oracle=oracle)
    center = is_simplex_center(disp.argmin)
    at = oracle.report(disp.argmin)
    fixed = at.lambdaR == 1 and at.lambdaL == 1
    scan = grid_scan(alpha, X, args.grid, oracle)
    out = {
        "displacement": fraction_str(disp.value),
        "exact": disp.exact,
        "argmin": disp.argmin.strings(),
        "argmin_is_center": center,
        "fixed_point": fixed,
        "grid": {
            "resolution": args.grid,
            "points": scan.points,
            "off_center_min": None if scan.off_center_min is None else fraction_str(scan.off_center_min),
        },
    }
    out["unique_center"] = bool(disp.exact and disp.value == 1 and center and fixed and scan.strict_off_center)
    try:
        rep = find_isometric_representative(alpha, X, disp.argmin, args.search_bound)
    except NoneWithinBound as exc:
        out["edge_cycle"] = None
        out["representative"] = {"result": "NoneWithinBound", "lambdaR": fraction_str(exc.lambdaR)}
        return EXIT_INCONCLUSIVE, out
    check = edge_orbit_cycle_check(rep)
    out["edge_cycle"] = check.notation
    out["single_cycle"] = check.single_cycle
    return EXIT_OK, out


COMMANDS = {
    "validate": cmd_validate,
    "pi1": cmd_pi1,
    "thistle": cmd_thistle,
    "tlen": cmd_tlen,
    "ball": cmd_ball,
    "stretch": cmd_stretch,
    "displacement": cmd_displacement,
    "fixpoint": cmd_fixpoint,
    "fixrep": cmd_fixrep,
    "redscan": cmd_redscan,
    "collapse": cmd_collapse,
    "certify-unique": cmd_certify_unique,
}


def _positive_fraction(text: str) -> str:
    try:
        q = to_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if q <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return text


def _word_bound(text: str) -> int:
    n = int(text)
    if n < 2:
        raise argparse.ArgumentTypeError("word bound must be at least 2")
    return n


def _radius(text: str) -> str:
    if to_fraction(text) < 0:
        raise argparse.ArgumentTypeError("radius must be nonnegative")
    return text


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="outerfp", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--graph", help="graph of groups JSON file")
    p.add_argument("--auto", help="automorphism JSON file")
    p.add_argument("--word", help='word such as "v1.g1*v2.g1"')
    p.add_argument("--metric", help='JSON list of edge lengths, e.g. ["1/2","1/4","1/4"]')
    p.add_argument("--tolerance", type=_positive_fraction, default="1/1000000")
    p.add_argument("--word-bound", type=_word_bound, default=None, help="brute-force syllable bound L")
    p.add_argument("--search-bound", type=int, default=4, help="inner-automorphism search bound")
    p.add_argument("--radius", type=_radius, default=None)
    p.add_argument("--grid", type=int, default=60, help="grid resolution for scans")
    p.add_argument("--grid-check", action="store_true")
    p.add_argument("--factors", help="thistle factors, e.g. Z2,Z3,S3")
    p.add_argument("--rank", type=int, default=0, help="thistle petal count")
    p.add_argument("--edges", help="comma-separated edge ids for collapse")
    p.add_argument("--dot", help="write the ball as DOT to this file")
    p.add_argument("--out", help="write the JSON report here as well")
    return p


def run(argv=None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    try:
        code, report = COMMANDS[args.command](args)
    except InputError as exc:
        code, report = EXIT_IO, {"error": str(exc)}
    except ValidationFailure as exc:
        code, report = EXIT_INVALID, exc.report
    except OSError as exc:
        code, report = EXIT_IO, {"error": str(exc)}
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
        except OSError as exc:
            code, report = EXIT_IO, {"error": str(exc)}
    return code, report


def main(argv=None) -> int:
    try:
        code, report = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_IO if exc.code not in (0, None) else 0
    print(json.dumps(report, sort_keys=True, indent=2))
    return code


if __name__ == "__main__":
    sys.exit(main())
