"""Command-line interface: JSON in, JSON out.

Exit status is 0 on success, 1 on a domain error (the graph is not an
ecimahedron, a coordinate lies outside its interval, verification fails) and
2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .ecimahedron import NotEcimahedron, decompose
from .graph_model import (
    ValidationError,
    andreev_check,
    enumerate_four_circuits,
    enumerate_three_circuits,
    validate,
)
from .moduli import ModuliPoint, classify_moduli, coordinate_schema, interval, random_point
from .orientation import DEFAULT_MAX_SPECIAL, enumerate_admissible, kappa, orientation_to_json
from .realization import TOL, MirrorRealization, RealizationError, realize, realize_isolated, verify

COMMANDS = (
    "validate",
    "circuits",
    "decompose",
    "classify",
    "kappa",
    "enumerate-orientations",
    "realize",
    "verify",
    "andreev",
)


class MalformedInput(ValueError):
    pass


class DomainError(ValueError):
    pass


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON ({exc})") from exc


def _graph(raw):
    if not isinstance(raw, dict):
        raise MalformedInput("graph description must be a JSON object")
    try:
        return validate(raw)
    except ValidationError as exc:
        raise MalformedInput(*exc.errors) from exc
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"graph description: missing or invalid field {exc}") from exc


def _circuits(graph, args):
    three = []
    for c in enumerate_three_circuits(graph):
        item = {
            "circuit": list(c.faces),
            "prismatic": c.prismatic,
            "essential": c.essential,
            "combinatorially_essential": c.combinatorially_essential,
            "geometry": c.geometry.value,
            "right_angle": c.right_angle,
            "special": c.special,
        }
        if c.r_gamma is not None:
            item["r_gamma"] = c.r_gamma
        three.append(item)
    four = [
        {"circuit": list(c.faces), "prismatic": c.prismatic, "geometry": c.geometry.value}
        for c in enumerate_four_circuits(graph)
    ]
    return {"three_circuits": three, "four_circuits": four}


def _classify(graph, args):
    forest = decompose(graph)
    out = classify_moduli(graph, forest).to_json()
    out["intervals"] = [
        {"circuit": list(c.faces), "interval": interval(c).to_json()}
        for c in enumerate_three_circuits(graph)
    ]
    return out


def _kappa(graph, args):
    return {"kappa": kappa(decompose(graph))}


def _orientations(graph, args):
    forest = decompose(graph)
    try:
        found = enumerate_admissible(forest, max_special=args.max_special)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    return [orientation_to_json(forest, po) for po in found]


def _realize(graph, args):
    forest = decompose(graph)
    desc = classify_moduli(graph, forest)
    out = {"graph": graph.to_json(), "classification": desc.to_json()}
    if desc.variant != "Components":
        out["realizations"] = [P.to_json() for P in realize_isolated(graph)]
        return out
    schema = coordinate_schema(graph, forest)
    if args.coords:
        try:
            point = ModuliPoint.from_json(_read_json(args.coords), schema)
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"coordinate file: missing or invalid field {exc}") from exc
    elif args.seed is not None or schema.dimension() == 0:
        point = random_point(schema, np.random.default_rng(args.seed))
    else:
        raise DomainError("realize needs --coords or --seed for a positive-dimensional moduli space")
    out["coordinates"] = point.to_json(schema)
    out["realizations"] = [realize(graph, point, schema).to_json()]
    return out


def _verify_doc(raw, tolerance):
    if not isinstance(raw, dict) or "graph" not in raw:
        raise MalformedInput("verify expects the output of realize (with 'graph' and 'realizations')")
    graph = _graph(raw["graph"])
    items = raw.get("realizations")
    if items is None and "realization" in raw:
        items = [raw["realization"]]
    if items is None:
        raise MalformedInput("no realization in input")
    try:
        reals = [MirrorRealization.from_json(x) for x in items]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"invalid realization: {exc}") from exc
    reports = [verify(P, graph, tol=tolerance).to_json() for P in reals]
    return {"passed": all(r["passed"] for r in reports), "reports": reports}


def _andreev(graph, args):
    try:
        return andreev_check(graph).to_json()
    except ValueError as exc:
        raise DomainError(str(exc)) from exc


def _validate(graph, args):
    return {"valid": True, "faces": graph.f, "edges": len(graph.edges), "vertices": len(graph.vertices)}


HANDLERS = {
    "validate": _validate,
    "circuits": _circuits,
    "decompose": lambda g, a: decompose(g).to_json(),
    "classify": _classify,
    "kappa": _kappa,
    "enumerate-orientations": _orientations,
    "realize": _realize,
    "andreev": _andreev,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mirrorpoly",
        description="Moduli spaces of mirror polyhedra on labeled ecimahedra.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("path", nargs="?", help="input JSON file ('-' for standard input)")
    parser.add_argument("--input", dest="input", help="input JSON file (alternative to PATH)")
    parser.add_argument("--coords", help="coordinate file for realize")
    parser.add_argument("--seed", type=int, help="sample random coordinates for realize")
    parser.add_argument("--tolerance", type=float, default=TOL, help="verification tolerance")
    parser.add_argument(
        "--max-special", type=int, default=DEFAULT_MAX_SPECIAL,
        help="cap on special circuits for enumerate-orientations",
    )
    parser.add_argument("--pretty", action="store_true", help="indent the JSON output")
    return parser


def run(argv=None, stdout=None):
    """Run one command; returns the exit status."""
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    path = args.input or args.path
    status = 0
    try:
        if path is None:
            raise MalformedInput("no input file given")
        raw = _read_json(path)
        if args.command == "verify":
            result = _verify_doc(raw, args.tolerance)
            status = 0 if result["passed"] else 1
        else:
            result = HANDLERS[args.command](_graph(raw), args)
    except MalformedInput as exc:
        result, status = {"errors": [str(x) for x in exc.args]}, 2
    except (NotEcimahedron, RealizationError, DomainError) as exc:
        result, status = {"errors": [str(exc)]}, 1
    except ValueError as exc:
        # remaining value errors come from the domain (interval or schema checks)
        result, status = {"errors": [str(exc)]}, 1
    json.dump(result, stdout, indent=2 if args.pretty else None, sort_keys=False)
    stdout.write("\n")
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
