"""Command-line surface.

Commands: scatter, theta, multiply, toric, mutate, verify.  All outputs are
canonical text files (see formats); identical inputs produce byte-identical
outputs.  Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from . import formats, svg
from .brokenlines import enumerate_broken_lines, theta
from .cluster import ClusterSeed, initial_variables, mutate_matrix, mutate_variable
from .errors import ParseError, ScatterKitError
from .lattice import Seed
from .mirror import default_basepoint, structure_constants
from .scattering import complete
from .toric import (
    DirectedSegment,
    build_phi,
    builtin_fan,
    segment_class,
    toric_product,
    weight,
)
from .verify import verify_cluster, verify_diagram, verify_toric

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise ParseError(f"cannot read {path}: {err.strerror}")


def _write_atomic(path, text):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _emit(text, out):
    if out:
        _write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _parse_vector(s, name="vector"):
    try:
        return tuple(int(x) for x in s.split(","))
    except ValueError:
        raise ParseError(f"bad {name} {s!r}; expected comma-separated integers")


def _parse_point(s):
    try:
        return tuple(Fraction(x) for x in s.split(","))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad point {s!r}; expected comma-separated rationals")


def _load_seed_or_diagram(path):
    text = _read(path)
    head = text.splitlines()[0].split() if text.splitlines() else []
    kind = head[1] if len(head) == 3 and head[0] == formats.MAGIC else None
    if kind == "seed":
        return formats.parse_seed(text), None
    if kind == "diagram":
        d = formats.parse_diagram(text)
        return d.seed, d
    raise ParseError(f"{path} is neither a seed nor a diagram file")


# ---------------------------------------------------------------------------
# commands


def cmd_scatter(args):
    seed = formats.parse_seed(_read(args.input))
    diagram = complete(seed, args.order)
    _emit(formats.write_diagram(diagram), args.out)
    if args.svg:
        _write_atomic(args.svg, svg.render_diagram(diagram))
    return EXIT_OK


def cmd_theta(args):
    seed, diagram = _load_seed_or_diagram(args.input)
    if diagram is None:
        diagram = complete(seed, args.order if args.order is not None else 4)
    k = args.order if args.order is not None else diagram.order
    m = _parse_vector(args.m, "m")
    if args.basepoint:
        Q = _parse_point(args.basepoint)
    else:
        Q = default_basepoint(diagram)
    t = theta(diagram, m, Q, k)
    lines = enumerate_broken_lines(diagram, m, Q, k) if args.trace else None
    _emit(formats.write_theta(t, include_lines=lines), args.out)
    return EXIT_OK


def cmd_multiply(args):
    seed, diagram = _load_seed_or_diagram(args.input)
    if diagram is None:
        diagram = complete(seed, args.order if args.order is not None else 4)
    k = args.order if args.order is not None else diagram.order
    ps = [_parse_vector(p, "p") for p in args.p]
    if not ps:
        raise ParseError("at least one --p is required")
    basepoint = _parse_point(args.basepoint) if args.basepoint else None
    table = structure_constants(diagram, ps, k, basepoint)
    _emit(formats.write_table(diagram.seed, table), args.out)
    return EXIT_OK


def cmd_mutate(args):
    seed = formats.parse_seed(_read(args.input))
    cs = ClusterSeed.make(seed.form.matrix, seed.unfrozen)
    try:
        sequence = [int(x) - 1 for x in args.sequence.split(",")] if args.sequence else []
    except ValueError:
        raise ParseError(f"bad sequence {args.sequence!r}")
    states = []
    cur, variables = cs, initial_variables(cs)
    states.append((cur.matrix, tuple(variables)))
    for k in sequence:
        if k not in cur.unfrozen:
            raise ParseError(f"cannot mutate frozen index {k + 1}")
        variables = mutate_variable(cur, variables, k)
        cur = mutate_matrix(cur, k)
        states.append((cur.matrix, tuple(variables)))
    _emit(formats.write_mutation_trace(cs, sequence, states), args.out)
    return EXIT_OK


def _load_fan(args):
    if args.input in ("P2", "P1xP1", "Bl1P2"):
        return builtin_fan(args.input)
    return formats.parse_fan(_read(args.input))


def cmd_toric(args):
    fan = _load_fan(args)
    phi = build_phi(fan)
    out = []
    if args.subcommand == "product":
        a = _parse_vector(args.a, "a")
        b = _parse_vector(args.b, "b")
        q, gamma = toric_product(fan, phi, a, b)
        out.append("q " + " ".join(str(x) for x in q))
        out.append("class " + " ".join(str(x) for x in gamma.vector))
        out.append("decomposition " + " ".join(str(x) for x in gamma.decompose()))
    elif args.subcommand == "weight":
        p = _parse_vector(args.a, "point")
        out.append("weight " + " ".join(str(x) for x in weight(fan, p).vector))
    elif args.subcommand == "segment":
        anchor = _parse_point(args.anchor)
        w = _parse_vector(args.direction, "direction")
        gamma = segment_class(phi, DirectedSegment.full_line(anchor, w))
        out.append("class " + " ".join(str(x) for x in gamma.vector))
        out.append("decomposition " + " ".join(str(x) for x in gamma.decompose()))
    elif args.subcommand == "phi":
        for c, (sx, sy) in enumerate(phi.slopes):
            out.append(f"cone {c + 1} slope_x " + " ".join(str(v) for v in sx))
            out.append(f"cone {c + 1} slope_y " + " ".join(str(v) for v in sy))
    else:  # pragma: no cover - argparse restricts choices
        raise ParseError(f"unknown toric subcommand {args.subcommand!r}")
    _emit("\n".join(out) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args):
    text = _read(args.input) if args.input not in ("P2", "P1xP1", "Bl1P2") else None
    if text is None:
        checks = verify_toric(builtin_fan(args.input), args.level)
    else:
        head = text.splitlines()[0].split() if text.splitlines() else []
        kind = head[1] if len(head) == 3 and head[0] == formats.MAGIC else None
        if kind == "seed":
            seed = formats.parse_seed(text)
            if args.mode == "toric":
                raise ParseError("toric verification expects a fan file or builtin name")
            k = args.order if args.order is not None else (4 if args.level == "fast" else 6)
            checks = verify_cluster(seed, k, args.level)
        elif kind == "diagram":
            checks = verify_diagram(formats.parse_diagram(text), args.level)
        elif kind == "fan":
            checks = verify_toric(formats.parse_fan(text), args.level)
        else:
            raise ParseError(f"{args.input} is not a verifiable artifact")
    ok = True
    lines = []
    for name, passed, detail in checks:
        ok = ok and passed
        lines.append(f"{'PASS' if passed else 'FAIL'} {name} — {detail}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(
        prog="scatterkit",
        description="Exact finite-order scattering diagrams, theta functions, and mirror structure constants.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("scatter", help="complete a seed to a consistent diagram")
    s.add_argument("input", help="seed file")
    s.add_argument("--order", type=int, required=True, help="truncation order k")
    s.add_argument("--svg", help="also render the diagram to this SVG file")
    s.add_argument("--out", help="output diagram file (default stdout)")
    s.set_defaults(func=cmd_scatter)

    s = sub.add_parser("theta", help="local theta function at a basepoint")
    s.add_argument("input", help="diagram or seed file")
    s.add_argument("--m", required=True, help="asymptotic exponent, e.g. 1,0")
    s.add_argument("--basepoint", help="exact rational point, e.g. 2/3,1/7")
    s.add_argument("--order", type=int, help="truncation order (default: diagram order)")
    s.add_argument("--trace", action="store_true", help="append the broken-line trace")
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_theta)

    s = sub.add_parser("multiply", help="structure-constant table for a theta product")
    s.add_argument("input", help="diagram or seed file")
    s.add_argument("--p", action="append", default=[], help="input vector (repeatable)")
    s.add_argument("--basepoint", help="exact rational basepoint")
    s.add_argument("--order", type=int, help="truncation order")
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_multiply)

    s = sub.add_parser("toric", help="toric-mode computations on a fan")
    s.add_argument("input", help="fan file or builtin name (P2, P1xP1, Bl1P2)")
    s.add_argument("subcommand", choices=["product", "weight", "segment", "phi"])
    s.add_argument("--a", help="lattice vector a")
    s.add_argument("--b", help="lattice vector b")
    s.add_argument("--anchor", help="rational anchor point for segment")
    s.add_argument("--direction", help="integer direction for segment")
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_toric)

    s = sub.add_parser("mutate", help="cluster mutation trace")
    s.add_argument("input", help="seed file")
    s.add_argument("--sequence", default="", help="1-based indices, e.g. 1,2,1")
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_mutate)

    s = sub.add_parser("verify", help="run the verification battery")
    s.add_argument("input", help="seed, diagram, or fan file; or a builtin fan name")
    s.add_argument("--level", choices=["fast", "full"], default="full")
    s.add_argument("--mode", choices=["cluster", "toric"], default="cluster")
    s.add_argument("--order", type=int, help="completion order for seed targets")
    s.add_argument("--out", help="write the report here as well as stdout")
    s.set_defaults(func=cmd_verify)

    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (ScatterKitError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
