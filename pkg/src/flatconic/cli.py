"""Command-line interface: develop charts, build cell complexes, check Veech
membership, rebuild affine maps between surfaces, and render tessellations.

Exit codes: 0 success, 2 input error, 3 infeasible request (seed not
realizable, or the window is too small to decide), 4 tolerance or
certification failure. Identical inputs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .cellcomplex import (NotRealizable, WindowTooSmall, build_complex,
                          complex_to_json, default_seed)
from .linalg import DEFAULT_TOL
from .render import render_svg
from .surface import SurfaceError, develop, parse_surface
from .veech import discover_affine, tessellate, veech_check


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _fmt(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else \
        f"{f.numerator}/{f.denominator}"


def _fmt_matrix(g) -> str:
    return "[[{},{}],[{},{}]]".format(_fmt(g[0][0]), _fmt(g[0][1]),
                                      _fmt(g[1][0]), _fmt(g[1][1]))


def _parse_base(text: str):
    # "p0:1/2,1/2" -> ("p0", (1/2, 1/2))
    pid, _, coords = text.partition(":")
    parts = coords.split(",")
    if not pid or len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"base must look like POLY:X,Y, got {text!r}")
    return (pid, (_frac(parts[0]), _frac(parts[1])))


def _parse_seed(text: str):
    # "0,0;1,0;0,1" -> three points
    points = []
    for chunk in text.split(";"):
        parts = chunk.split(",")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(
                f"seed must look like X,Y;X,Y;X,Y, got {text!r}")
        points.append((_frac(parts[0]), _frac(parts[1])))
    if len(points) != 3:
        raise argparse.ArgumentTypeError("seed needs exactly three points")
    return tuple(points)


def _parse_matrix(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"matrix must be four comma-separated rationals, got {text!r}")
    a, b, c, d = (_frac(p) for p in parts)
    return ((a, b), (c, d))


def _load_surface(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_surface(fh.read())


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_develop(args, tol: float) -> int:
    surface = _load_surface(args.surface)
    chart = develop(surface, base=args.base, radius=args.radius)
    lines = []
    for dp in chart.points:
        word = ">".join(f"{pid}.{e}" for pid, e in dp.path) or "-"
        lines.append(f"{dp.cone_id}\t{_fmt(dp.position[0])},"
                     f"{_fmt(dp.position[1])}\t{word}")
    _emit(args, "".join(line + "\n" for line in lines))
    return 0


def cmd_complex(args, tol: float) -> int:
    surface = _load_surface(args.surface)
    chart = develop(surface, base=args.base, radius=args.radius)
    seed = args.seed if args.seed else default_seed(chart, tol)
    window = build_complex(chart, seed, budget=args.budget, tol=tol)
    _emit(args, complex_to_json(window) + "\n")
    return 0


def cmd_veech(args, tol: float) -> int:
    surface = _load_surface(args.surface)
    (a, b), (c, d) = args.matrix
    if a * d - b * c != 1:
        print("error: matrix must have determinant 1", file=sys.stderr)
        return 2
    verdict = veech_check(surface, args.matrix, radius=args.radius, tol=tol)
    print(verdict)
    return 0 if verdict.verdict in ("member-in-window", "rejected") else 3


def cmd_rebuild(args, tol: float) -> int:
    source = _load_surface(args.source)
    target = _load_surface(args.target)
    chart_a = develop(source, radius=args.radius)
    chart_b = develop(target, radius=args.radius)
    A = build_complex(chart_a, default_seed(chart_a, tol),
                      budget=args.budget, tol=tol)
    B = build_complex(chart_b, default_seed(chart_b, tol),
                      budget=args.target_budget or args.budget, tol=tol)
    rec, phi = discover_affine(A, B, tol)
    print(_fmt_matrix(rec.linear))
    print(f"homothety: {_fmt(rec.homothety)}")
    print(f"translation: ({_fmt(rec.translation[0])},"
          f"{_fmt(rec.translation[1])})")
    print(f"matched: {len(phi.faces)} faces, {len(phi.edges)} edges, "
          f"{len(phi.vertices)} vertices")
    return 0


def cmd_tessellate(args, tol: float) -> int:
    surface = _load_surface(args.surface)
    chart = develop(surface, base=args.base, radius=args.radius)
    seed = args.seed if args.seed else default_seed(chart, tol)
    window = build_complex(chart, seed, budget=args.budget, tol=tol)
    tess = tessellate(window)
    if args.svg:
        svg = render_svg(tess, model=args.model, horizon=args.horizon)
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg)
        print(f"{args.svg}: {len(tess.faces)} faces, "
              f"{len(tess.vertex_points)} vertices ({args.model})")
    else:
        doc = {
            "faces": [{"id": f.id,
                       "vertices": [None if p is None else str(p)
                                    for p in f.vertices],
                       "truncated": f.truncated} for f in tess.faces],
            "vertices": {str(i): str(p) for i, p in
                         enumerate(sorted(tess.vertex_points.values(),
                                          key=str))},
        }
        _emit(args, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="flatconic",
        description="Cell complexes of immersed conics on translation "
                    "surfaces and their hyperbolic tessellations.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, seed=False, budget=False, out=False):
        p.add_argument("--base", type=_parse_base, default=None,
                       metavar="POLY:X,Y",
                       help="chart base point (default: first polygon's "
                            "centroid)")
        p.add_argument("--radius", type=_frac, default=Fraction(6),
                       help="chart radius (default 6)")
        if seed:
            p.add_argument("--seed", type=_parse_seed, default=None,
                           metavar="X,Y;X,Y;X,Y",
                           help="seed triple (default: nearest realizable)")
        if budget:
            p.add_argument("--budget", type=int, default=20,
                           help="2-cell budget (default 20)")
        if out:
            p.add_argument("--out", default=None, help="output file "
                           "(default stdout)")

    p = sub.add_parser("develop", help="unfold a chart and list cone points")
    p.add_argument("surface")
    common(p, out=True)
    p.set_defaults(func=cmd_develop)

    p = sub.add_parser("complex", help="build the windowed cell complex")
    p.add_argument("surface")
    common(p, seed=True, budget=True, out=True)
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("veech-check",
                       help="verify Veech-group membership on a window")
    p.add_argument("surface")
    p.add_argument("--matrix", type=_parse_matrix, required=True,
                   metavar="A,B,C,D", help="candidate matrix, row major")
    p.add_argument("--radius", type=_frac, default=Fraction(6))
    p.set_defaults(func=cmd_veech)

    p = sub.add_parser("rebuild",
                       help="recover the affine map between two surfaces")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--radius", type=_frac, default=Fraction(6))
    p.add_argument("--budget", type=int, default=12)
    p.add_argument("--target-budget", type=int, default=20,
                   dest="target_budget")
    p.set_defaults(func=cmd_rebuild)

    p = sub.add_parser("tessellate",
                       help="emit the hyperbolic tessellation of a window")
    p.add_argument("surface")
    common(p, seed=True, budget=True, out=True)
    p.add_argument("--svg", default=None, help="write an SVG file here")
    p.add_argument("--model", choices=("halfplane", "disc"),
                   default="halfplane")
    p.add_argument("--horizon", type=float, default=4.0,
                   help="height cut for ideal vertices (halfplane model)")
    p.set_defaults(func=cmd_tessellate)
    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    tol = DEFAULT_TOL
    env = os.environ.get("FLATCONIC_TOL")
    if env:
        try:
            tol = float(env)
        except ValueError:
            print(f"error: FLATCONIC_TOL is not a number: {env!r}",
                  file=sys.stderr)
            return 2
    try:
        return args.func(args, tol)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (SurfaceError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NotRealizable as e:
        print(f"infeasible (not realizable): {e}", file=sys.stderr)
        return 3
    except WindowTooSmall as e:
        print(f"infeasible (window too small): {e}", file=sys.stderr)
        return 3
    except ValueError as e:
        print(f"certification failure: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
