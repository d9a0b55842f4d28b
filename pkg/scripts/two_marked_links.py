#!/usr/bin/env python3
"""Survey the rigid ellipses of a twice-marked torus window.

For each untruncated rigid ellipse, print its boundary size n, the link's
vertex count against n(n-3)/2, the degree profile, and how many triangles
through each consecutive 1-cell point the directions at it (source or sink).
"""

import argparse
import pathlib
import sys
from collections import Counter
from fractions import Fraction

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from flatconic.cellcomplex import link, rigid_conics
from flatconic.models import two_marked_torus
from flatconic.subconic import SubconicKind
from flatconic.surface import develop


def triangles_at(L, v):
    outs = {a: set() for a in L.vertices}
    und = {a: set() for a in L.vertices}
    for a, b in L.edges:
        outs[a].add(b)
        und[a].add(b)
        und[b].add(a)
    tris = [(a, b) for a in und[v] for b in und[v] if a < b and b in und[a]]
    patterned = sum(1 for a, b in tris
                    if (b in outs[a] or a in outs[b]) and (
                        (a in outs[v] and b in outs[v])
                        or (v in outs[a] and v in outs[b])))
    return len(tris), patterned


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=Fraction, default=Fraction(2))
    args = ap.parse_args()

    surface = two_marked_torus(marked=(Fraction(1, 2), Fraction(1, 4)))
    chart = develop(surface, base=("t0", (Fraction(1, 4), Fraction(1, 12))),
                    radius=args.radius)
    conics = rigid_conics(chart)
    ellipses = [U for U in conics
                if U.kind is SubconicKind.ELLIPSE_INTERIOR and not U.truncated]
    print(f"{len(ellipses)} untruncated rigid ellipses "
          f"(of {sum(1 for U in conics if U.kind is SubconicKind.ELLIPSE_INTERIOR)})")
    for U in ellipses:
        n = len(U.boundary_points())
        L = link(U)
        degs = Counter(L.undirected_degree(v) for v in L.vertices)
        tri = Counter(triangles_at(L, v) for v in L.vertices)
        print(f"n={n}  link {len(L.vertices)}/{n * (n - 3) // 2} vertices  "
              f"degrees {dict(degs)}  (triangles, patterned) {dict(tri)}")


if __name__ == "__main__":
    main()
