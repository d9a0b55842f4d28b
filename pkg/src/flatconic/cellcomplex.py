"""The windowed cell complex of subconics meeting at least three cone points.

Vertices are rigid conics (ellipses through >= 5 cone points with empty
interior, and maximal strips), 1-cells are realizable quadruples, 2-cells are
realizable triples. For a triple Z the 2-cell is computed exactly in the
T-plane of its natural pencil basis: every other cone point z contributes the
linear constraint q_t(z) >= 0, and the feasible polygon is cut out of the
unit simplex by Sutherland-Hodgman clipping over rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .linalg import DEFAULT_TOL, Scalar, convex_hull_ccw, cross, dot2, sign_of
from .quadform import (CollinearTripleError, NaturalBasis, QForm3,
                       canonical_scale, combine, lift, natural_basis,
                       transform_by_affine)
from .subconic import (Subconic, SubconicKind, classify, conic_through_five,
                       strip_direction, subconic)
from .surface import (Chart, DevPoint, Fit, SurfaceError, dist2, rebase,
                      subconic_fits)

Position = tuple[Scalar, Scalar]


class NotRealizable(ValueError):
    """The queried set is certifiably not the cone-point set of a subconic."""


class WindowTooSmall(ValueError):
    """The window cannot decide the query; a larger radius may."""


def _pos_key(positions) -> tuple:
    return tuple(sorted((p[0], p[1]) for p in positions))


# ---------------------------------------------------------------------------
# rigid conics

@dataclass(frozen=True)
class RigidConic:
    subconic: Subconic
    # ellipses: one counterclockwise cyclic tuple; strips: two tuples, one per
    # boundary line, each listed in successor (advance) order
    boundary: tuple
    truncated: bool

    @property
    def kind(self) -> SubconicKind:
        return self.subconic.kind

    def boundary_points(self) -> tuple[Position, ...]:
        if self.kind is SubconicKind.ELLIPSE_INTERIOR:
            return self.boundary
        return tuple(self.boundary[0]) + tuple(self.boundary[1])

    def key(self) -> tuple:
        return _pos_key(self.boundary_points())

    def successor(self) -> dict:
        """The next-point-along-the-boundary map (partial at window ends)."""
        succ = {}
        if self.kind is SubconicKind.ELLIPSE_INTERIOR:
            cyc = self.boundary
            for i, p in enumerate(cyc):
                succ[p] = cyc[(i + 1) % len(cyc)]
        else:
            for line in self.boundary:
                for a, b in zip(line, line[1:]):
                    succ[a] = b
        return succ


def _ellipse_rigid(chart: Chart, q: QForm3, tol: float = DEFAULT_TOL
                   ) -> Optional[RigidConic]:
    """Extend an ellipse form to its full windowed rigid conic, or reject.

    Checks >= 5 boundary cone points, empty interior, and the immersion
    certificate from a chart re-based at the ellipse center. Boundary and
    interior tests run over every developed point of the window (occluded
    ones included), so the result does not depend on the chart's base.
    """
    zeros = []
    for p in list(chart.points) + list(chart.occluded):
        s = sign_of(q(lift(p.position)), tol)
        if s < 0:
            return None
        if s == 0:
            zeros.append(p.position)
    if len(zeros) < 5:
        return None
    center = _ellipse_center(q)
    fit = subconic_fits(rebase(chart, center), q, tol)
    if fit is Fit.NO:
        return None
    cyc = convex_hull_ccw(zeros)
    if len(cyc) != len(zeros):
        return None  # boundary points of an ellipse are in convex position
    return RigidConic(subconic(canonical_scale(q, tol), tol), tuple(cyc),
                      truncated=(fit is not Fit.YES))


def _ellipse_center(q: QForm3) -> Position:
    from .linalg import solve
    A = q.gram_restriction()
    c = solve([[A[0][0], A[0][1]], [A[1][0], A[1][1]]], [-q.a13, -q.a23])
    return (c[0], c[1])


def _strip_rigid(chart: Chart, q: QForm3, tol: float = DEFAULT_TOL
                 ) -> Optional[RigidConic]:
    """Windowed maximal strip through the zero set of q; always truncated."""
    direction = strip_direction(q, tol)
    normal = (-direction[1], direction[0])
    zeros = []
    for p in list(chart.points) + list(chart.occluded):
        s = sign_of(q(lift(p.position)), tol)
        if s < 0:
            return None
        if s == 0:
            zeros.append(p.position)
    levels = sorted({dot2(normal, z) for z in zeros})
    if len(levels) != 2:
        return None
    lines = []
    for i, level in enumerate(levels):
        pts = [z for z in zeros if dot2(normal, z) == level]
        if len(pts) < 2:
            return None
        # successor advances so that (advance, inward normal) is positively
        # oriented: +direction on the low line, -direction on the high line
        pts.sort(key=lambda z: dot2(direction, z))
        if i == 1:
            pts.reverse()
        lines.append(tuple(pts))
    return RigidConic(subconic(canonical_scale(q, tol), tol),
                      (lines[0], lines[1]), truncated=True)


def _segment_blocked(points: Sequence[Position], a: Position, b: Position) -> bool:
    """Is some cone point strictly between a and b on the segment?"""
    for w in points:
        if w == a or w == b:
            continue
        if sign_of(cross(a, b, w)) != 0:
            continue
        if (sign_of(dot2((w[0] - a[0], w[1] - a[1]),
                         (b[0] - a[0], b[1] - a[1]))) > 0
                and dist2(a, w) < dist2(a, b)):
            return True
    return False


def rigid_conics(chart: Chart, tol: float = DEFAULT_TOL) -> list[RigidConic]:
    """All windowed rigid conics: empty-interior ellipses through >= 5 cone
    points (that fit the chart) and maximal strips with 2+2 boundary points.

    The ellipse search prunes 5-subsets by pairwise chord visibility: a cone
    point strictly inside a chord would be strictly inside the ellipse, so
    only pairwise-unblocked 5-cliques can bound an empty ellipse.
    """
    pts = [p.position for p in chart.points]
    # occluded positions block chords too: a candidate with one strictly
    # inside always fails the immersion certificate
    blockers = pts + [p.position for p in chart.occluded]
    n = len(pts)
    found: dict[tuple, RigidConic] = {}

    # --- ellipses: clique search over the chord-visibility graph
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if not _segment_blocked(blockers, pts[i], pts[j]):
                adj[i] |= 1 << j
                adj[j] |= 1 << i

    def grow(clique: list[int], allowed: int, start: int):
        if len(clique) == 5:
            five = [pts[i] for i in clique]
            try:
                cand = conic_through_five(five, tol)
            except ValueError:
                return
            if cand.kind is not SubconicKind.ELLIPSE_INTERIOR:
                return
            rigid = _ellipse_rigid(chart, cand.form, tol)
            if rigid is not None:
                found.setdefault(rigid.key(), rigid)
            return
        m = allowed >> start
        i = start
        while m:
            if m & 1:
                grow(clique + [i], allowed & adj[i], i + 1)
            m >>= 1
            i += 1

    full = (1 << n) - 1
    grow([], full, 0)

    # --- strips: sweep every primitive direction spanned by point pairs
    # (occluded points count: a strip boundary line sees every developed
    # point of the window)
    directions = set()
    for i in range(len(blockers)):
        for j in range(i + 1, len(blockers)):
            d = (blockers[j][0] - blockers[i][0], blockers[j][1] - blockers[i][1])
            directions.add(_primitive(d))
    for d in sorted(directions):
        normal = (-d[1], d[0])
        levels: dict = {}
        for p in blockers:
            levels.setdefault(dot2(normal, p), []).append(p)
        order = sorted(levels)
        for lo, hi in zip(order, order[1:]):
            if len(levels[lo]) < 2 or len(levels[hi]) < 2:
                continue
            # form ((l - lo)(l - hi) with l the normal functional) is negative
            # exactly between the two lines
            q = _strip_form(normal, lo, hi)
            rigid = _strip_rigid(chart, q, tol)
            if rigid is not None:
                found.setdefault(rigid.key(), rigid)
    return [found[k] for k in sorted(found)]


def _primitive(d: Position) -> tuple:
    import math
    fx, fy = Fraction(d[0]), Fraction(d[1])
    den = fx.denominator * fy.denominator // math.gcd(fx.denominator, fy.denominator)
    p, q = int(fx * den), int(fy * den)
    g = math.gcd(p, q)
    if g:
        p, q = p // g, q // g
    if q < 0 or (q == 0 and p < 0):
        p, q = -p, -q
    return (p, q)


def _strip_form(normal: Position, lo: Scalar, hi: Scalar) -> QForm3:
    nx, ny = normal
    # (nx*x + ny*y - lo)(nx*x + ny*y - hi)
    return QForm3(nx * nx, ny * ny, lo * hi,
                  Fraction(2 * nx * ny, 2), Fraction(-(lo + hi) * nx, 2),
                  Fraction(-(lo + hi) * ny, 2))


# ---------------------------------------------------------------------------
# 2-cells

SIMPLEX_FACETS = ((Fraction(1), Fraction(0), Fraction(0)),
                  (Fraction(0), Fraction(1), Fraction(0)),
                  (Fraction(-1), Fraction(-1), Fraction(1)))


def _clip(poly: list, a: Scalar, b: Scalar, c: Scalar) -> list:
    """Keep the part of a convex polygon with a*t1 + b*t2 + c >= 0 (exact)."""
    if not poly:
        return []
    out = []
    vals = [a * p[0] + b * p[1] + c for p in poly]
    for i, p in enumerate(poly):
        j = (i + 1) % len(poly)
        vp, vq = vals[i], vals[j]
        if vp >= 0:
            out.append(p)
        if (vp > 0 and vq < 0) or (vp < 0 and vq > 0):
            t = vp / (vp - vq)
            q = poly[j]
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    dedup = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def _constraint(basis: NaturalBasis, z: Position) -> tuple:
    """Linear form in (t1, t2) equal to q_t(z) after t3 = 1 - t1 - t2."""
    vals = [d(lift(z)) for d in basis.forms]
    return (vals[0] - vals[2], vals[1] - vals[2], vals[2])


@dataclass
class FeasibleRegion:
    polygon: list                 # (t1, t2) vertices, CCW from lex-min
    basis: NaturalBasis
    chart: Chart                  # rebased at the triple's centroid
    constraints: list             # (a, b, c, source position)
    triple: tuple                 # positions, counterclockwise


def feasible_region(chart: Chart, Z, equality: Optional[Position] = None,
                    tol: float = DEFAULT_TOL) -> FeasibleRegion:
    """Clip the T-plane simplex by every cone-point constraint.

    Re-bases the chart at the triangle centroid so the visibility region is
    the right one for subconics containing the triangle. With `equality` set,
    the region is further cut to the line q_t(equality) = 0.
    """
    Z = [tuple(p) for p in Z]
    if len(Z) != 3 or len(set(Z)) != 3:
        raise ValueError("need 3 distinct points")
    centroid = (sum(Fraction(p[0]) for p in Z) / 3,
                sum(Fraction(p[1]) for p in Z) / 3)
    if sign_of(cross(Z[0], Z[1], Z[2])) == 0:
        raise NotRealizable(f"collinear triple {Z}")
    try:
        ch = rebase(chart, centroid)
    except SurfaceError as exc:
        raise WindowTooSmall(
            f"cannot re-base at the centroid of {Z}: {exc}") from exc
    visible = [p.position for p in ch.points]
    vis_set = set(visible)
    for z in Z:
        if z not in vis_set:
            raise NotRealizable(
                f"{z} is not a visible cone point of the re-based chart")
    basis = natural_basis(Z)
    ccw = basis.ordering
    for w in visible:
        if w in (set(Z) | ({tuple(equality)} if equality else set())):
            continue
        if all(sign_of(cross(ccw[i], ccw[(i + 1) % 3], w)) > 0 for i in range(3)):
            raise NotRealizable(
                f"cone point {w} lies strictly inside the triangle {Z}")
    poly = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
            (Fraction(0), Fraction(1))]
    constraints = []
    zset = set(Z)
    for w in visible:
        if w in zset:
            continue
        a, b, c = _constraint(basis, w)
        if a == 0 and b == 0 and c == 0:
            continue
        constraints.append((a, b, c, w))
        if equality is not None and w == tuple(equality):
            poly = _clip(poly, -a, -b, -c)
        poly = _clip(poly, a, b, c)
        if not poly:
            break
    if equality is not None and tuple(equality) not in vis_set:
        raise NotRealizable(f"{equality} is not a visible cone point")
    if poly:
        poly = convex_hull_ccw(poly) if len(poly) >= 3 else poly
    return FeasibleRegion(poly, basis, ch, constraints, ccw)


def _area2(poly) -> Scalar:
    return sum(poly[i][0] * poly[(i + 1) % len(poly)][1]
               - poly[(i + 1) % len(poly)][0] * poly[i][1]
               for i in range(len(poly)))


def _form_at(basis: NaturalBasis, t1: Scalar, t2: Scalar) -> QForm3:
    return combine([(t1, basis.d1), (t2, basis.d2), (1 - t1 - t2, basis.d3)])


@dataclass
class TwoCell:
    triple: tuple                    # positions, counterclockwise
    polygon: tuple                   # T-plane vertices (t1, t2, t3), CCW
    vertex_conics: tuple             # RigidConic or None per polygon vertex
    edge_quadruples: tuple           # sorted 4-position keys per polygon side
    basis: NaturalBasis
    complete: bool
    flags: tuple                     # human-readable truncation notes

    def key(self) -> tuple:
        return _pos_key(self.triple)


def two_cell(chart: Chart, Z, tol: float = DEFAULT_TOL) -> TwoCell:
    """The 2-cell of a realizable triple, as an exact convex T-plane polygon.

    Every polygon side is supported by one extra cone point (its quadruple is
    the side's 1-cell); every polygon vertex is classified as a rigid conic.
    Raises NotRealizable when the feasible set has no interior; incomplete
    certificates (window effects) are reported through flags, not errors.
    """
    region = feasible_region(chart, Z, tol=tol)
    poly = region.polygon
    if len(poly) < 3 or sign_of(_area2(poly)) <= 0:
        raise NotRealizable(
            f"triple {tuple(Z)} has no 2-dimensional family of subconics "
            "(feasible region has empty interior)")
    flags = []
    # sample the interior: must be an honest ellipse, otherwise the window
    # constraints were too sparse to pin the elliptic region
    cx = sum(p[0] for p in poly) / len(poly)
    cy = sum(p[1] for p in poly) / len(poly)
    sample = classify(_form_at(region.basis, cx, cy), tol)
    if sample.kind is not SubconicKind.ELLIPSE_INTERIOR:
        raise WindowTooSmall(
            f"interior sample of the feasible polygon for {tuple(Z)} is "
            f"{sample.kind.value}; enlarge the window")

    n = len(poly)
    edge_quads = []
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        supporters = [w for (a, b, c, w) in region.constraints
                      if a * p[0] + b * p[1] + c == 0
                      and a * q[0] + b * q[1] + c == 0]
        on_facet = any(a * p[0] + b * p[1] + c == 0
                       and a * q[0] + b * q[1] + c == 0
                       for (a, b, c) in SIMPLEX_FACETS)
        if on_facet:
            flags.append(f"side {i} lies on the simplex boundary")
            edge_quads.append(None)
            continue
        if not supporters:
            raise WindowTooSmall(
                f"side {i} of the cell of {tuple(Z)} is unsupported")
        if len(supporters) > 1:
            flags.append(f"side {i} supported by {len(supporters)} cone points")
        mid = classify(_form_at(region.basis, (p[0] + q[0]) / 2,
                                (p[1] + q[1]) / 2), tol)
        if mid.kind is not SubconicKind.ELLIPSE_INTERIOR:
            flags.append(f"side {i} midpoint is {mid.kind.value}")
        edge_quads.append(_pos_key(list(region.triple) + [supporters[0]]))

    vertex_conics = []
    for i, (t1, t2) in enumerate(poly):
        form = _form_at(region.basis, t1, t2)
        kind = classify(form, tol).kind
        rigid = None
        # vertex data is computed against the chart as given (not the
        # rebased one used for the constraints), so the same conic gets the
        # same windowed boundary from every cell that touches it
        if kind is SubconicKind.STRIP:
            rigid = _strip_rigid(chart, form, tol)
            if rigid is None:
                flags.append(f"vertex {i}: strip data incomplete in window")
        elif kind is SubconicKind.ELLIPSE_INTERIOR:
            rigid = _ellipse_rigid(chart, form, tol)
            if rigid is None:
                flags.append(f"vertex {i}: ellipse certificate failed in window")
            elif rigid.truncated:
                flags.append(f"vertex {i}: ellipse reaches the window edge")
        else:
            flags.append(f"vertex {i}: form classifies as {kind.value}")
        vertex_conics.append(rigid)

    complete = not flags or all("supported by" in f for f in flags)
    polygon3 = tuple((t1, t2, 1 - t1 - t2) for (t1, t2) in poly)
    return TwoCell(region.triple, polygon3, tuple(vertex_conics),
                   tuple(edge_quads), region.basis, complete, tuple(flags))


def realizable_triple(chart: Chart, Z, tol: float = DEFAULT_TOL) -> bool:
    """Feasibility route: is Z exactly the cone-point set of some subconic
    with a 2-dimensional family certifying the 2-cell?"""
    try:
        two_cell(chart, Z, tol)
        return True
    except NotRealizable:
        return False


def realizable_quadruple(chart: Chart, Z4, within: Optional[RigidConic] = None,
                         tol: float = DEFAULT_TOL) -> bool:
    """Feasibility route: the pencil through the 4 points cuts the feasible
    region in a nondegenerate segment with an ellipse interior sample.

    With `within` supplied, the combinatorial criterion (partition into two
    successor-adjacent pairs) is computed as well and must agree.
    """
    feas = _quadruple_feasible(chart, Z4, tol)
    if within is not None:
        comb = combinatorial_quadruple(within, Z4)
        if comb != feas:
            raise ValueError(
                f"combinatorial ({comb}) and feasibility ({feas}) criteria "
                f"disagree on {tuple(Z4)}")
    return feas


def _quadruple_feasible(chart: Chart, Z4, tol: float) -> bool:
    Z4 = [tuple(p) for p in Z4]
    if len(set(Z4)) != 4:
        return False
    for triple in combinations(Z4, 3):
        rest = next(p for p in Z4 if p not in triple)
        if sign_of(cross(*triple)) == 0:
            continue
        try:
            region = feasible_region(chart, list(triple), equality=rest, tol=tol)
        except NotRealizable:
            return False
        pts = region.polygon
        if len(pts) < 2:
            return False
        ends = max(((dist2(a, b), (a, b)) for a, b in combinations(pts, 2)),
                   default=(0, None))
        if ends[1] is None or ends[0] == 0:
            return False
        (a, b) = ends[1]
        mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        kind = classify(_form_at(region.basis, mid[0], mid[1]), tol).kind
        return kind is SubconicKind.ELLIPSE_INTERIOR
    return False


def combinatorial_quadruple(U: RigidConic, Z4) -> bool:
    """Partition criterion: two disjoint successor-adjacent pairs inside the
    boundary of U (for strips, one pair per boundary line)."""
    pts = set(tuple(p) for p in Z4)
    if len(pts) != 4 or not pts <= set(U.boundary_points()):
        return False
    return bool(_anchor_reps(U, pts))


def _anchor_reps(U: RigidConic, quad: set) -> list:
    """Ordered anchor pairs (x, y) with quad = {x, s(x)} | {y, s(y)}."""
    succ = U.successor()
    reps = []
    for x in quad:
        sx = succ.get(x)
        if sx is None or sx not in quad or sx == x:
            continue
        rest = quad - {x, sx}
        if len(rest) != 2:
            continue
        u, v = sorted(rest)
        if succ.get(u) == v:
            reps.append((x, u))
        if succ.get(v) == u:
            reps.append((x, v))
    return reps


def _is_consecutive(U: RigidConic, quad: set):
    succ = U.successor()
    for x in quad:
        if (succ.get(x) in quad
                and succ.get(succ.get(x)) in quad
                and succ.get(succ.get(succ.get(x))) in quad):
            chain = {x, succ[x], succ[succ[x]], succ[succ[succ[x]]]}
            if chain == quad and len(chain) == 4:
                return x
    return None


def follows(U: RigidConic, Zq1, Zq2) -> bool:
    """Does the 1-cell Zq2 follow Zq1 in the link of U?

    Single-anchor advance for any pair of 1-cells, plus the whole-quadruple
    shift between consecutive ones.
    """
    q1 = set(tuple(p) for p in Zq1)
    q2 = set(tuple(p) for p in Zq2)
    bd = set(U.boundary_points())
    if not (q1 <= bd and q2 <= bd) or len(q1) != 4 or len(q2) != 4:
        raise ValueError("quadruples must lie on the boundary of U")
    if len(q1 & q2) != 3:
        raise ValueError("quadruples do not share a triple")
    shared = q1 & q2
    if not _anchor_reps(U, q1) or not _anchor_reps(U, q2):
        raise ValueError("not realizable quadruples of U")
    succ = U.successor()
    if not any(succ.get(a) in shared for a in shared):
        raise ValueError("shared triple contains no successor-adjacent pair")
    for x, y in _anchor_reps(U, q1):
        sy = succ.get(y)
        s2y = succ.get(sy) if sy is not None else None
        if sy is None or s2y is None:
            continue
        advanced = {x, succ[x], sy, s2y}
        if len(advanced) == 4 and advanced == q2:
            return True
    x1 = _is_consecutive(U, q1)
    if x1 is not None and _is_consecutive(U, q2) is not None:
        if {succ[p] for p in q1 if p in succ} == q2 and all(p in succ for p in q1):
            return True
    return False


@dataclass(frozen=True)
class Link:
    """Directed graph on the 1-cells at a rigid conic."""
    conic: RigidConic
    vertices: tuple          # sorted quadruple keys
    edges: tuple             # (from_key, to_key): second follows first

    def out_neighbors(self, v):
        return [b for a, b in self.edges if a == v]

    def undirected_degree(self, v) -> int:
        return sum(1 for a, b in self.edges if a == v or b == v)


def link(U: RigidConic) -> Link:
    quads = []
    succ = U.successor()
    if U.kind is SubconicKind.ELLIPSE_INTERIOR:
        cyc = U.boundary
        n = len(cyc)
        for i in range(n):
            for j in range(i + 1, n):
                d = (j - i) % n
                if d in (1, n - 1):
                    continue
                quad = {cyc[i], succ[cyc[i]], cyc[j], succ[cyc[j]]}
                if len(quad) == 4:
                    quads.append(_pos_key(quad))
    else:
        pairs0 = list(zip(U.boundary[0], U.boundary[0][1:]))
        pairs1 = list(zip(U.boundary[1], U.boundary[1][1:]))
        for a in pairs0:
            for b in pairs1:
                quads.append(_pos_key(set(a) | set(b)))
    quads = sorted(set(quads))
    edges = []
    for qa, qb in combinations(quads, 2):
        if len(set(qa) & set(qb)) != 3:
            continue
        if follows(U, qa, qb):
            edges.append((qa, qb))
        if follows(U, qb, qa):
            edges.append((qb, qa))
    return Link(U, tuple(quads), tuple(edges))


# ---------------------------------------------------------------------------
# the windowed complex

@dataclass
class CellComplexWindow:
    chart: Chart
    cells: dict          # triple key -> TwoCell
    edges: dict          # quadruple key -> {"cells": [...], "endpoints": [...]}
    vertices: dict       # rigid key -> RigidConic
    seed: tuple
    budget: int
    exhausted: bool      # True when no frontier remained within the budget


def build_complex(chart: Chart, seed, budget: int = 20,
                  tol: float = DEFAULT_TOL) -> CellComplexWindow:
    """Breadth-first exploration of 2-cells from a seed triple.

    Crossing a boundary 1-cell leads to the other realizable triples inside
    its quadruple. The frontier is expanded in canonical key order, so the
    result is deterministic for a given chart, seed and budget.
    """
    seed_key = _pos_key(seed)
    first = two_cell(chart, seed, tol)  # raises NotRealizable for bad seeds
    cells = {seed_key: first}
    edges: dict = {}
    vertices: dict = {}
    _absorb(first, edges, vertices)
    frontier = [seed_key]
    exhausted = False
    while len(cells) < budget:
        next_frontier = []
        for cell_key in frontier:
            cell = cells[cell_key]
            for quad in cell.edge_quadruples:
                if quad is None:
                    continue
                for triple in combinations(quad, 3):
                    tkey = _pos_key(triple)
                    if tkey in cells or tkey == cell_key:
                        continue
                    try:
                        new = two_cell(chart, triple, tol)
                    except (NotRealizable, WindowTooSmall):
                        continue
                    cells[tkey] = new
                    _absorb(new, edges, vertices)
                    next_frontier.append(tkey)
                    if len(cells) >= budget:
                        break
                if len(cells) >= budget:
                    break
            if len(cells) >= budget:
                break
        if not next_frontier:
            exhausted = True
            break
        frontier = sorted(next_frontier)
    for quad, rec in edges.items():
        rec["cells"] = sorted(set(rec["cells"]))
    return CellComplexWindow(chart, cells, edges, vertices,
                             _pos_key(seed), budget, exhausted)


def default_seed(chart: Chart, tol: float = DEFAULT_TOL) -> tuple:
    """The first realizable triple among the visible points nearest the base.

    Candidates are scanned in (distance, position) order over the eight
    nearest points, so the choice is deterministic for a given chart.
    """
    pts = [d.position for d in sorted(
        chart.points, key=lambda d: (dist2(d.position, chart.base), d.position))]
    for triple in combinations(pts[:8], 3):
        try:
            two_cell(chart, triple, tol)
        except (NotRealizable, WindowTooSmall, CollinearTripleError):
            continue
        return triple
    raise NotRealizable("no realizable triple among the points nearest "
                        "the base")


def _absorb(cell: TwoCell, edges: dict, vertices: dict) -> None:
    n = len(cell.polygon)
    for i, quad in enumerate(cell.edge_quadruples):
        if quad is None:
            continue
        va = cell.vertex_conics[i]
        vb = cell.vertex_conics[(i + 1) % n]
        rec = edges.setdefault(quad, {"cells": [], "endpoints": set()})
        rec["cells"].append(cell.key())
        for v in (va, vb):
            if v is not None:
                rec["endpoints"].add(v.key())
                vertices.setdefault(v.key(), v)


# ---------------------------------------------------------------------------
# matching two windows

@dataclass
class CellMatching:
    """Dictionaries from A-side keys to B-side keys (faces by triple,
    edges by quadruple, vertices by rigid-conic boundary key)."""
    faces: dict
    edges: dict
    vertices: dict


def _apply_affine(g, tau, p):
    return (g[0][0] * p[0] + g[0][1] * p[1] + tau[0],
            g[1][0] * p[0] + g[1][1] * p[1] + tau[1])


def matching_from_affine(A: CellComplexWindow, B: CellComplexWindow,
                         g, tau=(0, 0), strict: bool = True) -> CellMatching:
    """The matching induced by z -> g z + tau on every cell of A.

    Faces and edges are matched by image position keys. Vertices are matched
    by their transformed forms (canonically rescaled), because the windowed
    boundary of a truncated conic depends on the window shape and two charts
    rarely clip it identically. With strict=True every face/edge must land
    in B; vertices whose image conic was not explored are only an error when
    the source is untruncated.
    """
    def image_key(key):
        return _pos_key([_apply_affine(g, tau, p) for p in key])

    faces, edges, vertices = {}, {}, {}
    for key in A.cells:
        ik = image_key(key)
        if ik in B.cells:
            faces[key] = ik
        elif strict:
            raise ValueError(f"face {key} has no image cell in B")
    for key in A.edges:
        ik = image_key(key)
        if ik in B.edges:
            edges[key] = ik
        elif strict:
            raise ValueError(f"edge {key} has no image edge in B")
    if not faces or not edges:
        raise ValueError("affine map matches no cells between the windows")
    by_form = {canonical_scale(U.subconic.form).coeffs(): key
               for key, U in B.vertices.items()}
    for key, U in A.vertices.items():
        q2 = transform_by_affine(U.subconic.form, g, tau)
        ik = by_form.get(canonical_scale(q2).coeffs())
        if ik is not None:
            vertices[key] = ik
        elif strict and not U.truncated:
            raise ValueError(f"vertex {key} has no image vertex in B")
    if not faces or not edges:
        raise ValueError("affine map matches no cells between the windows")
    return CellMatching(faces, edges, vertices)


def _successor_pairs(U: RigidConic, quad) -> frozenset:
    """The unique partition of a 1-cell on ∂U into successor-adjacent pairs."""
    reps = _anchor_reps(U, set(quad))
    if not reps:
        raise ValueError(f"{tuple(quad)} is not a 1-cell of {U.key()}")
    x, y = reps[0]
    succ = U.successor()
    return frozenset([(x, succ[x]), (y, succ[y])])


def _check_phi(A: CellComplexWindow, B: CellComplexWindow,
               phi: CellMatching) -> None:
    """Incidence and orientation of a cell matching; raises naming the
    first violated cell."""
    if len(set(phi.faces.values())) != len(phi.faces) \
            or len(set(phi.edges.values())) != len(phi.edges) \
            or len(set(phi.vertices.values())) != len(phi.vertices):
        raise ValueError("matching is not injective")
    for fkey, fkey2 in phi.faces.items():
        cell, cell2 = A.cells[fkey], B.cells[fkey2]
        cyc = [phi.edges.get(q) if q is not None else None
               for q in cell.edge_quadruples]
        target = list(cell2.edge_quadruples)
        if len(cyc) != len(target):
            raise ValueError(f"face {fkey}: side counts differ under the matching")
        known = [q for q in cyc if q is not None]
        if any(q not in target for q in known):
            raise ValueError(f"face {fkey}: matched edges are not incident "
                             "to the matched face")
        rotations = [target[i:] + target[:i] for i in range(len(target))]
        if not any(all(c is None or c == t[i] for i, c in enumerate(cyc))
                   for t in rotations):
            rev = target[::-1]
            reflections = [rev[i:] + rev[:i] for i in range(len(rev))]
            if any(all(c is None or c == t[i] for i, c in enumerate(cyc))
                   for t in reflections):
                raise ValueError(f"face {fkey}: matching reverses the boundary "
                                 "orientation")
            raise ValueError(f"face {fkey}: boundary cycles do not correspond")


class _Ambiguous(ValueError):
    """A vertex's 1-cells alone cannot pin the pair correspondence yet."""


def frontier_bijection(A: CellComplexWindow, B: CellComplexWindow,
                       phi: CellMatching) -> dict:
    """The cone-point bijection induced by an orientation-preserving cell
    matching: on each matched rigid conic the matched 1-cells determine how
    successor-adjacent pairs correspond, and successor conjugation extends
    the assignment along the boundary.

    Vertices whose own 1-cells leave the orientation ambiguous (a single
    matched edge on a symmetric strip does) are deferred until cone points
    shared with already-resolved conics pin them down.

    Returns {position -> position} on all boundary points the matching
    reaches, certified to satisfy beta(s(x)) = s'(beta(x)) and to agree
    across conics sharing cone points.
    """
    _check_phi(A, B, phi)
    jobs = {}
    for vkey, vkey2 in sorted(phi.vertices.items()):
        U, U2 = A.vertices[vkey], B.vertices[vkey2]
        if U.kind is not U2.kind:
            raise ValueError(f"vertex {vkey}: kinds differ under the matching")
        constraints = []
        for q, rec in sorted(A.edges.items()):
            if vkey not in rec["endpoints"] or q not in phi.edges:
                continue
            q2 = phi.edges[q]
            if vkey2 not in B.edges[q2]["endpoints"]:
                raise ValueError(f"edge {q}: image not incident to image vertex")
            constraints.append((_successor_pairs(U, q),
                                _successor_pairs(U2, q2)))
        if constraints:
            jobs[vkey] = (U, U2, constraints)

    beta: dict = {}

    def merge(local):
        for x, x2 in local.items():
            if beta.setdefault(x, x2) != x2:
                raise ValueError(f"matching is inconsistent at cone point {x}")

    pending = sorted(jobs)
    final = False
    while pending:
        progressed = False
        deferred = []
        for vkey in pending:
            U, U2, constraints = jobs[vkey]
            try:
                pairmap = _resolve_pairs(constraints, U, U2, beta, final)
            except _Ambiguous:
                deferred.append(vkey)
                continue
            local = {}
            for (x, sx), (x2, sx2) in pairmap.items():
                local[x] = x2
                local[sx] = sx2
            _extend_by_conjugation(U, U2, local)
            merge(local)
            progressed = True
        if not deferred:
            break
        if not progressed:
            if final:
                raise ValueError(
                    f"orientation on {deferred[0]} cannot be certified")
            final = True
        pending = deferred

    for q, q2 in phi.edges.items():
        if all(p in beta for p in q):
            if _pos_key([beta[p] for p in q]) != q2:
                raise ValueError(f"edge {q}: bijection disagrees with the "
                                 "matched quadruple")
    return beta


def _resolve_pairs(constraints, U: RigidConic, U2: RigidConic,
                   hints: dict, final: bool) -> dict:
    """Assign each successor pair of U appearing in the constraints to a
    pair of U2. Shared pairs between 1-cells pin the correspondence; cone
    points already mapped elsewhere (hints) break remaining ties; with
    final=True an isolated 1-cell falls back to whichever orientation the
    conjugation certifies."""
    pairmap: dict = {}
    pending = list(constraints)
    progress = True
    while progress:
        progress = False
        remaining = []
        for pa, pb in pending:
            known = [p for p in pa if p in pairmap]
            if len(known) == 2:
                if {pairmap[p] for p in pa} != set(pb):
                    raise ValueError("pair images conflict between 1-cells")
                progress = True
                continue
            if len(known) == 1:
                (other_a,) = [p for p in pa if p not in pairmap]
                used = pairmap[known[0]]
                if used not in pb:
                    raise ValueError("pair images conflict between 1-cells")
                (other_b,) = [p for p in pb if p != used]
                pairmap[other_a] = other_b
                progress = True
                continue
            seeded = False
            for pa2, pb2 in pending:
                if pa2 is pa or len(pa & pa2) != 1:
                    continue
                shared_b = pb & pb2
                if len(shared_b) == 1:
                    (sa,) = pa & pa2
                    (sb,) = shared_b
                    pairmap[sa] = sb
                    seeded = progress = True
                    break
            if not seeded:
                for (x, sx) in pa:
                    hx = hints.get(x), hints.get(sx)
                    matches = [p2 for p2 in pb if p2[0] == hx[0] or p2[1] == hx[1]]
                    if len(matches) == 1:
                        pairmap[(x, sx)] = matches[0]
                        seeded = progress = True
                        break
            if not seeded:
                remaining.append((pa, pb))
        pending = remaining
    if pending and not final:
        raise _Ambiguous("unresolved 1-cells remain")
    for pa, pb in pending:
        for flip in (False, True):
            la, lb = sorted(pa), sorted(pb)
            trial = dict(pairmap)
            trial[la[0]] = lb[1] if flip else lb[0]
            trial[la[1]] = lb[0] if flip else lb[1]
            local = {}
            for (x, sx), (x2, sx2) in trial.items():
                local[x] = x2
                local[sx] = sx2
            try:
                _extend_by_conjugation(U, U2, dict(local))
            except ValueError:
                continue
            pairmap = trial
            break
        else:
            raise ValueError(f"1-cell orientation on {U.key()} cannot be "
                             "certified either way")
    return pairmap


def _extend_by_conjugation(U: RigidConic, U2: RigidConic, local: dict) -> None:
    """Grow beta along successor orbits (both directions) and certify
    beta(s(x)) = s'(beta(x)) wherever both sides are defined. Mutates and
    validates `local`."""
    succ, succ2 = U.successor(), U2.successor()
    pred = {b: a for a, b in succ.items()}
    pred2 = {b: a for a, b in succ2.items()}
    frontier = list(local)
    while frontier:
        x = frontier.pop()
        x2 = local[x]
        for step, step2 in ((succ, succ2), (pred, pred2)):
            nxt = step.get(x)
            if nxt is None:
                continue
            nxt2 = step2.get(x2)
            if nxt in local:
                if local[nxt] != (nxt2 if nxt2 is not None else local[nxt]):
                    raise ValueError(
                        f"successor conjugation fails at {x} on {U.key()}")
                continue
            if nxt2 is None:
                continue
            local[nxt] = nxt2
            frontier.append(nxt)
    if len(set(local.values())) != len(local):
        raise ValueError(f"bijection collapses points on {U.key()}")
    for x, x2 in local.items():
        sx = succ.get(x)
        if sx is not None and sx in local and succ2.get(x2) != local[sx]:
            raise ValueError(f"successor conjugation fails at {x} on {U.key()}")


# ---------------------------------------------------------------------------
# serialization

def _frac_str(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _pos_json(p) -> list:
    return [_frac_str(p[0]), _frac_str(p[1])]


def complex_to_json(window: CellComplexWindow) -> str:
    from .geom import h_point, homothety_class
    verts = []
    vertex_ids = {}
    for i, key in enumerate(sorted(window.vertices)):
        U = window.vertices[key]
        vertex_ids[key] = f"v{i}"
        entry = {
            "id": f"v{i}",
            "kind": U.kind.value,
            "form": [_frac_str(c) for c in U.subconic.form.coeffs()],
            "truncated": U.truncated,
        }
        if U.kind is SubconicKind.ELLIPSE_INTERIOR:
            entry["boundary"] = [_pos_json(p) for p in U.boundary]
        else:
            entry["boundary"] = [[_pos_json(p) for p in line]
                                 for line in U.boundary]
        try:
            entry["h_point"] = str(h_point(homothety_class(U.subconic)))
        except ValueError:
            pass
        verts.append(entry)
    edges = []
    for key in sorted(window.edges):
        rec = window.edges[key]
        edges.append({
            "quadruple": [_pos_json(p) for p in key],
            "cells": [_face_id(k) for k in rec["cells"]],
            "endpoints": sorted(vertex_ids.get(v, "?") for v in rec["endpoints"]),
        })
    faces = []
    for key in sorted(window.cells):
        cell = window.cells[key]
        faces.append({
            "id": _face_id(key),
            "triple": [_pos_json(p) for p in cell.triple],
            "polygon_t": [[_frac_str(t) for t in v] for v in cell.polygon],
            "edges": [None if q is None else [_pos_json(p) for p in q]
                      for q in cell.edge_quadruples],
            "complete": cell.complete,
            "flags": list(cell.flags),
        })
    doc = {
        "window": {
            "base": _pos_json(window.chart.base),
            "radius": _frac_str(window.chart.radius),
            "seed": [_pos_json(p) for p in window.seed],
            "budget": window.budget,
            "exhausted": window.exhausted,
        },
        "vertices": verts,
        "edges": edges,
        "faces": faces,
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def _face_id(key) -> str:
    return ";".join(f"{_frac_str(x)},{_frac_str(y)}" for x, y in key)
