"""Translation surfaces from glued polygons, and windowed developing maps.

A surface is a list of counterclockwise polygons plus edge gluings by
translation. `develop` unfolds the surface around a base point into the
plane, keeps the cone-point images within a radius window, and filters them
down to the star-convex visibility region (a cone point blocks the open ray
strictly beyond itself).

All geometry is exact over rationals; file numbers are converted to
Fraction on parse.
"""

from __future__ import annotations

import enum
import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .linalg import DEFAULT_TOL, Scalar, cross, dot2, is_exact, sign_of, solve
from .quadform import QForm3, lift
from .subconic import Subconic, SubconicKind, classify

Point = tuple[Scalar, Scalar]


class SurfaceError(ValueError):
    """Structured validation failure naming the offending element."""


def _to_scalar(value) -> Scalar:
    if isinstance(value, str):
        if "/" in value:
            num, den = value.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(value)
    if isinstance(value, bool):
        raise SurfaceError(f"not a coordinate: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)  # exact binary value of the literal
    raise SurfaceError(f"not a coordinate: {value!r}")


def _sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def _add(a: Point, b: Point) -> Point:
    return (a[0] + b[0], a[1] + b[1])


def dist2(a: Point, b: Point) -> Scalar:
    dx, dy = a[0] - b[0], a[1] - b[1]
    return dx * dx + dy * dy


@dataclass(frozen=True)
class SurfaceDesc:
    polygons: tuple[tuple[str, tuple[Point, ...]], ...]
    gluings: dict  # (poly_id, edge) -> (poly_id, edge), symmetric
    cone_class: dict  # (poly_id, corner index) -> class label "c0", "c1", ...
    cone_angles: dict  # class label -> integer k (total angle 2*pi*k)

    def polygon(self, pid: str) -> tuple[Point, ...]:
        for qid, verts in self.polygons:
            if qid == pid:
                return verts
        raise KeyError(pid)

    def scaled(self, factor: Scalar) -> "SurfaceDesc":
        polys = tuple((pid, tuple((factor * x, factor * y) for x, y in verts))
                      for pid, verts in self.polygons)
        return SurfaceDesc(polys, self.gluings, self.cone_class, self.cone_angles)

    def mapped(self, g) -> "SurfaceDesc":
        """Apply a linear map (rows) to every vertex; gluings survive as is."""
        (a, b), (c, d) = g
        if sign_of(a * d - b * c) <= 0:
            raise SurfaceError("linear map must be orientation preserving")
        polys = tuple((pid, tuple((a * x + b * y, c * x + d * y) for x, y in verts))
                      for pid, verts in self.polygons)
        return validate_surface(polys, self.gluings)


def _interior_angle(u: Point, w: Point) -> float:
    # angle between incoming edge u and outgoing edge w, measured inside a
    # counterclockwise polygon; reflex corners give values above pi
    turn = math.atan2(float(cross((0, 0), u, w)), float(dot2(u, w)))
    return math.pi - turn


def validate_surface(polygons, gluings_pairs) -> SurfaceDesc:
    """Check all gluing invariants and compute cone classes/angles.

    `polygons`: iterable of (id, vertex tuple); `gluings_pairs`: either a
    symmetric dict or an iterable of ((pid, e), (qid, f)) pairs.
    """
    polys = tuple((pid, tuple((v[0], v[1]) for v in verts))
                  for pid, verts in polygons)
    ids = [pid for pid, _ in polys]
    if len(set(ids)) != len(ids):
        raise SurfaceError("duplicate polygon ids")
    verts_of = dict(polys)
    for pid, verts in polys:
        if len(verts) < 3:
            raise SurfaceError(f"polygon {pid} has fewer than 3 vertices")
        if len(set(verts)) != len(verts):
            raise SurfaceError(f"polygon {pid} repeats a vertex")
        area2 = sum(verts[i][0] * verts[(i + 1) % len(verts)][1]
                    - verts[(i + 1) % len(verts)][0] * verts[i][1]
                    for i in range(len(verts)))
        if sign_of(area2) <= 0:
            raise SurfaceError(f"polygon {pid} is not counterclockwise")

    glue: dict = {}
    if isinstance(gluings_pairs, dict):
        pairs = set()
        for k, v in gluings_pairs.items():
            pairs.add((min(k, v), max(k, v)))
        gluings_pairs = sorted(pairs)
    for a, b in gluings_pairs:
        a = (a[0], int(a[1]))
        b = (b[0], int(b[1]))
        for side in (a, b):
            if side[0] not in verts_of:
                raise SurfaceError(f"gluing references unknown polygon {side[0]}")
            if not 0 <= side[1] < len(verts_of[side[0]]):
                raise SurfaceError(f"gluing references bad edge index {side}")
            if side in glue:
                raise SurfaceError(f"edge {side} glued more than once")
        if a == b:
            raise SurfaceError(f"edge {a} glued to itself")
        va, vb = verts_of[a[0]], verts_of[b[0]]
        ea = _sub(va[(a[1] + 1) % len(va)], va[a[1]])
        eb = _sub(vb[(b[1] + 1) % len(vb)], vb[b[1]])
        if ea[0] + eb[0] != 0 or ea[1] + eb[1] != 0:
            raise SurfaceError(
                f"gluing {a}~{b}: edge vectors {ea} and {eb} are not opposite "
                "(translation gluings need parallel, equal, reversed edges)")
        glue[a] = b
        glue[b] = a
    for pid, verts in polys:
        for e in range(len(verts)):
            if (pid, e) not in glue:
                raise SurfaceError(f"edge ({pid}, {e}) is unglued")

    # corner cycles: crossing the outgoing edge e of corner (p, e) lands on
    # the corner after the matched edge
    cone_class: dict = {}
    cone_angles: dict = {}
    corners = [(pid, i) for pid, verts in polys for i in range(len(verts))]
    label = 0
    for start in corners:
        if start in cone_class:
            continue
        name = f"c{label}"
        label += 1
        angle = 0.0
        cur = start
        while True:
            cone_class[cur] = name
            pid, i = cur
            verts = verts_of[pid]
            n = len(verts)
            incoming = _sub(verts[i], verts[(i - 1) % n])
            outgoing = _sub(verts[(i + 1) % n], verts[i])
            angle += _interior_angle(incoming, outgoing)
            q, j = glue[(pid, i)]
            cur = (q, (j + 1) % len(verts_of[q]))
            if cur == start:
                break
        k = angle / (2 * math.pi)
        if abs(k - round(k)) > 1e-9 or round(k) < 1:
            raise SurfaceError(
                f"vertex class {name} (at corner {start}) has cone angle "
                f"{angle:.12f}, not a positive multiple of 2*pi")
        cone_angles[name] = int(round(k))
    return SurfaceDesc(polys, glue, cone_class, cone_angles)


def parse_surface(text: str) -> SurfaceDesc:
    """Parse the JSON surface document and validate it.

    Format: {"polygons": [{"id": str, "vertices": [[x, y], ...]}, ...],
             "gluings": [{"a": [id, edgeIdx], "b": [id, edgeIdx]}, ...]}
    with numbers given as JSON numbers or exact "p/q" strings.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SurfaceError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict) or "polygons" not in doc or "gluings" not in doc:
        raise SurfaceError("document must have 'polygons' and 'gluings'")
    polys = []
    for entry in doc["polygons"]:
        try:
            pid = entry["id"]
            verts = tuple((_to_scalar(v[0]), _to_scalar(v[1]))
                          for v in entry["vertices"])
        except (KeyError, TypeError, IndexError, ValueError) as e:
            raise SurfaceError(f"bad polygon entry {entry!r}: {e}") from None
        polys.append((pid, verts))
    pairs = []
    for entry in doc["gluings"]:
        try:
            pairs.append(((entry["a"][0], int(entry["a"][1])),
                          (entry["b"][0], int(entry["b"][1]))))
        except (KeyError, TypeError, IndexError, ValueError) as e:
            raise SurfaceError(f"bad gluing entry {entry!r}: {e}") from None
    return validate_surface(polys, pairs)


def _fraction_str(x: Scalar) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def surface_to_json(desc: SurfaceDesc) -> str:
    polys = [{"id": pid,
              "vertices": [[_fraction_str(x), _fraction_str(y)] for x, y in verts]}
             for pid, verts in desc.polygons]
    seen = set()
    gl = []
    for a in sorted(desc.gluings):
        b = desc.gluings[a]
        if (b, a) in seen:
            continue
        seen.add((a, b))
        gl.append({"a": [a[0], a[1]], "b": [b[0], b[1]]})
    return json.dumps({"polygons": polys, "gluings": gl},
                      indent=1, sort_keys=True)


# ---------------------------------------------------------------------------
# point-in-polygon and distances (exact)

def point_in_polygon(point: Point, verts: Sequence[Point]) -> int:
    """+1 strictly inside, 0 on the boundary, -1 outside. Exact crossing count."""
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if _on_segment(point, a, b):
            return 0
    inside = False
    px, py = point
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        if (ay > py) != (by > py):
            # x coordinate of the edge at height py, compared exactly
            t = (px - ax) * (by - ay) - (bx - ax) * (py - ay)
            if (by > ay and sign_of(t) < 0) or (by < ay and sign_of(t) > 0):
                inside = not inside
    return 1 if inside else -1


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    if sign_of(cross(a, b, p)) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def _segment_dist2(p: Point, a: Point, b: Point) -> Scalar:
    ab = _sub(b, a)
    ap = _sub(p, a)
    denom = ab[0] * ab[0] + ab[1] * ab[1]
    if denom == 0:
        return dist2(p, a)
    t = (ap[0] * ab[0] + ap[1] * ab[1])
    if t <= 0:
        return dist2(p, a)
    if t >= denom:
        return dist2(p, b)
    proj = (a[0] + ab[0] * t / denom, a[1] + ab[1] * t / denom)
    return dist2(p, proj)


def _polygon_dist2(p: Point, verts: Sequence[Point]) -> Scalar:
    if point_in_polygon(p, verts) >= 0:
        return 0
    return min(_segment_dist2(p, verts[i], verts[(i + 1) % len(verts)])
               for i in range(len(verts)))


# ---------------------------------------------------------------------------
# developing

@dataclass(frozen=True)
class DevPoint:
    position: Point
    cone_id: str
    path: tuple  # edge-crossing word: ((poly_id, edge), ...) from the base placement


@dataclass(frozen=True)
class Placement:
    poly_id: str
    translation: Point
    path: tuple


@dataclass(frozen=True)
class Chart:
    surface: SurfaceDesc
    base: Point
    base_locator: tuple  # (poly_id, local point)
    radius: Scalar
    points: tuple[DevPoint, ...]       # visible cone points, sorted by position
    occluded: tuple[DevPoint, ...]     # in-window points hidden behind others
    placements: tuple[Placement, ...]

    def positions(self) -> list[Point]:
        return [p.position for p in self.points]


def default_base(surface: SurfaceDesc) -> tuple:
    """(first polygon id, its area centroid) — deterministic and interior."""
    pid, verts = surface.polygons[0]
    n = len(verts)
    a2 = Fraction(0)
    cx = Fraction(0)
    cy = Fraction(0)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        w = x0 * y1 - x1 * y0
        a2 += w
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    return (pid, (cx / (3 * a2), cy / (3 * a2)))


def develop(surface: SurfaceDesc, base=None, radius: Scalar = 6) -> Chart:
    """Unfold the surface around `base` and return the visibility-filtered chart.

    `base` is (polygon_id, point) with the point inside the polygon (edge
    interiors are fine, vertices are cone points and not allowed); None picks
    the first polygon's centroid. Cone points within `radius` of the base are
    collected; a point is kept only if no other collected point lies strictly
    between it and the base on the same ray.
    """
    if base is None:
        base = default_base(surface)
    pid0, local = base
    verts0 = surface.polygon(pid0)
    if any(local[0] == v[0] and local[1] == v[1] for v in verts0):
        raise SurfaceError(f"base point {local} is a cone point")
    if point_in_polygon(local, verts0) < 0:
        raise SurfaceError(f"base point {local} is not inside polygon {pid0}")
    if sign_of(radius, 0.0) <= 0:
        raise SurfaceError("radius must be positive")
    base_pos = (local[0], local[1])
    r2 = radius * radius

    start = Placement(pid0, (Fraction(0), Fraction(0)), ())
    queue = deque([start])
    seen = {(pid0, start.translation)}
    placements = []
    raw: dict[Point, DevPoint] = {}
    while queue:
        pl = queue.popleft()
        verts = surface.polygon(pl.poly_id)
        placed = [_add(v, pl.translation) for v in verts]
        placements.append(pl)
        for i, pos in enumerate(placed):
            if dist2(pos, base_pos) <= r2 and pos not in raw:
                raw[pos] = DevPoint(pos, surface.cone_class[(pl.poly_id, i)],
                                    pl.path)
        n = len(verts)
        for e in range(n):
            q, f = surface.gluings[(pl.poly_id, e)]
            qverts = surface.polygon(q)
            tau = _add(pl.translation,
                       _sub(verts[e], qverts[(f + 1) % len(qverts)]))
            key = (q, tau)
            if key in seen:
                continue
            qplaced = [_add(v, tau) for v in qverts]
            if _polygon_dist2(base_pos, qplaced) > r2:
                continue
            seen.add(key)
            queue.append(Placement(q, tau, pl.path + ((pl.poly_id, e),)))

    candidates = sorted(raw.values(),
                        key=lambda d: (dist2(d.position, base_pos),
                                       d.position[0], d.position[1]))
    visible: list[DevPoint] = []
    occluded: list[DevPoint] = []
    for cand in candidates:
        blocked = False
        for keep in visible:
            if (sign_of(cross(base_pos, keep.position, cand.position)) == 0
                    and sign_of(dot2(_sub(keep.position, base_pos),
                                     _sub(cand.position, base_pos))) > 0
                    and dist2(keep.position, base_pos) < dist2(cand.position, base_pos)):
                blocked = True
                break
        (occluded if blocked else visible).append(cand)
    visible.sort(key=lambda d: d.position)
    occluded.sort(key=lambda d: d.position)
    return Chart(surface, base_pos, base, radius, tuple(visible),
                 tuple(occluded), tuple(placements))


def locate(chart: Chart, position: Point):
    """Base locator (polygon_id, local point) for a developed-plane position.

    Prefers a placement containing the position strictly; falls back to a
    boundary placement. Raises if the position is outside every placement.
    """
    boundary = None
    for pl in chart.placements:
        verts = [_add(v, pl.translation) for v in chart.surface.polygon(pl.poly_id)]
        side = point_in_polygon(position, verts)
        if side > 0:
            return (pl.poly_id, _sub(position, pl.translation))
        if side == 0 and boundary is None:
            boundary = (pl.poly_id, _sub(position, pl.translation))
    if boundary is not None:
        return boundary
    raise SurfaceError(f"position {position} is outside the developed window")


def rebase(chart: Chart, position: Point, radius: Scalar = None) -> Chart:
    """Develop a fresh chart based at a (developed-plane) position.

    The new chart's coordinates are translated so that the given position
    keeps its developed coordinates (placement translations are aligned).
    """
    pid, local = locate(chart, position)
    fresh = develop(chart.surface, (pid, local),
                    chart.radius if radius is None else radius)
    # fresh coordinates place `pid` at translation 0; shift back
    shift = _sub(position, local)
    if shift == (0, 0):
        return fresh
    pts = tuple(DevPoint(_add(p.position, shift), p.cone_id, p.path)
                for p in fresh.points)
    occ = tuple(DevPoint(_add(p.position, shift), p.cone_id, p.path)
                for p in fresh.occluded)
    pls = tuple(Placement(p.poly_id, _add(p.translation, shift), p.path)
                for p in fresh.placements)
    return Chart(fresh.surface, _add(fresh.base, shift), fresh.base_locator,
                 fresh.radius, pts, occ, pls)


# ---------------------------------------------------------------------------
# inradius

def _circumcenter(a: Point, b: Point, c: Point) -> Optional[Point]:
    d = 2 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if d == 0:
        return None
    ux = ((a[0] ** 2 + a[1] ** 2) * (b[1] - c[1])
          + (b[0] ** 2 + b[1] ** 2) * (c[1] - a[1])
          + (c[0] ** 2 + c[1] ** 2) * (a[1] - b[1])) / d
    uy = ((a[0] ** 2 + a[1] ** 2) * (c[0] - b[0])
          + (b[0] ** 2 + b[1] ** 2) * (a[0] - c[0])
          + (c[0] ** 2 + c[1] ** 2) * (b[0] - a[0])) / d
    return (ux, uy)


def _bisector_edge_points(s1: Point, s2: Point, a: Point, b: Point) -> list[Point]:
    # intersection of the perpendicular bisector of s1 s2 with segment ab
    mx, my = (Fraction(s1[0] + s2[0], 2), Fraction(s1[1] + s2[1], 2))
    dx, dy = s2[0] - s1[0], s2[1] - s1[1]
    # bisector: dx*(x-mx) + dy*(y-my) = 0; segment: a + t(b-a), 0<=t<=1
    ex, ey = b[0] - a[0], b[1] - a[1]
    denom = dx * ex + dy * ey
    num = dx * (mx - a[0]) + dy * (my - a[1])
    if denom == 0:
        return []
    t = num / denom
    if 0 <= t <= 1:
        return [(a[0] + t * ex, a[1] + t * ey)]
    return []


def inradius_bound(surface: SurfaceDesc) -> float:
    """Max distance from a surface point to the nearest cone point.

    Every embedded flat disc in the universal cover has radius at most this.
    Computed exactly per polygon from Voronoi-type candidates (polygon
    vertices, bisector/edge crossings, circumcenters) against the developed
    cone points of a window around the polygon.
    """
    if not surface.cone_angles:
        raise SurfaceError("surface has no cone points")
    best = Fraction(0)
    for pid, verts in surface.polygons:
        diam2 = max(dist2(u, v) for u in verts for v in verts)
        # phase 1: bound using the polygon's own corners only (valid upper
        # bound: real distance-to-frontier only gets smaller with more sites)
        bound2 = _maximin_dist2(verts, list(verts))
        # phase 2: exact value against every developed cone point that can be
        # the nearest one somewhere in the polygon
        cen = default_base(SurfaceDesc(((pid, verts),), surface.gluings,
                                       surface.cone_class, surface.cone_angles))[1]
        window = _sqrt_upper(bound2) + _sqrt_upper(diam2)
        chart = develop(surface, (pid, cen), window)
        sites = [p.position for p in chart.points] + [p.position for p in chart.occluded]
        sites = [s for s in sites if _polygon_dist2(s, verts) <= bound2]
        best = max(best, _maximin_dist2(verts, sites))
    return math.sqrt(float(best))


def _maximin_dist2(verts: Sequence[Point], sites: Sequence[Point]) -> Fraction:
    """max over the polygon of squared distance to the nearest site, exact.

    Candidate maximizers: polygon vertices, perpendicular-bisector crossings
    with the polygon edges, circumcenters of site triples inside the polygon.
    """
    n = len(verts)
    candidates = list(verts)
    for i in range(len(sites)):
        for j in range(i + 1, len(sites)):
            for e in range(n):
                candidates += _bisector_edge_points(sites[i], sites[j],
                                                    verts[e], verts[(e + 1) % n])
            for k in range(j + 1, len(sites)):
                cc = _circumcenter(sites[i], sites[j], sites[k])
                if cc is not None and point_in_polygon(cc, verts) >= 0:
                    candidates.append(cc)
    best = Fraction(0)
    for cand in candidates:
        if point_in_polygon(cand, verts) < 0:
            continue
        d2 = min(dist2(cand, s) for s in sites)
        if d2 > best:
            best = Fraction(d2)
    return best


def _sqrt_upper(x2: Scalar) -> Fraction:
    """A rational upper bound for sqrt(x2)."""
    r = Fraction(math.sqrt(float(x2)))
    while r * r < x2:
        r *= Fraction(105, 100)
    return r


# ---------------------------------------------------------------------------
# immersion certificates

class Fit(enum.Enum):
    YES = "fits"
    NO = "does-not-fit"
    INCONCLUSIVE = "inconclusive"


def ray_meets_sublevel(q: QForm3, base: Point, through: Point,
                       tol: float = DEFAULT_TOL) -> bool:
    """Does {q <= 0} meet the open ray from `base` through `through`, strictly
    beyond `through`? Exact quadratic case analysis in the ray parameter."""
    d = _sub(through, base)
    alpha = q((d[0], d[1], 0))
    beta = 2 * q.pair(lift(base), (d[0], d[1], 0))
    gamma = q(lift(base))
    sa = sign_of(alpha, tol)
    if sa < 0:
        return True
    if sa > 0:
        tstar_num, tstar_den = -beta, 2 * alpha  # t* = -beta / 2 alpha
        if sign_of(tstar_num - tstar_den, tol) > 0:  # t* > 1
            return sign_of(4 * alpha * gamma - beta * beta, tol) <= 0
        return sign_of(alpha + beta + gamma, tol) < 0  # g(1) < 0
    sb = sign_of(beta, tol)
    if sb < 0:
        return True
    if sb > 0:
        return sign_of(beta + gamma, tol) < 0
    return sign_of(gamma, tol) <= 0


def _ellipse_center_and_major(q: QForm3):
    A = q.gram_restriction()
    c = solve([[A[0][0], A[0][1]], [A[1][0], A[1][1]]], [-q.a13, -q.a23])
    center = (c[0], c[1])
    kappa = -q(lift(center))
    eig = np.linalg.eigvalsh(np.array([[float(A[0][0]), float(A[0][1])],
                                       [float(A[0][1]), float(A[1][1])]]))
    major = math.sqrt(max(float(kappa), 0.0) / float(eig[0]))
    return center, major


def subconic_fits(chart: Chart, U, tol: float = DEFAULT_TOL) -> Fit:
    """Certify that a subconic develops injectively: closed region inside the
    chart's visibility region, open region free of cone points.

    Ellipses reaching past the chart radius are INCONCLUSIVE (the window
    cannot certify them either way unless a cone point already violates the
    interior). Strips always exceed any finite window: NO when a cone point
    lies strictly inside, INCONCLUSIVE otherwise.
    """
    form = U.form if isinstance(U, Subconic) else U
    kind = U.kind if isinstance(U, Subconic) else classify(form, tol).kind
    if kind not in (SubconicKind.ELLIPSE_INTERIOR, SubconicKind.STRIP):
        raise ValueError(f"fits is defined for ellipses and strips, not {kind}")
    if kind is SubconicKind.STRIP:
        for p in chart.points:
            if sign_of(form(lift(p.position)), tol) < 0:
                return Fit.NO
        return Fit.INCONCLUSIVE
    center, major = _ellipse_center_and_major(form)
    reach = math.sqrt(float(dist2(center, chart.base))) + major
    if reach >= float(chart.radius) * (1 - 1e-12):
        return Fit.INCONCLUSIVE
    for p in chart.points:
        if sign_of(form(lift(p.position)), tol) < 0:
            return Fit.NO
    for p in chart.points:
        if ray_meets_sublevel(form, chart.base, p.position, tol):
            return Fit.NO
    return Fit.YES
