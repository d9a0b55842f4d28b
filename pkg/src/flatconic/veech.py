"""Affine reconstruction between explored windows and windowed Veech-group
membership checks, plus the hyperbolic tessellation of a cell complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .cellcomplex import (CellComplexWindow, CellMatching, _face_id,
                          frontier_bijection, matching_from_affine,
                          rigid_conics)
from .geom import class_key, h_point, homothety_class
from .linalg import DEFAULT_TOL
from .quadform import canonical_scale, transform_by_affine
from .surface import Chart, SurfaceDesc, develop, dist2


@dataclass(frozen=True)
class AffineCandidate:
    """An affine map z -> homothety * (linear z) + translation with
    unimodular linear part."""
    linear: tuple          # 2x2 rows, det = 1
    homothety: object      # positive scalar (Fraction when exact)
    translation: tuple

    def matrix(self):
        h = self.homothety
        (a, b), (c, d) = self.linear
        return ((h * a, h * b), (h * c, h * d))

    def apply(self, p):
        (a, b), (c, d) = self.matrix()
        return (a * p[0] + b * p[1] + self.translation[0],
                c * p[0] + d * p[1] + self.translation[1])


def _exact_sqrt(f: Fraction) -> Optional[Fraction]:
    if f < 0:
        return None
    n, d = f.numerator, f.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _factor_homothety(g_raw):
    (a, b), (c, d) = g_raw
    det = a * d - b * c
    h = None
    if isinstance(det, Fraction) or isinstance(det, int):
        h = _exact_sqrt(Fraction(det))
    if h is None:
        h = math.sqrt(float(det))
    return ((a / h, b / h), (c / h, d / h)), h


def psi_of_quadruple(Z, Zp, tol: float = DEFAULT_TOL) -> AffineCandidate:
    """The unique affine map sending the first three points of Z to those of
    Zp, checked for orientation and for consistency on the fourth point.
    Exact over rationals."""
    Z = [tuple(p) for p in Z]
    Zp = [tuple(p) for p in Zp]
    if len(Z) != 4 or len(Zp) != 4:
        raise ValueError("need two quadruples")
    (x0, y0), (x1, y1), (x2, y2) = Z[0], Z[1], Z[2]
    m00, m01 = x1 - x0, x2 - x0
    m10, m11 = y1 - y0, y2 - y0
    det = m00 * m11 - m01 * m10
    if det == 0:
        raise ValueError("source triple is collinear")
    (u0, v0), (u1, v1), (u2, v2) = Zp[0], Zp[1], Zp[2]
    n00, n01 = u1 - u0, u2 - u0
    n10, n11 = v1 - v0, v2 - v0
    # g = N M^-1
    g = ((n00 * m11 - n01 * m10) / det, (-n00 * m01 + n01 * m00) / det), \
        ((n10 * m11 - n11 * m10) / det, (-n10 * m01 + n11 * m00) / det)
    gdet = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    if gdet <= 0:
        raise ValueError("map is orientation-reversing or degenerate")
    tau = (u0 - g[0][0] * x0 - g[0][1] * y0, v0 - g[1][0] * x0 - g[1][1] * y0)
    x3, y3 = Z[3]
    image = (g[0][0] * x3 + g[0][1] * y3 + tau[0],
             g[1][0] * x3 + g[1][1] * y3 + tau[1])
    err = max(abs(image[0] - Zp[3][0]), abs(image[1] - Zp[3][1]))
    exact = all(isinstance(t, (int, Fraction)) for p in Z + Zp for t in p)
    if (exact and err != 0) or (not exact and float(err) > tol):
        raise ValueError(
            f"fourth point is inconsistent: {Z[3]} maps to {image}, "
            f"expected {Zp[3]}")
    linear, h = _factor_homothety(g)
    return AffineCandidate(linear, h, tau)


def reconstruct(A: CellComplexWindow, B: CellComplexWindow,
                phi: CellMatching, tol: float = DEFAULT_TOL) -> AffineCandidate:
    """Recover the common affine map underlying a cell matching: the frontier
    bijection gives matched cone points, every matched 1-cell determines the
    map on its quadruple, and all of them must agree."""
    beta = frontier_bijection(A, B, phi)
    candidate = None
    witness = None
    for q in sorted(phi.edges):
        if not all(p in beta for p in q):
            continue
        try:
            c = psi_of_quadruple(list(q), [beta[p] for p in q], tol)
        except ValueError as e:
            raise ValueError(f"1-cell {q} admits no affine map: {e}") from None
        if candidate is None:
            candidate, witness = c, q
        elif c != candidate:
            raise ValueError(
                f"1-cells {witness} and {q} determine different affine maps "
                f"({candidate.matrix()} vs {c.matrix()})")
    if candidate is None:
        raise ValueError("no matched 1-cell has a fully matched quadruple")
    return candidate


def discover_affine(A: CellComplexWindow, B: CellComplexWindow,
                    tol: float = DEFAULT_TOL):
    """Search for an affine map carrying window A onto window B.

    Every ordering of every B 1-cell is tried as the image of each A 1-cell;
    each orientation-preserving candidate map is vetted by matching the whole
    windows and reconstructing. Among the certified maps the one with the
    smallest translation (then smallest entries) is returned, together with
    its matching. Raises when nothing certifies.
    """
    from itertools import permutations

    b_edges = sorted(B.edges)
    tried = set()
    certified = []
    for qa in sorted(A.edges):
        for qb in b_edges:
            for perm in permutations(qb):
                try:
                    cand = psi_of_quadruple(list(qa), list(perm), tol)
                except ValueError:
                    continue
                key = (cand.linear, cand.homothety, cand.translation)
                if key in tried:
                    continue
                tried.add(key)
                try:
                    phi = matching_from_affine(A, B, cand.matrix(),
                                               cand.translation, strict=False)
                    rec = reconstruct(A, B, phi, tol)
                except ValueError:
                    continue
                certified.append((rec, phi))
    if not certified:
        raise ValueError("no affine correspondence between the windows "
                         "certifies")

    def presentation_grade(rec) -> int:
        # 0: carries A's polygons to B's vertex-for-vertex in listed order,
        # 1: carries them onto the same vertex sets, 2: neither.
        sa, sb = A.chart.surface, B.chart.surface
        if len(sa.polygons) != len(sb.polygons):
            return 2
        targets = dict(sb.polygons)
        ordered = True
        for pid, verts in sa.polygons:
            if pid not in targets:
                return 2
            image = tuple(rec.apply(v) for v in verts)
            if image != targets[pid]:
                ordered = False
                if frozenset(image) != frozenset(targets[pid]):
                    return 2
        return 0 if ordered else 1

    def size(entry):
        rec, phi = entry
        t0, t1 = rec.translation
        (a, b), (c, d) = rec.linear
        return (presentation_grade(rec), -len(phi.faces),
                t0 * t0 + t1 * t1, a * a + b * b + c * c + d * d,
                rec.linear, rec.translation)

    certified.sort(key=size)
    return certified[0]


# ---------------------------------------------------------------------------
# membership in the Veech group, verified on a window

@dataclass
class VeechVerdict:
    verdict: str                 # member-in-window | rejected | inconclusive
    radius: object
    safe_radius: float
    translation: Optional[tuple]
    checked_points: int
    detail: str

    def __str__(self):
        return f"{self.verdict} (R={self.radius})"

    @property
    def is_member(self) -> bool:
        return self.verdict == "member-in-window"


def _op_norm(g) -> float:
    return float(np.linalg.norm(np.array(g, dtype=float), 2))


def veech_check(surface: SurfaceDesc, g, radius=6, tol: float = DEFAULT_TOL,
                chart: Optional[Chart] = None,
                conics: Optional[list] = None) -> VeechVerdict:
    """Windowed membership test for a unimodular matrix g.

    Develops a chart of the given radius, then looks for a translation
    making z -> g z + t a bijection of the windowed cone points on the safe
    sub-window (radius R/||g||, so images stay inside the chart) that also
    maps every rigid conic there onto a rigid conic of the same homothety
    class. Verdicts: member-in-window / rejected / inconclusive.
    """
    g = ((Fraction(g[0][0]), Fraction(g[0][1])),
         (Fraction(g[1][0]), Fraction(g[1][1])))
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    if det != 1:
        raise ValueError(f"matrix must have determinant 1, got {det}")
    if chart is None:
        chart = develop(surface, None, radius)
    positions = {p.position for p in chart.points}
    positions |= {p.position for p in chart.occluded}
    base = chart.base
    safe = float(radius) / _op_norm(g)
    safe2 = Fraction(safe) ** 2
    r2 = Fraction(radius) ** 2
    safe_pts = sorted(p for p in positions if dist2(p, base) <= safe2)
    if not safe_pts:
        return VeechVerdict("inconclusive", radius, safe, None, 0,
                            "safe sub-window contains no cone points")

    def apply(p, tau):
        return (g[0][0] * p[0] + g[0][1] * p[1] + tau[0],
                g[1][0] * p[0] + g[1][1] * p[1] + tau[1])

    inv = ((g[1][1], -g[0][1]), (-g[1][0], g[0][0]))

    def unapply(p, tau):
        q = (p[0] - tau[0], p[1] - tau[1])
        return (inv[0][0] * q[0] + inv[0][1] * q[1],
                inv[1][0] * q[0] + inv[1][1] * q[1])

    anchor = min(safe_pts, key=lambda p: (dist2(p, base), p))
    g_anchor = apply(anchor, (0, 0))
    taus = sorted({(w[0] - g_anchor[0], w[1] - g_anchor[1])
                   for w in positions},
                  key=lambda t: (t[0] * t[0] + t[1] * t[1], t))

    if conics is None:
        conics = rigid_conics(chart, tol)
    # the window's homothety classes; translation-invariant, so robust
    # against the window truncating the image conic differently
    classes = {class_key(U.subconic) for U in conics}
    safe_conics = [U for U in conics
                   if all(dist2(p, base) <= safe2 for p in U.boundary_points())]

    best_detail = "no translation candidate matches the cone points"
    for tau in taus:
        ok = True
        for p in safe_pts:
            image = apply(p, tau)
            if dist2(image, base) <= r2 and image not in positions:
                ok = False
                break
            pre = unapply(p, tau)
            if dist2(pre, base) <= safe2 and pre not in positions:
                ok = False
                break
        if not ok:
            continue
        mismatched = None
        for U in safe_conics:
            q2 = transform_by_affine(U.subconic.form, g, tau)
            if class_key(q2) not in classes:
                mismatched = U
                break
        if mismatched is not None:
            best_detail = (f"cone points match for t={tau} but the rigid "
                           f"conic {mismatched.key()} maps to an unseen "
                           "homothety class")
            continue
        return VeechVerdict("member-in-window", radius, safe, tau,
                            len(safe_pts),
                            f"bijective on {len(safe_pts)} cone points, "
                            f"{len(safe_conics)} rigid conic classes matched")
    return VeechVerdict("rejected", radius, safe, None, len(safe_pts),
                        best_detail)


# ---------------------------------------------------------------------------
# tessellation

@dataclass
class TessFace:
    id: str
    triple: tuple
    vertices: tuple        # HPoint or None per polygon corner
    truncated: bool


@dataclass
class Tessellation:
    """The image of a complex window in the hyperbolic plane: one h-point
    per rigid conic, one geodesic arc per 1-cell, faces labelled by their
    source cells (combinatorially the same complex)."""
    faces: list
    edges: list            # (edge quadruple key, endpoint HPoints)
    vertex_points: dict    # rigid key -> HPoint


def tessellate(window: CellComplexWindow) -> Tessellation:
    vertex_points = {}
    for key, U in sorted(window.vertices.items()):
        vertex_points[key] = h_point(homothety_class(U.subconic))
    faces = []
    for fkey in sorted(window.cells):
        cell = window.cells[fkey]
        hps = []
        truncated = False
        for U in cell.vertex_conics:
            if U is None:
                hps.append(None)
                continue
            hps.append(vertex_points[U.key()])
            truncated = truncated or U.truncated
        faces.append(TessFace(_face_id(fkey), cell.triple, tuple(hps),
                              truncated))
    edges = []
    for ekey in sorted(window.edges):
        rec = window.edges[ekey]
        ends = tuple(vertex_points[v] for v in sorted(rec["endpoints"]))
        edges.append((ekey, ends))
    return Tessellation(faces, edges, vertex_points)
