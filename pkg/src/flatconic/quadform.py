"""Quadratic forms on 3-space: signatures, constraint nullspaces, natural bases.

A form is stored by the six entries of its symmetric Gram matrix

    A = [[a11, a12, a13],
         [a12, a22, a23],
         [a13, a23, a33]],        q(v) = v A v^T,

so the xy / xz / yz *polynomial* coefficients are twice the stored entries.
All operations accept exact rationals (int / Fraction) or floats and keep
exactness whenever the inputs allow it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .linalg import (DEFAULT_TOL, Scalar, cross, is_exact, nullspace,
                     sign_of, solve, symmetric_signature)

Vec3 = tuple[Scalar, Scalar, Scalar]


def lift(p: Sequence[Scalar]) -> Vec3:
    """x̂ = (x, y, 1) for a planar point."""
    return (p[0], p[1], 1)


@dataclass(frozen=True)
class QForm3:
    a11: Scalar
    a22: Scalar
    a33: Scalar
    a12: Scalar
    a13: Scalar
    a23: Scalar

    def coeffs(self) -> tuple[Scalar, ...]:
        return (self.a11, self.a22, self.a33, self.a12, self.a13, self.a23)

    def gram(self):
        return ((self.a11, self.a12, self.a13),
                (self.a12, self.a22, self.a23),
                (self.a13, self.a23, self.a33))

    def gram_restriction(self):
        """Gram block of q̲, the restriction to the (x, y, 0) plane."""
        return ((self.a11, self.a12), (self.a12, self.a22))

    def __call__(self, v: Sequence[Scalar]) -> Scalar:
        x, y, z = v
        return (self.a11 * x * x + self.a22 * y * y + self.a33 * z * z
                + 2 * (self.a12 * x * y + self.a13 * x * z + self.a23 * y * z))

    def pair(self, v: Sequence[Scalar], w: Sequence[Scalar]) -> Scalar:
        """The symmetric bilinear form q(v, w)."""
        return (self.a11 * v[0] * w[0] + self.a22 * v[1] * w[1] + self.a33 * v[2] * w[2]
                + self.a12 * (v[0] * w[1] + v[1] * w[0])
                + self.a13 * (v[0] * w[2] + v[2] * w[0])
                + self.a23 * (v[1] * w[2] + v[2] * w[1]))

    def scaled(self, c: Scalar) -> "QForm3":
        return QForm3(*(c * v for v in self.coeffs()))

    def plus(self, other: "QForm3") -> "QForm3":
        return QForm3(*(a + b for a, b in zip(self.coeffs(), other.coeffs())))

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return all(sign_of(c, tol) == 0 for c in self.coeffs())

    def exact(self) -> bool:
        return is_exact(*self.coeffs())


def from_coeff_vector(v: Sequence[Scalar]) -> QForm3:
    """Inverse of QForm3.coeffs()."""
    return QForm3(*v)


def from_poly(A: Scalar, B: Scalar, C: Scalar, D: Scalar, E: Scalar, F: Scalar) -> QForm3:
    """Form of the polynomial A x² + B xy + C y² + D x + E y + F."""
    return QForm3(A, C, F, Fraction(B, 2) if is_exact(B) else B / 2,
                  Fraction(D, 2) if is_exact(D) else D / 2,
                  Fraction(E, 2) if is_exact(E) else E / 2)


def combine(pairs: Iterable[tuple[Scalar, QForm3]]) -> QForm3:
    acc = [0, 0, 0, 0, 0, 0]
    for c, q in pairs:
        for i, v in enumerate(q.coeffs()):
            acc[i] = acc[i] + c * v
    return QForm3(*acc)


def signature(q: QForm3, tol: float = DEFAULT_TOL) -> tuple[int, int, int]:
    """(n+, n-, n0) of q on 3-space."""
    return symmetric_signature(q.gram(), tol)


def signature_restriction(q: QForm3, tol: float = DEFAULT_TOL) -> tuple[int, int, int]:
    """(n+, n-, n0) of q̲ on the direction plane."""
    return symmetric_signature(q.gram_restriction(), tol)


def eigen_margin(q: QForm3) -> float:
    """min |eigenvalue| / max(1, |eigenvalues|) of the Gram matrix (float).

    Used to flag near-degenerate float classifications.
    """
    eig = np.linalg.eigvalsh(np.array([[float(v) for v in row] for row in q.gram()]))
    scale = max(1.0, float(np.max(np.abs(eig))))
    return float(np.min(np.abs(eig))) / scale


def radical(q: QForm3, tol: float = DEFAULT_TOL) -> list[Vec3]:
    """Basis of rad(q) = {v : q(v, w) = 0 for all w}; dimension equals n0."""
    if q.is_zero(tol):
        return [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    return [tuple(v) for v in nullspace(q.gram(), 3, tol)]


def _evaluation_row(v: Vec3) -> tuple[Scalar, ...]:
    x, y, z = v
    return (x * x, y * y, z * z, 2 * x * y, 2 * x * z, 2 * y * z)


def _tangency_row(v: Vec3, w: Vec3) -> tuple[Scalar, ...]:
    # dq_v(w) = 2 q(v, w); the factor 2 is irrelevant for the kernel
    return (v[0] * w[0], v[1] * w[1], v[2] * w[2],
            v[0] * w[1] + v[1] * w[0],
            v[0] * w[2] + v[2] * w[0],
            v[1] * w[2] + v[2] * w[1])


def forms_vanishing_on(points: Sequence[Vec3], tol: float = DEFAULT_TOL) -> list[QForm3]:
    """Basis of the space of forms vanishing on the given lifted points.

    For ≤5 points in general position the dimension is exactly 6 - n;
    degenerate configurations simply return the larger space (callers that
    care about general position check the dimension).
    """
    if len(points) > 5:
        raise ValueError("at most 5 point constraints are supported")
    rows = [_evaluation_row(v) for v in points]
    return [from_coeff_vector(v) for v in nullspace(rows, 6, tol)]


def forms_with_tangency(points: Sequence[Vec3],
                        tangents: Sequence[tuple[Vec3, Vec3]],
                        tol: float = DEFAULT_TOL) -> list[QForm3]:
    """Forms vanishing on `points` with dq_v(w) = 0 for each (v, w) tangency.

    With 3 or 4 general-position points and 5-n valid tangency constraints
    the result is 1-dimensional; other dimensions are returned as found.
    """
    rows = [_evaluation_row(v) for v in points]
    rows += [_tangency_row(v, w) for v, w in tangents]
    return [from_coeff_vector(v) for v in nullspace(rows, 6, tol)]


def _line_through(u: Vec3, v: Vec3) -> Vec3:
    """Coefficient vector of the linear form vanishing on span(u, v)."""
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def _product_form(n: Vec3, m: Vec3) -> QForm3:
    """The quadratic form (n·x)(m·x)."""
    half = Fraction(1, 2) if is_exact(n, m) else 0.5
    return QForm3(n[0] * m[0], n[1] * m[1], n[2] * m[2],
                  half * (n[0] * m[1] + n[1] * m[0]),
                  half * (n[0] * m[2] + n[2] * m[0]),
                  half * (n[1] * m[2] + n[2] * m[1]))


class CollinearTripleError(ValueError):
    pass


@dataclass(frozen=True)
class NaturalBasis:
    """The three line-pair forms d_i spanning the pencil through a triple.

    `ordering` is the positively oriented cyclic order of the source points;
    d_i is degenerate with ordering[i]'s lift in its radical and is negative
    on the open triangle.
    """
    d1: QForm3
    d2: QForm3
    d3: QForm3
    ordering: tuple[tuple[Scalar, Scalar], ...]

    @property
    def forms(self) -> tuple[QForm3, QForm3, QForm3]:
        return (self.d1, self.d2, self.d3)


def natural_basis(Z: Sequence[Sequence[Scalar]]) -> NaturalBasis:
    """Natural basis of the pencil of conics through a noncollinear triple.

    d_i = -eta_ij * eta_ik where eta_ij is the linear form vanishing on the
    line through points i and j, normalized to 1 at the third point. That
    normalization makes each d_i negative on the open triangle, and the
    (counterclockwise) input order of the points fixes the basis order.
    """
    if len(Z) != 3:
        raise ValueError("natural_basis expects exactly 3 points")
    pts = [tuple(p) for p in Z]
    orient = sign_of(cross(pts[0], pts[1], pts[2]))
    if orient == 0:
        raise CollinearTripleError(f"collinear triple {pts}")
    if orient < 0:
        pts = [pts[0], pts[2], pts[1]]
    lifts = [lift(p) for p in pts]

    def eta(i: int, j: int, k: int) -> Vec3:
        n = _line_through(lifts[i], lifts[j])
        c = n[0] * lifts[k][0] + n[1] * lifts[k][1] + n[2] * lifts[k][2]
        # c != 0 because the triple is noncollinear
        if is_exact(n, c):
            return tuple(Fraction(v, 1) / c for v in n)
        return tuple(v / c for v in n)

    ds = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        ds.append(_product_form(eta(i, j, k), eta(i, k, j)).scaled(-1))
    return NaturalBasis(ds[0], ds[1], ds[2], tuple(pts))


def degenerate_members(F: Sequence[Sequence[Scalar]]) -> list[QForm3]:
    """The three line-pair members of the pencil through a planar quadruple.

    One per partition of the four points into two pairs; requires general
    position (no three collinear).
    """
    if len(F) != 4:
        raise ValueError("expected 4 points")
    pts = [tuple(p) for p in F]
    for i in range(4):
        others = [pts[j] for j in range(4) if j != i]
        if sign_of(cross(*others)) == 0:
            raise ValueError(f"three collinear points among {pts}")
    lifts = [lift(p) for p in pts]
    out = []
    for (a, b), (c, d) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
        out.append(canonical_scale(
            _product_form(_line_through(lifts[a], lifts[b]),
                          _line_through(lifts[c], lifts[d]))))
    return out


def pencil_coefficients(q: QForm3, basis: NaturalBasis,
                        tol: float = DEFAULT_TOL) -> tuple[Scalar, Scalar, Scalar]:
    """Write q = sum c_i d_i in the natural basis of a pencil.

    Raises ValueError if q is not in the span of the basis.
    """
    cols = [d.coeffs() for d in basis.forms]
    target = q.coeffs()
    exact = is_exact(*target) and all(is_exact(*c) for c in cols)
    c = None
    if exact:
        from itertools import combinations
        for rows in combinations(range(6), 3):
            mat = [[cols[j][i] for j in range(3)] for i in rows]
            try:
                c = solve(mat, [target[i] for i in rows])
            except ZeroDivisionError:
                continue
            break
    else:
        A = np.array([[float(cols[j][i]) for j in range(3)] for i in range(6)])
        c = list(np.linalg.lstsq(A, np.array([float(v) for v in target]),
                                 rcond=None)[0])
    if c is None:
        raise ValueError("pencil basis is degenerate")
    residual = combine([(ci, di) for ci, di in zip(c, basis.forms)]).plus(q.scaled(-1))
    scale = max(1.0, max(abs(float(v)) for v in target))
    if any(sign_of(r, tol * scale) != 0 for r in residual.coeffs()):
        raise ValueError("form is not in the pencil of the triple")
    return (c[0], c[1], c[2])


def canonical_scale(q: QForm3, tol: float = DEFAULT_TOL) -> QForm3:
    """Deterministic representative of the positive-scaling class of q.

    Leading nonzero coefficient (in field order) becomes ±1, with the sign
    chosen so the form is negative somewhere whenever possible: a positive
    semidefinite normalization is flipped.
    """
    lead = next((c for c in q.coeffs() if sign_of(c, tol) != 0), None)
    if lead is None:
        return q
    if is_exact(lead):
        scaled = q.scaled(Fraction(1, 1) / Fraction(lead))
    else:
        scaled = q.scaled(1.0 / lead)
    n_pos, n_neg, _ = signature(scaled, tol)
    if n_neg == 0 and n_pos > 0:
        scaled = scaled.scaled(-1)
    return scaled


def transform_by_affine(q: QForm3, g, tau) -> QForm3:
    """Form of the image region: x in g·U + tau  iff  (new form)(x̂) < 0.

    g is a 2x2 invertible matrix (rows), tau a 2-vector. Exact over rationals.
    """
    (a, b), (c, d) = g
    det = a * d - b * c
    if sign_of(det) == 0:
        raise ValueError("singular linear part")
    one = Fraction(1) if is_exact(a, b, c, d, list(tau)) else 1.0
    inv = ((one * d / det, -one * b / det), (-one * c / det, one * a / det))
    # lifted inverse M sends x̂ to (g^{-1}(x - tau), 1); new Gram is M^T A M
    m = ((inv[0][0], inv[0][1], -(inv[0][0] * tau[0] + inv[0][1] * tau[1])),
         (inv[1][0], inv[1][1], -(inv[1][0] * tau[0] + inv[1][1] * tau[1])),
         (0, 0, 1))
    A = q.gram()

    def entry(i, j):
        return sum(m[r][i] * A[r][s] * m[s][j] for r in range(3) for s in range(3))

    return QForm3(entry(0, 0), entry(1, 1), entry(2, 2),
                  entry(0, 1), entry(0, 2), entry(1, 2))
