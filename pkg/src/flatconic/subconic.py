"""Classification of the planar regions cut out by quadratic forms.

For a form q on 3-space, the region of interest is

    U_q = { x in R^2 : q(x, y, 1) < 0 }.

The pair (signature of q, signature of the restriction q̲ to the direction
plane z = 0) decides the shape of U_q among the cases we track:

    (2,1) & (2,0)  ellipse interior
    (1,1) & (1,0)  strip between two parallel lines
    (1,1) & (0,0)  open half-plane
    (2,1) & (1,0)  parabola interior

everything else is lumped into OTHER (empty regions, line complements,
hyperbola sides, the whole plane, ...).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .linalg import DEFAULT_TOL, Scalar, is_exact, nullspace, sign_of
from .quadform import (NaturalBasis, QForm3, canonical_scale, combine,
                       forms_vanishing_on, lift, pencil_coefficients,
                       signature, signature_restriction)


class SubconicKind(enum.Enum):
    ELLIPSE_INTERIOR = "ellipse-interior"
    STRIP = "strip"
    HALF_PLANE = "half-plane"
    PARABOLA_INTERIOR = "parabola-interior"
    OTHER = "other"


_KIND_TABLE = {
    ((2, 1), (2, 0)): SubconicKind.ELLIPSE_INTERIOR,
    ((1, 1), (1, 0)): SubconicKind.STRIP,
    ((1, 1), (0, 0)): SubconicKind.HALF_PLANE,
    ((2, 1), (1, 0)): SubconicKind.PARABOLA_INTERIOR,
}


@dataclass(frozen=True)
class Classification:
    kind: SubconicKind
    signature: tuple[int, int, int]
    signature_restriction: tuple[int, int, int]
    near_degenerate: bool


@dataclass(frozen=True)
class Subconic:
    """A form tagged with the shape of its sublevel region."""
    form: QForm3
    kind: SubconicKind

    def __contains__(self, point) -> bool:
        return contains(self.form, point) < 0


def _float_margin(mat: Sequence[Sequence[Scalar]]) -> float:
    eig = np.linalg.eigvalsh(np.array([[float(v) for v in row] for row in mat]))
    scale = max(1.0, float(np.max(np.abs(eig))))
    return float(np.min(np.abs(eig))) / scale


def classify(q: QForm3, tol: float = DEFAULT_TOL) -> Classification:
    """Classify U_q from the two signatures.

    Exact inputs classify exactly. Float inputs whose Gram spectra come
    within 10*tol of a sign change are flagged near_degenerate (the verdict
    is still returned, but should not be trusted blindly).
    """
    sig3 = signature(q, tol)
    sig2 = signature_restriction(q, tol)
    near = False
    if not q.exact():
        near = (_float_margin(q.gram()) < 10 * tol
                or _float_margin(q.gram_restriction()) < 10 * tol)
    kind = _KIND_TABLE.get((sig3[:2], sig2[:2]), SubconicKind.OTHER)
    return Classification(kind, sig3, sig2, near)


def subconic(q: QForm3, tol: float = DEFAULT_TOL) -> Subconic:
    return Subconic(q, classify(q, tol).kind)


def contains(q: QForm3 | Subconic, point: Sequence[Scalar],
             tol: float = DEFAULT_TOL) -> int:
    """Side of a planar point: -1 inside U_q, 0 on the boundary, +1 outside."""
    form = q.form if isinstance(q, Subconic) else q
    return sign_of(form(lift(point)), tol)


class DegenerateConfiguration(ValueError):
    pass


def conic_through_five(points: Sequence[Sequence[Scalar]],
                       tol: float = DEFAULT_TOL) -> Subconic:
    """The unique conic through five points, canonically scaled and classified.

    Raises DegenerateConfiguration when the solution space is not a line
    (repeated points, or 4+ collinear points leaving extra freedom). Exactly
    three collinear points still pin a unique line-pair conic, which is
    returned with its (degenerate) classification.
    """
    if len(points) != 5:
        raise ValueError("need exactly 5 points")
    space = forms_vanishing_on([lift(p) for p in points], tol)
    if len(space) != 1:
        raise DegenerateConfiguration(
            f"conic through {points} is not unique (solution dim {len(space)})")
    return subconic(canonical_scale(space[0], tol), tol)


@dataclass(frozen=True)
class TCoords:
    """Affine coordinates of a pencil member: q ~ t1 d1 + t2 d2 + t3 d3, sum 1."""
    t1: Scalar
    t2: Scalar
    t3: Scalar
    basis: NaturalBasis

    def as_tuple(self) -> tuple[Scalar, Scalar, Scalar]:
        return (self.t1, self.t2, self.t3)


def t_coordinates(q: QForm3, basis: NaturalBasis,
                  tol: float = DEFAULT_TOL) -> TCoords:
    """T-plane coordinates of a form in the pencil of a triple.

    Raises ValueError if q is not in the span of the basis, or if it lies on
    the line at infinity of the t-plane (coefficient sum zero).
    """
    c = pencil_coefficients(q, basis, tol)
    total = c[0] + c[1] + c[2]
    if sign_of(total, tol) == 0:
        raise ValueError("form lies on the line at infinity of the t-plane")
    return TCoords(c[0] / total, c[1] / total, c[2] / total, basis)


def from_t(basis: NaturalBasis, t: Sequence[Scalar],
           tol: float = DEFAULT_TOL) -> Subconic:
    """The pencil member with the given t-coordinates (need not sum to 1)."""
    return subconic(combine(list(zip(t, basis.forms))), tol)


def strip_direction(q: QForm3, tol: float = DEFAULT_TOL) -> tuple[Scalar, Scalar]:
    """Direction of the boundary lines of a strip (kernel of q̲), canonical sign.

    Exact rational strips give a primitive integer vector; float strips a
    unit vector. Sign convention: second coordinate positive, or first
    positive when the direction is horizontal.
    """
    ker = nullspace(q.gram_restriction(), 2, tol)
    if len(ker) != 1:
        raise ValueError("form is not a strip (direction kernel is not a line)")
    u, v = ker[0]
    if is_exact(u, v):
        fu, fv = Fraction(u), Fraction(v)
        den = 1
        for f in (fu, fv):
            den = den * f.denominator // math.gcd(den, f.denominator)
        p, r = int(fu * den), int(fv * den)
        g = math.gcd(p, r)
        p, r = p // g, r // g
        if r < 0 or (r == 0 and p < 0):
            p, r = -p, -r
        return (p, r)
    norm = math.hypot(float(u), float(v))
    p, r = float(u) / norm, float(v) / norm
    if r < -tol or (abs(r) <= tol and p < 0):
        p, r = -p, -r
    return (p, r)


def is_nowhere_negative(q: QForm3, tol: float = DEFAULT_TOL) -> bool:
    """True iff q >= 0 on all of 3-space, i.e. U_q is certainly empty."""
    n_pos, n_neg, n_zero = signature(q, tol)
    return n_neg == 0
