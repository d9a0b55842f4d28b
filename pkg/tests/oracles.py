"""Independent oracles used to cross-check the geometric machinery.

Everything here goes through numpy least-squares / SVD on the raw monomial
matrix rather than the package's pencil arithmetic, so agreement between the
two routes is meaningful evidence.
"""

from itertools import combinations

import numpy as np


def conic_row(p):
    x, y = float(p[0]), float(p[1])
    return [x * x, x * y, y * y, x, y, 1.0]


def vanishing_dim(points) -> int:
    """Dimension of the space of conic coefficient vectors vanishing on the
    given points (6 monomials)."""
    if not points:
        return 6
    m = np.array([conic_row(p) for p in points], dtype=float)
    s = np.linalg.svd(m, compute_uv=False)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0])))
    return 6 - rank


def conic_through(points):
    """Coefficient vector (a, b, c, d, e, f) of the unique conic through the
    points, or None if the solution is not 1-dimensional."""
    m = np.array([conic_row(p) for p in points], dtype=float)
    _, s, vt = np.linalg.svd(m)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0])))
    if 6 - rank != 1:
        return None
    return vt[-1]


def is_real_ellipse(coeffs, tol=1e-9):
    """Does ax^2+bxy+cy^2+dx+ey+f = 0 cut out a real ellipse? Returns the
    coefficient vector normalized so the interior is negative, or None."""
    a, b, c, d, e, f = (float(t) for t in coeffs)
    det2 = a * c - b * b / 4.0
    if det2 <= tol:
        return None
    # center: gradient zero
    cx, cy = np.linalg.solve([[2 * a, b], [b, 2 * c]], [-d, -e])
    val = a * cx * cx + b * cx * cy + c * cy * cy + d * cx + e * cy + f
    if a * val >= -tol:          # imaginary or degenerate (point) ellipse
        return None
    if val > 0:                  # normalize: interior negative
        return tuple(-t for t in (a, b, c, d, e, f))
    return (a, b, c, d, e, f)


def eval_conic(coeffs, p):
    a, b, c, d, e, f = coeffs
    x, y = float(p[0]), float(p[1])
    return a * x * x + b * x * y + c * y * y + d * x + e * y + f


def exhaustive_rigid_ellipses(points, blockers=None, tol=1e-7):
    """All ellipses through >= 5 of `points` with no blocker strictly inside.

    Brute force over every 5-subset; returns a set of frozensets of boundary
    points (members of points/blockers on the zero set). `blockers` defaults
    to `points` and is the set that must stay outside the open interior.
    """
    pts = list(points)
    blk = list(blockers) if blockers is not None else pts
    found = {}
    for sub in combinations(range(len(pts)), 5):
        coeffs = conic_through([pts[i] for i in sub])
        if coeffs is None:
            continue
        ell = is_real_ellipse(coeffs)
        if ell is None:
            continue
        vals = [eval_conic(ell, p) for p in blk]
        if any(v < -tol for v in vals):
            continue
        boundary = frozenset(tuple(p) for p, v in zip(blk, vals)
                             if abs(v) <= tol)
        if len(boundary) >= 5:
            found[boundary] = ell
    return found


def region_is_bounded(coeffs, span=1000.0, samples=64):
    """Sample test: is {q < 0} bounded? Checks a large circle of directions
    at `span` for negative values."""
    a, b, c, d, e, f = (float(t) for t in coeffs)
    for k in range(samples):
        t = 2.0 * np.pi * k / samples
        x, y = span * np.cos(t), span * np.sin(t)
        if a * x * x + b * x * y + c * y * y + d * x + e * y + f < 0:
            return False
    return True
