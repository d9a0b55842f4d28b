"""Small exact/float linear algebra used by the form and complex machinery.

Everything here is dimension-agnostic but only ever sees tiny matrices
(rows of length 6 for conic constraint systems, 2x2 and 3x3 Gram blocks).
Exact paths run over fractions.Fraction; float paths delegate to numpy.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

Scalar = int | Fraction | float

#: default comparison tolerance for float inputs; exact inputs ignore it.
DEFAULT_TOL = 1e-9


def is_exact(*values) -> bool:
    """True if every scalar in the (possibly nested) arguments is int/Fraction."""
    for v in values:
        if isinstance(v, (list, tuple)):
            if not is_exact(*v):
                return False
        elif isinstance(v, bool) or not isinstance(v, (int, Fraction)):
            return False
    return True


def sign_of(x: Scalar, tol: float = DEFAULT_TOL) -> int:
    """Sign as -1/0/+1; floats use a symmetric tolerance band around zero."""
    if isinstance(x, float):
        if abs(x) <= tol:
            return 0
        return 1 if x > 0 else -1
    if x == 0:
        return 0
    return 1 if x > 0 else -1


def _clear_denominators(row: Sequence[Scalar]) -> list[int]:
    den = 1
    for v in row:
        f = Fraction(v)
        den = den * f.denominator // _gcd(den, f.denominator)
    return [int(Fraction(v) * den) for v in row]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def nullspace(rows: Sequence[Sequence[Scalar]], width: int,
              tol: float = DEFAULT_TOL) -> list[tuple[Scalar, ...]]:
    """Basis of {v : R v = 0} for the given constraint rows.

    Exact inputs use fraction-free (Bareiss) elimination with full pivoting;
    float inputs go through numpy's SVD with `tol` as the rank cutoff.
    Returned basis vectors are exact Fractions in the exact case.
    """
    rows = [list(r) for r in rows if any(sign_of(v, tol) for v in r)]
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(width)) for i in range(width)]
    if not is_exact(*rows):
        a = np.array([[float(v) for v in r] for r in rows], dtype=float)
        _, s, vt = np.linalg.svd(a)
        rank = int(np.sum(s > tol * max(1.0, s[0])))
        return [tuple(float(x) for x in vt[i]) for i in range(rank, width)]

    mat = [_clear_denominators(r) for r in rows]
    m = len(mat)
    col_order = list(range(width))
    prev_pivot = 1
    pivots = 0
    for k in range(min(m, width)):
        # full pivoting: largest absolute entry in the remaining block
        best = None
        for i in range(k, m):
            for j in range(k, width):
                v = abs(mat[i][col_order[j]])
                if v and (best is None or v > best[0]):
                    best = (v, i, j)
        if best is None:
            break
        _, pi, pj = best
        mat[k], mat[pi] = mat[pi], mat[k]
        col_order[k], col_order[pj] = col_order[pj], col_order[k]
        pc = col_order[k]
        for i in range(k + 1, m):
            for j in range(k + 1, width):
                c = col_order[j]
                mat[i][c] = (mat[i][c] * mat[k][pc] - mat[i][pc] * mat[k][c]) // prev_pivot
            mat[i][pc] = 0
        prev_pivot = mat[k][pc]
        pivots += 1

    # back-substitute one basis vector per free column
    basis = []
    free_cols = col_order[pivots:]
    for fc in free_cols:
        vec = [Fraction(0)] * width
        vec[fc] = Fraction(1)
        for k in range(pivots - 1, -1, -1):
            pc = col_order[k]
            s = Fraction(0)
            for j in range(k + 1, width):
                c = col_order[j]
                if vec[c]:
                    s += Fraction(mat[k][c]) * vec[c]
            vec[pc] = -s / Fraction(mat[k][pc])
        basis.append(tuple(vec))
    return basis


def solve(matrix: Sequence[Sequence[Scalar]], rhs: Sequence[Scalar]):
    """Solve a small square exact system; returns Fractions. Raises on singular."""
    n = len(rhs)
    a = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[k], a[piv] = a[piv], a[k]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k] / a[k][k]
                for j in range(k, n + 1):
                    a[i][j] -= f * a[k][j]
    return tuple(a[i][n] / a[i][i] for i in range(n))


def real_rooted_signs(coeffs: Sequence[Scalar], tol: float = DEFAULT_TOL) -> tuple[int, int, int]:
    """(positive, negative, zero) root counts of a real-rooted polynomial.

    `coeffs` are highest-degree first. Uses Descartes' rule, which is exact
    when all roots are real (characteristic polynomials of symmetric
    matrices). Float coefficients are zero-banded by tol relative to the
    largest coefficient.
    """
    scale = max((abs(float(c)) for c in coeffs), default=0.0)
    sig = [sign_of(c, tol * max(1.0, scale)) for c in coeffs]
    n_zero = 0
    while sig and sig[-1] == 0:
        sig.pop()
        n_zero += 1
    if not sig:
        # identically zero polynomial: callers treat degree as all-zero roots
        return (0, 0, n_zero)
    seq = [s for s in sig if s != 0]
    n_pos = sum(1 for a, b in zip(seq, seq[1:]) if a != b)
    n_neg = (len(sig) - 1) - n_pos
    return (n_pos, n_neg, n_zero)


def symmetric_signature(gram: Sequence[Sequence[Scalar]],
                        tol: float = DEFAULT_TOL) -> tuple[int, int, int]:
    """Sylvester signature (n+, n-, n0) of a small symmetric matrix.

    Exact route: characteristic polynomial + Descartes (all roots real).
    Float route: numpy eigenvalues with tol banding.
    """
    n = len(gram)
    flat = [gram[i][j] for i in range(n) for j in range(n)]
    if not is_exact(*flat):
        eig = np.linalg.eigvalsh(np.array([[float(v) for v in r] for r in gram]))
        scale = max(1.0, float(np.max(np.abs(eig))) if len(eig) else 1.0)
        n_pos = int(np.sum(eig > tol * scale))
        n_neg = int(np.sum(eig < -tol * scale))
        return (n_pos, n_neg, n - n_pos - n_neg)
    if n == 2:
        a, b = Fraction(gram[0][0]), Fraction(gram[0][1])
        c = Fraction(gram[1][1])
        # char poly x^2 - (a+c) x + (ac - b^2)
        return real_rooted_signs([Fraction(1), -(a + c), a * c - b * b])
    if n == 3:
        g = [[Fraction(gram[i][j]) for j in range(3)] for i in range(3)]
        tr = g[0][0] + g[1][1] + g[2][2]
        minors = (g[0][0] * g[1][1] - g[0][1] ** 2
                  + g[0][0] * g[2][2] - g[0][2] ** 2
                  + g[1][1] * g[2][2] - g[1][2] ** 2)
        det = (g[0][0] * (g[1][1] * g[2][2] - g[1][2] ** 2)
               - g[0][1] * (g[0][1] * g[2][2] - g[1][2] * g[0][2])
               + g[0][2] * (g[0][1] * g[1][2] - g[1][1] * g[0][2]))
        return real_rooted_signs([Fraction(1), -tr, minors, -det])
    raise ValueError(f"unsupported dimension {n}")


def det2(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Scalar:
    return a * d - b * c


def cross(o, a, b) -> Scalar:
    """z-component of (a-o) x (b-o); the standard orientation predicate."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def dot2(a, b) -> Scalar:
    return a[0] * b[0] + a[1] * b[1]


def convex_hull_ccw(points):
    """Monotone chain over exact coordinates; returns hull CCW, no duplicates.

    Collinear points interior to hull edges are dropped.
    """
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and sign_of(cross(lower[-2], lower[-1], p)) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and sign_of(cross(upper[-2], upper[-1], p)) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]
