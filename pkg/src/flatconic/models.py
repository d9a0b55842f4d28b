"""Stock surfaces used by the CLI examples, scripts, and tests."""

from __future__ import annotations

from fractions import Fraction

from .surface import SurfaceDesc, validate_surface

F = Fraction


def square_torus() -> SurfaceDesc:
    """Unit square, opposite sides glued: one marked point, angle 2*pi."""
    verts = ((F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1)))
    gl = [(("p0", 0), ("p0", 2)), (("p0", 1), ("p0", 3))]
    return validate_surface([("p0", verts)], gl)


def two_marked_torus(marked=(F(1, 2), F(1, 2))) -> SurfaceDesc:
    """Square torus with one extra marked interior point.

    Triangulated as a fan from the marked point to the four corners, so the
    marked point is a vertex. Developed cone points: Z^2 union (Z^2 + marked).
    """
    m = (F(marked[0]), F(marked[1]))
    corners = [(F(0), F(0)), (F(1), F(0)), (F(1), F(1)), (F(0), F(1))]
    polys = []
    for k in range(4):
        polys.append((f"t{k}", (corners[k], corners[(k + 1) % 4], m)))
    gl = []
    for k in range(4):
        # inner edge 1 of t_k runs corner_{k+1} -> m; edge 2 of t_{k+1} runs
        # m -> corner_{k+1}
        gl.append(((f"t{k}", 1), (f"t{(k + 1) % 4}", 2)))
    gl.append((("t0", 0), ("t2", 0)))  # bottom ~ top
    gl.append((("t1", 0), ("t3", 0)))  # right ~ left
    return validate_surface(polys, gl)


def l_shape() -> SurfaceDesc:
    """Three unit squares in an L, opposite sides glued: genus 2, angle 6*pi."""
    verts = ((F(0), F(0)), (F(1), F(0)), (F(2), F(0)), (F(2), F(1)),
             (F(1), F(1)), (F(1), F(2)), (F(0), F(2)), (F(0), F(1)))
    gl = [(("p0", 0), ("p0", 5)),   # bottom-left ~ top
          (("p0", 1), ("p0", 3)),   # bottom-right ~ middle top
          (("p0", 2), ("p0", 7)),   # right ~ left-lower
          (("p0", 4), ("p0", 6))]   # middle right ~ left-upper
    return validate_surface([("p0", verts)], gl)
