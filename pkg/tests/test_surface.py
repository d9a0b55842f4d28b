"""Surface descriptions, validation, and developing-map windows."""

from fractions import Fraction as F

import pytest

from flatconic.models import l_shape, square_torus, two_marked_torus
from flatconic.surface import (
    SurfaceError,
    default_base,
    develop,
    inradius_bound,
    locate,
    parse_surface,
    rebase,
    surface_to_json,
    validate_surface,
)

SQUARE = ((0, 0), (1, 0), (1, 1), (0, 1))
TORUS_GLUE = [(("p0", 0), ("p0", 2)), (("p0", 1), ("p0", 3))]


def test_square_torus_has_one_cone_class_of_angle_two_pi():
    t = square_torus()
    assert [pid for pid, _ in t.polygons] == ["p0"]
    assert t.cone_angles == {"c0": 1}
    assert set(t.cone_class.values()) == {"c0"}


def test_two_marked_torus_splits_the_square_and_adds_a_class():
    tm = two_marked_torus(marked=(F(1, 2), F(1, 4)))
    assert [pid for pid, _ in tm.polygons] == ["t0", "t1", "t2", "t3"]
    assert tm.cone_angles == {"c0": 1, "c1": 1}


def test_l_shape_cone_angle_is_six_pi():
    assert l_shape().cone_angles == {"c0": 3}


def test_validation_rejects_unglued_edges():
    with pytest.raises(SurfaceError, match="unglued"):
        validate_surface((("p0", SQUARE),), [(("p0", 0), ("p0", 2))])


def test_validation_rejects_mismatched_edge_vectors():
    rect = (("p0", ((0, 0), (2, 0), (2, 1), (0, 1))),)
    with pytest.raises(SurfaceError, match="not opposite"):
        validate_surface(rect, [(("p0", 0), ("p0", 1)), (("p0", 2), ("p0", 3))])


def test_validation_rejects_clockwise_polygons():
    cw = (("p0", ((0, 0), (0, 1), (1, 1), (1, 0))),)
    with pytest.raises(SurfaceError, match="counterclockwise"):
        validate_surface(cw, TORUS_GLUE)


def test_validation_rejects_duplicate_ids():
    dup = (("p0", SQUARE), ("p0", tuple((x + 2, y) for x, y in SQUARE)))
    with pytest.raises(SurfaceError, match="duplicate"):
        validate_surface(dup, TORUS_GLUE)


def test_json_roundtrip_is_stable():
    for s in (square_torus(), two_marked_torus(marked=(F(1, 2), F(1, 4))), l_shape()):
        txt = surface_to_json(s)
        again = parse_surface(txt)
        assert again == s
        assert surface_to_json(again) == txt


def test_parse_rejects_malformed_text():
    with pytest.raises(SurfaceError):
        parse_surface("{not json")
    with pytest.raises(SurfaceError):
        parse_surface("{}")


def test_default_base_is_the_centroid_of_the_first_polygon():
    assert default_base(square_torus()) == ("p0", (F(1, 2), F(1, 2)))


def test_develop_radius_one_sees_the_four_corners():
    ch = develop(square_torus(), radius=1)
    assert sorted(d.position for d in ch.points) == [
        (0, 0), (0, 1), (1, 0), (1, 1)]
    assert ch.occluded == ()
    assert all(d.cone_id == "c0" for d in ch.points)


def test_develop_radius_six_window_and_occlusion():
    ch = develop(square_torus(), radius=6)
    assert len(ch.points) == 92
    assert len(ch.occluded) == 20
    # (-4, -1) sits on the base ray through the nearer lattice point (-1, 0)
    occ = {d.position for d in ch.occluded}
    assert (F(-4), F(-1)) in occ
    assert (F(-1), F(0)) not in occ
    # every window point keeps distance <= radius from the base
    for d in list(ch.points) + list(ch.occluded):
        dx = d.position[0] - ch.base[0]
        dy = d.position[1] - ch.base[1]
        assert dx * dx + dy * dy <= 36


def test_develop_paths_record_edge_crossings():
    ch = develop(square_torus(), radius=2)
    far = {d.position: d for d in ch.points}
    assert far[(F(1), F(0))].path == () or far[(F(1), F(0))].path[0][0] == "p0"
    # a point two squares away needs at least one crossing
    assert any(len(d.path) >= 1 for d in ch.points)


def test_develop_rejects_bad_bases_and_radius():
    t = square_torus()
    with pytest.raises(SurfaceError, match="cone point"):
        develop(t, base=("p0", (0, 0)))
    with pytest.raises(SurfaceError, match="not inside"):
        develop(t, base=("p0", (3, 3)))
    with pytest.raises(SurfaceError, match="radius"):
        develop(t, radius=0)


def test_locate_and_rebase():
    t = square_torus()
    ch = develop(t, radius=3)
    assert locate(ch, (F(1, 2), F(1, 2))) == ("p0", (F(1, 2), F(1, 2)))
    moved = rebase(ch, (F(1, 4), F(1, 4)), radius=2)
    assert moved.base == (F(1, 4), F(1, 4))
    assert {d.position for d in moved.points} <= {
        p for p in ((x, y) for x in range(-2, 4) for y in range(-2, 4))}


def test_mapped_shears_vertices_and_keeps_gluings():
    sheared = square_torus().mapped(((1, 1), (0, 1)))
    assert sheared.polygon("p0") == ((0, 0), (1, 0), (2, 1), (1, 1))
    assert sheared.gluings == square_torus().gluings
    with pytest.raises(SurfaceError, match="orientation"):
        square_torus().mapped(((1, 0), (0, -1)))


def test_scaled_multiplies_coordinates():
    doubled = square_torus().scaled(2)
    assert doubled.polygon("p0") == ((0, 0), (2, 0), (2, 2), (0, 2))


def test_inradius_bound_is_positive_and_fits_inside():
    for s in (square_torus(), l_shape()):
        r = inradius_bound(s)
        assert 0 < r <= 1
