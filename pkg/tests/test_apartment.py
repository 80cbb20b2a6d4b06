from fractions import Fraction

import pytest

from prebuild.apartment import (
    IDENTITY, Coord, Isometry, compose, cross, direction_of, dot, intersect, on_segment, reflect,
    rotate, unit,
)


def test_six_rotations_return():
    p = Coord(Fraction(2, 3), -1)
    assert rotate(p, 6) == p
    assert rotate(unit(0), 2) == unit(2) == Coord(-1, 1)


def test_units_have_length_one_and_60_degree_steps():
    for k in range(6):
        assert dot(unit(k), unit(k)) == 1
        # cos 60 between neighbours
        assert dot(unit(k), unit(k + 1)) == Fraction(1, 2)
        assert direction_of(unit(k).scale(3)) == k


def test_floats_refused():
    with pytest.raises(TypeError):
        Coord(0.5, 0)


def test_reflection_flips_directions():
    for k in range(6):
        assert direction_of(reflect(unit(k))) == (-k) % 6


def test_isometry_compose_and_inverse():
    f = Isometry(2, Coord(1, 3))
    g = Isometry(5, Coord(-2, Fraction(1, 2)))
    p = Coord(Fraction(1, 3), 4)
    assert compose(f, g)(p) == f(g(p))
    assert compose(f, f.inverse()) == IDENTITY


def test_intersections():
    m = intersect(Coord(0, 0), 0, Coord(1, -1), 1)
    assert m.kind == "point" and m.point == Coord(1, 0)
    assert intersect(Coord(0, 0), 0, Coord(0, 1), 3).kind == "parallel"
    assert intersect(Coord(0, 0), 0, Coord(5, 0), 3).kind == "coincident"
    assert on_segment(Coord(0, 0), Coord(2, 0), Coord(1, 0))
    assert not on_segment(Coord(0, 0), Coord(2, 0), Coord(3, 0))
    assert cross(unit(0), unit(1)) > 0
