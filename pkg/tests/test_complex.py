from fractions import Fraction

import pytest

from prebuild.apartment import Coord
from prebuild.complex import build, curvature_sum, develop, straight_extend
from prebuild.errors import NonConvexFace, NonEcarinate
from prebuild.synth import fan, lattice_disk


@pytest.mark.parametrize("n,curv", [(4, 2), (6, 0), (8, -2)])
def test_fan_link_sizes(n, curv):
    Z = fan(n)
    assert Z.interior_vertices == [0]
    assert Z.n(0) == n
    assert curvature_sum(Z) == curv


def test_lattice_disk_is_flat():
    Z = lattice_disk(2)
    assert len(Z.faces) == 24
    assert len(Z.interior_vertices) == 7
    assert all(Z.n(v) == 6 for v in Z.interior_vertices)
    assert curvature_sum(Z) == 0


def test_length_mismatch_rejected():
    faces = {0: ([Coord(0, 0), Coord(1, 0), Coord(0, 1)], [0, 1, 2]),
             1: ([Coord(0, 0), Coord(2, 0), Coord(0, 2)], [3, 4, 5])}
    with pytest.raises(NonEcarinate):
        build(faces, [((0, 0), (1, 0))], [(0, 1), (0, 2), (1, 1), (1, 2)])


def test_reflex_face_rejected():
    # staircase: the corner at (1, 1) turns right
    pts = [Coord(0, 0), Coord(2, 0), Coord(2, 1), Coord(1, 1), Coord(1, 2), Coord(0, 2)]
    with pytest.raises(NonConvexFace):
        build({0: (pts, list(range(6)))}, [], [(0, i) for i in range(6)])


def test_develop_round_fan():
    # going once round an 8-fold point turns the chart by 480 degrees
    Z = fan(8)
    path = list(range(8)) + [0]
    isos = develop(Z, path, [(k, 2) for k in range(8)])
    assert isos[-1].rot == 8 % 6


def test_straight_extend_escapes():
    Z = lattice_disk(2)
    tr = straight_extend(Z, 0, Coord(Fraction(-5, 3), Fraction(1, 3)), 0)
    assert tr.reason == "external"
    assert tr.length > 0
