from fractions import Fraction

import pytest

from prebuild.apartment import Coord, cross, unit
from prebuild.network import (
    Arc, Budget, Node, Ray, SNGraph, bps_scan, check_network, generate_network, initial_rays,
    refract, trace, trace_across, verify_witness,
)
from prebuild.reduction import reduction_step
from prebuild.scaffolding import Scaffolding, find_collapsible_42, validate
from prebuild.synth import FixtureSpec, fan, lattice_disk, synthesize_fixture


@pytest.fixture(scope="module")
def lens():
    return synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_1"], [1, 2]))


def test_initial_ray_counts(lens):
    Z, S = lens.complex, lens.scaffolding
    b, a, _ = lens.chain
    assert len(initial_rays(Z, S, b)) == 7
    assert len(initial_rays(Z, S, a)) == 2
    assert len(initial_rays(fan(8), Scaffolding(), 0)) == 8
    with pytest.raises(ValueError):
        initial_rays(lattice_disk(), Scaffolding(), lattice_disk().interior_vertices[0])


def test_refract_is_mirror():
    # across a fold of direction 0, direction 1 reflects to 5 or keeps going to 2
    assert sorted(refract(1, 0)) == [1, 2]
    for c in range(6):
        for d in range(6):
            if d % 3 != c % 3:
                assert sum(refract(d, c)) % 6 == (2 * c + 3) % 6


def test_flat_ray_escapes():
    Z = lattice_disk(2)
    G = trace(Z, Scaffolding(), Ray(0, Coord(Fraction(-5, 3), Fraction(1, 3)), 0))
    assert len(G.arcs) == 1
    assert G.nodes[G.arcs[0].head].kind == "escape"


def test_eight_zero_in_flat_disk():
    G = generate_network(fan(8), Scaffolding())
    assert len(G.arcs) == 8 and not G.collisions
    assert all(G.nodes[a.head].kind == "escape" for a in G.arcs)
    assert bps_scan(G).witness is None


def test_fold_crossing_branches(lens):
    Z, S = lens.complex, lens.scaffolding
    for key, fwd in sorted(S.folds.items()):
        G = trace_across(Z, S, fwd)
        r = G.refractions[0]
        assert Z.edge_key(G.nodes[r.node].edge) == key
        assert len(r.outs) == 2
        assert all(d % 3 != r.fold_dir % 3 for d in r.directions)
        assert check_network(Z, S, G) == []


def test_ray_through_6_2_point():
    fx = synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_2'", "4_2", "8_1"],
                                        [2, Fraction(2, 3), 4, Fraction(7, 4)]))
    Z, S = fx.complex, fx.scaffolding
    types = validate(Z, S).types
    v = next(w for w in Z.interior_vertices if types[w].kind == "6_2")
    hits = 0
    for f, fc in Z.faces.items():
        for j, w in enumerate(fc.verts):
            if w != v:
                continue
            p = fc.pts[j]
            a, b = fc.pts[(j + 1) % len(fc.pts)] - p, fc.pts[j - 1] - p
            for d in range(6):
                u = unit(d)
                if cross(a, -u) > 0 and cross(-u, b) > 0:
                    G = trace(Z, S, Ray(f, p - u.scale(Fraction(1, 5)), d))
                    r = G.refractions[0]
                    assert G.nodes[r.node].vertex == v
                    assert len(r.outs) == 2
                    hits += 1
    assert hits


def test_lens_network(lens):
    Z, S = lens.complex, lens.scaffolding
    G = generate_network(Z, S)
    assert check_network(Z, S, G) == []
    assert len(G.collisions) == 2
    for c in G.collisions:
        assert c.arcs[2] >= 0 and G.arcs[c.arcs[2]].rule == "collision"
    scan = bps_scan(G)
    assert scan.witness is None and not scan.inconclusive


def test_budget_truncates(lens):
    G = generate_network(lens.complex, lens.scaffolding, Budget(max_segments=5))
    assert G.exhausted
    assert any(n.kind == "truncated" for n in G.nodes)
    with pytest.raises(ValueError):
        Budget(max_segments=0)


def test_seam_fold_refracts():
    fx = synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_2", "4_2", "8_1"], [1, 2, "3/2", "1/2"]))
    Z, S = fx.complex, fx.scaffolding
    Zn, Sn, rep = reduction_step(Z, S, find_collapsible_42(Z, S))
    seam_folds = [h for h in rep.seam if Sn.is_fold(Zn, h)]
    assert seam_folds
    for h in seam_folds:
        for he in (h, Zn.gluing[h]):
            G = trace_across(Zn, Sn, he)
            assert len(G.refractions[0].outs) == 2


def _star(germs):
    """Three sources whose arcs meet at one flat vertex."""
    G = SNGraph()
    for i in range(3):
        G.nodes.append(Node(i, "source", 0, Coord(i, 0), 50 + i))
    G.nodes.append(Node(3, "flat", 0, Coord(0, 1), 99))
    for i in range(3):
        G.arcs.append(Arc(i, i, 3, (), 0, "initial"))
    G.arrivals[99] = [(k, i) for i, k in enumerate(germs)]
    return G


def test_hand_built_triangle_is_bps():
    G = _star((0, 2, 4))
    scan = bps_scan(G)
    assert scan.witness == [0, 1, 2]
    assert verify_witness(G, scan.witness)
    assert not verify_witness(G, [0, 1])


def test_no_bps_without_120_degrees():
    assert bps_scan(_star((0, 1, 3))).witness is None


def test_saddle_connection():
    G = SNGraph()
    G.nodes.append(Node(0, "source", 0, Coord(0, 0), 1))
    G.nodes.append(Node(1, "singular", 0, Coord(1, 0), 2))
    G.arcs.append(Arc(0, 0, 1, (), 0, "initial"))
    assert bps_scan(G).witness == [0]
