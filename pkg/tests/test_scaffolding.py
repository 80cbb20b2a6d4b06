import pytest

from prebuild.apartment import Coord
from prebuild.errors import CycleFound, NonStandard, OrientationViolation
from prebuild.scaffolding import (
    IN, OUT, Scaffolding, assert_acyclic, build_fold_graph, classify_pattern, find_collapsible_42,
    validate, validate_initial,
)
from prebuild.synth import FixtureSpec, lattice_disk, synthesize_fixture


def test_classify_standard_patterns():
    assert classify_pattern(6, {}).kind == "6_0"
    assert classify_pattern(8, {}).kind == "8_0"
    assert classify_pattern(6, {0: OUT, 3: IN}).kind == "6_2"
    assert classify_pattern(4, {0: IN, 2: IN}).kind == "4_2"
    assert classify_pattern(8, {3: OUT}).kind == "8_1"


def test_classify_rejections():
    with pytest.raises(OrientationViolation):
        classify_pattern(4, {0: OUT, 2: OUT})
    with pytest.raises(NonStandard):
        classify_pattern(6, {0: OUT, 1: OUT})


def test_lens_types():
    fx = synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_1"], [1, 1]))
    rep = validate(fx.complex, fx.scaffolding)
    assert rep.ok
    assert rep.singular() == {"4_2": [fx.chain[1]], "8_1": sorted([fx.chain[0], fx.chain[2]])}
    chains = validate_initial(fx.complex, fx.scaffolding, rep)
    assert [c.counts for c in chains] == [(2, 1)]
    assert find_collapsible_42(fx.complex, fx.scaffolding) == fx.chain[1]


def _ring(Z, reverse=False):
    pts = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)]
    pos = {x: v for fc in Z.faces.values() for x, v in zip(fc.pts, fc.verts)}
    vs = [pos[Coord(*q)] for q in pts]
    pairs = list(zip(vs, vs[1:] + vs[:1]))
    if reverse:
        pairs = [(v, u) for u, v in pairs]
    return [next((f, i) for f, fc in Z.faces.items() for i in range(3)
                 if fc.verts[i] == u and fc.verts[(i + 1) % 3] == v) for u, v in pairs]


@pytest.mark.parametrize("reverse", [False, True])
def test_cycle_witness(reverse):
    Z = lattice_disk(2)
    S = Scaffolding.from_halfedges(Z, _ring(Z, reverse))
    with pytest.raises(CycleFound) as ei:
        assert_acyclic(build_fold_graph(Z, S))
    w = ei.value.data["witness"]
    assert len(w) == 6
    assert all(a.head == b.tail for a, b in zip(w, w[1:] + w[:1]))


def test_fold_graph_of_lens_points_inward():
    fx = synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_1"], [1, 1]))
    G = build_fold_graph(fx.complex, fx.scaffolding)
    assert sorted((a.tail[0], a.head[0]) for a in G.arcs) == sorted(
        [(fx.chain[0], fx.chain[1]), (fx.chain[2], fx.chain[1])])
    assert G.sinks() == [(fx.chain[1], "")]


def test_lens_order_puts_sink_last():
    fx = synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_1"], [1, 1]))
    order = assert_acyclic(build_fold_graph(fx.complex, fx.scaffolding))
    assert [v for v, _ in order] == sorted([fx.chain[0], fx.chain[2]]) + [fx.chain[1]]
