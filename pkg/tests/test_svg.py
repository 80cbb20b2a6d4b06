import re

from prebuild.network import generate_network
from prebuild.reduction import reduce_to_core
from prebuild.svg import render_svg, type_label
from prebuild.synth import FixtureSpec, synthesize_fixture


def test_type_label():
    assert type_label("8_2'") == "8₂'"
    assert type_label("4_2") == "4₂"


def test_lens_picture():
    fx = synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_1"], [1, 2]))
    G = generate_network(fx.complex, fx.scaffolding)
    svg = render_svg(fx.complex, fx.scaffolding, G.as_dict())
    assert svg.count('class="fold"') == 2
    assert sorted(re.findall(r'class="type"[^>]*>([^<]*)<', svg)) == ["4₂", "8₁", "8₁"]
    assert svg.count('class="sn"') == len(G.arcs)
    cuts = re.findall(r'class="cut"[^>]*>(c\d+)<', svg)
    assert all(cuts.count(c) == 2 for c in cuts)
    assert svg == render_svg(fx.complex, fx.scaffolding, G.as_dict())


def test_core_picture():
    fx = synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_1"], [1, 2]))
    res = reduce_to_core(fx.complex, fx.scaffolding)
    svg = render_svg(res.complex, res.scaffolding)
    assert 'class="fold"' not in svg
    assert re.findall(r'class="type"[^>]*>([^<]*)<', svg) == ["8₀"]
