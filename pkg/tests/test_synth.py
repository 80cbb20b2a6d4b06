import pytest

from prebuild.complex import curvature_sum
from prebuild.errors import BadPattern
from prebuild.scaffolding import validate, validate_initial
from prebuild.synth import FixtureSpec, random_spec, synthesize_fixture, synthesize_multi


@pytest.mark.parametrize("pattern,lengths", [
    (["8_1", "8_1"], [1]),
    (["8_1", "4_2", "8_2"], [1, 1]),
    (["8_1", "4_2", "8_1"], [1]),
    (["8_1", "4_2", "8_1"], [1, 0]),
    (["8_1", "4_2", "6_0", "4_2", "8_1"], [1, 1, 1, 1]),
])
def test_bad_patterns(pattern, lengths):
    with pytest.raises(BadPattern):
        synthesize_fixture(FixtureSpec(pattern, lengths))


def test_inner_points():
    fx = synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_2", "4_2", "8_1"], [1, 2, "3/2", "1/2"]))
    rep = validate(fx.complex, fx.scaffolding)
    assert [rep.types[v].kind for v in fx.chain] == ["8_1", "4_2", "8_2", "4_2", "8_1"]
    # every 8-fold point carries -2, every 4-fold point +2
    assert curvature_sum(fx.complex) == -2


def test_multi():
    fx = synthesize_multi([FixtureSpec(["8_1", "4_2", "8_1"], [1, 2]),
                           FixtureSpec(["8_1", "4_2", "8_2'", "4_2", "8_1"], [1, 3, 2, "1/2"])])
    chains = validate_initial(fx.complex, fx.scaffolding)
    assert sorted(c.counts for c in chains) == [(2, 1), (3, 2)]


def test_random_specs_are_realisable():
    import random
    rng = random.Random(5)
    for _ in range(5):
        sp = random_spec(rng)
        assert len(sp.pattern) <= 7
        assert len(set(sp.lengths)) == len(sp.lengths)
