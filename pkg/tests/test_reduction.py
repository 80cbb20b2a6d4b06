from collections import Counter

import pytest

from prebuild.complex import curvature_sum
from prebuild.errors import NotCollapsible, StepLimit
from prebuild.reduction import (
    check_region, collapsing_region, fold_chain, reduce_to_core, reduction_step,
)
from prebuild.scaffolding import validate
from prebuild.synth import FixtureSpec, synthesize_fixture, synthesize_multi


@pytest.fixture
def lens():
    return synthesize_fixture(FixtureSpec(["8_1", "4_2", "8_1"], [1, 2]))


def test_fold_chain(lens):
    b, a, _ = lens.chain
    fc = fold_chain(lens.complex, lens.scaffolding, a, 0)
    assert fc.vertices == (a, b)
    assert fc.length == 1


def test_region_of_lens(lens):
    CR = collapsing_region(lens.complex, lens.scaffolding, lens.chain[1])
    assert (CR.lenF, CR.lenF2) == (1, 2)
    assert {CR.b, CR.b2} == {lens.chain[0], lens.chain[2]}
    # no blocking point: the region is the full rectangle
    assert CR.total == 3
    assert check_region(CR).ok


def test_step_on_lens(lens):
    Z, S = lens.complex, lens.scaffolding
    Zn, Sn, rep = reduction_step(Z, S, lens.chain[1])
    assert not Sn.folds
    assert rep.removed == [lens.chain[1]]
    assert rep.curvature == (-2, -2)
    by = {s.name: s for s in rep.sites}
    assert by["b"].n_out == by["b'"].n_out == 6
    t = [s for s in rep.sites if s.site == "t"]
    assert len(t) == 1 and t[0].kind == "8_0"
    assert rep.seam and all(h in Zn.gluing for h in rep.seam)
    assert validate(Zn, Sn).singular() == {"8_0": [t[0].vertex]}


def test_not_collapsible(lens):
    with pytest.raises(NotCollapsible):
        reduction_step(lens.complex, lens.scaffolding, lens.chain[0])


def test_step_limit_keeps_partial(lens):
    with pytest.raises(StepLimit) as ei:
        reduce_to_core(lens.complex, lens.scaffolding, max_steps=0)
    part = ei.value.data["result"]
    assert part.steps == [] and part.scaffolding.folds == lens.scaffolding.folds


def _signature(res):
    kinds = Counter(t.kind for t in validate(res.complex, res.scaffolding).types.values())
    del kinds["6_0"]
    return curvature_sum(res.complex), kinds, len(res.steps)


def test_order_of_collapse_does_not_matter():
    fx = synthesize_multi([FixtureSpec(["8_1", "4_2", "8_1"], [1, 2]),
                           FixtureSpec(["8_1", "4_2", "8_2", "4_2", "8_1"], [1, 2, "3/2", "1/2"])])
    lo = reduce_to_core(fx.complex, fx.scaffolding, chooser=min)
    hi = reduce_to_core(fx.complex, fx.scaffolding, chooser=max)
    assert lo.is_core and hi.is_core
    assert [s.a for s in lo.steps] != [s.a for s in hi.steps]
    assert _signature(lo) == _signature(hi) == (-4, Counter({"8_0": 2}), 3)
