import pytest

from prebuild.errors import NonHarmonizable
from prebuild.gluing import SITES, combine, glue_local, glue_row, glue_self, match_tables, mirror, row_matches
from prebuild.scaffolding import IN, OUT
from prebuild.tables import ROWS, rows_for


@pytest.mark.parametrize("row", ROWS, ids=lambda r: r.name)
def test_row(row):
    assert row_matches(row, glue_row(row))


def test_link_sizes_add_up():
    for row in ROWS:
        assert glue_row(row).n == row.n1 + row.n2 - 2 * SITES[row.site].w


def test_site_widths():
    assert [SITES[s].w for s in ("s", "q", "q'", "t")] == [4, 3, 3, 2]


def test_open_germs_of_t_row1():
    res = glue_row(rows_for("t", 6, {}, 6, {})[0])
    assert res.n == 8
    assert res.kinds == {"8_0", "8_1", "8_2"}
    assert len(res.question) == 2


def test_combine():
    assert combine(OUT, OUT) == OUT
    assert combine(None, None) == "?"
    assert combine(IN, None) is None
    with pytest.raises(NonHarmonizable):
        combine(OUT, IN)


def test_mirrored_presentation_found():
    row = next(r for r in ROWS if r.site == "q" and r.n1 == 4)
    got = match_tables("q'", row.n2, mirror(dict(row.folds2)), row.n1, mirror(dict(row.folds1)))
    assert (row.name, True) in got


def test_self_gluing_loses_two_sectors():
    res = glue_self(8, {}, 1, 2, 3)
    assert res.n == 6
    assert res.unique()[0].kind == "6_0"


def test_wrong_row_does_not_match():
    r1 = next(r for r in ROWS if r.name == "table1.row4")
    r2 = next(r for r in ROWS if r.name == "table1.row5")
    assert not row_matches(r1, glue_row(r2))
