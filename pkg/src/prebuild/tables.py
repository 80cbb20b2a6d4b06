"""Merged-vertex configurations listed in the reduction tables.

Directions use the clockwise numbering <k> of the surgery picture. A fold
germ is OUT when the fold points away from the vertex and IN (drawn with a
bar) when it points towards it. Side 1 is the singular side.

Each row gives the merge site, both input patterns and the expected result:
the set of possible kinds, the fold germs that are always present, and the
germs left undetermined by local data (marked with a question mark in the
table).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Tuple

from .scaffolding import IN, OUT


@dataclass(frozen=True)
class Row:
    table: int
    row: int
    site: str
    n1: int
    folds1: Tuple[Tuple[int, str], ...]
    n2: int
    folds2: Tuple[Tuple[int, str], ...]
    kinds: FrozenSet[str]
    fixed: Tuple[Tuple[int, str], ...] = ()
    open_question: Tuple[int, ...] = ()

    @property
    def name(self) -> str:
        return "table%d.row%d" % (self.table, self.row)


def _r(table, row, site, n1, f1, n2, f2, kinds, fixed=(), q=()):
    return Row(table, row, site, n1, tuple(sorted(f1.items())), n2, tuple(sorted(f2.items())),
               frozenset(kinds.split()), tuple(sorted(fixed.items())) if fixed else (), tuple(q))


_6_2_s2 = {1: IN, -2: OUT}

ROWS = (
    # structure at s(j): 8-fold s_1 glued to 6-fold s_2, four sectors removed from each
    _r(1, 1, "s", 8, {}, 6, {}, "6_0"),
    _r(1, 2, "s", 8, {1: OUT}, 6, _6_2_s2, "6_0"),
    _r(1, 3, "s", 8, {2: OUT}, 6, {}, "6_0"),
    _r(1, 4, "s", 8, {3: OUT}, 6, {}, "6_2", {2: OUT, -1: IN}),
    _r(1, 5, "s", 8, {4: OUT}, 6, {}, "6_3", {3: OUT, 1: IN, -1: IN}),
    _r(1, 6, "s", 8, {1: OUT, -3: OUT}, 6, _6_2_s2, "6_2", {-2: OUT, 1: IN}),
    _r(1, 7, "s", 8, {2: OUT, -2: OUT}, 6, {}, "6_0"),
    _r(1, 8, "s", 8, {1: OUT, 2: OUT}, 6, _6_2_s2, "6_0"),
    _r(1, 9, "s", 8, {2: OUT, 3: OUT}, 6, {}, "6_2", {2: OUT, -1: IN}),
    _r(1, 10, "s", 8, {3: OUT, 4: OUT}, 6, {}, "6_4", {2: OUT, 3: OUT, 1: IN, -1: IN}),
    # structure at q(m) on an edge parallel to f, three sectors removed from each
    _r(2, 1, "q", 6, {1: IN, -1: IN, -2: OUT, 3: OUT}, 6, {-1: OUT, 2: IN}, "6_2",
       {3: OUT, 0: IN}),
    _r(2, 2, "q", 6, {1: IN, -1: OUT, -2: OUT, 3: IN}, 6, {-1: IN, 2: OUT}, "6_2",
       {0: OUT, 3: IN}),
    _r(2, 3, "q", 6, {1: IN, -1: IN, 3: OUT}, 6, {-1: OUT, 2: IN}, "6_2", {3: OUT, 0: IN}),
    _r(2, 4, "q", 6, {1: IN, -1: OUT, 3: IN}, 6, {-1: IN, 2: OUT}, "6_2", {0: OUT, 3: IN}),
    _r(2, 5, "q", 6, {1: IN, -1: IN, 2: OUT, 3: OUT}, 6, {-1: OUT, 2: IN}, "6_4",
       {2: OUT, 3: OUT, 0: IN, -2: IN}),
    _r(2, 6, "q", 4, {1: IN, -1: IN}, 6, {-1: OUT, 2: IN}, "4_2", {0: IN, -2: IN}),
    # structure at t(j): two sectors removed from each side
    _r(3, 1, "t", 6, {}, 6, {}, "8_0 8_1 8_2", q=(2, -2)),
    _r(3, 2, "t", 6, {}, 6, {-1: IN, 2: OUT}, "8_1 8_2'", {1: OUT}, q=(2,)),
    _r(3, 3, "t", 6, {1: IN, -2: OUT}, 6, {}, "8_1 8_2'", {-3: OUT}, q=(-2,)),
    # rows 4 and 5 of this table coincide; listed once
    _r(3, 4, "t", 6, {1: IN, -2: OUT}, 6, {-1: IN, 2: OUT}, "8_2", {-3: OUT, 1: OUT}),
    _r(3, 6, "t", 6, {1: IN, -1: IN, 3: OUT}, 6, {}, "8_1", {4: OUT}),
    _r(3, 7, "t", 6, {1: IN, -1: IN, 2: OUT, 3: OUT}, 6, {}, "8_2'", {3: OUT, 4: OUT}),
    _r(3, 8, "t", 4, {1: IN, -1: IN}, 6, {}, "6_0"),
)


def norm(folds, n: int) -> Dict[int, str]:
    return {k % n: o for k, o in dict(folds).items()}


def rows_for(site: str, n1: int, folds1, n2: int, folds2):
    """Rows whose input configuration equals the given one."""
    f1, f2 = norm(folds1, n1), norm(folds2, n2)
    return [r for r in ROWS if r.site == site and r.n1 == n1 and r.n2 == n2
            and norm(r.folds1, n1) == f1 and norm(r.folds2, n2) == f2]
