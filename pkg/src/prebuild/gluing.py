"""Local link gluing at the points where the two sides of a region meet.

A merge site removes ``w`` sectors from each of two vertices and glues the
remaining sectors along the two boundary germs of the removed wedge. Germs
are numbered clockwise as in the surgery picture: on side 1 the remaining
germs run clockwise from ``start`` to ``end``; on side 2 (drawn mirrored)
they continue from ``end`` back round to ``start``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from .errors import NonHarmonizable, PrebuildError, UnclassifiableResult
from .scaffolding import IN, OUT, SingularityType, classify_pattern
from .tables import ROWS, Row, norm


@dataclass(frozen=True)
class Site:
    name: str
    start: int  # first boundary germ, clockwise from it lies the exterior
    end: int
    zero: int  # side-2 germ that becomes <0> after gluing

    @property
    def w(self) -> int:
        return self.start - self.end


SITES = {
    "s": Site("s", 2, -2, 3),
    "t": Site("t", 1, -1, 3),
    "q": Site("q", 1, -2, 2),   # on an edge parallel to f
    "q'": Site("q'", 2, -1, -2),  # on an edge parallel to f'
}
MIRROR = {"s": "s", "t": "t", "q": "q'", "q'": "q"}


def combine(m1: Optional[str], m2: Optional[str], cell=None) -> Optional[str]:
    """Marks of two identified boundary germs, both seen from the merged vertex.

    Returns OUT/IN, None for open, or "?" when both were open.
    """
    if m1 is None and m2 is None:
        return "?"
    if m1 is None or m2 is None:
        return None
    if m1 != m2:
        raise NonHarmonizable("identified fold germs point opposite ways", cell=cell)
    return m1


@dataclass
class GlueResult:
    n: int
    marks: Dict[int, Optional[str]]  # new germ index -> OUT/IN/None/"?"
    options: List[Tuple[SingularityType, Dict[int, str]]]
    origin: Dict[int, Tuple[int, int]] = field(default_factory=dict)  # new index -> (side, old index)

    @property
    def fixed(self) -> Dict[int, str]:
        return {k: m for k, m in self.marks.items() if m in (OUT, IN)}

    @property
    def question(self) -> List[int]:
        return sorted(k for k, m in self.marks.items() if m == "?")

    @property
    def kinds(self) -> frozenset:
        return frozenset(t.kind for t, _ in self.options)

    def unique(self) -> Tuple[SingularityType, Dict[int, str]]:
        if len(self.options) != 1:
            raise UnclassifiableResult("merged link is not determined locally (%d options)"
                                       % len(self.options))
        return self.options[0]


def _signed(k: int, n: int) -> int:
    k %= n
    return k - n if k > n // 2 else k


def glue_local(n1: int, folds1: Mapping[int, str], n2: int, folds2: Mapping[int, str],
               site: str) -> GlueResult:
    """Merge two vertex links at a site of the given kind.

    ``folds1`` and ``folds2`` map clockwise germ numbers to OUT/IN. The
    result lists every standard completion of the undetermined germs.
    """
    st = SITES[site]
    f1, f2 = norm(folds1, n1), norm(folds2, n2)
    seq = [(1, k) for k in range(st.start, st.end + n1 + 1)]
    seq += [(2, k) for k in range(st.end - 1, st.start - n2, -1)]
    n = len(seq)
    if n != n1 + n2 - 2 * st.w:
        raise UnclassifiableResult("sector count mismatch at %s site" % site)
    last = st.end + n1 - st.start
    iz = next((i for i, (side, k) in enumerate(seq) if side == 2 and (k - st.zero) % n2 == 0), None)
    if iz is None:
        # a small side-2 link can have <zero> on the boundary of the removed wedge
        if (st.start - st.zero) % n2 == 0:
            iz = 0
        elif (st.end - st.zero) % n2 == 0:
            iz = last
        else:
            raise UnclassifiableResult("germ <%d> of side 2 is removed at a %s site" % (st.zero, site))
    marks: Dict[int, Optional[str]] = {}
    origin = {}
    for i, (side, k) in enumerate(seq):
        new = _signed(i - iz, n)
        origin[new] = (side, k)
        if side == 1 and i in (0, last):
            k2 = st.start if i == 0 else st.end
            marks[new] = combine(f1.get(k % n1), f2.get(k2 % n2))
        elif side == 1:
            marks[new] = f1.get(k % n1)
        else:
            marks[new] = f2.get(k % n2)
    return GlueResult(n, marks, _complete(n, marks), origin)


def _complete(n: int, marks: Mapping[int, Optional[str]]):
    fixed = {k: m for k, m in marks.items() if m in (OUT, IN)}
    free = sorted(k for k, m in marks.items() if m == "?")
    options = []
    for choice in itertools.product((None, OUT, IN), repeat=len(free)):
        folds = dict(fixed)
        for k, c in zip(free, choice):
            if c is not None:
                folds[k] = c
        try:
            t = classify_pattern(n, {k % n: o for k, o in folds.items()})
        except PrebuildError:
            continue
        options.append((t, folds))
    return options


def mirror(folds: Mapping[int, str]) -> Dict[int, str]:
    return {-k: o for k, o in folds.items()}


def row_matches(row: Row, res: GlueResult) -> bool:
    """True when a gluing result is exactly what the row prescribes.

    The kinds must agree, every completion must carry the row's fold germs,
    and the germs that differ between completions must be exactly the ones
    the row leaves open.
    """
    n = res.n
    if not res.options or res.kinds != row.kinds:
        return False
    fixed = norm(row.fixed, n)
    q = {k % n for k in row.open_question}
    seen = [norm(folds, n) for _, folds in res.options]
    varying = set()
    for got in seen:
        if any(got.get(k) != o for k, o in fixed.items()):
            return False
        extra = set(got) - set(fixed)
        if not extra <= q:
            return False
        varying |= {k for k in q if any(g.get(k) != got.get(k) for g in seen)}
    if not q and len(seen) != 1:
        return False
    return varying == q


def glue_row(row: Row) -> GlueResult:
    return glue_local(row.n1, dict(row.folds1), row.n2, dict(row.folds2), row.site)


def match_tables(site: str, n1: int, folds1, n2: int, folds2) -> List[Tuple[str, bool]]:
    """Rows matching a merge, directly or after exchanging the sides.

    Exchanging the sides mirrors the picture, so germ numbers change sign.
    Returns (row name, agreement) pairs.
    """
    out = []
    presentations = [(site, n1, folds1, n2, folds2)]
    presentations.append((MIRROR[site], n2, mirror(folds2), n1, mirror(folds1)))
    for sname, a, fa, b, fb in presentations:
        if sname not in ("s", "t", "q"):
            continue
        rows = [r for r in ROWS if r.site == sname and r.n1 == a and r.n2 == b
                and norm(r.folds1, a) == norm(fa, a) and norm(r.folds2, b) == norm(fb, b)]
        for r in rows:
            out.append((r.name, row_matches(r, glue_local(a, fa, b, fb, sname))))
    return out


def glue_self(n: int, folds: Mapping[int, str], g1: int, f: int, g2: int) -> GlueResult:
    """A single vertex losing the two one-sector wedges on either side of germ f.

    Positions are counterclockwise link positions with g1, f, g2 consecutive.
    The germs g1 and g2 are identified; f disappears.
    """
    if (f - g1) % n != 1 or (g2 - f) % n != 1:
        raise UnclassifiableResult("germs are not consecutive around the removed wedges")
    keep = [(g2 + i) % n for i in range(n - 2)]  # g2, ..., g1 - 1 then back to g1 ~ g2
    marks = {}
    for i, p in enumerate(keep):
        if i == 0:
            marks[i] = combine(folds.get(g1 % n), folds.get(g2 % n))
        else:
            marks[i] = folds.get(p)
    m = len(keep)
    return GlueResult(m, marks, _complete(m, marks), {i: (0, p) for i, p in enumerate(keep)})
