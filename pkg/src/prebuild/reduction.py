"""Collapsing a 4_2 point: region development, glue-and-trim surgery, the core loop.

Coordinates in the parallelogram P are pairs (alpha, beta) with a at the
origin, f along the alpha axis and f' along the beta axis. Side 1 is the
wedge at a running counterclockwise from f to f'; side 2 is the other wedge
and is developed mirrored, so both sides land on the same P.

Merge sites use the clockwise germ numbering <k> of the gluing tables:
<0> points into the region, <1> runs parallel to f back towards a and
<-1> parallel to f' back towards a. On side 1 (orientation preserving)
<k> sits at P-direction 4 - k; side 2 sees everything mirrored.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .apartment import IDENTITY, Coord, Isometry, compose, direction_of, reflect, rotate
from .complex import HalfEdge, Mesh, SectorComplex, curvature_sum
from .errors import (
    ChainLeavesStandardList, ExternalHit, GeneralPosition, NonHarmonizable, NotCollapsible,
    PostSurgeryNonStandard, PrebuildError, RegionDegenerate, RegionViolation, SectorArithmetic,
    SinkNot42, StepLimit, UnclassifiableResult,
)
from .gluing import SITES, GlueResult, combine, glue_local, glue_self, match_tables
from .scaffolding import (
    FOLD, IN, OUT, FoldGraph, Scaffolding, assert_acyclic, build_fold_graph, classify_pattern,
    classify_vertex, local_pattern, mark_mesh, scaffolding_from_mesh, validate,
)
from .tables import norm

PPoint = Tuple[Fraction, Fraction]
FLAT = ("6_0", "6_2")


# fold chains

@dataclass(frozen=True)
class FoldChain:
    """Straight fold edges from a 4_2 point a out to the first stopping vertex b."""
    vertices: Tuple[int, ...]
    edges: Tuple[HalfEdge, ...]  # half-edges leading away from a
    length: Fraction
    pos: int  # link position of the chain's germ at a

    @property
    def a(self) -> int:
        return self.vertices[0]

    @property
    def b(self) -> int:
        return self.vertices[-1]

    @property
    def spine_points(self) -> Tuple[int, ...]:
        return self.vertices[1:-1]


def _kind(Z, S, v) -> Optional[str]:
    try:
        return classify_vertex(Z, S, v).kind
    except PrebuildError:
        return None


def fold_chain(Z: SectorComplex, S: Scaffolding, a: int, pos: int) -> FoldChain:
    """Follow the fold germ at link position ``pos`` of the 4_2 point a.

    The chain runs straight through 6_2 points and through 6_4 points that
    it enters along the spine; it stops at any other vertex, which is b.
    """
    if not Z.is_interior(a) or _kind(Z, S, a) != "4_2":
        raise NotCollapsible("vertex %s is not a 4_2 point" % a, cell=a)
    g = Z.link(a).germs[pos % Z.n(a)]
    if g.edge is None or S.orientation(Z, g.edge) != IN:
        raise NotCollapsible("germ %d at %s is not an inward fold" % (pos, a), cell=a)
    he = g.edge
    verts, edges = [a], []
    length = Fraction(0)
    while True:
        edges.append(he)
        length += Z.faces[he[0]].edge_length(he[1])
        w = Z.target(he)
        verts.append(w)
        if not Z.is_interior(w):
            raise ExternalHit("fold chain from %s reaches the external boundary" % a, cell=w)
        if len(edges) > len(Z.gluing):
            raise ChainLeavesStandardList("fold chain from %s does not end" % a, cell=a)
        try:
            t = classify_vertex(Z, S, w)
        except PrebuildError as e:
            raise ChainLeavesStandardList("fold chain from %s meets %s (%s)" % (a, w, e), cell=w)
        lk = Z.link(w)
        pin = lk.edge_positions()[Z.gluing[he]]
        if t.kind == "6_2" or (t.kind == "6_4" and pin in t.spine()):
            nxt = lk.germs[(pin + 3) % 6].edge
            if nxt is None or S.orientation(Z, nxt) is None:
                raise ChainLeavesStandardList("fold line bends at %s" % w, cell=w)
            he = nxt
            continue
        return FoldChain(tuple(verts), tuple(edges), length, pos % Z.n(a))


# development of one side into P

def _meets_box(p: PPoint, q: PPoint, A, B, sigma=None) -> bool:
    """True when segment pq meets the open box 0 < alpha < A, 0 < beta < B.

    With ``sigma`` the box is further cut down to alpha + beta < sigma.
    """
    lo, hi = Fraction(0), Fraction(1)
    cons = [(p[0], q[0] - p[0], A), (p[1], q[1] - p[1], B)]
    if sigma is not None:
        cons.append((p[0] + p[1] - sigma, q[0] + q[1] - p[0] - p[1], None))
    for x0, dx, top in cons:
        if top is None:  # x0 + t dx < 0
            if dx == 0:
                if not x0 < 0:
                    return False
            elif dx > 0:
                hi = min(hi, -x0 / dx)
            else:
                lo = max(lo, -x0 / dx)
            continue
        if dx == 0:
            if not 0 < x0 < top:
                return False
            continue
        t1, t2 = -x0 / dx, (top - x0) / dx
        if t1 > t2:
            t1, t2 = t2, t1
        lo, hi = max(lo, t1), min(hi, t2)
    return lo < hi


class _Side:
    """Development of one wedge at a into P."""

    def __init__(self, Z: SectorComplex, types, index: int, seed: int, a0: Coord, d_f: int):
        self.Z = Z
        self.types = types
        self.index = index
        self.mirrored = index == 2
        self.seed = seed
        self.a0 = a0
        self.d_f = d_f % 6
        self._floods = {}
        self._real = {}

    def to_P(self, iso: Isometry, x: Coord) -> PPoint:
        v = rotate(iso(x) - self.a0, -self.d_f)
        if self.mirrored:
            v = reflect(v)
        return (v.a + v.b, v.b)

    def from_P(self, iso: Isometry, p: PPoint) -> Coord:
        v = Coord(p[0] - p[1], p[1])
        if self.mirrored:
            v = reflect(v)
        return iso.inverse()(rotate(v, self.d_f) + self.a0)

    def pdir(self, iso: Isometry, d: int) -> int:
        D = iso.direction(d)
        return (self.d_f - D) % 6 if self.mirrored else (D - self.d_f) % 6

    def singular(self, v: int) -> bool:
        if not self.Z.is_interior(v):
            return True
        return self.Z.n(v) != 6 or self.types.get(v) not in FLAT

    def flood(self, A, B, sigma=None) -> Tuple[List[Tuple[int, Isometry]], str]:
        """Face copies reached from a through edges meeting the open box (0,A) x (0,B).

        With ``sigma`` the box is cut down to alpha + beta < sigma. Status is
        "ok", "conflict" when a face is reached in two different positions
        (the flood wound round a cone point), or "external".
        """
        key = (A, B, sigma)
        if key in self._floods:
            return self._floods[key]
        Z = self.Z
        placed = {self.seed: IDENTITY}
        order = [(self.seed, IDENTITY)]
        queue = deque(order)
        status = "ok"
        while queue and status != "conflict":
            f, iso = queue.popleft()
            face = Z.faces[f]
            P = [self.to_P(iso, x) for x in face.pts]
            n = len(P)
            for i in range(n):
                if not _meets_box(P[i], P[(i + 1) % n], A, B, sigma):
                    continue
                he = (f, i)
                if he in Z.external:
                    status = "external"
                    continue
                g = Z.gluing[he][0]
                iso2 = compose(iso, Z.transition(he))
                old = placed.get(g)
                if old is None:
                    placed[g] = iso2
                    order.append((g, iso2))
                    queue.append((g, iso2))
                elif old != iso2:
                    status = "conflict"
                    break
        self._floods[key] = (order, status)
        return order, status

    def corners(self, copies):
        """(vertex, P-point) for every corner of the given copies."""
        for f, iso in copies:
            face = self.Z.faces[f]
            for j, x in enumerate(face.pts):
                yield face.verts[j], self.to_P(iso, x)

    def _singular_corners(self, copies, A, B):
        out = set()
        for v, p in self.corners(copies):
            if 0 < p[0] < A and 0 < p[1] < B and self.singular(v):
                out.add((p[0] + p[1], p, v))
        return sorted(out)

    def find_real(self, A, B) -> Optional[Tuple[PPoint, int]]:
        """A singular point inside the open box whose own box is clean, or None.

        A flood that never places a face twice is an exact development, so
        every corner it shows is where it appears. If the whole box does not
        develop cleanly, sweep the level sigma of alpha + beta upwards through
        exact floods until the first singular point is met.
        """
        key = (A, B)
        if key in self._real:
            return self._real[key]
        copies, status = self.flood(A, B)
        if status == "ok":
            found = self._singular_corners(copies, A, B)
            result = (found[0][1], found[0][2]) if found else None
            self._real[key] = result
            return result
        lo, hi, last = Fraction(0), A + B, status
        result = None
        for _ in range(200):
            copies, _ = self.flood(A, B, lo)
            found = self._singular_corners(copies, A, B)
            if found and found[0][0] <= lo:
                result = (found[0][1], found[0][2])
                break
            if found:
                nxt = found[0][0]
                _, st = self.flood(A, B, nxt)
                if st == "ok":
                    lo = nxt
                    continue
                hi, last = min(hi, nxt), st
            mid = (lo + hi) / 2
            _, st = self.flood(A, B, mid)
            if st == "ok":
                lo = mid
            else:
                hi, last = mid, st
        else:
            if last == "external":
                raise ExternalHit("region on side %d reaches the external boundary" % self.index)
            raise RegionDegenerate("development of side %d overlaps itself" % self.index)
        self._real[key] = result
        return result


# collapsing region

@dataclass
class CollapsingRegion:
    a: int
    f: FoldChain
    f2: FoldChain
    blockers: Dict[int, List[Tuple[PPoint, int]]]
    staircase: List[PPoint]  # s(2), s(4), ... by decreasing alpha
    corners: List[PPoint]  # t(1), t(3), ...
    path: List[PPoint]  # b, t(1), s(2), ..., t(2k+1), b'
    points: Dict[int, List[Tuple[PPoint, int]]]  # side -> (P, vertex) of every vertex on the path
    sides: Dict[int, _Side] = field(repr=False, default_factory=dict)
    copies: Dict[int, Dict[int, Isometry]] = field(repr=False, default_factory=dict)
    types: Dict[int, Optional[str]] = field(repr=False, default_factory=dict)
    spines: Dict[int, Tuple[int, int]] = field(repr=False, default_factory=dict)

    @property
    def lenF(self) -> Fraction:
        return self.f.length

    @property
    def lenF2(self) -> Fraction:
        return self.f2.length

    @property
    def b(self) -> int:
        return self.f.b

    @property
    def b2(self) -> int:
        return self.f2.b

    @property
    def k(self) -> int:
        return len(self.staircase)

    @property
    def g_edges(self) -> List[Tuple[PPoint, PPoint]]:
        return list(zip(self.path, self.path[1:]))

    def inside(self, p: PPoint) -> bool:
        """True for points of the open region R."""
        al, be = p
        if not (0 < al < self.lenF and 0 < be < self.lenF2):
            return False
        return not any(al >= s[0] and be >= s[1] for s in self.staircase)

    def param(self, p: PPoint) -> Optional[Fraction]:
        """Arc length along the path from b, or None if p is not on it."""
        acc = Fraction(0)
        for x, y in self.g_edges:
            if x[0] == y[0] == p[0] and min(x[1], y[1]) <= p[1] <= max(x[1], y[1]):
                return acc + abs(p[1] - x[1])
            if x[1] == y[1] == p[1] and min(x[0], y[0]) <= p[0] <= max(x[0], y[0]):
                return acc + abs(p[0] - x[0])
            acc += abs(y[0] - x[0]) + abs(y[1] - x[1])
        return None

    def at_param(self, s) -> PPoint:
        acc = Fraction(0)
        for x, y in self.g_edges:
            L = abs(y[0] - x[0]) + abs(y[1] - x[1])
            if s <= acc + L:
                r = (s - acc) / L
                return (x[0] + r * (y[0] - x[0]), x[1] + r * (y[1] - x[1]))
            acc += L
        raise RegionDegenerate("parameter %s beyond the region boundary" % s)

    @property
    def total(self) -> Fraction:
        return self.param(self.path[-1])

    def edge_index(self, s) -> int:
        """1-based index j of the edge g(j) containing parameter s (interior points)."""
        acc = Fraction(0)
        for j, (x, y) in enumerate(self.g_edges, 1):
            acc += abs(y[0] - x[0]) + abs(y[1] - x[1])
            if s < acc:
                return j
        return len(self.path) - 1

    def as_dict(self) -> dict:
        def pp(p):
            return [str(p[0]), str(p[1])]
        return {
            "a": self.a,
            "b": self.b,
            "b2": self.b2,
            "lenF": str(self.lenF),
            "lenF2": str(self.lenF2),
            "f": list(self.f.vertices),
            "f2": list(self.f2.vertices),
            "k": self.k,
            "staircase": [pp(s) for s in self.staircase],
            "corners": [pp(t) for t in self.corners],
            "blockers": {str(i): [[pp(p), v] for p, v in bl] for i, bl in sorted(self.blockers.items())},
        }


def _staircase(points: Sequence[PPoint]) -> List[PPoint]:
    pts = sorted(set(points))
    front = [p for p in pts if not any(q != p and q[0] <= p[0] and q[1] <= p[1] for q in pts)]
    for p in front:
        for q in front:
            if p != q and (p[0] == q[0] or p[1] == q[1]):
                raise GeneralPosition("staircase corners %s and %s share a coordinate" % (p, q))
    return sorted(front, key=lambda p: -p[0])


def _corners(lenF, lenF2, stair: Sequence[PPoint]) -> List[PPoint]:
    if not stair:
        return [(lenF, lenF2)]
    out = [(lenF, stair[0][1])]
    for s, s2 in zip(stair, stair[1:]):
        out.append((s[0], s2[1]))
    out.append((stair[-1][0], lenF2))
    return out


def _path(lenF, lenF2, stair, corners) -> List[PPoint]:
    path = [(lenF, Fraction(0))]
    for j, t in enumerate(corners):
        path.append(t)
        if j < len(stair):
            path.append(stair[j])
    path.append((Fraction(0), lenF2))
    return path


def collapsing_region(Z: SectorComplex, S: Scaffolding, a: int) -> CollapsingRegion:
    t = classify_vertex(Z, S, a) if Z.is_interior(a) else None
    if t is None or t.kind != "4_2":
        raise NotCollapsible("vertex %s is not a 4_2 point" % a, cell=a)
    p0, p1 = sorted(p for p, _ in t.folds)
    f = fold_chain(Z, S, a, p0)
    f2 = fold_chain(Z, S, a, p1)
    if f.b == f2.b:
        raise RegionDegenerate("both fold chains from %s end at %s" % (a, f.b), cell=a)
    types = {v: _kind(Z, S, v) for v in Z.interior_vertices}
    lk = Z.link(a)
    g1, g2 = lk.germs[p0], lk.germs[p1]
    sides = {
        1: _Side(Z, types, 1, g1.face, Z.faces[g1.face].pts[g1.corner], g1.dir),
        2: _Side(Z, types, 2, g2.face, Z.faces[g2.face].pts[g2.corner], g2.dir + 2),
    }
    lenF, lenF2 = f.length, f2.length
    blockers: Dict[int, List[Tuple[PPoint, int]]] = {1: [], 2: []}
    for _ in range(4 * len(Z.corners) + 4):
        stair = _staircase([p for bl in blockers.values() for p, _ in bl])
        corners = _corners(lenF, lenF2, stair)
        hit = None
        for c in corners:
            for i in (1, 2):
                r = sides[i].find_real(c[0], c[1])
                if r is not None:
                    hit = (i, r)
                    break
            if hit:
                break
        if hit is None:
            break
        blockers[hit[0]].append(hit[1])
    else:
        raise RegionDegenerate("staircase search does not settle", cell=a)

    copies: Dict[int, Dict[int, Isometry]] = {}
    points: Dict[int, List[Tuple[PPoint, int]]] = {}
    path = _path(lenF, lenF2, stair, corners)
    spines = {v: classify_vertex(Z, S, v).spine() for v, k in types.items() if k == "6_4"}
    region = CollapsingRegion(a, f, f2, blockers, stair, corners, path, points, sides, copies,
                              types, spines)
    for i in (1, 2):
        cp: Dict[int, Isometry] = {}
        for c in corners:
            copies_c, status = sides[i].flood(c[0], c[1])
            if status == "external":
                raise ExternalHit("region on side %d reaches the external boundary" % i, cell=a)
            if status != "ok":
                raise RegionDegenerate("region on side %d does not develop" % i, cell=a)
            for face, iso in copies_c:
                if cp.setdefault(face, iso) != iso:
                    raise RegionDegenerate("region on side %d overlaps itself in face %s" % (i, face),
                                           cell=face)
        copies[i] = cp
        pts = set()
        for v, p in sides[i].corners(cp.items()):
            if region.param(p) is not None:
                pts.add((p, v))
        points[i] = sorted(pts, key=lambda x: (region.param(x[0]), x[1]))
    ends = set(path)
    for i in (1, 2):
        for p, v in points[i]:
            if p not in ends and sides[i].singular(v) and Z.is_interior(v) and Z.n(v) != 6:
                raise GeneralPosition("cone point %s lies inside a boundary edge of the region" % v,
                                      cell=v)
    common = set(copies[1]) & set(copies[2])
    if common:
        raise RegionDegenerate("the two sides share faces %s" % sorted(common), cell=min(common))
    return region


# region checks

@dataclass
class RegionReport:
    checks: List[Tuple[str, bool, str]] = field(default_factory=list)  # (clause, ok, detail)
    q: Dict[Tuple[int, int], List[Tuple[PPoint, int, Optional[str]]]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    @property
    def violations(self) -> List[Tuple[str, str]]:
        return [(c, d) for c, ok, d in self.checks if not ok]

    def raise_if_failed(self):
        if not self.ok:
            clause, detail = self.violations[0]
            raise RegionViolation("%s: %s" % (clause, detail), clause=clause,
                                  violations=self.violations)
        return self

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"clause": c, "ok": ok, "detail": d} for c, ok, d in self.checks],
            "q": {"%d.%d" % key: [[str(p[0]), str(p[1]), v, k] for p, v, k in pts]
                  for key, pts in sorted(self.q.items())},
        }


def _spine_along(CR: CollapsingRegion, i: int, v: int, p: PPoint, dirs) -> bool:
    """True when v is a 6_4 point whose spine runs in the P-directions ``dirs``."""
    if v not in CR.spines:
        return False
    side = CR.sides[i]
    Z = side.Z
    h = -1 if side.mirrored else 1
    for f, iso in sorted(CR.copies[i].items()):
        face = Z.faces[f]
        for j, x in enumerate(face.pts):
            if face.verts[j] == v and side.to_P(iso, x) == p:
                d = face.edge_dir(j)
                pref = Z.link(v).index(f, j, d)
                Pref = side.pdir(iso, d)
                return all((Pref + h * (q - pref)) % 6 in dirs for q in CR.spines[v])
    return False


def check_region(CR: CollapsingRegion) -> RegionReport:
    """Check the structural properties of a collapsing region clause by clause."""
    rep = RegionReport()
    Z = CR.sides[1].Z
    types = CR.types
    spines = CR.spines

    # part 1: b and b' are singular and do not continue the fold line
    for name, ch in (("b", CR.f), ("b'", CR.f2)):
        k = types.get(ch.b)
        ok = k is not None and k not in FLAT
        if ok and k == "6_4" and ch.b in spines:
            pin = Z.link(ch.b).edge_positions()[Z.gluing[ch.edges[-1]]]
            ok = pin not in spines[ch.b]
        rep.checks.append(("part1", ok, "%s = %s is %s" % (name, ch.b, k)))

    at = {i: {} for i in (1, 2)}
    for i in (1, 2):
        for p, v in CR.points[i]:
            at[i].setdefault(p, []).append(v)

    def singular_at(i, p):
        return [v for v in at[i].get(p, []) if CR.sides[i].singular(v)]

    # part 2: each s(2j) is singular on exactly one side, 8-fold there
    for j, s in enumerate(CR.staircase, 1):
        s1, s2 = singular_at(1, s), singular_at(2, s)
        ok = (len(s1) + len(s2) == 1) and all(Z.n(v) == 8 for v in s1 + s2)
        rep.checks.append(("part2", ok, "s(%d) at %s: side1 %s side2 %s" % (2 * j, s, s1, s2)))

    # singular points inside the edges g(j)
    ends = set(CR.path)
    for j, (x, y) in enumerate(CR.g_edges, 1):
        lo, hi = CR.param(x), CR.param(y)
        # t(.) is the end at odd positions of the path
        t_end = y if j % 2 == 1 else x
        for i in (1, 2):
            pts = []
            for p, v in CR.points[i]:
                s = CR.param(p)
                if lo < s < hi and p not in ends and CR.sides[i].singular(v):
                    pts.append((p, v, types.get(v)))
            pts.sort(key=lambda c: abs(CR.param(c[0]) - CR.param(t_end)), reverse=True)
            rep.q[(j, i)] = pts
        for i in (1, 2):
            eight = [v for _, v, _ in rep.q[(j, i)] if Z.n(v) == 8]
            rep.checks.append(("part3", not eight, "g_%d(%d) interior 8-fold points %s" % (i, j, eight)))
        p1 = {p for p, _, _ in rep.q[(j, 1)]}
        p2 = {p for p, _, _ in rep.q[(j, 2)]}
        both = sorted(p1 & p2)
        rep.checks.append(("part4", not both, "g(%d) singular on both sides at %s" % (j, both)))
        rep.checks.append(("onesn", not (p1 and p2),
                           "g(%d) has interior singularities on both sides" % j))
        dirs = {2, 5} if j % 2 == 1 else {0, 3}
        for i in (1, 2):
            pts = rep.q[(j, i)]
            bad = [v for p, v, _ in pts[:-1] if not _spine_along(CR, i, v, p, dirs)]
            rep.checks.append(("spine", not bad,
                               "g_%d(%d): points before the last are not spine 6_4: %s" % (i, j, bad)))
    # adjacent edges at t(j) are not both singular inside
    for j in range(1, len(CR.g_edges), 2):
        e1 = any(rep.q[(j, i)] for i in (1, 2))
        e2 = any(rep.q[(j + 1, i)] for i in (1, 2))
        rep.checks.append(("t-adjacent", not (e1 and e2),
                           "both edges at t(%d) carry interior singularities" % j))
    return rep


# surgery

@dataclass
class SiteOutcome:
    name: str
    site: str  # "b", "b'", "s", "t", "q" or "q'"
    point: PPoint
    vertices: Tuple[int, ...]  # merged vertices before surgery
    vertex: int  # after surgery
    n_in: Tuple[int, ...]
    folds_in: Tuple[Dict[int, str], ...]  # table frame per side
    n_out: int
    kind: str
    folds_out: Dict[int, str]  # table frame
    w: int
    predicted: Tuple[str, ...]  # kinds allowed by the generic gluing
    rows: Tuple[Tuple[str, bool], ...] = ()

    def as_dict(self) -> dict:
        def fd(d):
            return {str(k): o for k, o in sorted(d.items())}
        return {
            "name": self.name, "site": self.site,
            "point": [str(self.point[0]), str(self.point[1])],
            "vertices": list(self.vertices), "vertex": self.vertex,
            "n_in": list(self.n_in), "folds_in": [fd(d) for d in self.folds_in],
            "n_out": self.n_out, "kind": self.kind, "folds_out": fd(self.folds_out),
            "w": self.w, "predicted": list(self.predicted),
            "rows": [[r, ok] for r, ok in self.rows],
        }


@dataclass
class Marking:
    g: int
    interval: Tuple[Fraction, Fraction]
    marks: Tuple[int, int]  # per side: +1 along the path, -1 against it, 0 open
    result: int  # +1, -1 or 0
    resolved: bool  # True when both sides were open and the value was chosen by search

    def as_dict(self) -> dict:
        return {"g": self.g, "interval": [str(x) for x in self.interval],
                "marks": list(self.marks), "result": self.result, "resolved": self.resolved}


@dataclass
class SurgeryReport:
    a: int
    region: dict
    removed: List[int]
    sites: List[SiteOutcome]
    markings: List[Marking]
    ambiguous: bool
    curvature: Tuple[int, int]
    seam: List[HalfEdge] = field(default_factory=list)  # glued edges of the new complex

    @property
    def rows(self) -> List[Tuple[str, str, bool]]:
        return [(s.name, r, ok) for s in self.sites for r, ok in s.rows]

    def as_dict(self) -> dict:
        return {
            "a": self.a, "region": self.region, "removed": self.removed,
            "sites": [s.as_dict() for s in self.sites],
            "markings": [m.as_dict() for m in self.markings],
            "ambiguous": self.ambiguous, "curvature": list(self.curvature),
            "seam": [list(h) for h in self.seam],
        }


W = {"s": 4, "q": 3, "q'": 3, "t": 2, "b": 1, "b'": 1}


def _signed(k: int, n: int) -> int:
    k %= n
    return k - n if k > n // 2 else k


class _Surgery:
    """Mesh bookkeeping for one reduction step."""

    def __init__(self, Z: SectorComplex, S: Scaffolding, CR: CollapsingRegion):
        self.Z, self.S, self.CR = Z, S, CR
        m = Mesh.from_complex(Z)
        mark_mesh(m, S)
        self.m = m

    def iso(self, i, f) -> Isometry:
        return self.CR.copies[i][self.m.root[f]]

    def P(self, i, h) -> PPoint:
        m = self.m
        return self.CR.sides[i].to_P(self.iso(i, m.face_of[h]), m.org[h])

    def cut(self):
        m, CR = self.m, self.CR
        for i in (1, 2):
            side = CR.sides[i]
            for f, iso in sorted(CR.copies[i].items()):
                for p, q in CR.g_edges:
                    m.cut_clipped(f, side.from_P(iso, p), side.from_P(iso, q))
        self.inside = {}
        for i in (1, 2):
            faces = set()
            for f, iso in CR.copies[i].items():
                for g in m.subfaces(f):
                    pts = m.points(g)
                    c = Coord(sum(p.a for p in pts) / len(pts), sum(p.b for p in pts) / len(pts))
                    if CR.inside(CR.sides[i].to_P(iso, c)):
                        faces.add(g)
            self.inside[i] = faces
        self.all_inside = self.inside[1] | self.inside[2]

    def boundary(self, i) -> List[Tuple[Fraction, Fraction, int]]:
        m, CR = self.m, self.CR
        out = []
        for f in sorted(self.inside[i]):
            for h in m.faces[f]:
                t = m.twin[h]
                if t is None:
                    raise ExternalHit("region side %d touches the external boundary" % i, cell=f)
                if m.face_of[t] in self.all_inside:
                    continue
                s0, s1 = CR.param(self.P(i, h)), CR.param(self.P(i, m.next(h)))
                if s0 is None or s1 is None:
                    raise RegionDegenerate("side %d leaves the region away from its boundary" % i,
                                           cell=f)
                if (s0 < s1) != (i == 1):
                    raise RegionDegenerate("side %d boundary runs the wrong way" % i, cell=f)
                out.append((min(s0, s1), max(s0, s1), h))
        return sorted(out)

    def synchronize(self):
        """Split boundary edges until both sides break at the same parameters."""
        m, CR = self.m, self.CR
        for _ in range(10000):
            b1, b2 = self.boundary(1), self.boundary(2)
            params = {x for lo, hi, _ in b1 + b2 for x in (lo, hi)}
            done = True
            for i, bd in ((1, b1), (2, b2)):
                for lo, hi, h in bd:
                    inner = sorted(x for x in params if lo < x < hi)
                    if inner:
                        f = m.face_of[h]
                        x = CR.sides[i].from_P(self.iso(i, f), CR.at_param(inner[0]))
                        m.split_edge(h, x)
                        done = False
                        break
                if not done:
                    break
            if done:
                break
        if [(lo, hi) for lo, hi, _ in b1] != [(lo, hi) for lo, hi, _ in b2]:
            raise RegionDegenerate("the two sides of the region do not match along g")
        cover = [Fraction(0)] + [hi for _, hi, _ in b1]
        if [lo for lo, _, _ in b1] != cover[:-1] or cover[-1] != CR.total:
            raise RegionDegenerate("region boundary is not a single path from b to b'")
        self.pairs = [(lo, hi, h1, h2) for (lo, hi, h1), (_, _, h2) in zip(b1, b2)]

    def snapshot(self):
        Zc, _, key = self.m.to_complex()
        for h, (f, i) in key.items():
            self.m.vid[h] = Zc.faces[f].verts[i]
        self.m.max_vid = max(Zc.corners)
        self.Zc, self.key = Zc, key
        self.Sc = scaffolding_from_mesh(Zc, key, self.m)

    # site frames

    def inside_corner(self, i, p: PPoint):
        m = self.m
        for f in sorted(self.inside[i]):
            for idx, h in enumerate(m.faces[f]):
                if self.P(i, h) == p:
                    return f, idx, h
        raise RegionDegenerate("no region corner at %s on side %d" % (p, i))

    def frame(self, i, p: PPoint):
        """(vertex, n, p_ref, k_ref, table-frame folds) of side i at P-point p."""
        m, Zc = self.m, self.Zc
        f, idx, h = self.inside_corner(i, p)
        v = Zc.faces[f].verts[idx]
        d = direction_of(m.end(h) - m.org[h])
        lk = Zc.link(v)
        p_ref = lk.index(f, idx, d)
        P = self.CR.sides[i].pdir(self.iso(i, f), d)
        k_ref = (4 - P + 2) % 6 - 2
        h_sign = -1 if i == 1 else 1
        n, folds = local_pattern(Zc, self.Sc, v)
        tframe = {k_ref + h_sign * (q - p_ref): o for q, o in folds.items()}
        return v, n, p_ref, k_ref, tframe, folds

    def anchor(self, res: GlueResult, locate):
        """A germ of the merged link that survives the surgery, with its new index."""
        for i, (side, k) in sorted(res.origin.items()):
            v, pos = locate(side, k)
            g = self.Zc.link(v).germs[pos % self.Zc.n(v)]
            if g.face not in self.all_inside:
                return g, i
        raise RegionDegenerate("merged vertex keeps no germ outside the region")


def _resolve(Zn: SectorComplex, base: Dict[HalfEdge, HalfEdge], unknown, limit=20000):
    """Assign open/forward/reverse to undetermined edges so every touched vertex is standard.

    ``unknown`` lists (forward half-edge, reverse half-edge) in path order.
    Returns (assignment, ambiguous).
    """
    keys = [Zn.edge_key(fw) for fw, _ in unknown]
    verts: Dict[int, List[int]] = {}
    for j, (fw, _) in enumerate(unknown):
        for v in (Zn.origin(fw), Zn.target(fw)):
            verts.setdefault(v, []).append(j)
    last = {v: max(js) for v, js in verts.items()}
    ready: Dict[int, List[int]] = {}
    for v, j in last.items():
        ready.setdefault(j, []).append(v)
    folds = dict(base)
    solutions = []
    budget = [limit]

    def ok(v):
        if not Zn.is_interior(v):
            return False
        lk = Zn.link(v)
        pat = {}
        for k, g in enumerate(lk.germs):
            if g.edge is not None:
                fw = folds.get(Zn.edge_key(g.edge))
                if fw is not None:
                    pat[k] = OUT if fw == g.edge else IN
        try:
            classify_pattern(lk.n, pat)
            return True
        except PrebuildError:
            return False

    def rec(j):
        if len(solutions) > 1 or budget[0] <= 0:
            return
        budget[0] -= 1
        if j == len(unknown):
            solutions.append({keys[x]: folds.get(keys[x]) for x in range(len(unknown))})
            return
        fw, rv = unknown[j]
        for choice in (None, fw, rv):
            if choice is None:
                folds.pop(keys[j], None)
            else:
                folds[keys[j]] = choice
            if all(ok(v) for v in ready.get(j, [])):
                rec(j + 1)
            if len(solutions) > 1:
                break
        folds.pop(keys[j], None)

    rec(0)
    if not solutions:
        raise NonHarmonizable("no standard marking of the glued edges exists")
    return solutions[0], len(solutions) > 1 or budget[0] <= 0


def reduction_step(Z: SectorComplex, S: Scaffolding, a: int,
                   region: Optional[CollapsingRegion] = None
                   ) -> Tuple[SectorComplex, Scaffolding, SurgeryReport]:
    """Collapse the region at the 4_2 point a: glue its two sides together and trim."""
    CR = region if region is not None else collapsing_region(Z, S, a)
    check_region(CR).raise_if_failed()
    op = _Surgery(Z, S, CR)
    op.cut()
    op.synchronize()
    op.snapshot()
    m, Zc, Sc = op.m, op.Zc, op.Sc

    # sites and their local data before the surgery
    sites = []
    names = {0: "b", len(CR.path) - 1: "b'"}
    for j in range(1, len(CR.path) - 1):
        names[j] = ("t(%d)" if j % 2 == 1 else "s(%d)") % j
    params = {CR.param(p): j for j, p in enumerate(CR.path)}
    counter: Dict[int, int] = {}
    for s, _, _, _ in op.pairs:
        if s in params:
            continue
        j = CR.edge_index(s)
        counter[j] = counter.get(j, 0) + 1
        sites.append((s, "q" if j % 2 == 0 else "q'", "q(%d.%d)" % (j, counter[j])))
    for s, j in params.items():
        kind = names[j].split("(")[0]
        sites.append((s, kind, names[j]))
    sites.sort(key=lambda x: x[0])

    pre = []
    for s, kind, name in sites:
        p = CR.at_param(s)
        if kind in ("b", "b'"):
            v, n, p_ref, k_ref, tframe, folds = op.frame(1, p)
            fpos = (p_ref - ((1 if kind == "b" else -1) - k_ref)) % n
            g1, g2 = (fpos - 1) % n, (fpos + 1) % n
            res = glue_self(n, folds, g1, fpos, g2)
            anchor = op.anchor(res, lambda side, q, v=v: (v, q))
            pre.append((s, kind, name, p, (v,), (n,), (tframe,), res, anchor, 1))
        else:
            v1, n1, p_ref1, k_ref1, tframe1, _ = op.frame(1, p)
            v2, n2, p_ref2, k_ref2, tframe2, _ = op.frame(2, p)
            if v1 == v2:
                raise RegionDegenerate("site %s meets itself" % name, cell=v1)
            res = glue_local(n1, tframe1, n2, tframe2, kind)

            def locate(side, k, fr=((v1, p_ref1, k_ref1), (v2, p_ref2, k_ref2))):
                v, p_ref, k_ref = fr[side - 1]
                return v, (p_ref - (k - k_ref) if side == 1 else p_ref + (k - k_ref))
            anchor = op.anchor(res, locate)
            pre.append((s, kind, name, p, (v1, v2), (n1, n2), (tframe1, tframe2), res, anchor, 0))

    # marks along the glued edges, relative to the path direction
    markings = []
    glued = []
    for lo, hi, h1, h2 in op.pairs:
        o1, o2 = m.twin[h1], m.twin[h2]
        s1 = 1 if m.tag.get(h1) == FOLD else (-1 if m.tag.get(o1) == FOLD else 0)
        s2 = -1 if m.tag.get(h2) == FOLD else (1 if m.tag.get(o2) == FOLD else 0)
        c = combine({1: OUT, -1: IN, 0: None}[s1], {1: OUT, -1: IN, 0: None}[s2])
        result = {OUT: 1, IN: -1, None: 0, "?": None}[c]
        glued.append((o1, o2, result))
        markings.append(Marking(CR.edge_index(lo), (lo, hi), (s1, s2), result, False))

    survivors = set()
    for f in m.faces:
        if f not in op.all_inside:
            survivors.update(m.vid[h] for h in m.faces[f])
    for f in sorted(op.all_inside):
        m.delete_face(f)
    for o1, o2, result in glued:
        m.tag.pop(o1, None)
        m.tag.pop(o2, None)
        m.glue(o1, o2)
        if result == 1:
            m.tag[o2] = FOLD
        elif result == -1:
            m.tag[o1] = FOLD
    Zn, _, key = m.to_complex()
    base = scaffolding_from_mesh(Zn, key, m)
    unknown = [(key[o2], key[o1]) for o1, o2, r in glued if r is None]
    assignment, ambiguous = _resolve(Zn, dict(base.folds), unknown)
    folds = dict(base.folds)
    for k, fw in assignment.items():
        if fw is not None:
            folds[k] = fw
    Sn = Scaffolding.from_halfedges(Zn, folds.values())
    for mk, (o1, o2, r) in zip(markings, glued):
        if r is None:
            fw = assignment[Zn.edge_key(key[o2])]
            mk.result = 0 if fw is None else (1 if fw == key[o2] else -1)
            mk.resolved = True
    rep = validate(Zn, Sn)
    if not rep.ok:
        e = rep.errors[0]
        raise PostSurgeryNonStandard("vertex %s after surgery: %s" % (e.cell, e), cell=e.cell,
                                     errors=rep.errors)

    outcomes = []
    for s, kind, name, p, vs, ns, tframes, res, (g, i0), is_self in pre:
        v_new = Zn.faces[g.face].verts[g.corner]
        lk = Zn.link(v_new)
        P0 = lk.index(g.face, g.corner, g.dir)
        n_new = lk.n
        expect = ns[0] - 2 if is_self else ns[0] + ns[1] - 2 * W[kind]
        if n_new != expect:
            raise SectorArithmetic("site %s: %d sectors, expected %d" % (name, n_new, expect),
                                   cell=v_new)
        t_new = rep.types[v_new]
        raw = t_new.fold_dict()
        if is_self:
            got = {(i0 + q - P0) % n_new: o for q, o in raw.items()}
        else:
            got = {(i0 + P0 - q) % n_new: o for q, o in raw.items()}
        if not any(norm(opt, n_new) == got for _, opt in res.options):
            raise UnclassifiableResult("site %s became %s %s, not among the local gluings %s"
                                       % (name, t_new.kind, got, [o for _, o in res.options]),
                                       cell=v_new)
        rows = ()
        if not is_self:
            rows = tuple(match_tables(kind, ns[0], tframes[0], ns[1], tframes[1]))
            bad = [r for r, ok in rows if not ok]
            if bad:
                raise UnclassifiableResult("site %s disagrees with %s" % (name, bad), cell=v_new)
        folds_out = got if is_self else {_signed(k, n_new): o for k, o in got.items()}
        outcomes.append(SiteOutcome(
            name, kind, p, vs, v_new, ns,
            tuple({_signed(k, n): o for k, o in norm(d, n).items()} for d, n in zip(tframes, ns)),
            n_new, t_new.kind, folds_out, W[kind], tuple(sorted(res.kinds)), rows))

    c0, c1 = curvature_sum(Z), curvature_sum(Zn)
    if c0 != c1:
        raise SectorArithmetic("curvature changed from %d to %d" % (c0, c1))
    removed = sorted(set(Zc.vertices) - survivors)
    seam = sorted({Zn.edge_key(key[o2]) for o1, o2, _ in glued})
    report = SurgeryReport(a, CR.as_dict(), removed, outcomes, markings, ambiguous, (c0, c1), seam)
    return Zn, Sn, report


# the reduction loop

def collapsible_42s(Z: SectorComplex, S: Scaffolding, G: Optional[FoldGraph] = None) -> List[int]:
    """All sinks of the fold graph, which must all be 4_2 points, by vertex id."""
    if G is None:
        G = build_fold_graph(Z, S)
    out = []
    for v, tag in sorted(G.sinks()):
        if G.kinds.get(v) != "4_2":
            raise SinkNot42("sink %s is of type %s" % (v, G.kinds.get(v)), cell=v)
        out.append(v)
    if S.folds and not out:
        raise SinkNot42("fold graph has no sink")
    return out


@dataclass
class StepLog:
    index: int
    a: int
    report: SurgeryReport

    def as_dict(self) -> dict:
        return {"index": self.index, "a": self.a, "report": self.report.as_dict()}


@dataclass
class CoreResult:
    complex: SectorComplex
    scaffolding: Scaffolding
    steps: List[StepLog]

    @property
    def is_core(self) -> bool:
        return not self.scaffolding.folds


def reduce_to_core(Z: SectorComplex, S: Scaffolding, max_steps: Optional[int] = None,
                   chooser: Optional[Callable[[List[int]], int]] = None) -> CoreResult:
    """Collapse 4_2 points until the scaffolding is empty.

    ``chooser`` picks among the collapsible points (default: lowest id).
    Running out of steps raises StepLimit carrying the partial result.
    """
    if max_steps is None:
        max_steps = 10 * max(1, len(S.folds))
    steps: List[StepLog] = []
    while S.folds:
        G = build_fold_graph(Z, S)
        assert_acyclic(G)
        validate(Z, S).raise_if_failed()
        cands = collapsible_42s(Z, S, G)
        if len(steps) >= max_steps:
            raise StepLimit("no core after %d steps" % max_steps,
                            result=CoreResult(Z, S, steps))
        a = chooser(cands) if chooser is not None else cands[0]
        Z, S, report = reduction_step(Z, S, a)
        steps.append(StepLog(len(steps), a, report))
    return CoreResult(Z, S, steps)
