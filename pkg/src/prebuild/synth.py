"""Synthetic constructions with prescribed post-caustics.

Fixtures are grown backwards from a flat disk with 8_0 points. Each
``uncollapse`` slits the surface along two straight segments from an 8-fold
point and sews in a pair of rhombi glued along their two sides at the
obtuse corner; this is exactly what a reduction step removes.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .apartment import Coord, unit
from .complex import HalfEdge, Mesh, SectorComplex, build, straight_extend
from .errors import BadPattern, PrebuildError
from .scaffolding import (
    FOLD, OUT, Scaffolding, classify_vertex, mark_mesh, scaffolding_from_mesh, validate,
    validate_initial,
)


def fan(n: int, size=1) -> SectorComplex:
    """n equilateral triangles of side ``size`` around vertex 0, rim external."""
    size = Fraction(size)
    faces = {}
    glue = []
    ext = []
    for k in range(n):
        faces[k] = ([Coord(0, 0), Coord(size, 0), Coord(0, size)], [0, 1 + k, 1 + (k + 1) % n])
        glue.append(((k, 2), ((k + 1) % n, 0)))
        ext.append((k, 1))
    return build(faces, glue, ext)


def fans(count: int, size=1) -> SectorComplex:
    """``count`` eight-triangle fans glued rim to rim in a row.

    Fan j has center vertex 100*j; the rim of its triangle 4 is glued to the
    rim of triangle 0 of fan j+1.
    """
    size = Fraction(size)
    faces = {}
    glue = []
    ext = set()
    rim = {}
    for j in range(count):
        c = 100 * j
        for k in range(8):
            fid = 8 * j + k
            faces[fid] = ([Coord(0, 0), Coord(size, 0), Coord(0, size)],
                          [c, c + 1 + k, c + 1 + (k + 1) % 8])
            glue.append(((fid, 2), (8 * j + (k + 1) % 8, 0)))
            ext.add((fid, 1))
    for j in range(count - 1):
        a, b = (8 * j + 4, 1), (8 * (j + 1), 1)
        ext.discard(a)
        ext.discard(b)
        glue.append((a, b))
        # identify the rim endpoints
        va = faces[a[0]][1]
        vb = faces[b[0]][1]
        rim[vb[1]] = va[2]
        rim[vb[2]] = va[1]
    for fid, (pts, vs) in faces.items():
        faces[fid] = (pts, [rim.get(v, v) for v in vs])
    return build(faces, glue, sorted(ext))


def lattice_disk(radius: int = 2) -> SectorComplex:
    """Flat hexagonal disk of unit triangles, all in one chart."""
    def inside(a, b):
        return max(abs(a), abs(b), abs(a + b)) <= radius
    ids = {}
    for a in range(-radius, radius + 1):
        for b in range(-radius, radius + 1):
            if inside(a, b):
                ids[(a, b)] = len(ids)
    faces = {}
    for (a, b) in sorted(ids):
        for tri in (((a, b), (a + 1, b), (a, b + 1)),
                    ((a, b), (a, b + 1), (a - 1, b + 1))):
            if all(inside(*q) for q in tri):
                faces[len(faces)] = ([Coord(*q) for q in tri], [ids[q] for q in tri])
    edge = {}
    for f, (_, vs) in faces.items():
        for i in range(3):
            edge[(vs[i], vs[(i + 1) % 3])] = (f, i)
    glue, ext = [], []
    for (u, v), he in sorted(edge.items()):
        other = edge.get((v, u))
        if other is None:
            ext.append(he)
        elif he < other:
            glue.append((he, other))
    return build(faces, glue, ext)


@dataclass
class Uncollapse:
    complex: SectorComplex
    scaffolding: Scaffolding
    a: int
    b: int
    b2: int
    t: Tuple[int, int]


def slit_trace(Z: SectorComplex, S: Scaffolding, t: int, pos: int, length):
    """Straight path of the given length from vertex t along link position ``pos``."""
    g = Z.link(t).germs[pos]
    p = Z.faces[g.face].pts[g.corner]

    def flat(v):
        return Z.n(v) == 6 and classify_vertex(Z, S, v).kind in ("6_0", "6_2")

    def crossing(he, x):
        return True

    tr = straight_extend(Z, g.face, p, g.dir, stop=crossing, max_length=Fraction(length), through=flat)
    if tr.reason not in ("length", "vertex") or tr.length != length:
        raise PrebuildError("slit from %s is blocked (%s)" % (t, tr.reason), cell=t)
    if tr.reason == "vertex" and not Z.is_interior(tr.vertex):
        raise PrebuildError("slit from %s reaches the boundary" % t, cell=t)
    return tr


def uncollapse(Z: SectorComplex, S: Scaffolding, t: int, p1: int, L1, p2: int, L2,
               fold_copy: Optional[int] = None) -> Uncollapse:
    """Open Z along two slits from the 8-fold point t and sew in a pillow.

    The slit along link position p1 has length L1 and ends at b; the one
    along p2 has length L2 and ends at b2. The new 4-fold point a is joined
    to b by a fold of length L2 and to b2 by a fold of length L1, both
    pointing at a. ``fold_copy`` (1 or 2) additionally marks one copy of
    the second slit as a fold running from b2 back towards t.
    """
    L1, L2 = Fraction(L1), Fraction(L2)
    n = Z.n(t)
    if n != 8 or (p2 - p1) % 8 != 4:
        raise PrebuildError("uncollapse needs an 8-fold point and opposite slits", cell=t)
    tr1 = slit_trace(Z, S, t, p1, L1)
    tr2 = slit_trace(Z, S, t, p2, L2)
    m = Mesh.from_complex(Z)
    mark_mesh(m, S)
    m.cut([(pc.face, pc.start, pc.end) for pc in tr1.pieces + tr2.pieces])
    path1 = [h for pc in tr1.pieces for h in m.path_halfedges(pc.face, pc.start, pc.end)]
    path2 = [h for pc in tr2.pieces for h in m.path_halfedges(pc.face, pc.start, pc.end)]

    def cuts(path):
        out, acc = [], Fraction(0)
        for h in path:
            v = m.end(h) - m.org[h]
            acc += _len(v)
            out.append(acc)
        return out

    c1, c2 = cuts(path1), cuts(path2)
    assert c1[-1] == L1 and c2[-1] == L2
    twins1 = [m.twin[h] for h in path1]
    twins2 = [m.twin[h] for h in path2]
    for h in path1 + path2:
        m.unglue(h)
        m.tag.pop(h, None)
        m.tag.pop(m.twin.get(h), None)
    for h in twins1 + twins2:
        m.tag.pop(h, None)

    lenF, lenF2 = L2, L1
    u0, u2 = unit(0), unit(2)
    # rhombus one: a, b, t1, b2 counterclockwise
    a1, b1, t1, bb1 = Coord(0, 0), u0.scale(lenF), u0.scale(lenF) + u2.scale(lenF2), u2.scale(lenF2)
    pts1 = [a1, b1]
    pts1 += [b1 + u2.scale(L1 - x) for x in reversed(c1[:-1])]
    pts1 += [t1]
    pts1 += [t1 - u0.scale(x) for x in c2[:-1]]
    pts1 += [bb1]
    r1 = m.add_face(pts1, [None] * len(pts1))
    # rhombus two: a, b2, t2, b counterclockwise
    a2, bb2, t2, b2 = Coord(0, 0), u0.scale(lenF2), u0.scale(lenF2) + u2.scale(lenF), u2.scale(lenF)
    pts2 = [a2, bb2]
    pts2 += [bb2 + u2.scale(L2 - x) for x in reversed(c2[:-1])]
    pts2 += [t2]
    pts2 += [t2 - u0.scale(x) for x in c1[:-1]]
    pts2 += [b2]
    r2 = m.add_face(pts2, [None] * len(pts2))

    h1 = m.faces[r1]
    h2 = m.faces[r2]
    k1, k2 = len(path1), len(path2)
    # rhombus one: h1[1..k1] run b -> t1 and meet path1 (t -> b) reversed
    for i, h in enumerate(h1[1:1 + k1]):
        m.glue(h, path1[k1 - 1 - i])
    for i, h in enumerate(h1[1 + k1:1 + k1 + k2]):
        m.glue(h, twins2[i])
    for i, h in enumerate(h2[1:1 + k2]):
        m.glue(h, path2[k2 - 1 - i])
    for i, h in enumerate(h2[1 + k2:1 + k2 + k1]):
        m.glue(h, twins1[i])
    f_r1, f_r2 = h1[0], h2[-1]  # a -> b in one, b -> a in two
    g_r1, g_r2 = h1[-1], h2[0]  # b2 -> a in one, a -> b2 in two
    m.glue(f_r1, f_r2)
    m.glue(g_r1, g_r2)
    m.tag[f_r2] = FOLD
    m.tag[g_r1] = FOLD
    if fold_copy == 1:
        for h in h1[1 + k1:1 + k1 + k2]:
            m.tag[m.twin[h]] = FOLD
    elif fold_copy == 2:
        for h in h2[1:1 + k2]:
            m.tag[h] = FOLD
    Z2, _, key = m.to_complex()
    S2 = scaffolding_from_mesh(Z2, key, m)
    va = Z2.origin(key[h1[0]])
    vb = Z2.origin(key[h1[1]])
    vb2 = Z2.origin(key[h1[-1]])
    vt1 = Z2.origin(key[h1[1 + k1]])
    vt2 = Z2.origin(key[h2[1 + k2]])
    return Uncollapse(Z2, S2, va, vb, vb2, (vt1, vt2))


def _len(v: Coord) -> Fraction:
    from .apartment import direction_of, length_along
    return length_along(v, direction_of(v))


# fixtures from patterns

PATTERN_KINDS = {"8_1", "8_2", "8_2'", "4_2"}


@dataclass
class FixtureSpec:
    pattern: Sequence[str]
    lengths: Sequence
    padding: object = 2

    def check(self):
        p = list(self.pattern)
        if len(p) < 3 or len(p) % 2 == 0 or p[0] != "8_1" or p[-1] != "8_1":
            raise BadPattern("pattern must run 8_1, 4_2, ..., 4_2, 8_1: %s" % (p,))
        for i, k in enumerate(p):
            if k not in PATTERN_KINDS:
                raise BadPattern("unknown type %s" % k)
            if i % 2 == 1 and k != "4_2":
                raise BadPattern("odd positions must be 4_2: %s" % (p,))
            if i % 2 == 0 and 0 < i < len(p) - 1 and k not in ("8_2", "8_2'"):
                raise BadPattern("inner 8-fold points must be 8_2 or 8_2': %s" % (p,))
        if len(self.lengths) != len(p) - 1:
            raise BadPattern("need %d lengths, got %d" % (len(p) - 1, len(self.lengths)))
        if any(Fraction(x) <= 0 for x in self.lengths):
            raise BadPattern("lengths must be positive")


@dataclass
class Fixture:
    complex: SectorComplex
    scaffolding: Scaffolding
    chain: List[int] = field(default_factory=list)


def _first_lengths(pattern, s):
    """Lengths of the leading fold segment after each prepending stage."""
    m = len(pattern) // 2
    F = [s[0]]
    for k in range(m - 1):
        x = pattern[2 * k + 2]
        nxt = s[2 * k + 2] + F[k] if x == "8_2" else s[2 * k + 2] - F[k]
        if nxt <= 0:
            raise BadPattern("lengths cannot realise 8_2' at position %d" % (2 * k + 2))
        F.append(nxt)
    return F


def grow(Z: SectorComplex, S: Scaffolding, center: int, pattern, lengths, p1: int = 0) -> Tuple[SectorComplex, Scaffolding, List[int]]:
    """Grow a post-caustic with the given pattern at an 8_0 point ``center``."""
    s = [Fraction(x) for x in lengths]
    m = len(pattern) // 2
    F = _first_lengths(pattern, s)
    u = uncollapse(Z, S, center, p1, s[-1], (p1 + 4) % 8, F[m - 1])
    Z, S = u.complex, u.scaffolding
    chain = [u.b, u.a, u.b2]
    for k in range(m - 2, -1, -1):
        x = pattern[2 * k + 2]
        E = chain[0]
        lk = Z.link(E)
        pf = next(i for i, g in enumerate(lk.germs)
                  if g.edge is not None and S.orientation(Z, g.edge) == OUT)
        last_err = None
        done = False
        if x == "8_2":
            options = [((pf + 4) % 8, pf, None)]
        else:
            options = [((pf + e) % 8, (pf + e + 4) % 8, c) for e in (1, -1) for c in (1, 2)]
        for q1, q2, copy in options:
            try:
                u = uncollapse(Z, S, E, q1, s[2 * k + 1], q2, F[k], fold_copy=copy)
            except PrebuildError as e:
                last_err = e
                continue
            rep = validate(u.complex, u.scaffolding)
            if not rep.ok:
                last_err = rep.errors[0]
                continue
            Z, S = u.complex, u.scaffolding
            chain = [u.b, u.a] + [u.b2 if x == "8_2" else u.b2] + chain[1:]
            done = True
            break
        if not done:
            raise BadPattern("could not realise %s: %s" % (x, last_err))
    return Z, S, chain


def synthesize_fixture(spec: FixtureSpec) -> Fixture:
    spec.check()
    s = [Fraction(x) for x in spec.lengths]
    size = 2 * sum(s) + Fraction(spec.padding)
    Z = fans(1, size)
    S = Scaffolding()
    Z, S, chain = grow(Z, S, 0, list(spec.pattern), s)
    validate_initial(Z, S)
    return Fixture(Z, S, chain)


def synthesize_multi(specs: Sequence[FixtureSpec], padding=2) -> Fixture:
    """Several disjoint post-caustics, one per fan of a glued row of fans."""
    for sp in specs:
        sp.check()
    size = max(2 * sum(Fraction(x) for x in sp.lengths) for sp in specs) + Fraction(padding)
    Z = fans(len(specs), size)
    S = Scaffolding()
    chain = []
    for j, sp in enumerate(specs):
        Z, S, ch = grow(Z, S, 100 * j, list(sp.pattern), sp.lengths)
        chain += ch
    validate_initial(Z, S)
    return Fixture(Z, S, chain)


def random_spec(rng: random.Random, max_len: int = 7, denominators=(1, 2, 3, 4)) -> FixtureSpec:
    m = rng.randint(1, (max_len - 1) // 2)
    pattern = ["8_1"]
    for k in range(m):
        pattern.append("4_2")
        pattern.append("8_1" if k == m - 1 else rng.choice(["8_2", "8_2'"]))
    while True:
        lengths = [Fraction(rng.randint(1, 4 * d), d) for d in
                   (rng.choice(denominators) for _ in range(2 * m))]
        if len(set(lengths)) < len(lengths):
            continue  # repeated lengths make coincident lines
        try:
            _first_lengths(pattern, lengths)
            spec = FixtureSpec(pattern, lengths)
            synthesize_fixture(spec)
            return spec
        except BadPattern:
            continue
