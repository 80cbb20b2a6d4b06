"""Sector complexes: lattice polygons glued along edges.

Every face carries its own chart. A half-edge is a pair (face, i) running
from corner i to corner i+1 of that face. Interior half-edges are paired by
``gluing``; the ones on the frontier of the compact region are ``external``.
Transition maps are never stored, they are recovered from the endpoints.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .apartment import (
    IDENTITY, Coord, Isometry, compose, cross, direction_of, dot, length_along, polygon_area2,
    rotate, segment_param, unit,
)
from .errors import (
    BadLinkSize, ComplexError, ExternalVertex, NonConvexFace, NonEcarinate, NonLatticeCut,
    NonLatticeEdge, NonNormal, NotAdjacent, NotSimplyConnected, OddLink,
)

HalfEdge = Tuple[int, int]


@dataclass(frozen=True)
class Face:
    pts: Tuple[Coord, ...]
    verts: Tuple[int, ...]

    def __len__(self):
        return len(self.pts)

    def edge_dir(self, i: int) -> int:
        n = len(self.pts)
        return direction_of(self.pts[(i + 1) % n] - self.pts[i])

    def edge_length(self, i: int) -> Fraction:
        n = len(self.pts)
        v = self.pts[(i + 1) % n] - self.pts[i]
        return length_along(v, direction_of(v))

    def corner_span(self, i: int) -> Tuple[int, int]:
        """(first direction, sector count) of the corner at vertex i."""
        n = len(self.pts)
        d_out = direction_of(self.pts[(i + 1) % n] - self.pts[i])
        d_in = direction_of(self.pts[i - 1] - self.pts[i])
        return d_out, (d_in - d_out) % 6


@dataclass(frozen=True)
class Germ:
    """A direction at a vertex, seen from one face corner.

    ``edge`` is the half-edge leaving the vertex along this germ, or None
    for a germ pointing into the open face.
    """
    face: int
    corner: int
    dir: int
    edge: Optional[HalfEdge]


@dataclass(frozen=True)
class Link:
    vertex: int
    germs: Tuple[Germ, ...]

    @property
    def n(self) -> int:
        return len(self.germs)

    def index(self, face: int, corner: int, d: int) -> int:
        """Position of the germ leaving corner ``corner`` of ``face`` in direction d."""
        d %= 6
        for k, g in enumerate(self.germs):
            if g.face == face and g.corner == corner and g.dir == d:
                return k
        # the closing edge of a corner is listed as the next corner's first germ
        for k, g in enumerate(self.germs):
            if g.face == face and g.corner == corner:
                last = k
        nxt = self.germs[(last + 1) % self.n]
        if nxt.edge is not None:
            return (last + 1) % self.n
        raise KeyError((face, corner, d))

    def edge_positions(self) -> Dict[HalfEdge, int]:
        return {g.edge: k for k, g in enumerate(self.germs) if g.edge is not None}


@dataclass(frozen=True)
class Piece:
    face: int
    start: Coord
    end: Coord
    dir: int

    @property
    def length(self) -> Fraction:
        return length_along(self.end - self.start, self.dir)


@dataclass(frozen=True)
class Trace:
    pieces: Tuple[Piece, ...]
    reason: str  # "vertex", "external", "stop", "length"
    vertex: Optional[int] = None
    corner: Optional[HalfEdge] = None
    edge: Optional[HalfEdge] = None

    @property
    def end(self) -> Piece:
        return self.pieces[-1]

    @property
    def length(self) -> Fraction:
        return sum((p.length for p in self.pieces), Fraction(0))


class SectorComplex:
    """Immutable snapshot of a glued complex.

    Build instances with :func:`build`, which validates everything.
    """

    def __init__(self, faces: Mapping[int, Face], gluing: Mapping[HalfEdge, HalfEdge],
                 external: Iterable[HalfEdge]):
        self.faces: Dict[int, Face] = dict(sorted(faces.items()))
        self.gluing: Dict[HalfEdge, HalfEdge] = dict(gluing)
        self.external = frozenset(external)

    # basic incidence
    def half_edges(self) -> List[HalfEdge]:
        return [(f, i) for f, face in self.faces.items() for i in range(len(face))]

    def partner(self, he: HalfEdge) -> Optional[HalfEdge]:
        return self.gluing.get(he)

    def edge_key(self, he: HalfEdge) -> HalfEdge:
        other = self.gluing.get(he)
        return he if other is None else min(he, other)

    def edges(self) -> List[HalfEdge]:
        return sorted({self.edge_key(h) for h in self.half_edges()})

    def origin(self, he: HalfEdge) -> int:
        f, i = he
        return self.faces[f].verts[i]

    def target(self, he: HalfEdge) -> int:
        f, i = he
        face = self.faces[f]
        return face.verts[(i + 1) % len(face)]

    def segment(self, he: HalfEdge) -> Tuple[Coord, Coord]:
        f, i = he
        face = self.faces[f]
        return face.pts[i], face.pts[(i + 1) % len(face)]

    @cached_property
    def corners(self) -> Dict[int, List[HalfEdge]]:
        out: Dict[int, List[HalfEdge]] = {}
        for f, face in self.faces.items():
            for i, v in enumerate(face.verts):
                out.setdefault(v, []).append((f, i))
        return dict(sorted(out.items()))

    @property
    def vertices(self) -> List[int]:
        return list(self.corners)

    @cached_property
    def boundary_vertices(self) -> frozenset:
        out = set()
        for he in self.external:
            out.add(self.origin(he))
            out.add(self.target(he))
        return frozenset(out)

    def is_interior(self, v: int) -> bool:
        return v not in self.boundary_vertices

    @cached_property
    def interior_vertices(self) -> List[int]:
        return [v for v in self.corners if v not in self.boundary_vertices]

    def position(self, v: int) -> Tuple[int, Coord]:
        """Some (face, chart point) for vertex v, lowest face first."""
        f, i = self.corners[v][0]
        return f, self.faces[f].pts[i]

    def transition(self, he: HalfEdge) -> Isometry:
        """Isometry from the partner face's chart into the chart of ``he``'s face."""
        other = self.gluing[he]
        p, q = self.segment(he)
        r, s = self.segment(other)
        rot = (direction_of(p - q) - direction_of(s - r)) % 6
        return Isometry(rot, q - rotate(r, rot))

    def face_adjacency(self, f: int) -> List[Tuple[HalfEdge, HalfEdge]]:
        face = self.faces[f]
        out = []
        for i in range(len(face)):
            o = self.gluing.get((f, i))
            if o is not None:
                out.append(((f, i), o))
        return out

    def area2(self) -> Fraction:
        return sum((polygon_area2(face.pts) for face in self.faces.values()), Fraction(0))

    # links
    def _next_corner(self, c: HalfEdge) -> Optional[HalfEdge]:
        f, i = c
        n = len(self.faces[f])
        prev = (f, (i - 1) % n)
        return self.gluing.get(prev)

    @cached_property
    def _links(self) -> Dict[int, Link]:
        return {}

    def link(self, v: int) -> Link:
        if v in self.boundary_vertices:
            raise ExternalVertex("vertex %s lies on the external boundary" % v, cell=v)
        cached = self._links.get(v)
        if cached is not None:
            return cached
        start = min(self.corners[v])
        germs = []
        c = start
        while True:
            f, i = c
            d0, k = self.faces[f].corner_span(i)
            germs.append(Germ(f, i, d0, (f, i)))
            for j in range(1, k):
                germs.append(Germ(f, i, (d0 + j) % 6, None))
            c = self._next_corner(c)
            if c == start:
                break
        lk = Link(v, tuple(germs))
        self._links[v] = lk
        return lk

    def n(self, v: int) -> int:
        return self.link(v).n

    def germ_at_edge(self, he: HalfEdge) -> Tuple[int, int]:
        """(vertex, link position) of the germ of half-edge ``he`` at its origin."""
        v = self.origin(he)
        return v, self.link(v).edge_positions()[he]

    def __eq__(self, other):
        return (isinstance(other, SectorComplex) and self.faces == other.faces
                and self.gluing == other.gluing and self.external == other.external)

    def __hash__(self):
        return hash((tuple(self.faces.items()), self.external))


# construction and validation

def build(faces: Mapping[int, Tuple[Sequence[Coord], Sequence[int]]],
          gluings: Iterable[Tuple[HalfEdge, HalfEdge]],
          external: Iterable[HalfEdge]) -> SectorComplex:
    """Validate raw data and return a SectorComplex.

    ``faces`` maps face id to (points, vertex ids); ``gluings`` lists pairs of
    half-edges; ``external`` lists frontier half-edges.
    """
    fs = {}
    for fid, (pts, verts) in faces.items():
        pts = tuple(pts)
        verts = tuple(verts)
        if len(pts) < 3 or len(pts) != len(verts):
            raise NonConvexFace("face %s needs >= 3 corners with one vertex id each" % fid, cell=fid)
        fs[fid] = Face(pts, verts)
    for fid, face in fs.items():
        _check_face(fid, face)

    glue: Dict[HalfEdge, HalfEdge] = {}
    for h1, h2 in gluings:
        h1, h2 = tuple(h1), tuple(h2)
        for h in (h1, h2):
            if h[0] not in fs or not 0 <= h[1] < len(fs[h[0]]):
                raise NonEcarinate("unknown half-edge %s" % (h,), cell=h)
            if h in glue:
                raise NonEcarinate("half-edge %s glued twice" % (h,), cell=h)
        if h1 == h2:
            raise NonEcarinate("half-edge %s glued to itself" % (h1,), cell=h1)
        if fs[h1[0]].edge_length(h1[1]) != fs[h2[0]].edge_length(h2[1]):
            raise NonEcarinate("length mismatch gluing %s to %s" % (h1, h2), cell=h1)
        glue[h1] = h2
        glue[h2] = h1
    ext = set()
    for h in external:
        h = tuple(h)
        if h in glue or h in ext:
            raise NonEcarinate("external half-edge %s is also glued" % (h,), cell=h)
        ext.add(h)
    for f, face in fs.items():
        for i in range(len(face)):
            if (f, i) not in glue and (f, i) not in ext:
                raise NonEcarinate("half-edge %s has no partner" % ((f, i),), cell=(f, i))

    Z = SectorComplex(fs, glue, ext)
    _check_vertices(Z)
    _check_topology(Z)
    return Z


def _check_face(fid: int, face: Face):
    n = len(face.pts)
    if len(set(face.pts)) != n:
        raise NonConvexFace("face %s repeats a point" % fid, cell=fid)
    turning = 0
    for i in range(n):
        if face.edge_dir(i) is None:
            raise NonLatticeEdge("edge %d of face %s is not a lattice direction" % (i, fid),
                                 cell=(fid, i))
    for i in range(n):
        _, k = face.corner_span(i)
        if k == 0 or k > 3:
            raise NonConvexFace("face %s has a reflex or degenerate corner %d" % (fid, i), cell=fid)
        turning += 3 - k
    if turning != 6:
        raise NonConvexFace("face %s is not a simple counterclockwise polygon" % fid, cell=fid)


def _check_vertices(Z: SectorComplex):
    # corners identified by gluing must carry the same vertex id, and vice versa
    uf = _UnionFind()
    for he, other in Z.gluing.items():
        f, i = he
        g, j = other
        n = len(Z.faces[f])
        m = len(Z.faces[g])
        uf.union((f, i), (g, (j + 1) % m))
        uf.union((f, (i + 1) % n), (g, j))
    classes: Dict[HalfEdge, set] = {}
    for v, cs in Z.corners.items():
        for c in cs:
            classes.setdefault(uf.find(c), set()).add(v)
    seen = {}
    for root, ids in classes.items():
        if len(ids) > 1:
            raise NonNormal("glued corners carry different vertex ids %s" % sorted(ids),
                            cell=min(ids))
        (v,) = ids
        if v in seen:
            raise NonNormal("vertex id %s used for separate points" % v, cell=v)
        seen[v] = root

    for v, cs in Z.corners.items():
        outs = [c for c in cs if c in Z.external]
        if v in Z.boundary_vertices:
            # a path of corners from the one with an external outgoing edge
            if len(outs) != 1:
                raise NonNormal("boundary vertex %s is pinched" % v, cell=v)
            c = outs[0]
            visited = [c]
            while True:
                nxt = Z._next_corner(c)
                if nxt is None:
                    break
                if nxt in visited:
                    raise NonNormal("boundary vertex %s has a cyclic link" % v, cell=v)
                visited.append(nxt)
                c = nxt
            if len(visited) != len(cs):
                raise NonNormal("link of boundary vertex %s is disconnected" % v, cell=v)
            continue
        start = min(cs)
        c = start
        count = 0
        total = 0
        while True:
            count += 1
            total += Z.faces[c[0]].corner_span(c[1])[1]
            c = Z._next_corner(c)
            if c == start:
                break
            if count > len(cs):
                raise NonNormal("link of vertex %s does not close" % v, cell=v)
        if count != len(cs):
            raise NonNormal("link of vertex %s is disconnected" % v, cell=v)
        if total % 2:
            raise OddLink("vertex %s has %d sectors" % (v, total), cell=v)
        if total not in (4, 6, 8):
            raise BadLinkSize("vertex %s has %d sectors" % (v, total), cell=v)


def _check_topology(Z: SectorComplex):
    fids = list(Z.faces)
    seen = {fids[0]}
    stack = [fids[0]]
    while stack:
        f = stack.pop()
        for _, (g, _) in Z.face_adjacency(f):
            if g not in seen:
                seen.add(g)
                stack.append(g)
    if len(seen) != len(fids):
        raise NotSimplyConnected("complex is disconnected", cell=min(set(fids) - seen))
    V = len(Z.corners)
    E = len(Z.gluing) // 2 + len(Z.external)
    F = len(Z.faces)
    if V - E + F != 1 or not Z.external:
        raise NotSimplyConnected("Euler characteristic %d, expected a disk" % (V - E + F))


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if ry < rx:
                rx, ry = ry, rx
            self.parent[ry] = rx


# queries

def link_of(Z: SectorComplex, v: int) -> Link:
    return Z.link(v)


def curvature_sum(Z: SectorComplex) -> int:
    return sum(6 - Z.n(v) for v in Z.interior_vertices)


def develop(Z: SectorComplex, path: Sequence[int],
            edges: Optional[Sequence[HalfEdge]] = None) -> List[Isometry]:
    """Charts of consecutive faces placed in the chart of ``path[0]``.

    When two faces share several edges the lowest one is used unless
    ``edges`` gives the half-edge (in the earlier face) to cross.
    """
    if not path:
        return []
    out = [IDENTITY]
    for k in range(1, len(path)):
        f, g = path[k - 1], path[k]
        if edges is not None:
            he = edges[k - 1]
            if he[0] != f or Z.gluing.get(he, (None,))[0] != g:
                raise NotAdjacent("%s does not join faces %s and %s" % (he, f, g), cell=he)
        else:
            cands = [h for h, o in Z.face_adjacency(f) if o[0] == g]
            if not cands:
                raise NotAdjacent("faces %s and %s share no glued edge" % (f, g), cell=(f, g))
            he = cands[0]
        out.append(compose(out[-1], Z.transition(he)))
    return out


def exit_point(face: Face, p: Coord, d: int) -> Tuple[Fraction, int]:
    """Distance along unit(d) from p to the boundary and the edge index hit."""
    u = unit(d)
    n = len(face.pts)
    best = None
    for i in range(n):
        e = face.pts[(i + 1) % n] - face.pts[i]
        c = cross(e, u)
        if c >= 0:
            continue
        s = -cross(e, p - face.pts[i]) / c
        if best is None or s < best[0]:
            best = (s, i)
        elif s == best[0]:
            # collinear edges at a straight corner: keep the one holding the hit
            t = dot(p + u.scale(s) - face.pts[i], e)
            if 0 <= t <= dot(e, e):
                best = (s, i)
    if best is None or best[0] <= 0:
        raise ComplexError("direction %d leaves face at %s immediately" % (d, p))
    return best


def straight_extend(Z: SectorComplex, face: int, p: Coord, d: int,
                    stop: Optional[Callable[[HalfEdge, Coord], bool]] = None,
                    max_length: Optional[Fraction] = None,
                    through: Optional[Callable[[int], bool]] = None,
                    max_pieces: int = 100000) -> Trace:
    """Follow the geodesic from p in direction d.

    ``stop(he, x)`` is asked before crossing half-edge ``he`` at x.
    ``through(v)`` lets the geodesic continue straight through a flat vertex.
    """
    pieces: List[Piece] = []
    used = Fraction(0)
    f = face
    d %= 6
    for _ in range(max_pieces):
        fc = Z.faces[f]
        s, i = exit_point(fc, p, d)
        if max_length is not None and used + s >= max_length:
            x = p + unit(d).scale(max_length - used)
            pieces.append(Piece(f, p, x, d))
            hit = _vertex_at(fc, x)
            if hit is not None and used + s == max_length:
                return Trace(tuple(pieces), "vertex", fc.verts[hit], (f, hit))
            return Trace(tuple(pieces), "length")
        x = p + unit(d).scale(s)
        pieces.append(Piece(f, p, x, d))
        used += s
        hit = _vertex_at(fc, x)
        if hit is not None:
            v = fc.verts[hit]
            if through is not None and Z.is_interior(v) and Z.n(v) == 6 and through(v):
                lk = Z.link(v)
                k = lk.index(f, hit, d + 3)
                g = lk.germs[(k + 3) % 6]
                f, d = g.face, g.dir
                p = Z.faces[f].pts[g.corner]
                continue
            return Trace(tuple(pieces), "vertex", v, (f, hit))
        he = (f, i)
        if he in Z.external:
            return Trace(tuple(pieces), "external", edge=he)
        if stop is not None and stop(he, x):
            return Trace(tuple(pieces), "stop", edge=he)
        other = Z.gluing[he]
        back = Z.transition(he).inverse()
        p = back(x)
        d = back.direction(d)
        f = other[0]
    return Trace(tuple(pieces), "length")


def _vertex_at(face: Face, x: Coord) -> Optional[int]:
    for j, q in enumerate(face.pts):
        if q == x:
            return j
    return None


def point_location(face: Face, x: Coord) -> Tuple[str, int]:
    """("vertex", j), ("edge", i) or ("interior", -1); raises if outside."""
    n = len(face.pts)
    for j, q in enumerate(face.pts):
        if q == x:
            return "vertex", j
    on = None
    for i in range(n):
        c = cross(face.pts[(i + 1) % n] - face.pts[i], x - face.pts[i])
        if c < 0:
            raise ComplexError("point %s outside face" % (x,))
        if c == 0:
            on = i
    if on is not None:
        return "edge", on
    return "interior", -1


# mutable workspace for cuts and surgery

class Mesh:
    """Half-edge workspace used to derive new snapshots.

    Faces keep their original charts. ``parent`` remembers, for each
    half-edge, the half-edge of the source snapshot it was cut from.
    """

    def __init__(self):
        self.faces: Dict[int, List[int]] = {}
        self.org: Dict[int, Coord] = {}
        self.face_of: Dict[int, int] = {}
        self.twin: Dict[int, Optional[int]] = {}
        self.ext: set = set()
        self.vid: Dict[int, Optional[int]] = {}
        self.parent: Dict[int, Optional[HalfEdge]] = {}
        self.tag: Dict[int, object] = {}
        self.root: Dict[int, int] = {}
        self._he = 0
        self._face = 0
        self.max_vid = -1

    @classmethod
    def from_complex(cls, Z: SectorComplex) -> "Mesh":
        m = cls()
        ids = {}
        for f, face in Z.faces.items():
            hs = []
            for i, p in enumerate(face.pts):
                h = m._new_he(f, p, face.verts[i], (f, i))
                ids[(f, i)] = h
                hs.append(h)
            m.faces[f] = hs
            m.root[f] = f
            m._face = max(m._face, f + 1)
        for he, other in Z.gluing.items():
            m.twin[ids[he]] = ids[other]
        for he in Z.external:
            m.ext.add(ids[he])
        m.max_vid = max(Z.corners) if Z.corners else -1
        m.he_ids = ids
        return m

    def _new_he(self, f, p, v, parent) -> int:
        h = self._he
        self._he += 1
        self.org[h] = p
        self.face_of[h] = f
        self.twin[h] = None
        self.vid[h] = v
        self.parent[h] = parent
        return h

    def new_face_id(self) -> int:
        f = self._face
        self._face += 1
        return f

    def next(self, h: int) -> int:
        hs = self.faces[self.face_of[h]]
        return hs[(hs.index(h) + 1) % len(hs)]

    def prev(self, h: int) -> int:
        hs = self.faces[self.face_of[h]]
        return hs[hs.index(h) - 1]

    def end(self, h: int) -> Coord:
        return self.org[self.next(h)]

    def points(self, f: int) -> List[Coord]:
        return [self.org[h] for h in self.faces[f]]

    def add_face(self, pts: Sequence[Coord], vids: Sequence[Optional[int]],
                 fid: Optional[int] = None) -> int:
        if fid is None:
            fid = self.new_face_id()
        else:
            self._face = max(self._face, fid + 1)
        self.faces[fid] = [self._new_he(fid, p, v, None) for p, v in zip(pts, vids)]
        self.root[fid] = fid
        return fid

    def delete_face(self, f: int):
        self.root.pop(f, None)
        for h in self.faces.pop(f):
            t = self.twin.pop(h)
            if t is not None and self.twin.get(t) == h:
                self.twin[t] = None
            self.ext.discard(h)
            del self.org[h], self.face_of[h], self.vid[h], self.parent[h]
            self.tag.pop(h, None)

    def glue(self, h1: int, h2: int):
        self.twin[h1] = h2
        self.twin[h2] = h1

    def unglue(self, h: int):
        t = self.twin[h]
        self.twin[h] = None
        if t is not None:
            self.twin[t] = None

    def split_edge(self, h: int, x: Coord) -> int:
        """Insert a corner at x on half-edge h (and its twin); return the new half."""
        p, q = self.org[h], self.end(h)
        lam = segment_param(p, q, x)
        if not 0 < lam < 1:
            raise ComplexError("split point %s not interior to edge" % (x,))
        f = self.face_of[h]
        h2 = self._new_he(f, x, None, self.parent[h])
        if h in self.tag:
            self.tag[h2] = self.tag[h]
        hs = self.faces[f]
        hs.insert(hs.index(h) + 1, h2)
        if h in self.ext:
            self.ext.add(h2)
        t = self.twin[h]
        if t is not None:
            r, s = self.org[t], self.end(t)
            y = r + (s - r).scale(1 - lam)
            g = self.face_of[t]
            t2 = self._new_he(g, y, None, self.parent[t])
            if t in self.tag:
                self.tag[t2] = self.tag[t]
            gs = self.faces[g]
            gs.insert(gs.index(t) + 1, t2)
            self.glue(h, t2)
            self.glue(h2, t)
        return h2

    def corner_at(self, f: int, x: Coord) -> int:
        """Make x a corner of face f (splitting an edge if needed); return its half-edge."""
        for h in self.faces[f]:
            if self.org[h] == x:
                return h
        for h in list(self.faces[f]):
            p, q = self.org[h], self.end(h)
            if cross(q - p, x - p) == 0:
                lam = segment_param(p, q, x)
                if 0 < lam < 1:
                    return self.split_edge(h, x)
        raise ComplexError("point %s is not on the boundary of face %s" % (x, f))

    def split_chord(self, f: int, hp: int, hq: int) -> int:
        """Split face f along the chord from org(hp) to org(hq); returns the new face."""
        hs = self.faces[f]
        ip, iq = hs.index(hp), hs.index(hq)
        n = len(hs)
        first = [hs[(ip + k) % n] for k in range((iq - ip) % n)]
        second = [hs[(iq + k) % n] for k in range((ip - iq) % n)]
        if len(first) < 2 or len(second) < 2:
            raise ComplexError("chord of face %s runs along its boundary" % f)
        g = self.new_face_id()
        c1 = self._new_he(f, self.org[hq], self.vid[hq], None)
        c2 = self._new_he(g, self.org[hp], self.vid[hp], None)
        self.glue(c1, c2)
        self.faces[f] = first + [c1]
        self.faces[g] = second + [c2]
        self.root[g] = self.root[f]
        for h in self.faces[g]:
            self.face_of[h] = g
        return g

    def chord(self, f: int, o: Coord, d: int) -> Optional[Tuple[Coord, Coord]]:
        """Endpoints of the line through o with direction d inside face f, if it cuts the interior."""
        pts = self.points(f)
        u = unit(d)
        side = [cross(u, p - o) for p in pts]
        if not (any(s > 0 for s in side) and any(s < 0 for s in side)):
            return None
        hits = []
        n = len(pts)
        for i in range(n):
            if side[i] == 0:
                hits.append(pts[i])
            elif side[(i + 1) % n] != 0 and (side[i] > 0) != (side[(i + 1) % n] > 0):
                p, q = pts[i], pts[(i + 1) % n]
                lam = side[i] / (side[i] - side[(i + 1) % n])
                hits.append(p + (q - p).scale(lam))
        hits.sort(key=lambda x: _along(x - o, u))
        return hits[0], hits[-1]

    def split_line(self, f: int, o: Coord, d: int) -> Optional[int]:
        ch = self.chord(f, o, d)
        if ch is None:
            return None
        hp = self.corner_at(f, ch[0])
        hq = self.corner_at(f, ch[1])
        return self.split_chord(f, hp, hq)

    def subfaces(self, root: int) -> List[int]:
        return [g for g in sorted(self.faces) if self.root[g] == root]

    def cut(self, pieces: Iterable[Tuple[int, Coord, Coord]]):
        """Split faces so each segment (root face, p, q) is a union of edges.

        Faces are split along the full chord of the segment's line, which
        keeps every piece convex.
        """
        for f, p, q in pieces:
            d = direction_of(q - p)
            if d is None:
                raise NonLatticeCut("segment %s-%s is not in a lattice direction" % (p, q), cell=f)
            u = unit(d)
            lo, hi = _along(p, u), _along(q, u)
            for g in self.subfaces(f):
                ch = self.chord(g, p, d)
                if ch is None:
                    continue
                a, b = _along(ch[0], u), _along(ch[1], u)
                if min(hi, b) <= max(lo, a):
                    continue
                self.split_line(g, p, d)
            for x in (p, q):
                self.ensure_corner(f, x)

    def contains(self, root: int, x: Coord) -> bool:
        for g in self.subfaces(root):
            try:
                point_location(Face(tuple(self.points(g)), tuple(self.faces[g])), x)
                return True
            except ComplexError:
                continue
        return False

    def cut_clipped(self, root: int, p: Coord, q: Coord):
        """Like :meth:`cut` for one segment that may run beyond the face.

        Only the part of pq inside the root face is cut; endpoints outside
        the face are ignored.
        """
        d = direction_of(q - p)
        if d is None:
            raise NonLatticeCut("segment %s-%s is not in a lattice direction" % (p, q), cell=root)
        u = unit(d)
        lo, hi = _along(p, u), _along(q, u)
        for g in self.subfaces(root):
            ch = self.chord(g, p, d)
            if ch is None:
                continue
            a, b = _along(ch[0], u), _along(ch[1], u)
            if min(hi, b) <= max(lo, a):
                continue
            self.split_line(g, p, d)
        for x in (p, q):
            if self.contains(root, x):
                self.ensure_corner(root, x)

    def ensure_corner(self, root: int, x: Coord):
        for g in self.subfaces(root):
            pts = self.points(g)
            if x in pts:
                return
        for g in self.subfaces(root):
            try:
                kind, _ = point_location(Face(tuple(self.points(g)), tuple(self.faces[g])), x)
            except ComplexError:
                continue
            if kind == "edge":
                self.corner_at(g, x)
                return
            raise NonLatticeCut("segment end %s is inside a face" % (x,), cell=root)
        raise ComplexError("point %s not found in face %s" % (x, root))

    def path_halfedges(self, root: int, p: Coord, q: Coord) -> List[int]:
        """Half-edges covering segment pq of a root face, oriented from p to q, in order."""
        d = direction_of(q - p)
        u = unit(d)
        lo, hi = _along(p, u), _along(q, u)
        found = []
        for g in self.subfaces(root):
            for h in self.faces[g]:
                a, b = self.org[h], self.end(h)
                if cross(u, a - p) != 0 or cross(u, b - p) != 0:
                    continue
                ta, tb = _along(a, u), _along(b, u)
                if min(ta, tb) < lo or max(ta, tb) > hi:
                    continue
                if tb > ta:
                    found.append((ta, h))
                elif self.twin[h] is not None:
                    found.append((tb, self.twin[h]))
        out = []
        for _, h in sorted(found, key=lambda x: x[0]):
            if h not in out:
                out.append(h)
        return out

    def to_complex(self) -> Tuple[SectorComplex, Dict[HalfEdge, Optional[HalfEdge]], Dict[int, HalfEdge]]:
        """Snapshot, map from new half-edges to source half-edges, and he-id map."""
        key = {}
        for f in sorted(self.faces):
            for i, h in enumerate(self.faces[f]):
                key[h] = (f, i)
        uf = _UnionFind()
        for h in key:
            uf.find(h)
        for h, t in self.twin.items():
            if t is not None:
                uf.union(h, self.next(t))
                uf.union(t, self.next(h))
        classes: Dict[int, List[int]] = {}
        for h in sorted(key, key=lambda h: key[h]):
            classes.setdefault(uf.find(h), []).append(h)
        order = sorted(classes.values(), key=lambda hs: min(key[h] for h in hs))
        used = set()
        assigned = {}
        top = max([self.max_vid] + [v for v in self.vid.values() if v is not None])
        pending = []
        for hs in order:
            known = sorted({self.vid[h] for h in hs if self.vid[h] is not None})
            v = next((x for x in known if x not in used), None)
            if v is None:
                pending.append(hs)
                continue
            used.add(v)
            for h in hs:
                assigned[h] = v
        for hs in pending:
            top += 1
            for h in hs:
                assigned[h] = top
        faces = {}
        for f in sorted(self.faces):
            hs = self.faces[f]
            faces[f] = ([self.org[h] for h in hs], [assigned[h] for h in hs])
        glue = []
        for h, t in self.twin.items():
            if t is not None and key[h] < key[t]:
                glue.append((key[h], key[t]))
        ext = [key[h] for h in self.ext]
        Z = build(faces, glue, ext)
        parent = {key[h]: self.parent[h] for h in key}
        return Z, parent, key

    def set_vertex_ids(self, mapping: Dict[HalfEdge, int]):
        for h, v in mapping.items():
            self.vid[h] = v


def _along(v: Coord, u: Coord) -> Fraction:
    from .apartment import dot
    return dot(v, u)


@dataclass
class CutResult:
    complex: SectorComplex
    parent: Dict[HalfEdge, Optional[HalfEdge]]


def cut_pieces(Z: SectorComplex, pieces: Iterable[Tuple[int, Coord, Coord]]) -> CutResult:
    """Refine Z so every given segment (face, p, q) becomes a union of edges."""
    m = Mesh.from_complex(Z)
    m.cut(pieces)
    Z2, parent, _ = m.to_complex()
    return CutResult(Z2, parent)


def cut_segment(Z: SectorComplex, polyline) -> SectorComplex:
    """Refine Z along a Trace or a list of (face, p, q) segments."""
    if isinstance(polyline, Trace):
        polyline = [(pc.face, pc.start, pc.end) for pc in polyline.pieces]
    return cut_pieces(Z, polyline).complex
