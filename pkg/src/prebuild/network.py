"""Refracting spectral networks traced on a construction.

Rays leave the singular points in every non-fold direction and run
straight. Crossing a refracting fold edge they split into the straight
continuation and its mirror image in the normal of the fold. Two rays of
different classes meeting at 120 degrees in a 6_0 point emit a third one.
Everything is exact and processed in creation order.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .apartment import Coord, cross, dot, unit
from .complex import Piece, SectorComplex, exit_point, straight_extend
from .errors import Inconclusive  # noqa: F401  (raised by callers in strict mode)
from .scaffolding import Scaffolding, classify_vertex


@dataclass(frozen=True)
class Budget:
    max_segments: int = 2000
    max_length: Fraction = Fraction(400)
    max_generation: int = 12

    def __post_init__(self):
        object.__setattr__(self, "max_length", Fraction(self.max_length))
        if self.max_segments <= 0 or self.max_length <= 0 or self.max_generation <= 0:
            raise ValueError("budget values must be positive")


@dataclass(frozen=True)
class Ray:
    face: int
    origin: Coord
    direction: int
    generation: int = 0
    vertex: Optional[int] = None  # set when the ray starts at a vertex
    parent: Optional[int] = None  # arc the ray continues
    rule: str = "initial"  # initial, refraction, collision, straight


@dataclass
class Node:
    id: int
    kind: str  # source, flat, refraction, escape, truncated, singular
    face: int
    point: Coord
    vertex: Optional[int] = None
    edge: Optional[Tuple[int, int]] = None  # fold half-edge of a refraction

    def as_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind, "face": self.face,
                "point": [str(self.point.a), str(self.point.b)],
                "vertex": self.vertex, "edge": list(self.edge) if self.edge else None}


@dataclass
class Arc:
    id: int
    tail: int
    head: int
    pieces: Tuple[Piece, ...]
    generation: int
    rule: str
    parent: Optional[int] = None

    @property
    def cls(self) -> int:
        """Foliation class in the chart of the first face."""
        return self.pieces[0].dir % 3

    @property
    def length(self) -> Fraction:
        return sum((p.length for p in self.pieces), Fraction(0))

    def support(self):
        return frozenset((p.face, frozenset((p.start, p.end))) for p in self.pieces)

    def as_dict(self) -> dict:
        return {"id": self.id, "tail": self.tail, "head": self.head, "generation": self.generation,
                "rule": self.rule, "parent": self.parent,
                "pieces": [[p.face, str(p.start.a), str(p.start.b), str(p.end.a), str(p.end.b), p.dir]
                           for p in self.pieces]}


@dataclass
class Collision:
    node: int
    vertex: int
    arcs: Tuple[int, int, int]  # two incoming arcs, then the emitted one
    germs: Tuple[int, int, int]  # link positions at the vertex


@dataclass
class Refraction:
    node: int
    arc: int  # incoming
    outs: Tuple[int, ...]  # continuing arcs, filled as they are traced
    directions: Tuple[int, ...]  # their directions in the far chart
    fold_dir: int  # direction of the fold line in the far chart


@dataclass
class SNGraph:
    nodes: List[Node] = field(default_factory=list)
    arcs: List[Arc] = field(default_factory=list)
    collisions: List[Collision] = field(default_factory=list)
    refractions: List[Refraction] = field(default_factory=list)
    exhausted: bool = False
    merged: int = 0  # arcs dropped as duplicates
    arrivals: Dict[int, List[Tuple[int, int]]] = field(default_factory=dict)  # flat vertex -> (germ, arc)

    def node(self, kind, face, point, vertex=None, edge=None) -> int:
        self.nodes.append(Node(len(self.nodes), kind, face, point, vertex, edge))
        return len(self.nodes) - 1

    def out_arcs(self, n: int) -> List[Arc]:
        return [a for a in self.arcs if a.tail == n]

    def in_arcs(self, n: int) -> List[Arc]:
        return [a for a in self.arcs if a.head == n]

    def as_dict(self) -> dict:
        return {
            "nodes": [n.as_dict() for n in self.nodes],
            "arcs": [a.as_dict() for a in self.arcs],
            "collisions": [{"node": c.node, "vertex": c.vertex, "arcs": list(c.arcs),
                            "germs": list(c.germs)} for c in self.collisions],
            "refractions": [{"node": r.node, "arc": r.arc, "outs": list(r.outs),
                             "directions": list(r.directions), "fold_dir": r.fold_dir}
                            for r in self.refractions],
            "exhausted": self.exhausted,
            "merged": self.merged,
        }


def _kind(Z, S, v) -> Optional[str]:
    if not Z.is_interior(v):
        return None
    return classify_vertex(Z, S, v).kind


def initial_rays(Z: SectorComplex, S: Scaffolding, v: int) -> List[Ray]:
    """One ray per germ at v that is not a fold edge."""
    kind = _kind(Z, S, v)
    if kind is None or kind in ("6_0", "6_2"):
        raise ValueError("vertex %s is not a singularity" % v)
    out = []
    for g in Z.link(v).germs:
        if g.edge is not None and S.is_fold(Z, g.edge):
            continue
        out.append(Ray(g.face, Z.faces[g.face].pts[g.corner], g.dir, 0, v))
    return out


def refract(d: int, c: int) -> Tuple[int, int]:
    """Both continuations of direction d across a fold line of direction c."""
    return d % 6, (2 * c + 3 - d) % 6


class _Tracer:
    def __init__(self, Z: SectorComplex, S: Scaffolding, budget: Budget):
        self.Z, self.S, self.budget = Z, S, budget
        self.G = SNGraph()
        self.queue: deque = deque()
        self.used = Fraction(0)
        self.types = {v: _kind(Z, S, v) for v in Z.interior_vertices}
        self.flat_nodes: Dict[int, int] = {}
        self.emitted = set()
        self.seen = {}
        self.hook = None

    def flat_node(self, v: int) -> int:
        if v not in self.flat_nodes:
            f, x = self.Z.position(v)
            self.flat_nodes[v] = self.G.node("flat", f, x, v)
        return self.flat_nodes[v]

    def push(self, ray: Ray, tail: int, hook=None):
        """Queue a ray; ``hook`` is the refraction or collision record its arc completes."""
        self.queue.append((ray, tail, hook))

    def run(self):
        while self.queue:
            ray, tail, hook = self.queue.popleft()
            self.hook = hook
            self.step(ray, tail)
        return self.G

    def stop(self, he, x) -> bool:
        return self.S.is_fold(self.Z, he)

    def step(self, ray: Ray, tail: int):
        Z, G, b = self.Z, self.G, self.budget
        if len(G.arcs) >= b.max_segments or ray.generation > b.max_generation or self.used >= b.max_length:
            G.exhausted = True
            node = G.node("truncated", ray.face, ray.origin)
            self.add_arc(tail, node, (Piece(ray.face, ray.origin, ray.origin, ray.direction),), ray)
            return
        tr = straight_extend(Z, ray.face, ray.origin, ray.direction,
                             stop=self.stop, max_length=b.max_length - self.used)
        self.used += tr.length
        end = tr.end
        if tr.reason == "length":
            G.exhausted = True
            self.add_arc(tail, G.node("truncated", end.face, end.end), tr.pieces, ray)
        elif tr.reason == "external":
            self.add_arc(tail, G.node("escape", end.face, end.end), tr.pieces, ray)
        elif tr.reason == "stop":
            he = tr.edge
            node = G.node("refraction", end.face, end.end, edge=self.S.folds[Z.edge_key(he)])
            arc = self.add_arc(tail, node, tr.pieces, ray)
            if arc is None:
                return
            back = Z.transition(he).inverse()
            g = Z.gluing[he]
            x, d = back(end.end), back.direction(end.dir)
            c = Z.faces[g[0]].edge_dir(g[1])
            dirs = refract(d, c) if Z.edge_key(he) in self.S.refracting else (d,)
            rec = Refraction(node, arc, (), dirs, c)
            G.refractions.append(rec)
            for d2 in dirs:
                self.push(Ray(g[0], x, d2, ray.generation + 1, None, arc,
                              "straight" if d2 == d else "refraction"), node, rec)
        else:
            self.at_vertex(tr, ray, tail)

    def at_vertex(self, tr, ray: Ray, tail: int):
        Z, G = self.Z, self.G
        v = tr.vertex
        f, hit = tr.corner
        kind = self.types.get(v)
        if not Z.is_interior(v):
            self.add_arc(tail, G.node("escape", f, tr.end.end, v), tr.pieces, ray)
        elif kind == "6_0":
            node = self.flat_node(v)
            arc = self.add_arc(tail, node, tr.pieces, ray)
            if arc is None:
                return
            lk = Z.link(v)
            k_in = lk.index(f, hit, tr.end.dir + 3)
            self.collide(v, node, k_in, arc, ray.generation)
            g = lk.germs[(k_in + 3) % 6]
            self.push(Ray(g.face, Z.faces[g.face].pts[g.corner], g.dir, ray.generation, v, arc,
                          "straight"), node)
        elif kind == "6_2":
            lk = Z.link(v)
            k_in = lk.index(f, hit, tr.end.dir + 3)
            folds = [k for k, g in enumerate(lk.germs)
                     if g.edge is not None and self.S.is_fold(Z, g.edge)]
            k_out = (k_in + 3) % 6
            node = G.node("refraction", f, tr.end.end, v)
            arc = self.add_arc(tail, node, tr.pieces, ray)
            if arc is None:
                return
            if k_in in folds or k_out in folds:
                return  # arrived along the fold line; cannot happen for traced rays
            c = folds[0]
            outs = (k_out, (2 * c + 3 - k_out) % 6)
            # at a vertex the directions are link positions, the fold one included
            rec = Refraction(node, arc, (), outs, c)
            G.refractions.append(rec)
            for k in outs:
                g = lk.germs[k]
                self.push(Ray(g.face, Z.faces[g.face].pts[g.corner], g.dir, ray.generation + 1, v,
                              arc, "straight" if k == k_out else "refraction"), node, rec)
        else:
            self.add_arc(tail, G.node("singular", f, tr.end.end, v), tr.pieces, ray)

    def collide(self, v: int, node: int, k_in: int, arc: int, gen: int):
        prior = self.G.arrivals.setdefault(v, [])
        for k2, arc2 in prior:
            if (k2 - k_in) % 6 not in (2, 4):
                continue
            k3 = ({0, 2, 4} - {0, (k2 - k_in) % 6}).pop()
            k3 = (k_in + k3) % 6
            if (v, k3) in self.emitted:
                continue
            self.emitted.add((v, k3))
            g = self.Z.link(v).germs[k3]
            ray = Ray(g.face, self.Z.faces[g.face].pts[g.corner], g.dir, gen + 1, v, None, "collision")
            rec = Collision(node, v, (arc2, arc, -1), (k2, k_in, k3))
            self.G.collisions.append(rec)
            self.push(ray, node, rec)
        prior.append((k_in, arc))

    def add_arc(self, tail: int, head: int, pieces, ray: Ray) -> Optional[int]:
        G = self.G
        arc = Arc(len(G.arcs), tail, head, tuple(pieces), ray.generation, ray.rule, ray.parent)
        key = (arc.support(), ray.direction % 3)
        if key in self.seen:
            G.merged += 1
            self._wire(self.seen[key])
            G.nodes[head].kind = G.nodes[head].kind if G.nodes[head].kind == "flat" else "merged"
            return None
        self.seen[key] = arc.id
        G.arcs.append(arc)
        self._wire(arc.id)
        return arc.id

    def _wire(self, arc: int):
        hook = self.hook
        if isinstance(hook, Refraction):
            hook.outs = hook.outs + (arc,)
        elif isinstance(hook, Collision):
            hook.arcs = (hook.arcs[0], hook.arcs[1], arc)
        self.hook = None  # only the first arc of a ray completes its record


def trace(Z: SectorComplex, S: Scaffolding, r: Ray, b: Budget = Budget()) -> SNGraph:
    """The branching tree of segments grown from a single ray."""
    t = _Tracer(Z, S, b)
    src = t.G.node("source", r.face, r.origin, r.vertex)
    t.push(r, src)
    return t.run()


def probe_ray(Z: SectorComplex, he: Tuple[int, int]) -> Ray:
    """A ray from inside the face of ``he`` that crosses it at its midpoint."""
    f, i = he
    fc = Z.faces[f]
    d = (fc.edge_dir(i) + 5) % 6  # points out of the face across the edge
    mid = (fc.pts[i] + fc.pts[(i + 1) % len(fc.pts)]).scale(Fraction(1, 2))
    s, _ = exit_point(fc, mid, (d + 3) % 6)
    return Ray(f, mid - unit(d).scale(s / 2), d, 0, None, None, "probe")


def trace_across(Z: SectorComplex, S: Scaffolding, he: Tuple[int, int], b: Budget = Budget()) -> SNGraph:
    """Trace a probe ray across ``he``; at a refracting fold it splits in two there."""
    return trace(Z, S, probe_ray(Z, he), b)


def sources(Z: SectorComplex, S: Scaffolding) -> List[int]:
    """Scaffold singularities and 8_0 points, in vertex order."""
    out = []
    for v in Z.interior_vertices:
        k = _kind(Z, S, v)
        if k not in ("6_0", "6_2"):
            out.append(v)
    return out


def generate_network(Z: SectorComplex, S: Scaffolding, b: Budget = Budget()) -> SNGraph:
    """Closure of all initial rays under refraction and collisions."""
    t = _Tracer(Z, S, b)
    for v in sources(Z, S):
        f, x = Z.position(v)
        src = t.G.node("source", f, x, v)
        for r in initial_rays(Z, S, v):
            t.push(r, src)
    return t.run()


# checks

def check_network(Z: SectorComplex, S: Scaffolding, G: SNGraph) -> List[str]:
    """Local rules; returns a list of violations."""
    bad = []
    for c in G.collisions:
        ks = c.germs
        if Z.n(c.vertex) != 6 or _kind(Z, S, c.vertex) != "6_0":
            bad.append("collision %d not at a 6_0 point" % c.node)
        if len(set(c.arcs)) != 3 or -1 in c.arcs:
            bad.append("collision %d is not trivalent" % c.node)
        if any((ks[i] - ks[j]) % 6 not in (2, 4) for i in range(3) for j in range(i + 1, 3)):
            bad.append("collision %d angles are not 120 degrees" % c.node)
        if len({k % 3 for k in ks}) != 3:
            bad.append("collision %d classes are not distinct" % c.node)
    for r in G.refractions:
        n = G.nodes[r.node]
        limit = 2 if (n.edge is None or Z.edge_key(n.edge) in S.refracting) else 1
        if len(r.directions) != limit:
            bad.append("refraction %d has %d continuations" % (r.node, len(r.directions)))
        if n.vertex is None:
            c = r.fold_dir
            if any(d % 3 == c % 3 for d in r.directions):
                bad.append("refraction %d continues along the fold" % r.node)
            if limit == 2 and sorted(r.directions) != sorted(refract(r.directions[0], c)):
                bad.append("refraction %d directions are not mirror images" % r.node)
    for a in G.arcs:
        for p in a.pieces:
            if p.start == p.end:
                continue
            fc = Z.faces[p.face]
            for i in range(len(fc.pts)):
                he = (p.face, i)
                if not S.is_fold(Z, he) or fc.edge_dir(i) % 3 != p.dir % 3:
                    continue
                q, r = fc.pts[i], fc.pts[(i + 1) % len(fc.pts)]
                if cross(p.end - p.start, q - p.start) != 0:
                    continue
                u = r - q
                t0, t1 = sorted((dot(p.start - q, u), dot(p.end - q, u)))
                if t1 > 0 and t0 < dot(u, u):
                    bad.append("arc %d runs along fold edge %s" % (a.id, he))
    return bad


@dataclass
class BPSResult:
    witness: Optional[List[int]]  # arc ids
    inconclusive: bool

    def as_dict(self) -> dict:
        return {"witness": self.witness, "inconclusive": self.inconclusive}


def _ancestry(G: SNGraph, arc: int) -> Optional[List[int]]:
    """Arcs needed to reach ``arc`` from sources, or None if not compact."""
    by_node_in = {}
    for a in G.arcs:
        by_node_in.setdefault(a.head, []).append(a.id)
    out, stack = set(), [arc]
    while stack:
        a = stack.pop()
        if a in out:
            continue
        out.add(a)
        t = G.nodes[G.arcs[a].tail]
        if t.kind == "source":
            continue
        if t.kind == "refraction":
            stack.extend(i for i in by_node_in.get(t.id, []) if G.arcs[i].id == G.arcs[a].parent)
        elif t.kind == "flat":
            c = next((c for c in G.collisions if c.node == t.id and c.arcs[2] == a), None)
            if c is not None:
                stack.extend(c.arcs[:2])
            elif G.arcs[a].parent is not None:
                stack.append(G.arcs[a].parent)
            else:
                return None
        else:
            return None
    return sorted(out)


def bps_scan(G: SNGraph) -> BPSResult:
    """Look for a compact subgraph.

    Either an arc ends at a singularity, or three arcs arrive at one flat
    point pairwise at 120 degrees; in both cases with compact ancestry.
    """
    for a in G.arcs:
        if G.nodes[a.head].kind == "singular":
            w = _ancestry(G, a.id)
            if w is not None and verify_witness(G, w):
                return BPSResult(w, G.exhausted)
    for v, arr in sorted(G.arrivals.items()):
        for i, (k1, a1) in enumerate(arr):
            for k2, a2 in arr[i + 1:]:
                for k3, a3 in arr:
                    if any((x - y) % 6 not in (2, 4) for x, y in ((k1, k2), (k1, k3), (k2, k3))):
                        continue
                    parts = [_ancestry(G, a) for a in (a1, a2, a3)]
                    if all(p is not None for p in parts):
                        w = sorted(set().union(*parts))
                        if verify_witness(G, w):
                            return BPSResult(w, G.exhausted)
    return BPSResult(None, G.exhausted)


def verify_witness(G: SNGraph, arcs: List[int]) -> bool:
    """Re-check a witness against the node rules, independently of how it was found.

    Tails: a source, the continuation of a witness arc, or the output of a
    collision fed by witness arcs. Heads: a singularity, a point where a
    witness arc continues, a collision input whose output is in the witness,
    or one of three witness arcs meeting pairwise at 120 degrees.
    """
    inside = set(arcs)
    if not inside:
        return False
    for a in arcs:
        arc = G.arcs[a]
        t = G.nodes[arc.tail]
        if t.kind == "source":
            continue
        if arc.parent is not None and arc.parent in inside and G.arcs[arc.parent].head == arc.tail:
            continue
        c = next((c for c in G.collisions if c.node == t.id and c.arcs[2] == a), None)
        if c is None or not set(c.arcs[:2]) <= inside:
            return False
    for a in arcs:
        h = G.nodes[G.arcs[a].head]
        if h.kind == "singular":
            continue
        if any(G.arcs[b].parent == a for b in inside):
            continue
        if any(a in c.arcs[:2] and c.arcs[2] in inside for c in G.collisions):
            continue
        if h.kind == "flat":
            arr = [(k, b) for k, b in G.arrivals.get(h.vertex, []) if b in inside]
            k = next(k for k, b in arr if b == a)
            others = {x for x, b in arr if b != a}
            if {(k + 2) % 6, (k + 4) % 6} <= others:
                continue
        return False
    return True
