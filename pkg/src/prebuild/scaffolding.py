"""Fold/open markings, singularity types and the directed fold graph."""
from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .complex import HalfEdge, Mesh, SectorComplex
from .errors import (
    CycleFound, NonStandard, NotInitial, NotRefracting, OrientationViolation, PrebuildError,
    SinkNot42, ValidationFailed,
)

OUT, IN = "out", "in"


@dataclass(frozen=True)
class Scaffolding:
    """Fold edges of a complex.

    ``folds`` maps an edge key (the smaller of the two half-edges) to the
    half-edge that runs from tail to head. Every edge not listed is open.
    """
    folds: Mapping[HalfEdge, HalfEdge] = field(default_factory=dict)
    refracting: FrozenSet[HalfEdge] = frozenset()

    @classmethod
    def from_halfedges(cls, Z: SectorComplex, directed: Iterable[HalfEdge],
                       refracting: Optional[Iterable[HalfEdge]] = None) -> "Scaffolding":
        folds = {}
        for he in directed:
            folds[Z.edge_key(he)] = tuple(he)
        ref = frozenset(folds) if refracting is None else frozenset(Z.edge_key(h) for h in refracting)
        return cls(dict(sorted(folds.items())), ref)

    def is_fold(self, Z: SectorComplex, he: HalfEdge) -> bool:
        return Z.edge_key(he) in self.folds

    def orientation(self, Z: SectorComplex, he: HalfEdge) -> Optional[str]:
        """OUT if the fold on ``he`` points away from its origin, IN if towards, None if open."""
        fwd = self.folds.get(Z.edge_key(he))
        if fwd is None:
            return None
        return OUT if fwd == he else IN

    def reversed(self, Z: SectorComplex, he: HalfEdge) -> "Scaffolding":
        key = Z.edge_key(he)
        folds = dict(self.folds)
        fwd = folds[key]
        folds[key] = Z.gluing[fwd]
        return Scaffolding(folds, self.refracting)

    def without(self, Z: SectorComplex, he: HalfEdge) -> "Scaffolding":
        key = Z.edge_key(he)
        folds = {k: v for k, v in self.folds.items() if k != key}
        return Scaffolding(folds, self.refracting - {key})

    def __len__(self):
        return len(self.folds)


FOLD = "fold"


def mark_mesh(m: Mesh, S: Scaffolding):
    """Tag the forward half-edge of every fold in a mesh built from the same complex."""
    for fwd in S.folds.values():
        m.tag[m.he_ids[fwd]] = FOLD


def scaffolding_from_mesh(Z: SectorComplex, key: Mapping[int, HalfEdge], m: Mesh) -> Scaffolding:
    fwd = [key[h] for h, t in m.tag.items() if t == FOLD and h in key]
    return Scaffolding.from_halfedges(Z, fwd)


# singularity types

KINDS = ("6_0", "6_2", "6_3", "6_4", "8_0", "8_1", "8_2", "8_2'", "4_2")
INITIAL = frozenset({"6_0", "6_2", "8_1", "8_2", "8_2'", "4_2"})
LABEL = {
    "6_0": "6₀", "6_2": "6₂", "6_3": "6₃", "6_4": "6₄", "8_0": "8₀",
    "8_1": "8₁", "8_2": "8₂", "8_2'": "8′₂", "4_2": "4₂",
}

# Template fold germs by counterclockwise link position. Mirror images are
# matched as well, so a template fixes a pattern up to rotation and reflection.
TEMPLATES: Dict[str, Tuple[int, Dict[int, str]]] = {
    "6_0": (6, {}),
    "6_2": (6, {0: IN, 3: OUT}),
    "6_3": (6, {0: IN, 2: IN, 4: OUT}),
    "6_4": (6, {0: IN, 3: OUT, 2: IN, 4: OUT}),
    "8_0": (8, {}),
    "8_1": (8, {0: OUT}),
    "8_2": (8, {0: OUT, 4: OUT}),
    "8_2'": (8, {0: OUT, 1: OUT}),
    "4_2": (4, {0: IN, 2: IN}),
}


@dataclass(frozen=True)
class Frame:
    """Template position x sits at link position offset + x (or offset - x if mirrored)."""
    offset: int
    mirrored: bool

    def to_link(self, x: int, n: int) -> int:
        return (self.offset - x) % n if self.mirrored else (self.offset + x) % n

    def from_link(self, p: int, n: int) -> int:
        return (self.offset - p) % n if self.mirrored else (p - self.offset) % n


@dataclass(frozen=True)
class SingularityType:
    kind: str
    n: int
    folds: Tuple[Tuple[int, str], ...]  # (link position, OUT/IN), sorted
    frame: Frame

    @property
    def label(self) -> str:
        return LABEL[self.kind]

    @property
    def singular(self) -> bool:
        return self.kind not in ("6_0", "6_2")

    def spine(self) -> Tuple[int, int]:
        """Link positions (in, out) of the straight spine of a 6_4 point."""
        assert self.kind == "6_4"
        return self.frame.to_link(0, 6), self.frame.to_link(3, 6)

    def fold_dict(self) -> Dict[int, str]:
        return dict(self.folds)


def _dihedral(n: int):
    for mirrored in (False, True):
        for offset in range(n):
            yield Frame(offset, mirrored)


def classify_pattern(n: int, folds: Mapping[int, str], cell=None) -> SingularityType:
    """Classify a fold pattern given by link position -> OUT/IN."""
    folds = {p % n: o for p, o in folds.items()}
    shape_match = None
    for kind, (tn, tmpl) in TEMPLATES.items():
        if tn != n or len(tmpl) != len(folds):
            continue
        for fr in _dihedral(n):
            mapped = {fr.to_link(x, n): o for x, o in tmpl.items()}
            if mapped == folds:
                return SingularityType(kind, n, tuple(sorted(folds.items())), fr)
            if set(mapped) == set(folds) and shape_match is None:
                shape_match = kind
    pattern = tuple(sorted(folds.items()))
    if shape_match is not None:
        raise OrientationViolation("fold orientations do not fit %s: n=%d %s"
                                   % (shape_match, n, pattern), cell=cell, pattern=pattern, n=n)
    raise NonStandard("pattern outside the standard list: n=%d %s" % (n, pattern),
                      cell=cell, pattern=pattern, n=n)


def local_pattern(Z: SectorComplex, S: Scaffolding, v: int) -> Tuple[int, Dict[int, str]]:
    lk = Z.link(v)
    folds = {}
    for k, g in enumerate(lk.germs):
        if g.edge is not None:
            o = S.orientation(Z, g.edge)
            if o is not None:
                folds[k] = o
    return lk.n, folds


def classify_vertex(Z: SectorComplex, S: Scaffolding, v: int) -> SingularityType:
    n, folds = local_pattern(Z, S, v)
    return classify_pattern(n, folds, cell=v)


@dataclass
class ValidationReport:
    types: Dict[int, SingularityType]
    errors: List[PrebuildError]

    @property
    def ok(self) -> bool:
        return not self.errors

    def singular(self) -> Dict[str, List[int]]:
        out: Dict[str, List[int]] = {}
        for v, t in sorted(self.types.items()):
            if t.singular:
                out.setdefault(t.kind, []).append(v)
        return out

    def raise_if_failed(self):
        if self.errors:
            raise ValidationFailed(self.errors)
        return self

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "types": {str(v): t.kind for v, t in sorted(self.types.items())},
            "singular": self.singular(),
            "errors": [{"error": e.name, "cell": repr(e.cell), "message": str(e)} for e in self.errors],
        }


def validate(Z: SectorComplex, S: Scaffolding) -> ValidationReport:
    types: Dict[int, SingularityType] = {}
    errors: List[PrebuildError] = []
    for v in Z.interior_vertices:
        try:
            types[v] = classify_vertex(Z, S, v)
        except PrebuildError as e:
            errors.append(e)
    for key, fwd in S.folds.items():
        if key not in Z.gluing and key not in Z.external:
            errors.append(NonStandard("fold edge %s is not an edge of the complex" % (key,), cell=key))
            continue
        if Z.edge_key(fwd) != key:
            errors.append(NonStandard("fold orientation %s does not match edge %s" % (fwd, key), cell=key))
        if key not in S.refracting:
            errors.append(NotRefracting("fold edge %s is not refracting" % (key,), cell=key))
        for v in (Z.origin(key), Z.target(key)):
            if not Z.is_interior(v):
                errors.append(NonStandard("fold edge %s reaches the external boundary" % (key,), cell=v))
    return ValidationReport(types, errors)


# fold graph

Node = Tuple[int, str]  # (vertex, "" | "spine" | "side")


@dataclass(frozen=True)
class FoldArc:
    tail: Node
    head: Node
    edges: Tuple[HalfEdge, ...]  # half-edges from tail to head


@dataclass
class FoldGraph:
    nodes: List[Node]
    arcs: List[FoldArc]
    kinds: Dict[int, str] = field(default_factory=dict)

    def out_arcs(self, node: Node) -> List[FoldArc]:
        return [a for a in self.arcs if a.tail == node]

    def in_arcs(self, node: Node) -> List[FoldArc]:
        return [a for a in self.arcs if a.head == node]

    def sinks(self) -> List[Node]:
        return [x for x in self.nodes if self.in_arcs(x) and not self.out_arcs(x)]


def _node_for(types: Mapping[int, SingularityType], v: int, pos: int) -> Node:
    t = types.get(v)
    if t is not None and t.kind == "6_4":
        return (v, "spine" if pos in t.spine() else "side")
    return (v, "")


def _is_through(types, v) -> bool:
    t = types.get(v)
    return t is not None and t.kind == "6_2"


def build_fold_graph(Z: SectorComplex, S: Scaffolding) -> FoldGraph:
    """Singular points joined by maximal fold segments.

    Vertices that fail to classify are kept as plain nodes so that a
    corrupted input still yields a graph to inspect.
    """
    types: Dict[int, SingularityType] = {}
    for v in Z.interior_vertices:
        try:
            types[v] = classify_vertex(Z, S, v)
        except PrebuildError:
            pass
    nodes = set()
    arcs = []
    for v in Z.interior_vertices:
        if _is_through(types, v):
            continue
        lk = Z.link(v)
        for k, g in enumerate(lk.germs):
            if g.edge is None or S.orientation(Z, g.edge) != OUT:
                continue
            tail = _node_for(types, v, k)
            edges = [g.edge]
            he = g.edge
            while True:
                w = Z.target(he)
                if not Z.is_interior(w):
                    head = (w, "")
                    break
                wl = Z.link(w)
                back = Z.gluing.get(he)
                pos = wl.edge_positions()[back]
                if _is_through(types, w):
                    nxt = wl.germs[(pos + 3) % 6].edge
                    edges.append(nxt)
                    he = nxt
                    continue
                head = _node_for(types, w, pos)
                break
            nodes.update([tail, head])
            arcs.append(FoldArc(tail, head, tuple(edges)))
    arcs.sort(key=lambda a: (a.tail, a.head, a.edges))
    kinds = {v: t.kind for v, t in types.items()}
    return FoldGraph(sorted(nodes), arcs, kinds)


def assert_acyclic(G: FoldGraph) -> List[Node]:
    """Topological order of the nodes (sinks last); raises CycleFound with a witness."""
    ts = graphlib.TopologicalSorter()
    for x in G.nodes:
        ts.add(x)
    for a in G.arcs:
        ts.add(a.head, a.tail)
    try:
        ts.prepare()
    except graphlib.CycleError as e:
        cyc = list(e.args[1])
        arcs = {(a.tail, a.head): a for a in G.arcs}
        if (cyc[0], cyc[1]) not in arcs:
            cyc.reverse()  # the listing may run against the arcs
        witness = [arcs[(x, y)] for x, y in zip(cyc, cyc[1:])]
        raise CycleFound("directed loop of %d fold arcs" % len(witness), cell=witness[0].tail,
                         witness=witness)
    order = []
    while ts.is_active():
        ready = sorted(ts.get_ready())
        order.extend(ready)
        ts.done(*ready)
    return order


def find_collapsible_42(Z: SectorComplex, S: Scaffolding, G: Optional[FoldGraph] = None) -> Optional[int]:
    if not S.folds:
        return None
    if G is None:
        G = build_fold_graph(Z, S)
    assert_acyclic(G)
    sinks = sorted(G.sinks())
    if not sinks:
        raise SinkNot42("fold graph has no sink")
    v, _ = sinks[0]
    if G.kinds.get(v) != "4_2":
        raise SinkNot42("lowest sink %s is of type %s" % (v, G.kinds.get(v)), cell=v)
    return v


@dataclass(frozen=True)
class PostCaustic:
    vertices: Tuple[int, ...]
    kinds: Tuple[str, ...]
    edges: Tuple[HalfEdge, ...]

    @property
    def counts(self) -> Tuple[int, int]:
        n8 = sum(1 for k in self.kinds if k.startswith("8"))
        n4 = sum(1 for k in self.kinds if k.startswith("4"))
        return n8, n4


def validate_initial(Z: SectorComplex, S: Scaffolding,
                     report: Optional[ValidationReport] = None) -> List[PostCaustic]:
    if report is None:
        report = validate(Z, S)
    report.raise_if_failed()
    for v, t in sorted(report.types.items()):
        if t.kind not in INITIAL:
            raise NotInitial("vertex %s is %s, not an initial type" % (v, t.kind), cell=v)
    G = build_fold_graph(Z, S)
    adj: Dict[int, List[FoldArc]] = {}
    for a in G.arcs:
        adj.setdefault(a.tail[0], []).append(a)
        adj.setdefault(a.head[0], []).append(a)
    chains = []
    used = set()
    ends = [v for v, t in sorted(report.types.items()) if t.kind == "8_1"]
    for start in ends:
        if any(start == c.vertices[-1] for c in chains):
            continue
        verts = [start]
        edges: List[HalfEdge] = []
        prev = None
        cur = start
        while True:
            nxt = [a for a in adj.get(cur, []) if id(a) != prev]
            if not nxt:
                break
            a = nxt[0]
            used.add(id(a))
            prev = id(a)
            edges.extend(a.edges)
            cur = a.head[0] if a.tail[0] == cur else a.tail[0]
            verts.append(cur)
            if report.types[cur].kind == "8_1":
                break
        kinds = tuple(report.types[v].kind for v in verts)
        chain = PostCaustic(tuple(verts), kinds, tuple(edges))
        if kinds[-1] != "8_1" or len(verts) < 3:
            raise NotInitial("fold chain from %s does not end at an 8_1 point" % start, cell=start,
                             chain=chain)
        for i, k in enumerate(kinds):
            if (i % 2 == 0) != k.startswith("8"):
                raise NotInitial("chain %s does not alternate 8-fold and 4-fold points" % (verts,),
                                 cell=verts[i], chain=chain)
        chains.append(chain)
    if len(used) != len(G.arcs):
        left = [a for a in G.arcs if id(a) not in used]
        raise NotInitial("fold arcs outside any post-caustic", cell=left[0].tail, arcs=left)
    return chains
