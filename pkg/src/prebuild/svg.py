"""SVG pictures of a construction, developed into the plane along a spanning tree."""
from __future__ import annotations

import math
from collections import deque
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .apartment import IDENTITY, Coord, Isometry, compose
from .complex import SectorComplex
from .scaffolding import Scaffolding, classify_vertex

SQRT3_2 = math.sqrt(3) / 2
COLORS = ("#d62728", "#2ca02c", "#1f77b4")  # foliation class 0, 1, 2
SUBSCRIPTS = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def layout(Z: SectorComplex) -> Tuple[Dict[int, Isometry], List[Tuple[int, int]]]:
    """Breadth-first placement from the lowest face id.

    Returns the placement of every face and the tree half-edges crossed.
    """
    place: Dict[int, Isometry] = {}
    tree = []
    for root in Z.faces:
        if root in place:
            continue
        place[root] = IDENTITY
        queue = deque([root])
        while queue:
            f = queue.popleft()
            for i in range(len(Z.faces[f])):
                he = (f, i)
                other = Z.gluing.get(he)
                if other is None or other[0] in place:
                    continue
                place[other[0]] = compose(place[f], Z.transition(he))
                tree.append(he)
                queue.append(other[0])
    return place, tree


def _xy(p: Coord, scale) -> Tuple[float, float]:
    return (float(p.a + p.b / 2) * scale, -float(p.b) * SQRT3_2 * scale)


def _fmt(v: float) -> str:
    s = "%.3f" % v
    return "0.000" if s == "-0.000" else s


def type_label(kind: str) -> str:
    """"8_2'" -> "8₂'"."""
    base, _, sub = kind.partition("_")
    prime = "'" if sub.endswith("'") else ""
    return base + sub.rstrip("'").translate(SUBSCRIPTS) + prime


def render_svg(Z: SectorComplex, S: Scaffolding, network: Optional[dict] = None,
               scale: float = 40.0, labels: bool = True) -> str:
    place, tree = layout(Z)
    tree_edges = {Z.edge_key(h) for h in tree}
    pts = {}
    for f, face in Z.faces.items():
        pts[f] = [_xy(place[f](p), scale) for p in face.pts]
    xs = [x for ps in pts.values() for x, _ in ps]
    ys = [y for ps in pts.values() for _, y in ps]
    pad = scale
    x0, y0 = min(xs) - pad, min(ys) - pad
    w, h = max(xs) - min(xs) + 2 * pad, max(ys) - min(ys) + 2 * pad

    out = ['<svg xmlns="http://www.w3.org/2000/svg" viewBox="%s %s %s %s" width="%s" height="%s">'
           % (_fmt(x0), _fmt(y0), _fmt(w), _fmt(h), _fmt(w), _fmt(h)),
           '<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" '
           'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="black"/></marker></defs>',
           '<g id="faces" fill="#f4f4f4" stroke="#999" stroke-width="0.5">']
    for f in Z.faces:
        out.append('<polygon data-face="%d" points="%s"/>'
                   % (f, " ".join("%s,%s" % (_fmt(x), _fmt(y)) for x, y in pts[f])))
    out.append("</g>")

    # cut edges appear twice; tag both copies alike
    out.append('<g id="cuts" font-size="%s" fill="#777">' % _fmt(scale / 5))
    tag = 0
    for key in sorted(Z.gluing):
        if key != Z.edge_key(key) or key in tree_edges:
            continue
        tag += 1
        for he in (key, Z.gluing[key]):
            f, i = he
            (ax, ay), (bx, by) = pts[f][i], pts[f][(i + 1) % len(pts[f])]
            out.append('<text class="cut" x="%s" y="%s">c%d</text>'
                       % (_fmt((ax + bx) / 2), _fmt((ay + by) / 2), tag))
    out.append("</g>")

    out.append('<g id="folds" stroke="black" stroke-width="%s" marker-end="url(#arrow)">' % _fmt(scale / 12))
    for key, fwd in sorted(S.folds.items()):
        f, i = fwd
        (ax, ay), (bx, by) = pts[f][i], pts[f][(i + 1) % len(pts[f])]
        out.append('<line class="fold" x1="%s" y1="%s" x2="%s" y2="%s"/>'
                   % (_fmt(ax), _fmt(ay), _fmt(bx), _fmt(by)))
    out.append("</g>")

    if network is not None:
        groups: Dict[int, List[str]] = {0: [], 1: [], 2: []}
        for arc in network.get("arcs", []):
            d, cls = [], None
            last = None
            for f, sa, sb, ea, eb, direction in arc["pieces"]:
                iso = place[f]
                p = _xy(iso(Coord(Fraction(sa), Fraction(sb))), scale)
                q = _xy(iso(Coord(Fraction(ea), Fraction(eb))), scale)
                if cls is None:
                    cls = iso.direction(direction) % 3
                d.append(("L" if last == p else "M") + "%s,%s" % (_fmt(p[0]), _fmt(p[1])))
                d.append("L%s,%s" % (_fmt(q[0]), _fmt(q[1])))
                last = q
            groups[cls if cls is not None else 0].append('<path class="sn" data-arc="%d" d="%s"/>' % (arc["id"], " ".join(d)))
        for cls in (0, 1, 2):
            out.append('<g id="sn%d" class="network" stroke="%s" stroke-width="%s" fill="none">'
                       % (cls, COLORS[cls], _fmt(scale / 25)))
            out.extend(groups[cls])
            out.append("</g>")

    out.append('<g id="labels" font-size="%s" font-family="sans-serif">' % _fmt(scale / 3))
    if labels:
        for v in Z.interior_vertices:
            t = classify_vertex(Z, S, v)
            if t.kind in ("6_0", "6_2"):
                continue
            f, x = Z.position(v)
            px, py = _xy(place[f](x), scale)
            out.append('<circle cx="%s" cy="%s" r="%s"/>' % (_fmt(px), _fmt(py), _fmt(scale / 15)))
            out.append('<text class="type" x="%s" y="%s">%s</text>'
                       % (_fmt(px + scale / 10), _fmt(py - scale / 10), type_label(t.kind)))
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
