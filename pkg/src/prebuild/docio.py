"""JSON documents holding a complex, its scaffolding and run results.

Rationals are written as "num/den" strings. Serialization is canonical:
sorted keys, faces and edges in id order, so equal inputs give equal bytes.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .apartment import Coord
from .complex import SectorComplex, build
from .errors import DanglingReference, NonRational, SchemaError
from .scaffolding import Scaffolding

FORMAT = "prebuild/1"
_RATIONAL = re.compile(r"^-?\d+(/[1-9]\d*)?$")


@dataclass
class Document:
    complex: SectorComplex
    scaffolding: Scaffolding
    network: Optional[dict] = None
    steps: Optional[List[dict]] = None
    extra: Dict[str, Any] = field(default_factory=dict)  # other report sections


def rat(x) -> str:
    x = Fraction(x)
    return "%d/%d" % (x.numerator, x.denominator)


def parse_rat(s, where: str) -> Fraction:
    if not isinstance(s, str) or not _RATIONAL.match(s):
        raise NonRational("%s: expected a \"num/den\" string, got %r" % (where, s), cell=where)
    return Fraction(s)


# encoding

def complex_dict(Z: SectorComplex) -> dict:
    faces = []
    for fid, face in Z.faces.items():
        faces.append({
            "id": fid,
            "points": [[rat(p.a), rat(p.b)] for p in face.pts],
            "vertices": list(face.verts),
        })
    gluings = sorted([list(h), list(o)] for h, o in Z.gluing.items() if h < o)
    return {
        "vertices": sorted(Z.vertices),
        "faces": faces,
        "gluings": gluings,
        "external": sorted(list(h) for h in Z.external),
    }


def scaffolding_dict(Z: SectorComplex, S: Scaffolding) -> dict:
    edges = []
    for key, fwd in sorted(S.folds.items()):
        edges.append({
            "from": Z.origin(fwd),
            "to": Z.target(fwd),
            "face": fwd[0],
            "index": fwd[1],
            "mark": "fold",
            "orient": "from-to",
            "refracting": key in S.refracting,
        })
    return {"edges": edges}


def to_dict(doc: Document) -> dict:
    out = {
        "format": FORMAT,
        "complex": complex_dict(doc.complex),
        "scaffolding": scaffolding_dict(doc.complex, doc.scaffolding),
    }
    if doc.network is not None:
        out["network"] = doc.network
    if doc.steps is not None:
        out["steps"] = doc.steps
    for k, v in sorted(doc.extra.items()):
        out[k] = v
    return out


def serialize(doc: Document) -> str:
    return json.dumps(to_dict(doc), sort_keys=True, indent=1, ensure_ascii=True) + "\n"


# decoding

def _need(obj, key, typ, where):
    if not isinstance(obj, dict):
        raise SchemaError("%s: expected an object" % where, cell=where)
    if key not in obj:
        raise SchemaError("%s: missing field %r" % (where, key), cell=where)
    val = obj[key]
    if not isinstance(val, typ) or (typ is int and isinstance(val, bool)):
        raise SchemaError("%s.%s: expected %s" % (where, key, getattr(typ, "__name__", typ)),
                          cell="%s.%s" % (where, key))
    return val


def _half_edge(x, where):
    if (not isinstance(x, list) or len(x) != 2
            or not all(isinstance(i, int) and not isinstance(i, bool) for i in x)):
        raise SchemaError("%s: a half-edge is a pair [face, index]" % where, cell=where)
    return (x[0], x[1])


def parse_complex(c: dict) -> SectorComplex:
    faces = {}
    for k, f in enumerate(_need(c, "faces", list, "complex")):
        where = "complex.faces[%d]" % k
        fid = _need(f, "id", int, where)
        pts = _need(f, "points", list, where)
        verts = _need(f, "vertices", list, where)
        if fid in faces:
            raise SchemaError("%s: duplicate face id %d" % (where, fid), cell=where)
        coords = []
        for j, p in enumerate(pts):
            if not isinstance(p, list) or len(p) != 2:
                raise SchemaError("%s.points[%d]: expected a pair" % (where, j), cell=where)
            coords.append(Coord(parse_rat(p[0], "%s.points[%d][0]" % (where, j)),
                                parse_rat(p[1], "%s.points[%d][1]" % (where, j))))
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in verts):
            raise SchemaError("%s.vertices: expected integers" % where, cell=where)
        faces[fid] = (coords, verts)
    declared = _need(c, "vertices", list, "complex")
    used = {v for _, vs in faces.values() for v in vs}
    if set(declared) != used:
        missing = sorted(used - set(declared)) or sorted(set(declared) - used)
        raise DanglingReference("complex.vertices does not match the face corners: %s" % missing,
                                cell=missing[0])

    def known(h, where):
        if h[0] not in faces or not 0 <= h[1] < len(faces[h[0]][0]):
            raise DanglingReference("%s: no half-edge %s" % (where, list(h)), cell=h)
        return h

    glue = []
    for k, pair in enumerate(_need(c, "gluings", list, "complex")):
        where = "complex.gluings[%d]" % k
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError("%s: expected a pair of half-edges" % where, cell=where)
        glue.append((known(_half_edge(pair[0], where), where), known(_half_edge(pair[1], where), where)))
    ext = [known(_half_edge(h, "complex.external[%d]" % k), "complex.external[%d]" % k)
           for k, h in enumerate(_need(c, "external", list, "complex"))]
    partnered = {h for pair in glue for h in pair} | set(ext)
    for fid, (pts, _) in sorted(faces.items()):
        for i in range(len(pts)):
            if (fid, i) not in partnered:
                raise DanglingReference("half-edge [%d, %d] has no gluing partner" % (fid, i),
                                        cell=(fid, i))
    return build(faces, glue, ext)


def parse_scaffolding(Z: SectorComplex, s: dict) -> Scaffolding:
    directed, refr = [], []
    for k, e in enumerate(_need(s, "edges", list, "scaffolding")):
        where = "scaffolding.edges[%d]" % k
        he = (_need(e, "face", int, where), _need(e, "index", int, where))
        if he not in Z.gluing and he not in Z.external:
            raise DanglingReference("%s: no half-edge %s" % (where, list(he)), cell=he)
        if (Z.origin(he), Z.target(he)) != (_need(e, "from", int, where), _need(e, "to", int, where)):
            raise DanglingReference("%s: half-edge %s does not run from %s to %s"
                                    % (where, list(he), e["from"], e["to"]), cell=he)
        if _need(e, "mark", str, where) != "fold":
            raise SchemaError("%s.mark: only fold edges are listed" % where, cell=where)
        if _need(e, "orient", str, where) != "from-to":
            raise SchemaError("%s.orient: expected \"from-to\"" % where, cell=where)
        directed.append(he)
        if _need(e, "refracting", bool, where):
            refr.append(he)
    return Scaffolding.from_halfedges(Z, directed, refr)


def from_dict(d: dict) -> Document:
    if not isinstance(d, dict):
        raise SchemaError("document: expected an object")
    if d.get("format") != FORMAT:
        raise SchemaError("document.format: expected %r, got %r" % (FORMAT, d.get("format")))
    Z = parse_complex(_need(d, "complex", dict, "document"))
    S = parse_scaffolding(Z, _need(d, "scaffolding", dict, "document"))
    net = d.get("network")
    if net is not None and not isinstance(net, dict):
        raise SchemaError("document.network: expected an object")
    steps = d.get("steps")
    if steps is not None and not isinstance(steps, list):
        raise SchemaError("document.steps: expected a list")
    extra = {k: v for k, v in d.items()
             if k not in ("format", "complex", "scaffolding", "network", "steps")}
    return Document(Z, S, net, steps, extra)


def parse(text: str) -> Document:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError("line %d column %d: %s" % (e.lineno, e.colno, e.msg), cell=e.lineno)
    return from_dict(d)


def load(path) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def save(doc: Document, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(doc))
