"""Exact geometry in the hexagonal lattice.

A point is stored as a pair of rationals (a, b) meaning a*u0 + b*u1, where
u1 is u0 turned by 60 degrees. Only the six lattice directions are needed,
so every rotation and every line intersection stays rational.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

Number = Union[int, Fraction]


def frac(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings. Floats are refused."""
    if isinstance(x, float):
        raise TypeError("floating point value in exact geometry: %r" % (x,))
    return Fraction(x)


@dataclass(frozen=True, order=True)
class Coord:
    a: Fraction
    b: Fraction

    def __init__(self, a: Number = 0, b: Number = 0):
        object.__setattr__(self, "a", frac(a))
        object.__setattr__(self, "b", frac(b))

    def __add__(self, other: "Coord") -> "Coord":
        return Coord(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Coord") -> "Coord":
        return Coord(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "Coord":
        return Coord(-self.a, -self.b)

    def scale(self, q: Number) -> "Coord":
        return Coord(self.a * q, self.b * q)

    def norm2(self) -> Fraction:
        return self.a * self.a + self.a * self.b + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __repr__(self) -> str:
        return "Coord(%s, %s)" % (self.a, self.b)


ORIGIN = Coord(0, 0)

UNIT = (
    Coord(1, 0),
    Coord(0, 1),
    Coord(-1, 1),
    Coord(-1, 0),
    Coord(0, -1),
    Coord(1, -1),
)


def unit(k: int) -> Coord:
    return UNIT[k % 6]


def rotate(p: Coord, k: int) -> Coord:
    a, b = p.a, p.b
    for _ in range(k % 6):
        a, b = -b, a + b
    return Coord(a, b)


def cross(v: Coord, w: Coord) -> Fraction:
    """Signed area form, positive when w is counterclockwise of v.

    This is the Euclidean cross product divided by sin(60), so only its
    sign and ratios are meaningful.
    """
    return v.a * w.b - v.b * w.a


def dot(v: Coord, w: Coord) -> Fraction:
    return v.a * w.a + v.b * w.b + (v.a * w.b + v.b * w.a) / 2


def direction_of(v: Coord) -> Optional[int]:
    """Lattice direction k with v a positive multiple of unit(k), else None."""
    if v.is_zero():
        return None
    for k, u in enumerate(UNIT):
        if cross(u, v) == 0 and dot(u, v) > 0:
            return k
    return None


def length_along(v: Coord, k: int) -> Fraction:
    """Length of v, assumed to be a nonnegative multiple of unit(k)."""
    u = UNIT[k % 6]
    return v.a / u.a if u.a != 0 else v.b / u.b


def reflect(p: Coord) -> Coord:
    """Mirror image across the line spanned by u0."""
    return Coord(p.a + p.b, -p.b)


@dataclass(frozen=True)
class Isometry:
    rot: int = 0
    shift: Coord = ORIGIN

    def __post_init__(self):
        object.__setattr__(self, "rot", self.rot % 6)

    def __call__(self, p: Coord) -> Coord:
        return apply(self, p)

    def direction(self, k: int) -> int:
        return (k + self.rot) % 6

    def inverse(self) -> "Isometry":
        return Isometry(-self.rot, -rotate(self.shift, -self.rot))


IDENTITY = Isometry()


def apply(iso: Isometry, p: Coord) -> Coord:
    return rotate(p, iso.rot) + iso.shift


def compose(f: Isometry, g: Isometry) -> Isometry:
    """The isometry p -> f(g(p))."""
    return Isometry(f.rot + g.rot, apply(f, g.shift))


@dataclass(frozen=True)
class Meet:
    """Result of intersecting two lattice lines."""
    kind: str  # "point", "parallel" or "coincident"
    point: Optional[Coord] = None


def intersect(p1: Coord, d1: int, p2: Coord, d2: int) -> Meet:
    u1, u2 = unit(d1), unit(d2)
    den = cross(u1, u2)
    off = p2 - p1
    if den == 0:
        if cross(off, u1) == 0:
            return Meet("coincident")
        return Meet("parallel")
    s = cross(off, u2) / den
    return Meet("point", p1 + u1.scale(s))


def on_segment(p: Coord, q: Coord, x: Coord) -> bool:
    """True when x lies on the closed segment pq."""
    if cross(q - p, x - p) != 0:
        return False
    return dot(x - p, x - q) <= 0


def segment_param(p: Coord, q: Coord, x: Coord) -> Fraction:
    """Parameter s with x = p + s (q - p), for x on the line pq."""
    d = q - p
    if d.a != 0:
        return (x.a - p.a) / d.a
    return (x.b - p.b) / d.b


def polygon_area2(pts) -> Fraction:
    """Twice the signed area in units of the cross form."""
    n = len(pts)
    return sum((cross(pts[i], pts[(i + 1) % n]) for i in range(n)), Fraction(0))
