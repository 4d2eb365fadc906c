"""Boundary points of the Bass-Serre tree as eventually periodic geodesic rays.

A boundary point is presented as prefix * (attracting end of engine^orientation)
for a hyperbolic engine.  Rays from an arbitrary vertex are produced lazily by
walking the translated axis of the engine until the distance to the start
vertex increases, which marks the merge with the true geodesic ray.

Equality of two presentations is decided by comparing rays from v0 to the
depth B = 2*(|p1| + |p2|) + 2*lcm(l1, l2) + 2, where |p| is the distance from
v0 to the translated axis vertex and l the translation length; agreement to
depth B forces the eventually periodic rays to coincide.
"""

from __future__ import annotations

import itertools
import math

from .errors import EllipticInput
from .group import BsElement, identity, invert, multiply
from .tree import (
    Classification,
    Vertex,
    act_on_vertex,
    base_vertex,
    children,
    classify,
    distance,
    geodesic,
)

__all__ = [
    "BoundaryPoint",
    "attracting_point",
    "repelling_point",
    "fixed_boundary_points",
    "act_on_boundary",
    "is_transverse",
    "meet",
    "contraction_depth",
    "verify_contraction",
]

INFINITY = math.inf


class BoundaryPoint:
    """prefix * (attracting fixed point of engine^orientation)."""

    __slots__ = ("prefix", "engine", "orientation", "_dir_engine", "_axis_vertex", "_length")

    def __init__(self, prefix: BsElement, engine: BsElement, orientation: int = 1, _axis=None):
        assert orientation in (1, -1)
        self.prefix = prefix
        self.engine = engine
        self.orientation = orientation
        if _axis is None:
            cls = classify(engine)
            if not cls.is_hyperbolic:
                raise EllipticInput(f"engine {engine} is not hyperbolic")
            _axis = (cls.vertex, cls.length)
        self._axis_vertex, self._length = _axis
        self._dir_engine = engine if orientation == 1 else invert(engine)

    @property
    def params(self):
        return self.engine.params

    def translate(self, g: BsElement) -> "BoundaryPoint":
        return BoundaryPoint(
            multiply(g, self.prefix),
            self.engine,
            self.orientation,
            _axis=(self._axis_vertex, self._length),
        )

    def reversed(self) -> "BoundaryPoint":
        """The other end of the engine's axis."""
        return BoundaryPoint(
            self.prefix, self.engine, -self.orientation, _axis=(self._axis_vertex, self._length)
        )

    def _axis_stream(self):
        """Vertices of prefix * (axis ray of engine^orientation), one tree edge apart."""
        e = self._dir_engine
        seg = geodesic(self._axis_vertex, act_on_vertex(e, self._axis_vertex))
        carrier = self.prefix
        while True:
            for i in range(self._length):
                yield act_on_vertex(carrier, seg[i])
            carrier = multiply(carrier, e)

    def ray(self, rho: Vertex):
        """Lazily yield the vertices of the geodesic ray [rho, x), starting at rho."""
        stream = self._axis_stream()
        prev = next(stream)
        prev_d = distance(rho, prev)
        for q in stream:
            d = distance(rho, q)
            if d == prev_d + 1:
                # prev is the projection of rho onto the axis ray: past it,
                # axis vertices lie on [rho, x) in order.
                yield from geodesic(rho, prev)
                yield q
                yield from stream
                return
            prev, prev_d = q, d

    def ray_vertices(self, rho: Vertex, depth: int) -> list:
        """The first depth+1 vertices of [rho, x)."""
        return list(itertools.islice(self.ray(rho), depth + 1))

    def access_depth(self) -> int:
        """Distance from v0 to the translated axis vertex (bounds the ray pre-period)."""
        return act_on_vertex(self.prefix, self._axis_vertex).depth

    def equality_depth(self, other: "BoundaryPoint") -> int:
        l1, l2 = self._length, other._length
        return 2 * (self.access_depth() + other.access_depth()) + 2 * math.lcm(l1, l2) + 2

    def same_point(self, other: "BoundaryPoint") -> bool:
        if self.params != other.params:
            return False
        depth = self.equality_depth(other)
        for u, v in itertools.islice(zip(self.ray(_base(self)), other.ray(_base(self))), depth + 1):
            if u != v:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, BoundaryPoint):
            return NotImplemented
        return self.same_point(other)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None  # equality is geometric, not structural

    def __repr__(self):
        sign = "+" if self.orientation == 1 else "-"
        return f"BoundaryPoint({self.prefix!s} ; {self.engine!s} ; {sign})"


def _base(x: BoundaryPoint) -> Vertex:
    return base_vertex(x.params)


def attracting_point(g: BsElement) -> BoundaryPoint:
    return BoundaryPoint(identity(g.params), g, 1)


def repelling_point(g: BsElement) -> BoundaryPoint:
    return BoundaryPoint(identity(g.params), g, -1)


def fixed_boundary_points(g: BsElement):
    """(attracting, repelling) fixed points of a hyperbolic element."""
    x = attracting_point(g)
    return x, x.reversed()


def act_on_boundary(g: BsElement, x: BoundaryPoint) -> BoundaryPoint:
    return x.translate(g)


def is_transverse(g: BsElement, h: BsElement) -> bool:
    """True iff the boundary fixed-point pairs of g and h are disjoint."""
    xg, yg = fixed_boundary_points(g)
    xh, yh = fixed_boundary_points(h)
    for p in (xg, yg):
        for q in (xh, yh):
            if p.same_point(q):
                return False
    return True


def meet(rho: Vertex, x: BoundaryPoint, y: BoundaryPoint):
    """Depth at which the rays [rho, x) and [rho, y) separate; INFINITY iff x = y."""
    if x.same_point(y):
        return INFINITY
    agree = -1
    for u, v in zip(x.ray(rho), y.ray(rho)):
        if u != v:
            break
        agree += 1
    assert agree >= 0, "rays from a common vertex share at least that vertex"
    return agree


def contraction_depth(g: BsElement, rho: Vertex) -> int:
    """Depth d past which g strictly increases meets with its attracting end.

    d = d(rho, split vertex of [rho, x) and [rho, x')) + 1 for the attracting
    and repelling ends x, x' of g.
    """
    x, x_rep = fixed_boundary_points(g)
    m = meet(rho, x, x_rep)
    assert m is not INFINITY
    return m + 1


def verify_contraction(g: BsElement, rho: Vertex, d: int, span: int = 3) -> bool:
    """Exhaustively check meet(rho, x, g y) > meet(rho, x, y) on meets in [d, d+span].

    Every boundary point y with meet(rho, x, y) = j lies in the shadow of an
    off-ray child at depth j+1, so the check is finite: g maps each such
    shadow inside the depth-(j+1) shadow of the ray.  rho must be v0 here;
    callers conjugate the data to the base point first.
    """
    from .shadows import act_on_shadow, shadow

    assert rho == base_vertex(g.params), "conjugate g and x so that rho is the base vertex"
    x = attracting_point(g)
    ray = x.ray_vertices(rho, d + span + 1)
    for j in range(d, d + span + 1):
        on_ray_next = ray[j + 1]
        target = shadow(on_ray_next)
        for c in children(ray[j]):
            if c == on_ray_next:
                continue
            image = act_on_shadow(g, shadow(c))
            if not image.difference(target).is_empty():
                return False
    return True
