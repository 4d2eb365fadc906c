"""The Bass-Serre tree of BS(m,n): vertices g<a>, adjacency, geodesics, classification.

Vertices are cosets g<a>.  The canonical representative is the Britton
normal form with the final a-exponent set to 0, so it either is the
identity or ends in a t-letter; the number of its t-letters equals the
distance from the base vertex.  The tree is (|m| + n)-regular.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EllipticInput
from .group import BsElement, BsParams, _Builder, identity, invert, multiply, power

__all__ = [
    "Vertex",
    "base_vertex",
    "act_on_vertex",
    "neighbors",
    "children",
    "distance",
    "geodesic",
    "Classification",
    "classify",
    "build_ball_vertices",
    "sphere",
]


class Vertex:
    """A vertex of the tree, i.e. a coset g<a>, held by its canonical representative."""

    __slots__ = ("elem", "_hash", "_pfx")

    def __init__(self, elem: BsElement):
        # callers must pass a representative with trailing exponent 0
        self.elem = elem
        self._hash = hash(("V", elem._hash))
        self._pfx = None

    @classmethod
    def of(cls, g: BsElement) -> "Vertex":
        """The vertex g<a>: strip the unconstrained trailing a-exponent."""
        if g.sylls:
            last = g.sylls[-1]
            if last[1] != 0:
                g = BsElement(g.params, g.lead, g.sylls[:-1] + ((last[0], 0),))
        elif g.lead != 0:
            g = identity(g.params)
        return cls(g)

    @property
    def params(self) -> BsParams:
        return self.elem.params

    @property
    def depth(self) -> int:
        """Distance from the base vertex <a>."""
        return len(self.elem.sylls)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Vertex):
            return NotImplemented
        return self._hash == other._hash and self.elem == other.elem

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def prefix(self, depth: int) -> "Vertex":
        """The vertex at the given depth on the geodesic from the base vertex."""
        if depth == self.depth:
            return self
        if self._pfx is None:
            self._pfx = {}
        v = self._pfx.get(depth)
        if v is None:
            e = self.elem
            head = e.sylls[:depth]
            if head:
                head = head[:-1] + ((head[-1][0], 0),)
                v = Vertex(BsElement(e.params, e.lead, head))
            else:
                v = base_vertex(e.params)
            self._pfx[depth] = v
        return v

    def parent(self) -> "Vertex":
        assert self.depth > 0, "the base vertex has no parent"
        return self.prefix(self.depth - 1)

    def is_ancestor_of(self, other: "Vertex") -> bool:
        """Strictly between the base vertex and `other` on its geodesic (or equal)."""
        return self.depth <= other.depth and other.prefix(self.depth) == self

    def sort_key(self):
        return (self.depth, self.elem.lead, self.elem.sylls)

    def __str__(self):
        return str(self.elem)

    def __repr__(self):
        return f"Vertex({self.elem!s})"


def base_vertex(params: BsParams) -> Vertex:
    return Vertex(identity(params))


def act_on_vertex(g: BsElement, v: Vertex) -> Vertex:
    """Left translation g . h<a> = gh<a>."""
    return Vertex.of(multiply(g, v.elem))


def _extend(v: Vertex, j: int, delta: int) -> Vertex:
    """The vertex of v.elem * a^j * t^delta."""
    b = _Builder(v.params, v.elem.lead, v.elem.sylls)
    b.push_a(j)
    b.push_t(delta)
    if b.sylls:
        b.sylls[-1] = (b.sylls[-1][0], 0)
    else:
        b.lead = 0
    return Vertex(b.build())


def neighbors(v: Vertex) -> list:
    """The |m| + n adjacent vertices: g a^j t <a> (j mod n) and g a^j t^-1 <a> (j mod |m|)."""
    p = v.params
    out = [_extend(v, j, 1) for j in range(p.n)]
    out += [_extend(v, j, -1) for j in range(abs(p.m))]
    return out


def children(v: Vertex) -> list:
    """Neighbors pointing away from the base vertex (all of them for v0)."""
    if v.depth == 0:
        return neighbors(v)
    p = v.params
    last = v.elem.sylls[-1][0]
    out = []
    for j in range(p.n):
        # appending t after a^0 pinches back to the parent when the last letter is t^-1
        if not (last == -1 and j == 0):
            out.append(_extend(v, j, 1))
    for j in range(abs(p.m)):
        if not (last == 1 and j == 0):
            out.append(_extend(v, j, -1))
    return out


def distance(v: Vertex, w: Vertex) -> int:
    if v == w:
        return 0
    rel = multiply(invert(v.elem), w.elem)
    return len(Vertex.of(rel).elem.sylls)


def geodesic(v: Vertex, w: Vertex) -> list:
    """The vertices from v to w inclusive (unique in a tree)."""
    rel = Vertex.of(multiply(invert(v.elem), w.elem))
    out = [v]
    for d in range(1, rel.depth + 1):
        out.append(act_on_vertex(v.elem, rel.prefix(d)))
    return out


@dataclass(frozen=True)
class Classification:
    """Tree-isometry type of a group element: elliptic or hyperbolic.

    BS(m,n) acts on its Bass-Serre tree without edge inversions, so no
    inversion case exists; classify() asserts this.
    """

    kind: str  # "elliptic" | "hyperbolic"
    length: int  # translation length, 0 iff elliptic
    vertex: Vertex  # a fixed vertex (elliptic) or an axis vertex (hyperbolic)

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind == "hyperbolic"


def classify(g: BsElement) -> Classification:
    """Scan the geodesic [v0, g v0] for the minimal displacement.

    The minimum over that geodesic is the translation length and any
    minimiser lies on the characteristic set (axis resp. fixed tree).
    """
    v0 = base_vertex(g.params)
    path = geodesic(v0, act_on_vertex(g, v0))
    best = None
    best_v = None
    for x in path:
        d = distance(x, act_on_vertex(g, x))
        if best is None or d < best:
            best, best_v = d, x
        if d == 0:
            break
    if best == 0:
        return Classification("elliptic", 0, best_v)
    gg = multiply(g, g)
    assert distance(best_v, act_on_vertex(gg, best_v)) == 2 * best, (
        "edge inversion detected; BS(m,n) must act without inversions"
    )
    return Classification("hyperbolic", best, best_v)


def build_ball_vertices(params: BsParams, radius: int) -> list:
    """All vertices within the given distance of v0, in BFS order."""
    v0 = base_vertex(params)
    out = [v0]
    seen = {v0}
    frontier = [v0]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for w in neighbors(v):
                if w not in seen:
                    seen.add(w)
                    out.append(w)
                    nxt.append(w)
        frontier = nxt
    return out


def sphere(params: BsParams, radius: int) -> list:
    """The vertices at distance exactly `radius` from v0."""
    if radius == 0:
        return [base_vertex(params)]
    frontier = [base_vertex(params)]
    for _ in range(radius):
        frontier = [c for v in frontier for c in children(v)]
    return frontier
