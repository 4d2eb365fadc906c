"""Exact clopen algebra on the tree boundary, based at v0.

A clopen subset of the boundary is a finite union of shadows U_{v0,eta}
(boundary points whose ray from v0 passes through eta) or the complement
of one.  We store the canonical antichain of shadow cylinders together
with a complement flag:

* no stored vertex lies on the geodesic from v0 through another;
* no full sibling family survives (it is collapsed into the parent);
* the empty set is (polarity=False, {}) and the whole boundary is
  (polarity=True, {}).

Cylinders at different depths may coexist, which keeps translation by
long group elements linear instead of refining everything to a common
radius.  A uniform-radius view is available for small radii.

Acting by g sends U_{v0,eta} to the half-tree behind the oriented edge
(g.parent(eta), g.eta); seen from v0 this is either a single cylinder or
the complement of one, depending on which endpoint is closer to v0.
"""

from __future__ import annotations

from .errors import BasePointShadow, BudgetExceeded
from .group import BsElement, BsParams
from .tree import Vertex, act_on_vertex, base_vertex, children

__all__ = [
    "ShadowSet",
    "shadow",
    "empty_set",
    "full_set",
    "union",
    "intersect",
    "complement",
    "difference",
    "is_disjoint",
    "act_on_shadow",
    "UniformShadowView",
    "refine",
]


def _covered(v: Vertex, by_depth: dict) -> bool:
    """True if v or an ancestor of v belongs to the antichain indexed by depth."""
    for d, bucket in by_depth.items():
        if d <= v.depth and v.prefix(d) in bucket:
            return True
    return False


def _bucket(cyls) -> dict:
    out = {}
    for v in cyls:
        out.setdefault(v.depth, set()).add(v)
    return out


def _canonical(params: BsParams, cyls):
    """Reduce a cylinder family to the canonical antichain; detect the full set."""
    deg = params.degree
    by_depth = {}
    for v in sorted(set(cyls), key=Vertex.sort_key):
        if v.depth == 0:
            return frozenset(), True
        if not _covered(v, by_depth):
            by_depth.setdefault(v.depth, set()).add(v)
    if not by_depth:
        return frozenset(), False
    for depth in range(max(by_depth), 0, -1):
        bucket = by_depth.get(depth)
        if not bucket:
            continue
        groups = {}
        for v in bucket:
            groups.setdefault(v.parent(), set()).add(v)
        for parent, grp in groups.items():
            full = deg if parent.depth == 0 else deg - 1
            if len(grp) == full:
                bucket -= grp
                if parent.depth == 0:
                    return frozenset(), True
                by_depth.setdefault(parent.depth, set()).add(parent)
        if not bucket:
            del by_depth[depth]
    return frozenset(v for bucket in by_depth.values() for v in bucket), False


class ShadowSet:
    """A clopen subset of the boundary in canonical antichain form."""

    __slots__ = ("params", "polarity", "directions", "_by_depth")

    def __init__(self, params: BsParams, cylinders=(), polarity: bool = False):
        antichain, is_full = _canonical(params, cylinders)
        if is_full:
            polarity = not polarity
            antichain = frozenset()
        self.params = params
        self.polarity = polarity
        self.directions = antichain
        self._by_depth = _bucket(antichain)

    @property
    def radius(self) -> int:
        """Depth of the deepest stored direction (0 for the trivial sets)."""
        return max(self._by_depth, default=0)

    def is_empty(self) -> bool:
        return not self.polarity and not self.directions

    def is_full(self) -> bool:
        return self.polarity and not self.directions

    def complement(self) -> "ShadowSet":
        out = object.__new__(ShadowSet)
        out.params = self.params
        out.polarity = not self.polarity
        out.directions = self.directions
        out._by_depth = self._by_depth
        return out

    def union(self, other: "ShadowSet") -> "ShadowSet":
        a, b = self, other
        assert a.params == b.params
        if not a.polarity and not b.polarity:
            return ShadowSet(a.params, a.directions | b.directions)
        if not a.polarity and b.polarity:
            return ShadowSet(a.params, _pos_diff(b, a), True)
        if a.polarity and not b.polarity:
            return ShadowSet(a.params, _pos_diff(a, b), True)
        return ShadowSet(a.params, _pos_intersect(a, b), True)

    def intersect(self, other: "ShadowSet") -> "ShadowSet":
        a, b = self, other
        assert a.params == b.params
        if not a.polarity and not b.polarity:
            return ShadowSet(a.params, _pos_intersect(a, b))
        if not a.polarity and b.polarity:
            return ShadowSet(a.params, _pos_diff(a, b))
        if a.polarity and not b.polarity:
            return ShadowSet(a.params, _pos_diff(b, a))
        return ShadowSet(a.params, a.directions | b.directions, True)

    def difference(self, other: "ShadowSet") -> "ShadowSet":
        return self.intersect(other.complement())

    def is_disjoint(self, other: "ShadowSet") -> bool:
        return self.intersect(other).is_empty()

    def __eq__(self, other):
        if not isinstance(other, ShadowSet):
            return NotImplemented
        if self.polarity == other.polarity and self.directions == other.directions:
            return True
        return self.difference(other).is_empty() and other.difference(self).is_empty()

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None

    def contains_point(self, x) -> bool:
        """Membership of a boundary point, decided on the ray [v0, x)."""
        hit = False
        depth = self.radius
        if depth:
            ray = x.ray_vertices(base_vertex(self.params), depth)
            hit = any(
                d <= depth and ray[d] in bucket for d, bucket in self._by_depth.items()
            )
        return hit != self.polarity

    def act(self, g: BsElement) -> "ShadowSet":
        """The translated set g . S, re-expressed from the base point."""
        if not self.directions:
            return self
        pos = []
        neg = []
        for eta in self.directions:
            w = act_on_vertex(g, eta)
            u = act_on_vertex(g, eta.parent())
            if u.depth < w.depth:
                pos.append(w)
            else:
                neg.append(u)
        if not neg:
            out = ShadowSet(self.params, pos)
        else:
            core = _cylinder_chain_intersection(neg)
            if core is None:
                out = full_set(self.params)
            else:
                pos_set = ShadowSet(self.params, pos)
                out = ShadowSet(self.params, _pos_diff_raw(self.params, [core], pos_set), True)
        return out.complement() if self.polarity else out

    def sorted_directions(self) -> list:
        return sorted(self.directions, key=Vertex.sort_key)

    def __repr__(self):
        inner = ", ".join(str(v) for v in self.sorted_directions())
        return f"ShadowSet({'~' if self.polarity else ''}{{{inner}}})"


def _pos_intersect(a: ShadowSet, b: ShadowSet):
    keep = [v for v in a.directions if _covered(v, b._by_depth)]
    keep += [v for v in b.directions if _covered(v, a._by_depth)]
    return keep


def _pos_diff(a: ShadowSet, b: ShadowSet):
    return _pos_diff_raw(a.params, a.directions, b)


def _pos_diff_raw(params: BsParams, cylinders, b: ShadowSet):
    out = []
    for alpha in cylinders:
        if _covered(alpha, b._by_depth):
            continue
        blockers = [v for v in b.directions if alpha.depth < v.depth and alpha.is_ancestor_of(v)]
        if not blockers:
            out.append(alpha)
        else:
            out.extend(_subtract(alpha, blockers))
    return out


def _subtract(node: Vertex, blockers):
    """U(node) minus the blocker cylinders strictly below node, as off-path cylinders."""
    out = []
    for c in children(node):
        bl = [v for v in blockers if c.is_ancestor_of(v)]
        if not bl:
            out.append(c)
            continue
        if any(v == c for v in bl):
            continue
        out.extend(_subtract(c, bl))
    return out


def _cylinder_chain_intersection(vs):
    """Intersection of cylinders: the deepest if they form a nested chain, else None."""
    vs = sorted(set(vs), key=lambda v: v.depth)
    for shallower, deeper in zip(vs, vs[1:]):
        if not shallower.is_ancestor_of(deeper):
            return None
    return vs[-1]


def shadow(eta: Vertex) -> ShadowSet:
    """The basic clopen set U_{v0, eta}."""
    if eta.depth == 0:
        raise BasePointShadow("shadow(v0) is undefined; use full_set() instead")
    return ShadowSet(eta.params, [eta])


def empty_set(params: BsParams) -> ShadowSet:
    return ShadowSet(params, ())


def full_set(params: BsParams) -> ShadowSet:
    return ShadowSet(params, (), True)


def union(a: ShadowSet, b: ShadowSet) -> ShadowSet:
    return a.union(b)


def intersect(a: ShadowSet, b: ShadowSet) -> ShadowSet:
    return a.intersect(b)


def complement(a: ShadowSet) -> ShadowSet:
    return a.complement()


def difference(a: ShadowSet, b: ShadowSet) -> ShadowSet:
    return a.difference(b)


def is_disjoint(a: ShadowSet, b: ShadowSet) -> bool:
    return a.is_disjoint(b)


def act_on_shadow(g: BsElement, s: ShadowSet) -> ShadowSet:
    return s.act(g)


class UniformShadowView:
    """The same clopen set refined to directions at one common radius."""

    __slots__ = ("params", "radius", "directions", "polarity")

    def __init__(self, params, radius, directions, polarity):
        self.params = params
        self.radius = radius
        self.directions = directions
        self.polarity = polarity

    def contains_point(self, x) -> bool:
        if self.radius == 0:
            return self.polarity
        ray = x.ray_vertices(base_vertex(self.params), self.radius)
        return (ray[self.radius] in self.directions) != self.polarity


def refine(s: ShadowSet, radius: int, max_directions: int = 200_000) -> UniformShadowView:
    """Refine to a single radius (semantics preserving); guarded against blowup."""
    if radius < s.radius:
        raise ValueError(f"cannot refine to radius {radius} below the set's radius {s.radius}")
    out = set()
    budget = max_directions
    for v in s.directions:
        frontier = [v]
        for _ in range(radius - v.depth):
            frontier = [c for u in frontier for c in children(u)]
            budget -= len(frontier)
            if budget < 0:
                raise BudgetExceeded("uniform refinement would exceed the direction cap")
        out.update(frontier)
    return UniformShadowView(s.params, radius, frozenset(out), s.polarity)
