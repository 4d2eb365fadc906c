"""The Hecke algebra of the pair <a> <= BS(m,n): exact structure constants.

Basis elements are double cosets KgK.  The product is

    v_h v_g = sum over left cosets g'K in KgK of  R(h)/R(hg') v_{hg'}

and the involution is v_g* = (R(g)/L(g)) v_{g^-1}.  The canonical
representative of a double coset is obtained by stripping the trailing
a-exponent (vertex rule) and taking the minimum of the finitely many
left translates a^i rep over one orbit period, under the deterministic
order (syllable count, leading exponent, syllables).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .completion import index_L, index_R
from .group import BsElement, BsParams, from_letters, identity, invert, multiply
from .tree import Vertex, build_ball_vertices

__all__ = [
    "DoubleCoset",
    "double_coset_of",
    "left_cosets_in",
    "right_cosets_in",
    "HeckeElement",
    "hecke_multiply",
    "hecke_star",
    "hecke_rep_matrix",
    "right_coset_ball",
    "RightCoset",
    "compression_dictionary",
]


@dataclass(frozen=True)
class DoubleCoset:
    rep: BsElement
    cached_R: int
    cached_L: int

    def __str__(self):
        return str(self.rep)


@lru_cache(maxsize=1 << 14)
def double_coset_of(g: BsElement) -> DoubleCoset:
    """Canonical double coset KgK of an element."""
    base = Vertex.of(g).elem
    r = index_R(base)
    a = from_letters(base.params, [("a", 1)])
    best = base
    cur = base
    for _ in range(r - 1):
        cur = Vertex.of(multiply(a, cur)).elem
        if cur.sort_key() < best.sort_key():
            best = cur
    return DoubleCoset(best, r, index_L(best))


def left_cosets_in(dc: DoubleCoset) -> list:
    """The cached_R left coset representatives a^i rep, trailing exponent stripped."""
    a = from_letters(dc.rep.params, [("a", 1)])
    out = [dc.rep]
    cur = dc.rep
    for _ in range(dc.cached_R - 1):
        cur = Vertex.of(multiply(a, cur)).elem
        out.append(cur)
    assert len(set(out)) == dc.cached_R
    return out


def right_cosets_in(dc: DoubleCoset) -> list:
    """The cached_L right coset representatives rep a^j, leading exponent stripped."""
    a = from_letters(dc.rep.params, [("a", 1)])
    out = [RightCoset.of(dc.rep)]
    cur = dc.rep
    for _ in range(dc.cached_L - 1):
        cur = multiply(cur, a)
        out.append(RightCoset.of(cur))
    assert len(set(out)) == dc.cached_L
    return out


class HeckeElement:
    """Exact rational combination of double cosets."""

    __slots__ = ("params", "terms")

    def __init__(self, params: BsParams, terms=None):
        self.params = params
        self.terms = {}
        if terms:
            for dc, c in terms.items() if isinstance(terms, dict) else terms:
                self._add(dc, c)

    def _add(self, dc: DoubleCoset, c):
        c = Fraction(c)
        if not c:
            return
        new = self.terms.get(dc, 0) + c
        if new:
            self.terms[dc] = new
        else:
            self.terms.pop(dc, None)

    @classmethod
    def basis_vector(cls, dc: DoubleCoset) -> "HeckeElement":
        return cls(dc.rep.params, {dc: Fraction(1)})

    @classmethod
    def of(cls, g: BsElement) -> "HeckeElement":
        return cls.basis_vector(double_coset_of(g))

    @classmethod
    def one(cls, params: BsParams) -> "HeckeElement":
        return cls.of(identity(params))

    def __add__(self, other):
        out = HeckeElement(self.params, dict(self.terms))
        for dc, c in other.terms.items():
            out._add(dc, c)
        return out

    def __sub__(self, other):
        out = HeckeElement(self.params, dict(self.terms))
        for dc, c in other.terms.items():
            out._add(dc, -c)
        return out

    def scale(self, c) -> "HeckeElement":
        c = Fraction(c)
        return HeckeElement(self.params, {dc: v * c for dc, v in self.terms.items()})

    def __rmul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out = HeckeElement(self.params)
        for dc1, c1 in self.terms.items():
            for dc2, c2 in other.terms.items():
                prod = hecke_multiply(dc1, dc2)
                for dc, c in prod.terms.items():
                    out._add(dc, c1 * c2 * c)
        return out

    def star(self) -> "HeckeElement":
        out = HeckeElement(self.params)
        for dc, c in self.terms.items():
            out._add(double_coset_of(invert(dc.rep)), c * Fraction(dc.cached_R, dc.cached_L))
        return out

    def __eq__(self, other):
        if not isinstance(other, HeckeElement):
            return NotImplemented
        return self.params == other.params and self.terms == other.terms

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0].rep.sort_key())

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c} * v[{dc}]" for dc, c in self.sorted_terms())


def hecke_multiply(h: DoubleCoset, g: DoubleCoset) -> HeckeElement:
    """v_h v_g expanded in the double-coset basis, exact."""
    out = HeckeElement(h.rep.params)
    for gp in left_cosets_in(g):
        z = multiply(h.rep, gp)
        out._add(double_coset_of(z), Fraction(h.cached_R, index_R(z)))
    return out


def hecke_star(dc: DoubleCoset) -> HeckeElement:
    """v_g* = (R(g)/L(g)) v_{g^-1}."""
    return HeckeElement(
        dc.rep.params,
        {double_coset_of(invert(dc.rep)): Fraction(dc.cached_R, dc.cached_L)},
    )


@lru_cache(maxsize=1 << 14)
def _right_coset_rep(g: BsElement) -> BsElement:
    """Canonical representative of Kg.

    Left translates a^i g are scanned over one vertex-orbit period; the
    translate whose vertex is orbit-minimal is chosen, and its trailing
    exponent is reduced modulo the carry that a full period pushes through
    the word (translates sharing a vertex differ exactly by that carry).
    """
    if not g.sylls:
        return identity(g.params)
    a = from_letters(g.params, [("a", 1)])
    s = index_R(g)
    best = g
    best_key = Vertex.of(g).sort_key()
    cur = g
    for _ in range(s - 1):
        cur = multiply(a, cur)
        key = Vertex.of(cur).sort_key()
        if key < best_key:
            best, best_key = cur, key
    shifted = multiply(from_letters(g.params, [("a", s)]), best)
    carry = shifted.sylls[-1][1] - best.sylls[-1][1]
    assert carry != 0 and shifted.sylls[:-1] == best.sylls[:-1]
    tau = best.sylls[-1][1] % abs(carry)
    return BsElement(g.params, best.lead, best.sylls[:-1] + ((best.sylls[-1][0], tau),))


@dataclass(frozen=True)
class RightCoset:
    """A coset Kg, held by a canonical representative (orbit-minimal vertex,
    trailing exponent reduced modulo the period carry)."""

    rep: BsElement

    @classmethod
    def of(cls, g: BsElement) -> "RightCoset":
        return cls(_right_coset_rep(g))

    def sort_key(self):
        return self.rep.sort_key()

    def __str__(self):
        return str(self.rep)


def right_coset_ball(params: BsParams, radius: int) -> list:
    """All cosets Kg with d(g^-1 <a>, <a>) <= radius; closed under short left multiplications."""
    return [RightCoset.of(invert(v.elem)) for v in build_ball_vertices(params, radius)]


def hecke_rep_matrix(x, basis: list):
    """Matrix of a Hecke element on the l2(K\\Gamma) truncation spanned by `basis`.

    Columns whose image leaves the basis are excluded from the interior
    mask; the representation is multiplicative there.
    """
    from .numerics import SparseOperator

    if isinstance(x, DoubleCoset):
        x = HeckeElement.basis_vector(x)
    index = {rc: i for i, rc in enumerate(basis)}
    cols = [dict() for _ in basis]
    interior = [True] * len(basis)
    for dc, coeff in x.terms.items():
        reps = right_cosets_in(dc)
        for j, rc in enumerate(basis):
            for hp in reps:
                target = RightCoset.of(multiply(hp.rep, rc.rep))
                i = index.get(target)
                if i is None:
                    interior[j] = False
                    continue
                col = cols[j]
                col[i] = col.get(i, 0) + coeff
    return SparseOperator(basis, cols, interior)


def compression_dictionary(g: BsElement):
    """(R(g) * L(g), KgK): the compression scalar sqrt(R L), carried squared."""
    dc = double_coset_of(g)
    return index_R(g) * index_L(g), dc
