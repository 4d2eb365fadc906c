"""Exact arithmetic in BS(m,n) = <a, t | t a^m t^-1 = a^n> via Britton normal forms.

An element is stored as

    a^{r0} t^{e1} a^{r1} ... t^{ek} a^{rk},   e_i in {+1, -1},

with three normalisation rules that make the form unique:

* no pinch survives, i.e. no subword t a^{mq} t^-1 and no subword
  t^-1 a^{nq} t (signed q);
* the exponent standing immediately in front of a letter t is reduced
  into [0, n), the one in front of t^-1 into [0, |m|), carries being
  pushed rightward through the t-letter (a^{nq} t = t a^{mq} and
  a^{mq} t^-1 = t^-1 a^{nq});
* the final exponent r_k is unconstrained.

Group equality is equality of these forms.  Exponents are plain Python
integers, so pinch rewriting may grow them without overflow.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InvalidParams, ParamsMismatch, ParseError

__all__ = [
    "BsParams",
    "BsElement",
    "identity",
    "from_letters",
    "normalize",
    "multiply",
    "invert",
    "power",
    "conjugate",
    "t_exponent_sum",
    "parse",
]


@dataclass(frozen=True)
class BsParams:
    """The pair (m, n) with the standing hypothesis 2 <= |m| <= n."""

    m: int
    n: int

    def __post_init__(self):
        if not (2 <= abs(self.m) <= self.n):
            raise InvalidParams(f"need 2 <= |m| <= n, got (m, n) = ({self.m}, {self.n})")

    @property
    def degree(self) -> int:
        """Valency |m| + n of the Bass-Serre tree."""
        return abs(self.m) + self.n


class _Builder:
    """Mutable normal-form accumulator; letters are pushed left to right."""

    __slots__ = ("params", "m", "n", "am", "lead", "sylls")

    def __init__(self, params: BsParams, lead: int = 0, sylls=()):
        self.params = params
        self.m = params.m
        self.n = params.n
        self.am = abs(params.m)
        self.lead = lead
        self.sylls = list(sylls)

    def push_a(self, j):
        if j == 0:
            return
        if self.sylls:
            e, r = self.sylls[-1]
            self.sylls[-1] = (e, r + j)
        else:
            self.lead += j

    def push_t(self, delta):
        sylls = self.sylls
        if sylls and sylls[-1][0] == -delta:
            r = sylls[-1][1]
            mod = self.m if delta < 0 else self.n
            if r % mod == 0:
                # pinch: t a^{mq} t^-1 -> a^{nq}  /  t^-1 a^{nq} t -> a^{mq}
                sylls.pop()
                self.push_a((self.n if delta < 0 else self.m) * (r // mod))
                return
        r = sylls[-1][1] if sylls else self.lead
        if delta > 0:
            s = r % self.n
            carry = self.m * ((r - s) // self.n)
        else:
            s = r % self.am
            carry = self.n * ((r - s) // self.m)
        if sylls:
            sylls[-1] = (sylls[-1][0], s)
        else:
            self.lead = s
        sylls.append((delta, carry))

    def push_element(self, h: "BsElement"):
        self.push_a(h.lead)
        for e, r in h.sylls:
            self.push_t(e)
            self.push_a(r)

    def build(self) -> "BsElement":
        return BsElement(self.params, self.lead, tuple(self.sylls))


class BsElement:
    """An element of BS(m,n) in Britton normal form.  Immutable and hashable."""

    __slots__ = ("params", "lead", "sylls", "_hash")

    def __init__(self, params: BsParams, lead: int, sylls: tuple):
        self.params = params
        self.lead = lead
        self.sylls = sylls
        self._hash = hash((params.m, params.n, lead, sylls))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, BsElement):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.lead == other.lead
            and self.sylls == other.sylls
            and self.params == other.params
        )

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __mul__(self, other):
        if isinstance(other, BsElement):
            return multiply(self, other)
        return NotImplemented

    def __pow__(self, k):
        return power(self, k)

    def __len__(self):
        """Number of t-letters (syllable length)."""
        return len(self.sylls)

    @property
    def is_identity(self) -> bool:
        return self.lead == 0 and not self.sylls

    def inverse(self) -> "BsElement":
        return invert(self)

    def sort_key(self):
        """Deterministic total order key used for canonical coset choices."""
        return (len(self.sylls), self.lead, self.sylls)

    def blocks(self):
        """Yield ('a', exponent) / ('t', sign) blocks left to right, skipping a^0."""
        if self.lead:
            yield ("a", self.lead)
        for e, r in self.sylls:
            yield ("t", e)
            if r:
                yield ("a", r)

    def __str__(self):
        parts = []
        for kind, v in self.blocks():
            if kind == "a":
                parts.append("a" if v == 1 else f"a^{v}")
            else:
                parts.append("t" if v == 1 else "t^-1")
        return " ".join(parts) if parts else "e"

    def __repr__(self):
        return f"<{self} | BS({self.params.m},{self.params.n})>"


def identity(params: BsParams) -> BsElement:
    return BsElement(params, 0, ())


def from_letters(params: BsParams, letters) -> BsElement:
    """Normalize a sequence of ('a'|'t', signed exponent) blocks."""
    b = _Builder(params)
    for kind, v in letters:
        if kind == "a":
            b.push_a(v)
        elif kind == "t":
            step = 1 if v > 0 else -1
            for _ in range(abs(v)):
                b.push_t(step)
        else:
            raise ParseError(f"unknown generator {kind!r}")
    return b.build()


_TOKEN = re.compile(r"^(a|t)(?:\^(-?\d+))?$")


def parse(params: BsParams, text: str) -> BsElement:
    """Parse the element grammar: whitespace-separated `a`, `t`, `a^k`, `t^k`; `e` is the identity."""
    text = text.strip()
    if text in ("", "e", "1"):
        return identity(params)
    letters = []
    for tok in text.split():
        mt = _TOKEN.match(tok)
        if not mt:
            raise ParseError(f"bad token {tok!r} (expected a, t, a^k or t^k)")
        exp = int(mt.group(2)) if mt.group(2) is not None else 1
        letters.append((mt.group(1), exp))
    return from_letters(params, letters)


def normalize(params: BsParams, word) -> BsElement:
    """Normal form of a word; accepts a string or an iterable of blocks."""
    if isinstance(word, str):
        return parse(params, word)
    return from_letters(params, word)


def _check_params(g: BsElement, h: BsElement):
    if g.params != h.params:
        raise ParamsMismatch(f"mixed parameters {g.params} and {h.params}")


def multiply(g: BsElement, h: BsElement) -> BsElement:
    _check_params(g, h)
    b = _Builder(g.params, g.lead, g.sylls)
    b.push_element(h)
    return b.build()


def invert(g: BsElement) -> BsElement:
    b = _Builder(g.params)
    sylls = g.sylls
    k = len(sylls)
    if k == 0:
        b.push_a(-g.lead)
        return b.build()
    b.push_a(-sylls[-1][1])
    for i in range(k - 1, 0, -1):
        b.push_t(-sylls[i][0])
        b.push_a(-sylls[i - 1][1])
    b.push_t(-sylls[0][0])
    b.push_a(-g.lead)
    return b.build()


def power(g: BsElement, k: int) -> BsElement:
    if k < 0:
        g = invert(g)
        k = -k
    acc = identity(g.params)
    base = g
    while k:
        if k & 1:
            acc = multiply(acc, base)
        k >>= 1
        if k:
            base = multiply(base, base)
    return acc


def conjugate(c: BsElement, g: BsElement) -> BsElement:
    """c g c^-1."""
    return multiply(multiply(c, g), invert(c))


def t_exponent_sum(g: BsElement) -> int:
    """Exponent sum of the t-letters; the homomorphism BS(m,n) -> Z."""
    return sum(e for e, _ in g.sylls)
