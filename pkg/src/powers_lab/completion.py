"""Quantities of the Schlichting completion G(m,n) = BS(m,n) // <a>.

The compact open subgroup K is the closure of <a>, which is exactly the
stabiliser of the base vertex; closures do not change orbits on the
discrete coset space, so K-orbits are <a>-orbits and every index is a
finite orbit count.  The stabiliser period of a coset is computed by a
carry cascade through the syllables (the same rewriting that normalises
words), which avoids walking exponentially long orbits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ConditionStarFailed, OrbitBudgetExceeded
from .group import (
    BsElement,
    BsParams,
    from_letters,
    identity,
    invert,
    multiply,
    power,
    t_exponent_sum,
)
from .tree import Vertex, act_on_vertex, base_vertex, build_ball_vertices, classify

__all__ = [
    "orbit_period",
    "k_orbit",
    "index_R",
    "index_L",
    "modular",
    "modular_paper_convention",
    "modular_image",
    "index_power_profile",
    "index_power_bound",
    "ConditionStarReport",
    "verify_condition_star",
    "TypeLabel",
    "type_label",
    "star_witness",
]

ORBIT_CAP = 1_000_000


@lru_cache(maxsize=1 << 16)
def _period_of_rep(elem: BsElement) -> int:
    """Stabiliser period of the coset elem<a> under left multiplication by a.

    a^s fixes the coset iff the carry emitted by pushing a^s through the
    word stays divisible at every t-letter; that requirement is linear in
    s, so the period is an lcm of one constraint per syllable and does
    not depend on the a-exponent digits.
    """
    p = elem.params
    am, n = abs(p.m), p.n
    s = 1
    rho_num, rho_den = 1, 1
    for eps, _ in elem.sylls:
        mod = n if eps > 0 else am
        need = mod * rho_den
        s = math.lcm(s, need // math.gcd(rho_num, need))
        if eps > 0:
            rho_num *= am
            rho_den *= n
        else:
            rho_num *= n
            rho_den *= am
        g = math.gcd(rho_num, rho_den)
        rho_num //= g
        rho_den //= g
    return s


def orbit_period(v: Vertex) -> int:
    return _period_of_rep(v.elem)


def k_orbit(v: Vertex, cap: int = ORBIT_CAP) -> list:
    """The <a>-orbit of a vertex, walked until first repetition."""
    a = from_letters(v.params, [("a", 1)])
    out = [v]
    cur = act_on_vertex(a, v)
    while cur != v:
        out.append(cur)
        if len(out) > cap:
            raise OrbitBudgetExceeded(f"orbit of {v} exceeded cap {cap}")
        cur = act_on_vertex(a, cur)
    return out


def index_R(g: BsElement) -> int:
    """R(g) = [K : K  ∩  g K g^-1], the number of left cosets in KgK."""
    return _period_of_rep(Vertex.of(g).elem)


def index_L(g: BsElement) -> int:
    """L(g) = [K : K ∩ g^-1 K g]."""
    return index_R(invert(g))


def modular(g: BsElement) -> Fraction:
    """The modular function as the exact index ratio R(g)/L(g)."""
    return Fraction(index_R(g), index_L(g))


def modular_paper_convention(g: BsElement) -> Fraction:
    """The reciprocal convention (Delta(t) = |m/n|); same image subgroup."""
    return 1 / modular(g)


def modular_image(params: BsParams) -> Fraction:
    """Generator of the image of the modular function, taken in (0, 1]."""
    return Fraction(abs(params.m), params.n)


def index_power_profile(g: BsElement, lmax: int) -> list:
    """[max(R(g^l), R(g^-l)) for l = 1..lmax]."""
    out = []
    fwd = identity(g.params)
    bwd = fwd
    ginv = invert(g)
    for _ in range(lmax):
        fwd = multiply(fwd, g)
        bwd = multiply(bwd, ginv)
        out.append(max(index_R(fwd), index_R(bwd)))
    return out


def index_power_bound(g: BsElement, lmax: int) -> int:
    return max(index_power_profile(g, lmax))


def star_witness(params: BsParams) -> BsElement:
    """The hyperbolic element a t a t^-1 of the unimodular kernel."""
    return from_letters(params, [("a", 1), ("t", 1), ("a", 1), ("t", -1)])


@dataclass(frozen=True)
class ConditionStarReport:
    witness_hyperbolic: BsElement
    witness_is_hyperbolic: bool
    witness_t_sum_zero: bool
    index_bound_over_powers: int
    index_constant_over_powers: bool
    ball_transitivity_radius_checked: int
    ball_transitive: bool
    discrete: bool
    verdict: bool


def verify_condition_star(params: BsParams, power_range: int = 5, ball_radius: int = 3) -> ConditionStarReport:
    """Finite certificate that G(m,n) satisfies condition (*).

    Checks: the witness a t a t^-1 is hyperbolic; it lies in the kernel of
    the modular function (t-sum 0); its commensuration indices are constant
    over powers (open boundary stabiliser); the group is vertex transitive
    on a ball (minimality proxy).  |m| = n is flagged as the discrete case.
    """
    w = star_witness(params)
    is_hyp = classify(w).is_hyperbolic
    t_zero = t_exponent_sum(w) == 0
    profile = index_power_profile(w, power_range)
    constant = len(set(profile)) == 1
    v0 = base_vertex(params)
    transitive = all(
        act_on_vertex(v.elem, v0) == v for v in build_ball_vertices(params, ball_radius)
    )
    verdict = is_hyp and t_zero and constant and transitive
    return ConditionStarReport(
        witness_hyperbolic=w,
        witness_is_hyperbolic=is_hyp,
        witness_t_sum_zero=t_zero,
        index_bound_over_powers=max(profile),
        index_constant_over_powers=constant,
        ball_transitivity_radius_checked=ball_radius,
        ball_transitive=transitive,
        discrete=abs(params.m) == params.n,
        verdict=verdict,
    )


@dataclass(frozen=True)
class TypeLabel:
    """Factor type of L(G(m,n)): II_1 in the discrete case, else III_{|m|/n}."""

    kind: str  # "II_1" | "II_inf" | "III_lambda" | "III_1"
    lam: Fraction | None = None

    def __post_init__(self):
        if self.kind == "III_lambda":
            assert self.lam is not None and 0 < self.lam < 1

    def __str__(self):
        if self.kind == "III_lambda":
            return f"III_{{{self.lam}}}"
        return {"II_1": "II_1", "II_inf": "II_inf", "III_1": "III_1"}[self.kind]


def type_label(params: BsParams) -> TypeLabel:
    report = verify_condition_star(params)
    if not report.verdict:
        raise ConditionStarFailed(f"condition (*) checks failed for {params}")
    if abs(params.m) == params.n:
        return TypeLabel("II_1")
    return TypeLabel("III_lambda", modular_image(params))
