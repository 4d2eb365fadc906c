"""Powers-property certificates for G(m,n) on the tree boundary.

The compact open subgroup K is the stabiliser of the base vertex (the
closure of <a>), so membership of f in K is act(f, v0) == v0 and
K-invariance of a clopen set is exact a-invariance.  A certificate holds
a nonempty proper a-invariant clopen O with f O disjoint from O for every
f in F, and pairwise transverse hyperbolic elements g_1..g_n of t-sum 0
whose boundary fixed points lie in O, boosted so that the translates
g_i (complement of O) are pairwise disjoint; the partition is C = {g :
g x in O}, D its complement.  All three conditions are decided exactly
in the shadow algebra and by orbit counting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .boundary import BoundaryPoint, attracting_point, fixed_boundary_points
from .completion import index_R, k_orbit, orbit_period, star_witness
from .errors import BudgetExceeded, FIntersectsK, InvalidN
from .group import (
    BsElement,
    BsParams,
    conjugate,
    from_letters,
    identity,
    invert,
    multiply,
    parse,
    power,
    t_exponent_sum,
)
from .shadows import ShadowSet, act_on_shadow, shadow
from .tree import Vertex, act_on_vertex, base_vertex, classify

__all__ = [
    "PowersCertificate",
    "PowersReport",
    "build_separating_shadow",
    "build_transverse_family",
    "powers_certificate",
    "verify_certificate",
    "certificate_to_json",
    "certificate_from_json",
    "certificate_dumps",
    "certificate_loads",
    "report_to_json",
]

SCHEMA = "powers-lab/1"

SEPARATION_DEPTH_CAP = 12
BOOST_CAP = 64
CANDIDATE_CAP = 512


def _gen_a(params):
    return from_letters(params, [("a", 1)])


def in_base_stabilizer(f: BsElement) -> bool:
    """Membership in K = Stab(v0), i.e. in <a> for words of the discrete group."""
    return act_on_vertex(f, base_vertex(f.params)) == base_vertex(f.params)


def _saturate(s: ShadowSet, a: BsElement, cap: int = 4096) -> ShadowSet:
    """Smallest a-invariant clopen set containing s."""
    acc = s
    for _ in range(cap):
        moved = act_on_shadow(a, acc)
        if moved == acc:
            return acc
        acc = acc.union(moved)
    raise BudgetExceeded("a-saturation did not stabilise")


def build_separating_shadow(f_list, x: BoundaryPoint, max_depth: int = SEPARATION_DEPTH_CAP) -> ShadowSet:
    """A nonempty proper a-invariant clopen O with f O disjoint from O for all f in F.

    Candidates are a-saturations of the ray cylinder U(eta_d) toward x, or
    of the level annulus U(eta_d) minus U(eta_{d+1}) when some f fixes x
    (a hyperbolic fixer shifts levels along the ray, which is the only way
    to separate); the depth d grows until the exact checks pass.
    """
    params = x.params
    v0 = base_vertex(params)
    for f in f_list:
        if in_base_stabilizer(f):
            raise FIntersectsK(f"{f} lies in the base-vertex stabiliser K")
    fixers = any(x.same_point(f_x) for f_x in (x.translate(f) for f in f_list))
    ray = x.ray_vertices(v0, max_depth + 1)
    a = _gen_a(params)
    for d in range(1, max_depth + 1):
        core = shadow(ray[d])
        if fixers:
            core = core.difference(shadow(ray[d + 1]))
        o = _saturate(core, a)
        if o.is_empty() or o.is_full():
            continue
        if all(act_on_shadow(f, o).is_disjoint(o) for f in f_list):
            assert act_on_shadow(a, o) == o
            return o
    raise BudgetExceeded(f"no separating depth up to {max_depth} for F = {[str(f) for f in f_list]}")


def _transverse_points(p1, p2) -> bool:
    """No common boundary point between the fixed pairs p1 and p2."""
    for u in p1:
        for v in p2:
            if u.same_point(v):
                return False
    return True


def build_transverse_family(n: int, o: ShadowSet, boost_cap: int = BOOST_CAP) -> list:
    """n pairwise transverse hyperbolic elements of t-sum 0 with fixed points
    in O, boosted to powers whose complement-translates are pairwise disjoint.

    Candidates are conjugates (a^j w^i) g (a^j w^i)^-1 of a fixed transverse
    seed g by the witness w = a t a t^-1 and its a-translates; conjugating by
    a^j spreads fixed points across the a-orbit saturation of O, keeping the
    conjugator depth (hence the needed boost) logarithmic in n.
    """
    if n <= 0:
        raise InvalidN(f"need n >= 1, got {n}")
    params = o.params
    w = star_witness(params)
    assert classify(w).is_hyperbolic and t_exponent_sum(w) == 0
    a = _gen_a(params)

    seed = None
    for tau_word in ("t", "t^-1", "a t", "t a t^-1", "a^2 t", "t t"):
        tau = parse(params, tau_word)
        cand = conjugate(tau, w)
        if classify(cand).is_hyperbolic and _transverse_points(
            fixed_boundary_points(w), fixed_boundary_points(cand)
        ):
            seed = cand
            break
    assert seed is not None, "no transverse conjugate of the witness found"

    g_att, g_rep = fixed_boundary_points(seed)
    chosen = []
    chosen_points = []
    tried = 0
    i = 0
    while len(chosen) < n:
        i += 1
        w_i = power(w, i)
        spread = orbit_period(act_on_vertex(w_i, base_vertex(params)))
        for j in range(spread):
            tried += 1
            if tried > CANDIDATE_CAP:
                raise BudgetExceeded("transverse-family candidate cap exceeded")
            conj = multiply(power(a, j), w_i)
            att = g_att.translate(conj)
            rep = g_rep.translate(conj)
            if not (o.contains_point(att) and o.contains_point(rep)):
                continue
            if not all(_transverse_points((att, rep), pts) for pts in chosen_points):
                continue
            chosen.append(conjugate(conj, seed))
            chosen_points.append((att, rep))
            if len(chosen) == n:
                break

    complement = o.complement()
    for boost in range(1, boost_cap + 1):
        boosted = [power(g, boost) for g in chosen]
        images = [act_on_shadow(g, complement) for g in boosted]
        if _pairwise_disjoint(images):
            for g in boosted:
                assert t_exponent_sum(g) == 0
            return boosted
    raise BudgetExceeded(f"no boost up to {boost_cap} separates the complement translates")


def _pairwise_disjoint(sets) -> bool:
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if not sets[i].is_disjoint(sets[j]):
                return False
    return True


@dataclass(frozen=True)
class PowersCertificate:
    params: BsParams
    base_point_x: BoundaryPoint
    separating_set_O: ShadowSet
    f_list: tuple
    elements: tuple
    control_r: int


@dataclass(frozen=True)
class PowersReport:
    cond_separation: bool
    cond_disjoint: bool
    cond_control: bool
    verdict: bool


def powers_certificate(params: BsParams, f_list, n: int) -> PowersCertificate:
    """Assemble a certificate for the given compact set F and family size n."""
    if n <= 0:
        raise InvalidN(f"need n >= 1, got {n}")
    f_list = tuple(f_list)
    if not f_list:
        raise FIntersectsK("F must be a nonempty subset of G minus K")
    x = attracting_point(star_witness(params))
    o = build_separating_shadow(f_list, x)
    elements = tuple(build_transverse_family(n, o))
    control_r = max(index_R(g) for g in elements)
    return PowersCertificate(
        params=params,
        base_point_x=x,
        separating_set_O=o,
        f_list=f_list,
        elements=elements,
        control_r=control_r,
    )


def verify_certificate(cert: PowersCertificate) -> PowersReport:
    """Re-check the three Powers conditions exactly; failures are reported, not raised.

    The separation condition includes exact a-invariance of O (the finite
    form of left K-invariance of the partition) and nonemptiness and
    properness of O.
    """
    o = cert.separating_set_O
    a = _gen_a(cert.params)
    sep = (
        not o.is_empty()
        and not o.is_full()
        and act_on_shadow(a, o) == o
        and all(act_on_shadow(f, o).is_disjoint(o) for f in cert.f_list)
    )
    complement = o.complement()
    images = [act_on_shadow(g, complement) for g in cert.elements]
    disj = _pairwise_disjoint(images)
    ctrl = all(index_R(g) <= cert.control_r for g in cert.elements)
    return PowersReport(
        cond_separation=sep,
        cond_disjoint=disj,
        cond_control=ctrl,
        verdict=sep and disj and ctrl,
    )


def _shadow_to_json(s: ShadowSet) -> dict:
    return {
        "radius": s.radius,
        "directions": [str(v) for v in s.sorted_directions()],
        "polarity": s.polarity,
    }


def _shadow_from_json(params: BsParams, data: dict) -> ShadowSet:
    dirs = [Vertex.of(parse(params, d)) for d in data["directions"]]
    return ShadowSet(params, dirs, bool(data["polarity"]))


def _point_to_json(x: BoundaryPoint) -> dict:
    return {
        "prefix": str(x.prefix),
        "engine": str(x.engine),
        "orientation": x.orientation,
    }


def _point_from_json(params: BsParams, data: dict) -> BoundaryPoint:
    return BoundaryPoint(
        parse(params, data["prefix"]), parse(params, data["engine"]), int(data["orientation"])
    )


def certificate_to_json(cert: PowersCertificate) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "powers_certificate",
        "m": cert.params.m,
        "n": cert.params.n,
        "base_point_x": _point_to_json(cert.base_point_x),
        "separating_set_O": _shadow_to_json(cert.separating_set_O),
        "f_list": [str(f) for f in cert.f_list],
        "elements": [str(g) for g in cert.elements],
        "control_r": cert.control_r,
    }


def certificate_from_json(data: dict) -> PowersCertificate:
    assert data.get("schema") == SCHEMA, f"unknown schema {data.get('schema')!r}"
    params = BsParams(int(data["m"]), int(data["n"]))
    return PowersCertificate(
        params=params,
        base_point_x=_point_from_json(params, data["base_point_x"]),
        separating_set_O=_shadow_from_json(params, data["separating_set_O"]),
        f_list=tuple(parse(params, f) for f in data["f_list"]),
        elements=tuple(parse(params, g) for g in data["elements"]),
        control_r=int(data["control_r"]),
    )


def report_to_json(report: PowersReport) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "powers_report",
        "cond_separation": report.cond_separation,
        "cond_disjoint": report.cond_disjoint,
        "cond_control": report.cond_control,
        "verdict": report.verdict,
    }


def certificate_dumps(cert: PowersCertificate) -> str:
    return json.dumps(certificate_to_json(cert), indent=2, sort_keys=True)


def certificate_loads(text: str) -> PowersCertificate:
    return certificate_from_json(json.loads(text))
