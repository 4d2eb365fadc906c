"""Finite truncations of the quasi-regular representation on the vertex space.

U(g) permutes vertex basis vectors, P averages over a-orbits (the K-orbit
of a coset), P_sub(s) averages over a^s-orbits (the subgroup K cap gKg^-1
realised on orbits) and P_conj(g) averages over gKg^-1-orbits.  Identity
checks run in exact rationals on interior columns; norms and Rayleigh
quotients are floating-point estimates and, by weak containment of the
quasi-regular representation, lower bounds on the C*-norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix

from .completion import orbit_period
from .errors import EmptyInterior
from .group import BsElement, BsParams, from_letters, invert, multiply
from .tree import Vertex, act_on_vertex, base_vertex, build_ball_vertices

__all__ = [
    "GroupRingWord",
    "VertexBasis",
    "build_ball",
    "SparseOperator",
    "materialize",
    "iter_columns",
    "NormEstimate",
    "spectral_norm",
    "RayleighReport",
    "rayleigh_min",
    "DecayReport",
    "powers_decay_experiment",
]


class GroupRingWord:
    """Formal rational combination of products of U(g) and averaging projections."""

    __slots__ = ("params", "terms")

    def __init__(self, params: BsParams, terms=()):
        self.params = params
        self.terms = tuple(terms)  # tuple of (Fraction, atoms); atom = (kind, payload)

    @classmethod
    def u(cls, g: BsElement) -> "GroupRingWord":
        return cls(g.params, [(Fraction(1), (("u", g),))])

    @classmethod
    def p(cls, params: BsParams) -> "GroupRingWord":
        return cls(params, [(Fraction(1), (("p", None),))])

    @classmethod
    def p_sub(cls, params: BsParams, step: int) -> "GroupRingWord":
        assert step >= 1
        return cls(params, [(Fraction(1), (("psub", step),))])

    @classmethod
    def p_conj(cls, params: BsParams, g: BsElement) -> "GroupRingWord":
        return cls(params, [(Fraction(1), (("pconj", g),))])

    @staticmethod
    def _merge(atoms1, atoms2):
        atoms = list(atoms1) + list(atoms2)
        out = []
        for atom in atoms:
            if out:
                k1, v1 = out[-1]
                k2, v2 = atom
                if k1 == "u" and k2 == "u":
                    out[-1] = ("u", multiply(v1, v2))
                    continue
                if k1 == k2 and k1 in ("p", "psub", "pconj") and v1 == v2:
                    continue  # projections are idempotent
            out.append(atom)
        return tuple(a for a in out if not (a[0] == "u" and a[1].is_identity)) or (
            ("u", None),
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out = []
        for c1, a1 in self.terms:
            for c2, a2 in other.terms:
                out.append((c1 * c2, self._merge(a1, a2)))
        return GroupRingWord(self.params, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "GroupRingWord":
        c = Fraction(c)
        return GroupRingWord(self.params, [(c * c1, a) for c1, a in self.terms])

    def __add__(self, other):
        return GroupRingWord(self.params, tuple(self.terms) + tuple(other.terms))

    def __sub__(self, other):
        return self + other.scale(-1)

    def atoms_used(self):
        return [a for _, atoms in self.terms for a in atoms]


class VertexBasis:
    """An ordered vertex set with cached generator index maps and a-orbit structure."""

    def __init__(self, params: BsParams, vertices):
        self.params = params
        self.vertices = list(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self._letter_maps = {}
        self._orbits = None

    def __len__(self):
        return len(self.vertices)

    def __getitem__(self, i):
        return self.vertices[i]

    def letter_map(self, letter: str) -> np.ndarray:
        """Index map of one generator letter; -1 marks images outside the basis."""
        arr = self._letter_maps.get(letter)
        if arr is None:
            g = {
                "a": [("a", 1)],
                "A": [("a", -1)],
                "t": [("t", 1)],
                "T": [("t", -1)],
            }[letter]
            elem = from_letters(self.params, g)
            arr = np.full(len(self.vertices), -1, dtype=np.int64)
            for i, v in enumerate(self.vertices):
                j = self.index.get(act_on_vertex(elem, v))
                if j is not None:
                    arr[i] = j
            self._letter_maps[letter] = arr
        return arr

    @property
    def orbits(self):
        """(orbit_id, orbit_pos, orbit_lists, complete_flags) of the a-action."""
        if self._orbits is None:
            amap = self.letter_map("a")
            n = len(self.vertices)
            aprev = np.full(n, -1, dtype=np.int64)
            valid = amap >= 0
            aprev[amap[valid]] = np.nonzero(valid)[0]
            orbit_id = np.full(n, -1, dtype=np.int64)
            orbit_pos = np.zeros(n, dtype=np.int64)
            lists = []
            complete = []
            for start in range(n):
                if orbit_id[start] >= 0:
                    continue
                chain = [start]
                cur = amap[start]
                closed = False
                while cur >= 0 and cur != start:
                    chain.append(cur)
                    cur = amap[cur]
                if cur == start:
                    closed = True
                else:
                    back = aprev[start]
                    while back >= 0:
                        chain.insert(0, back)
                        back = aprev[back]
                oid = len(lists)
                for pos, idx in enumerate(chain):
                    orbit_id[idx] = oid
                    orbit_pos[idx] = pos
                lists.append(np.array(chain, dtype=np.int64))
                complete.append(closed)
            self._orbits = (orbit_id, orbit_pos, lists, complete)
        return self._orbits

    def a_power_map(self, r: int) -> np.ndarray:
        """Index map of a^r via orbit rotation (chains shift linearly)."""
        orbit_id, orbit_pos, lists, complete = self.orbits
        out = np.full(len(self.vertices), -1, dtype=np.int64)
        for oid, members in enumerate(lists):
            size = len(members)
            if complete[oid]:
                shift = r % size
                out[members] = np.roll(members, -shift)
            else:
                if -size < r < size:
                    if r >= 0:
                        out[members[: size - r]] = members[r:]
                    else:
                        out[members[-r:]] = members[: size + r]
        return out

    def element_map(self, g: BsElement) -> np.ndarray:
        """Index map of v -> g.v, composed block by block."""
        out = np.arange(len(self.vertices), dtype=np.int64)
        for kind, val in reversed(list(g.blocks())):
            step = self.a_power_map(val) if kind == "a" else self.letter_map("t" if val > 0 else "T")
            good = out >= 0
            out = np.where(good, step[np.where(good, out, 0)], -1)
        return out


def build_ball(params: BsParams, radius: int) -> VertexBasis:
    """Basis of all vertices within the given distance of v0."""
    return VertexBasis(params, build_ball_vertices(params, radius))


class SparseOperator:
    """Exact sparse matrix over a basis, with the interior-column mask."""

    __slots__ = ("basis", "cols", "interior")

    def __init__(self, basis, cols, interior):
        self.basis = basis
        self.cols = cols
        self.interior = list(interior)

    def __len__(self):
        return len(self.cols)

    def entry(self, i, j) -> Fraction:
        return Fraction(self.cols[j].get(i, 0))

    def interior_indices(self):
        return [j for j, ok in enumerate(self.interior) if ok]

    def apply_exact(self, vec: dict):
        """Matrix-vector product; None if the vector touches a non-interior column."""
        out = {}
        for j, c in vec.items():
            if not self.interior[j]:
                return None
            for i, w in self.cols[j].items():
                new = out.get(i, 0) + c * w
                if new:
                    out[i] = new
                else:
                    out.pop(i, None)
        return out

    def compose(self, other: "SparseOperator"):
        """self @ other as exact columns where defined (None where not)."""
        out = []
        for j in range(len(other.cols)):
            if not other.interior[j]:
                out.append(None)
                continue
            out.append(self.apply_exact(other.cols[j]))
        return out

    def to_csr(self, interior_only: bool = True) -> csr_matrix:
        rows, cols, vals = [], [], []
        sel = self.interior_indices() if interior_only else range(len(self.cols))
        for jj, j in enumerate(sel):
            for i, c in self.cols[j].items():
                rows.append(i)
                cols.append(jj)
                vals.append(float(c))
        return csr_matrix(
            (vals, (rows, cols)), shape=(len(self.basis), len(list(sel)))
        )


def iter_columns(word: GroupRingWord, basis: VertexBasis):
    """Yield (column index, {row: Fraction}, valid) for each basis vertex.

    A column is valid (interior) iff every factor application keeps the
    support inside the basis, with complete a-orbits where a projection
    is applied.
    """
    orbit_id, orbit_pos, lists, complete = basis.orbits
    n = len(basis)
    compiled = []
    for coeff, atoms in word.terms:
        steps = []
        for kind, payload in reversed(atoms):
            if kind == "u":
                if payload is None:
                    continue
                steps.append(("map", basis.element_map(payload)))
            elif kind == "p":
                steps.append(("avg", 1))
            elif kind == "psub":
                steps.append(("avg", payload))
            elif kind == "pconj":
                steps.append(("map", basis.element_map(invert(payload))))
                steps.append(("avg", 1))
                steps.append(("map", basis.element_map(payload)))
        compiled.append((coeff, steps))

    for j in range(n):
        col = {}
        valid = True
        for coeff, steps in compiled:
            vec = {j: coeff}
            for op, payload in steps:
                if op == "map":
                    new = {}
                    for i, c in vec.items():
                        tgt = payload[i]
                        if tgt < 0:
                            valid = False
                            new = None
                            break
                        new[tgt] = new.get(tgt, 0) + c
                    vec = new
                else:
                    step = payload
                    new = {}
                    for i, c in vec.items():
                        oid = orbit_id[i]
                        if not complete[oid]:
                            valid = False
                            new = None
                            break
                        members = lists[oid]
                        size = len(members)
                        sub = size // math.gcd(size, step)
                        share = c * Fraction(1, sub)
                        pos = orbit_pos[i]
                        for k in range(sub):
                            tgt = members[(pos + k * step) % size]
                            new[tgt] = new.get(tgt, 0) + share
                        if new is None:
                            break
                    vec = new
                if vec is None:
                    break
            if vec is None:
                continue
            for i, c in vec.items():
                acc = col.get(i, 0) + c
                if acc:
                    col[i] = acc
                else:
                    col.pop(i, None)
        yield j, (col if valid else {k: v for k, v in col.items()}), valid


def materialize(word: GroupRingWord, basis: VertexBasis) -> SparseOperator:
    cols = [None] * len(basis)
    interior = [False] * len(basis)
    for j, col, valid in iter_columns(word, basis):
        cols[j] = col
        interior[j] = valid
    return SparseOperator(basis, cols, interior)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    iterations: int
    residual: float
    converged: bool
    direction: str = "LOWER_BOUND_ON_CSTAR_NORM"


def _top_eigen(matvec, dim: int, tol: float, max_iter: int):
    """Power iteration for the top eigenvalue of a PSD operator."""
    rng = np.random.default_rng(2024)
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    lam = 0.0
    resid = math.inf
    for it in range(1, max_iter + 1):
        w = matvec(v)
        lam = float(v @ w)
        resid = float(np.linalg.norm(w - lam * v))
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0, it, 0.0, True
        v = w / norm
        if resid <= tol * max(abs(lam), 1e-30):
            return lam, it, resid, True
    return lam, max_iter, resid, False


def spectral_norm(op: SparseOperator, tol: float = 1e-6, max_iter: int = 10_000) -> NormEstimate:
    """Largest singular value of the interior-column restriction (power iteration)."""
    a = op.to_csr(interior_only=True)
    if a.shape[1] == 0 or a.nnz == 0:
        return NormEstimate(0.0, 0, 0.0, True)
    at = a.T.tocsr()
    lam, it, resid, ok = _top_eigen(lambda v: at @ (a @ v), a.shape[1], tol, max_iter)
    return NormEstimate(math.sqrt(max(lam, 0.0)), it, resid, ok)


@dataclass(frozen=True)
class RayleighReport:
    value: float
    exact: Fraction
    classes: int
    argmin_orbit_size: int

    def __float__(self):
        return self.value


def rayleigh_min(word: GroupRingWord, basis: VertexBasis, tol: float = 1e-9) -> RayleighReport:
    """Minimum Rayleigh quotient of a self-adjoint word over the interior
    P-range basis vectors (normalised indicators of complete a-orbits).

    Each quotient is computed exactly in rationals; orbits with any
    non-interior column are discarded.  The quotient at such a positive
    vector dominates the column-sum cross terms, which is the regime where
    the averaged-word lower bound holds; signed combinations of different
    orbit classes can dip below it and are not part of the estimate.
    """
    del tol  # quotients are exact; tolerance applies only to the caller's bound
    orbit_id, orbit_pos, lists, complete = basis.orbits
    valid_orbit = [bool(c) for c in complete]
    diag = {}
    for j, col, ok in iter_columns(word, basis):
        oid = int(orbit_id[j])
        if not complete[oid]:
            continue
        if not ok:
            valid_orbit[oid] = False
            continue
        acc = diag.get(oid, 0)
        for i, c in col.items():
            if int(orbit_id[i]) == oid:
                acc += c
        diag[oid] = acc
    best = None
    best_size = 0
    classes = 0
    for oid, keep in enumerate(valid_orbit):
        if not keep or not complete[oid] or oid not in diag:
            continue
        classes += 1
        q = Fraction(diag[oid]) / len(lists[oid])
        if best is None or q < best:
            best = q
            best_size = len(lists[oid])
    if best is None:
        raise EmptyInterior("no complete interior orbit at this radius")
    return RayleighReport(float(best), best, classes, best_size)


@dataclass(frozen=True)
class DecayReport:
    n: int
    radius: int
    estimate: float
    l1_norm: float
    bound: float
    satisfied: bool
    iterations: int
    residual: float
    converged: bool


def powers_decay_experiment(
    cert,
    coeffs: dict,
    radius: int,
    n_elements: int | None = None,
    tol: float = 1e-6,
    max_iter: int = 10_000,
) -> DecayReport:
    """Estimate || (1/n) sum_i u_{g_i} x p_K u_{g_i}^* || on a trajectory basis.

    x = sum_f coeffs[f] u_f with support in the certificate's F.  Each
    summand applied to a seed delta_v is a combination of single vertices
    (g_i f a^j g_i^-1) v, so the whole column is computed by exact group
    arithmetic on a basis that follows the trajectories; the estimate is a
    compression of the true operator and hence a lower bound of its norm.
    Verify the certificate before calling.
    """
    params = cert.params
    elements = list(cert.elements)
    if n_elements is not None:
        assert 1 <= n_elements <= len(elements)
        elements = elements[:n_elements]
    n = len(elements)
    f_support = list(coeffs.keys())
    assert all(any(f == g for g in cert.f_list) for f in f_support), "coeffs must be supported on F"

    seeds = build_ball_vertices(params, radius)
    columns = []
    point_ids = {}

    def pid(v: Vertex) -> int:
        i = point_ids.get(v)
        if i is None:
            i = len(point_ids)
            point_ids[v] = i
        return i

    inv_n = Fraction(1, n)
    a = from_letters(params, [("a", 1)])
    per_element = []
    for g in elements:
        ginv = invert(g)
        lam = orbit_period(Vertex.of(ginv))
        core = multiply(multiply(g, from_letters(params, [("a", lam)])), ginv)
        assert not core.sylls and abs(core.lead) == lam, "element must commensurate K exactly"
        sigma = 1 if core.lead > 0 else -1
        h = {}
        for f in f_support:
            gf = multiply(g, f)
            cur = gf
            for rho in range(lam):
                h[(f, rho)] = multiply(cur, ginv)
                cur = multiply(cur, a)
        per_element.append((g, ginv, lam, sigma, h))

    for v in seeds:
        col = {}
        for g, ginv, lam, sigma, h in per_element:
            w = Vertex.of(multiply(ginv, v.elem))
            s = orbit_period(w)
            for f in f_support:
                share = inv_n * coeffs[f] * Fraction(1, s)
                for j in range(s):
                    q, rho = divmod(j, lam)
                    shifted = v.elem
                    if q:
                        shifted = multiply(from_letters(params, [("a", sigma * q * lam)]), shifted)
                    z = Vertex.of(multiply(h[(f, rho)], shifted))
                    k = pid(z)
                    col[k] = col.get(k, 0) + share
        columns.append(col)

    rows, cols_idx, vals = [], [], []
    for j, col in enumerate(columns):
        for i, c in col.items():
            rows.append(i)
            cols_idx.append(j)
            vals.append(float(c))
    a_mat = csr_matrix((vals, (rows, cols_idx)), shape=(len(point_ids), len(seeds)))
    at = a_mat.T.tocsr()
    lam_max, it, resid, ok = _top_eigen(lambda v: at @ (a_mat @ v), len(seeds), tol, max_iter)
    estimate = math.sqrt(max(lam_max, 0.0))
    l1 = float(sum(abs(Fraction(c)) for c in coeffs.values()))
    bound = 2.0 * math.sqrt(n) / n * l1
    return DecayReport(
        n=n,
        radius=radius,
        estimate=estimate,
        l1_norm=l1,
        bound=bound,
        satisfied=estimate <= bound + tol,
        iterations=it,
        residual=resid,
        converged=ok,
    )
