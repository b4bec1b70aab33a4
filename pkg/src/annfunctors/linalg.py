"""Exact linear algebra over finite abelian groups.

Two engines live here:

* ``smith_normal_form`` -- exact integer Smith form with unimodular
  transforms (Python integers, no overflow).  Used for invariant factors.
* a Howell-form echelon over ``Z/N`` (``_Howell``) -- every finite coordinate
  group ``Z/m_1 x ... x Z/m_n`` embeds in ``(Z/N)^n``, ``N = lcm(m_i)``, by
  scaling coordinate ``i`` with ``N/m_i``.  Subgroups, kernels, images,
  membership and linear solving are all row spans in that model.  The Howell
  property (every span element whose first ``c`` coordinates vanish is a
  combination of rows pivoted after ``c``) makes reduction a complete
  membership test.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import SubgroupNotContained


def xgcd(a, b):
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    s, next_s = 1, 0
    t, next_t = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        s, next_s = next_s, s - q * next_s
        t, next_t = next_t, t - q * next_t
        g, next_g = next_g, g - q * next_g
    if g < 0:
        g, s, t = -g, -s, -t
    return g, s, t


def _lcm(values):
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


# -- Smith normal form -------------------------------------------------------

@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` in Smith form.

    ``V_inv`` is the exact inverse of ``V``.  Matrices are numpy object arrays
    of Python integers; ``U`` is None when it was not requested.
    """

    U: np.ndarray | None
    D: np.ndarray
    V: np.ndarray
    V_inv: np.ndarray

    @property
    def diagonal(self):
        m, n = self.D.shape
        return [int(self.D[i, i]) for i in range(min(m, n))]

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if d)


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _to_object(rows, m, n):
    out = np.empty((m, n), dtype=object)
    for i in range(m):
        for j in range(n):
            out[i, j] = rows[i][j]
    return out


def smith_normal_form(A, compute_u=True) -> SmithDecomposition:
    """Smith normal form of an integer matrix.

    Pivot: the smallest nonzero absolute value in the active block, ties broken
    by (row, column) order, so results are reproducible.  Arbitrary precision
    throughout.
    """
    rows = [[int(v) for v in r] for r in np.asarray(A, dtype=object).tolist()] if len(A) else []
    m = len(rows)
    n = len(rows[0]) if m else (np.asarray(A).shape[1] if np.asarray(A).ndim == 2 else 0)
    D = rows
    U = _identity(m) if compute_u else None
    V = _identity(n)
    Vi = _identity(n)

    def swap_rows(i, j):
        if i != j:
            D[i], D[j] = D[j], D[i]
            if U is not None:
                U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for r in D:
                r[i], r[j] = r[j], r[i]
            for r in V:
                r[i], r[j] = r[j], r[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, q):  # row dst += q * row src
        rd, rs = D[dst], D[src]
        for j in range(n):
            if rs[j]:
                rd[j] += q * rs[j]
        if U is not None:
            ud, us = U[dst], U[src]
            for j in range(m):
                if us[j]:
                    ud[j] += q * us[j]

    def add_col(dst, src, q):  # col dst += q * col src
        for r in D:
            if r[src]:
                r[dst] += q * r[src]
        for r in V:
            if r[src]:
                r[dst] += q * r[src]
        # inverse: row src of V^-1 -= q * row dst
        vs, vd = Vi[src], Vi[dst]
        for j in range(n):
            if vd[j]:
                vs[j] -= q * vd[j]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            r = D[i]
            for j in range(t, n):
                a = r[j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    dirty = dirty or D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    dirty = dirty or D[t][j] != 0
            if dirty:
                # a remainder smaller than |p| appeared in row/column t
                cand = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = None
            for i in range(t + 1, m):
                r = D[i]
                for j in range(t + 1, n):
                    if r[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            if U is not None:
                U[t] = [-v for v in U[t]]
    return SmithDecomposition(
        U=_to_object(U, m, m) if U is not None else None,
        D=_to_object(D, m, n),
        V=_to_object(V, n, n),
        V_inv=_to_object(Vi, n, n),
    )


# -- groups and maps ---------------------------------------------------------

@dataclass(frozen=True)
class AbelianGroupPresentation:
    """Invariant-factor form ``Z^rank x Z/d_1 x ... x Z/d_k`` with ``d_i | d_{i+1}``."""

    torsion: tuple = ()
    rank: int = 0

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        object.__setattr__(self, "torsion", t)
        if any(d < 2 for d in t) or any(b % a for a, b in zip(t, t[1:])):
            raise ValueError(f"not an invariant-factor chain: {t}")

    @property
    def order(self):
        if self.rank:
            return math.inf
        return math.prod(self.torsion)

    @property
    def is_trivial(self):
        return self.rank == 0 and not self.torsion

    def __str__(self):
        parts = ["Z"] * self.rank + [f"Z/{d}" for d in self.torsion]
        return " x ".join(parts) if parts else "0"


def invariant_factors(moduli):
    """Invariant factors of ``Z/m_1 x ... x Z/m_n`` (entries 1 are dropped)."""
    moduli = [int(m) for m in moduli if int(m) != 1]
    if not moduli:
        return ()
    snf = smith_normal_form(np.diag(moduli).tolist(), compute_u=False)
    return tuple(d for d in snf.diagonal if d != 1)


class FiniteAbelianGroup:
    """The coordinate group ``Z/m_1 x ... x Z/m_n``."""

    def __init__(self, moduli):
        self.moduli = np.array([int(m) for m in moduli], dtype=np.int64).reshape(-1)
        if (self.moduli < 1).any():
            raise ValueError("moduli must be positive")
        self.dim = len(self.moduli)
        self.exponent = _lcm(self.moduli.tolist())

    @property
    def order(self):
        return math.prod(self.moduli.tolist())

    def presentation(self) -> AbelianGroupPresentation:
        return AbelianGroupPresentation(invariant_factors(self.moduli.tolist()))

    def reduce(self, v):
        return np.mod(np.asarray(v, dtype=np.int64), self.moduli)

    def zero(self):
        return np.zeros(self.dim, dtype=np.int64)

    def elements(self):
        for t in itertools.product(*[range(int(m)) for m in self.moduli]):
            yield np.array(t, dtype=np.int64)

    def __eq__(self, other):
        return isinstance(other, FiniteAbelianGroup) and np.array_equal(self.moduli, other.moduli)

    def __hash__(self):
        return hash(self.moduli.tobytes())

    def __repr__(self):
        return f"FiniteAbelianGroup({self.moduli.tolist()})"


def element_order(group: FiniteAbelianGroup, v):
    """Additive order of ``v`` in ``group``."""
    v = group.reduce(v)
    return _lcm([int(m) // math.gcd(int(a), int(m)) for a, m in zip(v, group.moduli)])


class LinearMap:
    """A homomorphism between coordinate groups given by an integer matrix.

    Well-definedness is checked: ``m_j * matrix[:, j]`` must vanish in the
    codomain for every domain coordinate ``j``.
    """

    def __init__(self, domain: FiniteAbelianGroup, codomain: FiniteAbelianGroup, matrix):
        matrix = np.asarray(matrix, dtype=np.int64).reshape(codomain.dim, domain.dim)
        self.domain, self.codomain = domain, codomain
        self.matrix = np.mod(matrix, codomain.moduli[:, None])
        bad = np.argwhere((self.matrix * domain.moduli[None, :]) % codomain.moduli[:, None])
        if len(bad):
            i, j = bad[0]
            raise ValueError(f"matrix does not respect torsion at row {i}, column {j}")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.int64)
        return self.codomain.reduce(self.matrix @ x)

    @classmethod
    def from_function(cls, domain, codomain, fn, batch=True):
        """Tabulate an additive function by evaluating it on domain unit vectors.

        With ``batch`` the function receives all unit vectors at once as a
        ``(dim, dim)`` identity and returns ``(dim, codomain.dim)``.
        """
        eye = np.eye(domain.dim, dtype=np.int64)
        if batch:
            cols = np.asarray(fn(eye), dtype=np.int64).reshape(domain.dim, codomain.dim)
        else:
            cols = np.array([fn(e) for e in eye], dtype=np.int64).reshape(domain.dim, codomain.dim)
        return cls(domain, codomain, cols.T)


# -- Howell form over Z/N ----------------------------------------------------

def _unit_normalizer(b, N):
    """A unit ``u`` of ``Z/N`` with ``u*b == gcd(b, N) (mod N)``."""
    g = math.gcd(b, N)
    M = N // g
    if M == 1:
        return 1, g
    u = pow((b // g) % M, -1, M)
    while math.gcd(u, N) != 1:
        u += M
    return u, g


class _Howell:
    """Row span over ``Z/N`` kept in Howell form; pivots divide ``N``."""

    def __init__(self, N, ncols):
        self.N = int(N)
        self.ncols = int(ncols)
        self.rows = {}

    def insert(self, v):
        N = self.N
        stack = [np.mod(np.asarray(v, dtype=np.int64), N)]
        while stack:
            v = stack.pop()
            nz = np.flatnonzero(v)
            while nz.size:
                c = int(nz[0])
                P = self.rows.get(c)
                b = int(v[c])
                if P is None:
                    u, g = _unit_normalizer(b, N)
                    if u != 1:
                        v = (u * v) % N
                    self.rows[c] = v
                    if g != 1:
                        w = ((N // g) * v) % N
                        if w.any():
                            stack.append(w)
                    break
                a = int(P[c])
                if b % a == 0:
                    v = (v - (b // a) * P) % N
                else:
                    g, s, t = xgcd(a, b)
                    newP = (s * P + t * v) % N
                    v = ((-(b // g)) * P + (a // g) * v) % N
                    self.rows[c] = newP
                    w = ((N // g) * newP) % N
                    if w.any():
                        stack.append(w)
                nz = np.flatnonzero(v)

    def reduce(self, v, stop=None):
        """Reduce ``v``; stop at column ``stop`` (exclusive) when given."""
        N = self.N
        v = np.mod(np.asarray(v, dtype=np.int64), N)
        limit = self.ncols if stop is None else stop
        nz = np.flatnonzero(v[:limit])
        while nz.size:
            c = int(nz[0])
            P = self.rows.get(c)
            if P is None or v[c] % P[c]:
                return v, False
            v = (v - (int(v[c]) // int(P[c])) * P) % N
            nz = np.flatnonzero(v[:limit])
        return v, True

    def sorted_rows(self):
        return [self.rows[c] for c in sorted(self.rows)]

    @property
    def order(self):
        return math.prod(self.N // int(P[c]) for c, P in self.rows.items())


class Subgroup:
    """A subgroup of a coordinate group, spanned by ``generators`` (rows)."""

    def __init__(self, ambient: FiniteAbelianGroup, generators=()):
        self.ambient = ambient
        self.N = ambient.exponent
        self._scale = self.N // ambient.moduli
        h = _Howell(self.N, ambient.dim)
        gens = np.asarray(generators, dtype=np.int64)
        gens = gens.reshape(-1, ambient.dim) if ambient.dim else gens.reshape(0, 0)
        for g in gens:
            h.insert(self._scale * ambient.reduce(g))
        self._howell = h

    @classmethod
    def _from_howell(cls, ambient, howell):
        sub = cls.__new__(cls)
        sub.ambient = ambient
        sub.N = ambient.exponent
        sub._scale = sub.N // ambient.moduli
        sub._howell = howell
        return sub

    @property
    def generators(self):
        """Canonical generators in ambient coordinates (Howell rows)."""
        rows = self._howell.sorted_rows()
        if not rows:
            return np.zeros((0, self.ambient.dim), dtype=np.int64)
        return np.stack(rows) // self._scale

    @property
    def order(self):
        return self._howell.order

    def reduce(self, v):
        r, _ = self._howell.reduce(self._scale * self.ambient.reduce(v))
        return r // self._scale

    def __contains__(self, v):
        return self._howell.reduce(self._scale * self.ambient.reduce(v))[1]

    def is_subgroup_of(self, other: "Subgroup"):
        return all(g in other for g in self.generators)

    def presentation(self) -> AbelianGroupPresentation:
        return quotient_invariants(Subgroup(self.ambient), self).group

    def elements(self):
        """All elements (only sensible for small subgroups)."""
        q = quotient_invariants(Subgroup(self.ambient), self)
        return list(q.elements())

    def __repr__(self):
        return f"Subgroup(order={self.order}, ambient={self.ambient!r})"


def _graph_howell(f: LinearMap):
    """Howell span of ``{(f(y), y)}`` over generators ``y`` of the domain.

    Columns: codomain coordinates first, then domain coordinates; both scaled
    into ``Z/N`` with ``N`` the common exponent.
    """
    N = _lcm([f.domain.exponent, f.codomain.exponent])
    cs = N // f.codomain.moduli
    ds = N // f.domain.moduli
    # rows of the map are scaled so that they act on scaled domain coordinates
    h = _Howell(N, f.codomain.dim + f.domain.dim)
    img = (f.matrix * cs[:, None]) % N  # column j: scaled image of the j-th unit vector
    for j in range(f.domain.dim):
        row = np.zeros(f.codomain.dim + f.domain.dim, dtype=np.int64)
        row[: f.codomain.dim] = img[:, j]
        row[f.codomain.dim + j] = ds[j]
        h.insert(row)
    return h, N, cs, ds


def image(f: LinearMap) -> Subgroup:
    return Subgroup(f.codomain, f.matrix.T)


def kernel(f: LinearMap) -> Subgroup:
    h, N, cs, ds = _graph_howell(f)
    m = f.codomain.dim
    dom_rows = [P[m:] for c, P in sorted(h.rows.items()) if c >= m]
    # the domain block scaled by N/m_j; rescale to the domain's own exponent
    sub = Subgroup(f.domain)
    inner = _Howell(sub.N, f.domain.dim)
    for r in dom_rows:
        inner.insert((r // ds) * sub._scale)
    return Subgroup._from_howell(f.domain, inner)


def solve_mod(f: LinearMap, b):
    """Some ``x`` with ``f(x) == b``, or None when ``b`` is not in the image."""
    b = f.codomain.reduce(b)
    h, N, cs, ds = _graph_howell(f)
    m = f.codomain.dim
    v = np.zeros(m + f.domain.dim, dtype=np.int64)
    v[:m] = b * cs
    r, ok = h.reduce(v, stop=m)
    if not ok or r[:m].any():
        return None
    x = f.domain.reduce(((-r[m:]) % N) // ds)
    return x


@dataclass
class Quotient:
    """``ambient_sub / sub`` with one representative per invariant factor."""

    group: AbelianGroupPresentation
    representatives: np.ndarray  # (len(torsion), ambient.dim), in ambient coordinates
    ambient: FiniteAbelianGroup = field(repr=False)

    def elements(self):
        """Every class once, as ``sum c_i * representative_i``."""
        for coeffs in itertools.product(*[range(d) for d in self.group.torsion]):
            v = np.zeros(self.ambient.dim, dtype=np.int64)
            for c, r in zip(coeffs, self.representatives):
                v = v + c * r
            yield self.ambient.reduce(v)


def quotient_invariants(sub: Subgroup, amb: Subgroup) -> Quotient:
    """Invariant factors of ``amb / sub`` and representatives of a cyclic basis.

    Generators of ``amb`` are reduced modulo ``sub``; the relation lattice of
    the survivors modulo ``sub`` is computed as a Howell kernel and put in
    Smith form.
    """
    if sub.ambient != amb.ambient:
        raise SubgroupNotContained("subgroups live in different ambient groups")
    for g in sub.generators:
        if g not in amb:
            raise SubgroupNotContained(f"generator {g.tolist()} is not in the ambient subgroup",
                                       witness=tuple(int(v) for v in g))
    G = amb.ambient
    gens = [sub.reduce(g) for g in amb.generators]
    gens = [g for g in gens if g.any()]
    r = len(gens)
    if r == 0:
        return Quotient(AbelianGroupPresentation(), np.zeros((0, G.dim), dtype=np.int64), G)
    N = G.exponent
    scale = N // G.moduli
    h = _Howell(N, G.dim + r)
    for i, g in enumerate(gens):
        row = np.zeros(G.dim + r, dtype=np.int64)
        row[: G.dim] = g * scale
        row[G.dim + i] = 1
        h.insert(row)
    for b in sub.generators:
        row = np.zeros(G.dim + r, dtype=np.int64)
        row[: G.dim] = b * scale
        h.insert(row)
    rel = [P[G.dim:].tolist() for c, P in sorted(h.rows.items()) if c >= G.dim]
    rel += [[N * int(i == j) for j in range(r)] for i in range(r)]
    snf = smith_normal_form(rel, compute_u=False)
    torsion, reps = [], []
    Vi = snf.V_inv
    gens_arr = np.stack(gens)
    for i, d in enumerate(snf.diagonal):
        if d == 1:
            continue
        if d == 0:  # pragma: no cover - N * I forces full rank
            raise ArithmeticError("infinite quotient of a finite group")
        torsion.append(d)
        coeff = np.array([int(Vi[i, j]) % N for j in range(r)], dtype=np.int64)
        reps.append(G.reduce(coeff @ gens_arr))
    reps = np.stack(reps) if reps else np.zeros((0, G.dim), dtype=np.int64)
    return Quotient(AbelianGroupPresentation(tuple(torsion)), reps, G)
