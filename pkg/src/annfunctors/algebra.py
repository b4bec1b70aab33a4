"""Finite rings, finite bimodules and the maps between them.

Everything is a validated lookup table.  Ring elements are the indices
``0..n-1``; bimodule elements are residue tuples in invariant-factor form
``Z/d_1 x ... x Z/d_k`` and are indexed in lexicographic order (last
coordinate fastest).  Actions are stored as one integer ``k x k`` matrix per
ring element, ``left[x] @ a == x.a`` and ``right[x] @ a == a.x``.

All validation is exhaustive.  Objects are immutable after construction.
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from .errors import (
    BadUnit,
    CarrierMismatch,
    InvalidTable,
    NotAGroup,
    NotAdditive,
    NotAssociative,
    NotAssociativeAction,
    NotDistributive,
    NotEquivariant,
    NotMultiplicative,
    NotUnital,
    UnitActsNontrivially,
)


def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.flags.writeable = False
    return arr


def _first_violation(ok):
    """Index tuple of the first False entry of ``ok``, or None."""
    bad = np.argwhere(~np.asarray(ok))
    if len(bad) == 0:
        return None
    return tuple(int(i) for i in bad[0])


def _check(ok, exc, message, describe=lambda w: w):
    w = _first_violation(ok)
    if w is not None:
        w = describe(w)
        raise exc(f"{message} at {w}", witness=w)


class FiniteRing:
    """A finite unital ring given by addition and multiplication tables."""

    def __init__(self, add, mul, zero=0, one=1, name=None):
        add = np.asarray(add, dtype=np.int64)
        mul = np.asarray(mul, dtype=np.int64)
        if add.ndim != 2 or add.shape[0] != add.shape[1] or add.shape[0] == 0:
            raise InvalidTable("addition table must be a non-empty n x n table")
        n = add.shape[0]
        if mul.shape != (n, n):
            raise InvalidTable(f"multiplication table must be {n} x {n}")
        for label, t in (("addition", add), ("multiplication", mul)):
            if t.min() < 0 or t.max() >= n:
                raise InvalidTable(f"{label} table has entries outside 0..{n - 1}")
        if not (0 <= zero < n and 0 <= one < n):
            raise InvalidTable("zero and one must be element indices")
        self.n = n
        self.add = _frozen(add)
        self.mul = _frozen(mul)
        self.zero = int(zero)
        self.one = int(one)
        self.name = name
        self._validate()
        neg = np.empty(n, dtype=np.int64)
        for x in range(n):
            neg[x] = int(np.flatnonzero(self.add[x] == self.zero)[0])
        self.neg = _frozen(neg)

    def _validate(self):
        a, m, n = self.add, self.mul, self.n
        x, y, z = np.ix_(range(n), range(n), range(n))
        e = np.arange(n)
        _check(a[self.zero] == e, NotAGroup, "zero is not an additive identity", lambda w: (self.zero, w[0]))
        _check(a == a.T, NotAGroup, "addition is not commutative")
        _check(a[a[x, y], z] == a[x, a[y, z]], NotAGroup, "addition is not associative")
        _check((a == self.zero).any(axis=1), NotAGroup, "element has no additive inverse")
        _check(m[m[x, y], z] == m[x, m[y, z]], NotAssociative, "multiplication is not associative")
        _check(m[self.one] == e, BadUnit, "one is not a left unit", lambda w: (self.one, w[0]))
        _check(m[:, self.one] == e, BadUnit, "one is not a right unit", lambda w: (w[0], self.one))
        _check(m[x, a[y, z]] == a[m[x, y], m[x, z]], NotDistributive, "left distributivity fails")
        _check(m[a[x, y], z] == a[m[x, z], m[y, z]], NotDistributive, "right distributivity fails")
        _check((m[self.zero] == self.zero) & (m[:, self.zero] == self.zero), NotDistributive,
               "zero is not absorbing")

    def __repr__(self):
        return f"FiniteRing({self.name or self.n})"

    def __eq__(self, other):
        if not isinstance(other, FiniteRing):
            return NotImplemented
        return (self is other) or (
            self.n == other.n and self.zero == other.zero and self.one == other.one
            and np.array_equal(self.add, other.add) and np.array_equal(self.mul, other.mul))

    def __hash__(self):
        return hash((self.n, self.zero, self.one, self.add.tobytes(), self.mul.tobytes()))

    @property
    def elements(self):
        return range(self.n)

    @cached_property
    def additive_structure(self):
        """``(invariant_factors, coords)`` with ``coords[x]`` the residue tuple of ``x``.

        Obtained from the Smith form of the presentation with one generator
        per element and relations ``e_a + e_b - e_{a+b}``.
        """
        from .linalg import smith_normal_form

        n = self.n
        rows = []
        for a in range(n):
            for b in range(a, n):
                r = [0] * n
                r[a] += 1
                r[b] += 1
                r[int(self.add[a, b])] -= 1
                rows.append(r)
        snf = smith_normal_form(rows, compute_u=False)
        diag = snf.diagonal
        keep = [i for i, d in enumerate(diag) if d != 1]
        factors = tuple(int(diag[i]) for i in keep)
        if any(d == 0 for d in factors):  # pragma: no cover - finite tables cannot do this
            raise InvalidTable("additive group is not finite")
        coords = np.array([[int(snf.V[a][i]) % factors[j] for j, i in enumerate(keep)]
                           for a in range(n)], dtype=np.int64).reshape(n, len(keep))
        return factors, _frozen(coords)


def make_ring(n, add_table, mul_table, zero, one, name=None) -> FiniteRing:
    ring = FiniteRing(add_table, mul_table, zero, one, name=name)
    if ring.n != n:
        raise InvalidTable(f"tables describe {ring.n} elements, expected {n}")
    return ring


def ring_from_operations(elements, add, mul, zero, one, name=None) -> FiniteRing:
    """Tabulate a ring given by Python operations on a list of hashable elements."""
    elements = list(elements)
    index = {e: i for i, e in enumerate(elements)}
    at = [[index[add(a, b)] for b in elements] for a in elements]
    mt = [[index[mul(a, b)] for b in elements] for a in elements]
    return FiniteRing(at, mt, index[zero], index[one], name=name)


def cyclic_ring(n) -> FiniteRing:
    if n < 1:
        raise InvalidTable("cyclic ring needs n >= 1")
    r = np.arange(n)
    return FiniteRing((r[:, None] + r[None, :]) % n, (r[:, None] * r[None, :]) % n,
                      0, 1 % n, name=f"Z{n}")


def product_ring(first: FiniteRing, second: FiniteRing) -> FiniteRing:
    """Componentwise product; element ``(i, j)`` has index ``i * second.n + j``."""
    pairs = [(i, j) for i in range(first.n) for j in range(second.n)]
    return ring_from_operations(
        pairs,
        lambda a, b: (int(first.add[a[0], b[0]]), int(second.add[a[1], b[1]])),
        lambda a, b: (int(first.mul[a[0], b[0]]), int(second.mul[a[1], b[1]])),
        (first.zero, second.zero), (first.one, second.one),
        name=f"{first.name or first.n}x{second.name or second.n}")


def dual_numbers(n) -> FiniteRing:
    """``Z/n[e]/(e^2)``; element ``a + b e`` has index ``a * n + b``."""
    pairs = [(a, b) for a in range(n) for b in range(n)]
    return ring_from_operations(
        pairs,
        lambda u, v: ((u[0] + v[0]) % n, (u[1] + v[1]) % n),
        lambda u, v: ((u[0] * v[0]) % n, (u[0] * v[1] + u[1] * v[0]) % n),
        (0, 0), (1 % n, 0), name=f"Z{n}[e]")


def upper_triangular_ring(n) -> FiniteRing:
    """Upper triangular 2 x 2 matrices over ``Z/n`` (non-commutative for n >= 2)."""
    triples = list(itertools.product(range(n), repeat=3))  # (a, b, d) ~ [[a, b], [0, d]]
    return ring_from_operations(
        triples,
        lambda u, v: tuple((s + t) % n for s, t in zip(u, v)),
        lambda u, v: ((u[0] * v[0]) % n, (u[0] * v[1] + u[1] * v[2]) % n, (u[2] * v[2]) % n),
        (0, 0, 0), (1 % n, 0, 1 % n), name=f"T2(Z{n})")


PRESET_RINGS = {
    "Z2": lambda: cyclic_ring(2),
    "Z3": lambda: cyclic_ring(3),
    "Z4": lambda: cyclic_ring(4),
    "Z6": lambda: cyclic_ring(6),
    "Z2xZ2": lambda: product_ring(cyclic_ring(2), cyclic_ring(2)),
}


def preset_ring(name) -> FiniteRing:
    try:
        factory = PRESET_RINGS[name]
    except KeyError:
        raise InvalidTable(f"unknown ring preset {name!r}; known: {sorted(PRESET_RINGS)}") from None
    ring = factory()
    ring.name = name
    return ring


# -- bimodules ---------------------------------------------------------------

def _check_factors(factors):
    factors = tuple(int(d) for d in factors)
    for d in factors:
        if d < 2:
            raise InvalidTable(f"invariant factors must be >= 2, got {factors}")
    for d, e in zip(factors, factors[1:]):
        if e % d:
            raise InvalidTable(f"invariant factors must form a divisibility chain, got {factors}")
    return factors


def _group_elements(factors):
    k = len(factors)
    tuples = list(itertools.product(*[range(d) for d in factors]))
    return np.array(tuples, dtype=np.int64).reshape(len(tuples), k)


def _mixed_radix(factors):
    w = np.ones(len(factors), dtype=np.int64)
    for i in range(len(factors) - 2, -1, -1):
        w[i] = w[i + 1] * factors[i + 1]
    return w


class FiniteBimodule:
    """An R-bimodule ``Z/d_1 x ... x Z/d_k`` with action matrices per ring element."""

    def __init__(self, ring: FiniteRing, invariant_factors, left, right, _validate=True):
        self.ring = ring
        self.invariant_factors = _check_factors(invariant_factors)
        k = len(self.invariant_factors)
        self.k = k
        self.moduli = np.array(self.invariant_factors, dtype=np.int64).reshape(k)
        left = np.asarray(left, dtype=np.int64).reshape(ring.n, k, k)
        right = np.asarray(right, dtype=np.int64).reshape(ring.n, k, k)
        self.left = _frozen(left % self.moduli[None, :, None] if k else left)
        self.right = _frozen(right % self.moduli[None, :, None] if k else right)
        self.size = int(np.prod(self.moduli)) if k else 1
        self._weights = _mixed_radix(self.invariant_factors)
        if _validate:
            self._validate()

    # element bookkeeping

    @cached_property
    def elements(self):
        return _frozen(_group_elements(self.invariant_factors))

    def reduce(self, values):
        """Reduce an array whose last axis holds coordinates."""
        values = np.asarray(values)
        if values.dtype.kind == "i":
            return np.mod(values, self.moduli.astype(values.dtype))
        return np.mod(values, self.moduli)

    def index(self, coords):
        coords = self.reduce(np.asarray(coords, dtype=np.int64))
        return (coords * self._weights).sum(axis=-1)

    def act_left(self, x, a):
        """``x.a`` for broadcastable ring-index arrays ``x`` and coordinate arrays ``a``."""
        return self.reduce((self.left[x] @ np.asarray(a)[..., None])[..., 0])

    def act_right(self, a, x):
        return self.reduce((self.right[x] @ np.asarray(a)[..., None])[..., 0])

    def action_tables(self):
        """Full tables ``(n, size, k)`` of ``x.a`` and ``a.x``."""
        el = self.elements
        x = np.arange(self.ring.n)[:, None]
        return self.act_left(x, el[None, :, :]), self.act_right(el[None, :, :], x)

    def _validate(self):
        lt, rt = self.action_tables()
        _validate_action_tables(self.ring, self, self.index(lt), self.index(rt))

    def restrict(self, p: "RingHom") -> "FiniteBimodule":
        """This module viewed over ``p.source`` through ``x.a = p(x)a``, ``a.x = a p(x)``."""
        if p.target != self.ring:
            raise CarrierMismatch("ring homomorphism does not land in this module's ring")
        return FiniteBimodule(p.source, self.invariant_factors,
                              self.left[p.table], self.right[p.table], _validate=False)

    def __eq__(self, other):
        if not isinstance(other, FiniteBimodule):
            return NotImplemented
        return (self is other) or (
            self.ring == other.ring and self.invariant_factors == other.invariant_factors
            and np.array_equal(self.left, other.left) and np.array_equal(self.right, other.right))

    def __hash__(self):
        return hash((self.ring, self.invariant_factors, self.left.tobytes(), self.right.tobytes()))

    def __repr__(self):
        return f"FiniteBimodule({self.ring!r}, {list(self.invariant_factors)})"


def _validate_action_tables(ring, module, left_idx, right_idx):
    """Exhaustive bimodule axioms on index tables ``(n, size)``."""
    el = module.elements
    madd = module.index(el[:, None, :] + el[None, :, :])
    n, s = ring.n, module.size
    L, Rt = left_idx, right_idx
    x, a, b = np.ix_(range(n), range(s), range(s))

    def elt(w):
        return (w[0], tuple(int(c) for c in el[w[1]])) + tuple(
            tuple(int(c) for c in el[i]) for i in w[2:])

    _check(L[x, madd[a, b]] == madd[L[x, a], L[x, b]], NotAdditive, "x(a+b) != xa + xb", elt)
    _check(Rt[x, madd[a, b]] == madd[Rt[x, a], Rt[x, b]], NotAdditive, "(a+b)x != ax + bx", elt)
    x, y, a = np.ix_(range(n), range(n), range(s))

    def rre(w):
        return (w[0], w[1], tuple(int(c) for c in el[w[2]]))

    radd, rmul = ring.add, ring.mul
    _check(L[radd[x, y], a] == madd[L[x, a], L[y, a]], NotAdditive, "(x+y)a != xa + ya", rre)
    _check(Rt[radd[x, y], a] == madd[Rt[x, a], Rt[y, a]], NotAdditive, "a(x+y) != ax + ay", rre)
    _check(L[rmul[x, y], a] == L[x, L[y, a]], NotAssociativeAction, "(xy)a != x(ya)", rre)
    _check(Rt[rmul[x, y], a] == Rt[y, Rt[x, a]], NotAssociativeAction, "a(xy) != (ax)y", rre)
    _check(Rt[y, L[x, a]] == L[x, Rt[y, a]], NotAssociativeAction, "(xa)y != x(ay)", rre)
    ids = np.arange(s)
    _check(L[ring.one] == ids, UnitActsNontrivially, "1a != a",
           lambda w: (ring.one, tuple(int(c) for c in el[w[0]])))
    _check(Rt[ring.one] == ids, UnitActsNontrivially, "a1 != a",
           lambda w: (ring.one, tuple(int(c) for c in el[w[0]])))


def _as_coordinate_table(table, module_size, k, shape_prefix):
    """Accept either element indices or coordinate tuples; return coordinates."""
    t = np.asarray(table, dtype=np.int64)
    if t.shape == shape_prefix:
        return None, t
    if t.shape == shape_prefix + (k,):
        return t, None
    raise InvalidTable(f"table has shape {t.shape}, expected {shape_prefix} indices "
                       f"or {shape_prefix + (k,)} coordinates")


def make_bimodule(ring: FiniteRing, invariant_factors, left_table, right_table) -> FiniteBimodule:
    """Validate full action tables ``R x M -> M`` and build the bimodule.

    Tables are indexed ``[x][a]`` with ``a`` the lexicographic element index;
    entries are coordinate tuples (or element indices).
    """
    factors = _check_factors(invariant_factors)
    k = len(factors)
    probe = FiniteBimodule(ring, factors, np.zeros((ring.n, k, k)), np.zeros((ring.n, k, k)),
                           _validate=False)
    s = probe.size
    tables = []
    for t in (left_table, right_table):
        coords, idx = _as_coordinate_table(t, s, k, (ring.n, s))
        if idx is None:
            if (coords < 0).any() or (coords >= probe.moduli).any():
                raise InvalidTable("action table coordinates out of range")
            idx = probe.index(coords)
        elif idx.min() < 0 or idx.max() >= s:
            raise InvalidTable("action table element indices out of range")
        tables.append(idx)
    _validate_action_tables(ring, probe, tables[0], tables[1])
    # additivity makes the action determined by generator images
    gens = [int(probe.index(np.eye(k, dtype=np.int64)[j])) for j in range(k)]
    if k:
        left = np.stack([probe.elements[tables[0][:, g]] for g in gens], axis=-1)
        right = np.stack([probe.elements[tables[1][:, g]] for g in gens], axis=-1)
    else:
        left = right = np.zeros((ring.n, 0, 0))
    return FiniteBimodule(ring, factors, left, right, _validate=False)


def bimodule_from_matrices(ring, invariant_factors, left, right) -> FiniteBimodule:
    """Bimodule from per-element action matrices; validated exhaustively."""
    return FiniteBimodule(ring, invariant_factors, left, right)


def regular_bimodule(ring: FiniteRing) -> FiniteBimodule:
    """``R`` acting on its own additive group by multiplication."""
    factors, coords = ring.additive_structure
    k = len(factors)
    lookup = {tuple(int(c) for c in coords[x]): x for x in range(ring.n)}
    gens = [lookup[tuple(int(v) for v in np.eye(k, dtype=np.int64)[j])] for j in range(k)]
    left = np.zeros((ring.n, k, k), dtype=np.int64)
    right = np.zeros((ring.n, k, k), dtype=np.int64)
    for x in range(ring.n):
        for j, g in enumerate(gens):
            left[x, :, j] = coords[ring.mul[x, g]]
            right[x, :, j] = coords[ring.mul[g, x]]
    return FiniteBimodule(ring, factors, left, right)


def zero_bimodule(ring: FiniteRing) -> FiniteBimodule:
    return FiniteBimodule(ring, (), np.zeros((ring.n, 0, 0)), np.zeros((ring.n, 0, 0)))


def _integer_value(ring):
    """``c`` with ``x = c * 1`` for every element, when ``R`` is cyclic on its unit."""
    values = {}
    x, c = ring.zero, 0
    while x not in values:
        values[x] = c
        x, c = int(ring.add[x, ring.one]), c + 1
    if len(values) != ring.n:
        raise InvalidTable("ring is not generated additively by its unit")
    return np.array([values[x] for x in range(ring.n)], dtype=np.int64)


def reduction_bimodule(ring: FiniteRing, modulus) -> FiniteBimodule:
    """``Z/m`` over a cyclic ring ``Z/n`` (``m | n``) acting through reduction mod m."""
    c = _integer_value(ring)
    if ring.n % modulus:
        raise InvalidTable(f"modulus {modulus} does not divide the ring order {ring.n}")
    mats = (c % modulus).reshape(ring.n, 1, 1)
    return FiniteBimodule(ring, (modulus,), mats, mats)


PRESET_BIMODULES = ("regular", "trivial", "reduction")


def preset_bimodule(ring, name, modulus=None) -> FiniteBimodule:
    if name == "regular":
        return regular_bimodule(ring)
    if name == "trivial":
        return zero_bimodule(ring)
    if name == "reduction":
        if modulus is None:
            raise InvalidTable("reduction bimodule needs a modulus")
        return reduction_bimodule(ring, int(modulus))
    raise InvalidTable(f"unknown bimodule preset {name!r}; known: {list(PRESET_BIMODULES)}")


# -- maps --------------------------------------------------------------------

class RingHom:
    """A unital ring homomorphism ``p: source -> target`` as an index table."""

    def __init__(self, source: FiniteRing, target: FiniteRing, table):
        t = np.asarray(table, dtype=np.int64)
        if t.shape != (source.n,):
            raise InvalidTable(f"homomorphism table must have {source.n} entries")
        if t.min() < 0 or t.max() >= target.n:
            raise InvalidTable("homomorphism table has entries outside the target ring")
        self.source, self.target, self.table = source, target, _frozen(t)
        x, y = np.ix_(range(source.n), range(source.n))
        _check(t[source.add[x, y]] == target.add[t[x], t[y]], NotAdditive, "p(x+y) != p(x)+p(y)")
        _check(t[source.mul[x, y]] == target.mul[t[x], t[y]], NotMultiplicative, "p(xy) != p(x)p(y)")
        if t[source.one] != target.one:
            raise NotUnital(f"p(1) = {int(t[source.one])} is not the unit {target.one}",
                            witness=(source.one,))

    def __call__(self, x):
        return self.table[x]

    def compose(self, inner: "RingHom") -> "RingHom":
        """``self o inner``."""
        if inner.target != self.source:
            raise CarrierMismatch("homomorphisms are not composable")
        return RingHom(inner.source, self.target, self.table[inner.table])

    def __eq__(self, other):
        if not isinstance(other, RingHom):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((self.source, self.target, self.table.tobytes()))

    def __repr__(self):
        return f"RingHom({self.table.tolist()})"


def make_ring_hom(source, target, table) -> RingHom:
    return RingHom(source, target, table)


def identity_hom(ring) -> RingHom:
    return RingHom(ring, ring, np.arange(ring.n))


class EquivariantMap:
    """A group homomorphism ``q: M -> M'`` with ``q(xa) = p(x)q(a)``, ``q(ax) = q(a)p(x)``.

    ``matrix`` has shape ``(k', k)``; its column ``j`` is the image of the j-th
    generator.
    """

    def __init__(self, hom: RingHom, source: FiniteBimodule, target: FiniteBimodule, table):
        if source.ring != hom.source or target.ring != hom.target:
            raise CarrierMismatch("bimodules are not over the homomorphism's rings")
        self.hom, self.source, self.target = hom, source, target
        coords, idx = _as_coordinate_table(table, source.size, target.k, (source.size,))
        if idx is not None:
            if idx.min() < 0 or idx.max() >= target.size:
                raise InvalidTable("map table element indices out of range")
            coords = target.elements[idx]
        elif (coords < 0).any() or (coords >= target.moduli).any():
            raise InvalidTable("map table coordinates out of range")
        qidx = target.index(coords)
        el = source.elements
        sadd = source.index(el[:, None, :] + el[None, :, :])
        tel = target.elements
        tadd = target.index(tel[:, None, :] + tel[None, :, :])
        a, b = np.ix_(range(source.size), range(source.size))
        _check(qidx[sadd[a, b]] == tadd[qidx[a], qidx[b]], NotAdditive, "q(a+b) != q(a)+q(b)")
        slt, srt = source.action_tables()
        tlt, trt = target.action_tables()
        tl, tr = target.index(tlt), target.index(trt)
        p = hom.table
        x, a = np.ix_(range(source.ring.n), range(source.size))
        _check(qidx[source.index(slt)[x, a]] == tl[p[x], qidx[a]], NotEquivariant, "q(xa) != p(x)q(a)")
        _check(qidx[source.index(srt)[x, a]] == tr[p[x], qidx[a]], NotEquivariant, "q(ax) != q(a)p(x)")
        k = source.k
        gens = [int(source.index(np.eye(k, dtype=np.int64)[j])) for j in range(k)]
        mat = np.stack([target.elements[qidx[g]] for g in gens], axis=-1) if k else np.zeros((target.k, 0))
        self.matrix = _frozen(np.asarray(mat).reshape(target.k, k))
        self.table = _frozen(qidx)

    def __call__(self, values):
        """Apply to coordinate arrays (last axis = source coordinates)."""
        return self.target.reduce(np.asarray(values) @ self.matrix.T)

    def compose(self, inner: "EquivariantMap") -> "EquivariantMap":
        if inner.target != self.source:
            raise CarrierMismatch("equivariant maps are not composable")
        return EquivariantMap(self.hom.compose(inner.hom), inner.source, self.target,
                              self.table[inner.table])

    def __repr__(self):
        return f"EquivariantMap({self.matrix.tolist()})"


def make_equivariant_map(p, source, target, table) -> EquivariantMap:
    return EquivariantMap(p, source, target, table)


def identity_map(module) -> EquivariantMap:
    return EquivariantMap(identity_hom(module.ring), module, module, np.arange(module.size))


def zero_map(p, source, target) -> EquivariantMap:
    return EquivariantMap(p, source, target, np.zeros(source.size, dtype=np.int64))
