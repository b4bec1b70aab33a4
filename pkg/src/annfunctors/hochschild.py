"""Hochschild cochains of ``R`` over the integers, degrees 1 to 3.

Cochains are multilinear tables ``R^n -> M``.  They are stored in the same
dense layout as Mac Lane cochains, so a degree-3 Hochschild cochain embeds as
the quadruple ``(0, f, 0, 0)``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .algebra import FiniteBimodule, FiniteRing
from .cochains import Cochain, Cochain3, grid, take
from .errors import CarrierMismatch, InvalidTable, NotMultilinear
from .linalg import (FiniteAbelianGroup, LinearMap, Subgroup, element_order, kernel,
                     quotient_invariants, solve_mod)
from .maclane import Cohomology, _constraint_map, _left, _right, relation_values


class _Table1(Cochain):
    slots = (("f", 1),)


class _Table2(Cochain):
    slots = (("f", 2),)


class _Table3(Cochain):
    slots = (("f", 3),)


class _Table4(Cochain):
    slots = (("f", 4),)


_TABLES = {1: _Table1, 2: _Table2, 3: _Table3, 4: _Table4}


def additivity_defects(ring, module, table, arity):
    """Stack of ``f(.., x+x', ..) - f(.., x, ..) - f(.., x', ..)`` over every slot.

    Output shape ``(..., arity, n, n, (n,)*(arity-1), k)``; zero iff multilinear.
    """
    A, n = ring.add, ring.n
    out = []
    for i in range(arity):
        g = grid(n, arity + 1)
        x, x2, rest = g[0], g[1], list(g[2:])
        args = lambda v: rest[:i] + [v] + rest[i:]
        out.append(take(table, *args(A[x, x2])) - take(table, *args(x)) - take(table, *args(x2)))
    shape = table.shape[: table.ndim - arity - 1] + (n,) * (arity + 1) + (module.k,)
    return module.reduce(np.stack([np.broadcast_to(d, shape) for d in out], axis=-arity - 3))


def hoch_d_table(ring, module, table, degree):
    """Hochschild coboundary of a (batched) degree-``degree`` table, ``degree`` in 0..3.

    Degree 0 takes a coordinate vector ``m`` and returns ``x m - m x``.
    """
    n, P = ring.n, ring.mul
    L = lambda a, v: _left(module, a, v)
    R = lambda v, a: _right(module, v, a)
    if degree == 0:
        x = np.arange(n)
        v = L(x, table[..., None, :]) - R(table[..., None, :], x)
        return module.reduce(v)
    if degree == 1:
        x, y = grid(n, 2)
        v = L(x, take(table, y)) - take(table, P[x, y]) + R(take(table, x), y)
    elif degree == 2:
        x, y, z = grid(n, 3)
        v = (L(x, take(table, y, z)) - take(table, P[x, y], z) + take(table, x, P[y, z])
             - R(take(table, x, y), z))
    elif degree == 3:
        z = np.zeros(table.shape[:-4] + (n,) * 4 + (module.k,), dtype=np.int64)
        return relation_values(ring, module, z, table, table, table, "M1")
    else:
        raise ValueError("Hochschild coboundary implemented for degrees 0 to 3")
    lead = table.shape[: table.ndim - degree - 1]
    return module.reduce(np.broadcast_to(v, lead + (n,) * (degree + 1) + (module.k,)))


class HochCochain:
    """A multilinear table ``R^degree -> M``; multilinearity is checked on construction."""

    def __init__(self, ring: FiniteRing, module: FiniteBimodule, degree: int, table, check=True):
        if degree not in (1, 2, 3):
            raise InvalidTable("Hochschild cochains have degree 1, 2 or 3")
        self.ring, self.module, self.degree = ring, module, degree
        self._cochain = _TABLES[degree](ring, module, f=table)
        self.table = self._cochain.f
        if check:
            bad = np.argwhere(additivity_defects(ring, module, self.table, degree).any(axis=-1))
            if len(bad):
                slot, *args = (int(v) for v in bad[0])
                raise NotMultilinear(f"not additive in argument {slot + 1}",
                                     witness=(slot, *args))

    @classmethod
    def zero(cls, ring, module, degree):
        return cls(ring, module, degree, None, check=False)

    def _same(self, other):
        if not isinstance(other, HochCochain) or other.degree != self.degree \
                or other.module != self.module:
            raise CarrierMismatch("Hochschild cochains of different shape")

    def __add__(self, other):
        self._same(other)
        return HochCochain(self.ring, self.module, self.degree, self.table + other.table, check=False)

    def __sub__(self, other):
        self._same(other)
        return HochCochain(self.ring, self.module, self.degree, self.table - other.table, check=False)

    def __neg__(self):
        return HochCochain(self.ring, self.module, self.degree, -self.table, check=False)

    def __eq__(self, other):
        if not isinstance(other, HochCochain):
            return NotImplemented
        return (other.degree == self.degree and other.module == self.module
                and np.array_equal(other.table, self.table))

    __hash__ = None

    def is_zero(self):
        return not self.table.any()

    def pack(self):
        return self._cochain.pack(normalized=True)

    @classmethod
    def from_vector(cls, ring, module, degree, vec, check=False):
        t = _TABLES[degree].unpack_tables(ring, module, vec, normalized=True)["f"]
        return cls(ring, module, degree, t, check=check)

    def to_json(self):
        return {"theory": "hochschild", "degree": self.degree, "table": self.table.tolist()}

    def __repr__(self):
        return f"HochCochain(degree={self.degree}, {self.ring!r}, {self.module!r})"


def hoch_d(f: HochCochain) -> HochCochain:
    """``(du)(x,y) = x u(y) - u(xy) + u(x) y`` and
    ``(dv)(x,y,z) = x v(y,z) - v(xy,z) + v(x,yz) - v(x,y) z``."""
    if f.degree not in (1, 2):
        raise InvalidTable("hoch_d is defined on degrees 1 and 2")
    return HochCochain(f.ring, f.module, f.degree + 1,
                       hoch_d_table(f.ring, f.module, f.table, f.degree), check=False)


def is_hoch_cocycle(f: HochCochain) -> bool:
    """``d f = 0``; in degree 3 this is the associativity-type condition ``M1`` on ``f``."""
    return not hoch_d_table(f.ring, f.module, f.table, f.degree).any()


def embed_to_maclane(f: HochCochain) -> Cochain3:
    """The quadruple ``(0, f, 0, 0)``."""
    if f.degree != 3:
        raise InvalidTable("only degree-3 Hochschild cochains embed as 3-cochains")
    return Cochain3(f.ring, f.module, alpha=f.table)


# -- subgroups in normalized table coordinates ------------------------------

def _defect_rows(ring, module, arity, extra=None):
    """Constraint rows on normalized ``arity``-tables: additivity and optionally ``extra``."""
    T = _TABLES[arity]
    dom = T.table_group(ring, module, normalized=True)
    if dom.dim == 0:
        return dom, np.zeros((0, 0), dtype=np.int64), np.zeros(0, dtype=np.int64)
    eye = np.eye(dom.dim, dtype=np.int64)
    t = T.unpack_tables(ring, module, eye, normalized=True)["f"]
    blocks = [additivity_defects(ring, module, t, arity)]
    if extra is not None:
        blocks.append(extra(t))
    rows, moduli = [], []
    mod = np.asarray(module.invariant_factors, dtype=np.int64)
    for v in blocks:
        v = v.reshape(dom.dim, -1, module.k)
        for j in range(module.k):
            block = np.unique(v[:, :, j].T, axis=0)
            rows.append(block)
            moduli.append(np.full(len(block), mod[j]))
    if not rows:
        return dom, np.zeros((0, dom.dim), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return dom, np.concatenate(rows), np.concatenate(moduli)


@lru_cache(maxsize=64)
def multilinear_subgroup(ring, module, arity) -> Subgroup:
    dom, rows, moduli = _defect_rows(ring, module, arity)
    return kernel(_constraint_map(dom, rows, moduli))


@lru_cache(maxsize=64)
def hoch_cocycles(ring, module, degree) -> Subgroup:
    """Multilinear ``f`` of the given degree with ``d f = 0``."""
    dom, rows, moduli = _defect_rows(
        ring, module, degree, extra=lambda t: hoch_d_table(ring, module, t, degree))
    return kernel(_constraint_map(dom, rows, moduli))


def _hoch_d_map(ring, module, degree):
    """``d`` from multilinear degree-``degree`` cochains, as a map on the generators."""
    cod = _TABLES[degree + 1].table_group(ring, module, normalized=True)
    if degree == 0:
        gens = np.eye(module.k, dtype=np.int64)
    else:
        gens = multilinear_subgroup(ring, module, degree).generators
    if degree == 0:
        vals = hoch_d_table(ring, module, gens, 0)
    else:
        t = _TABLES[degree].unpack_tables(ring, module, gens, normalized=True)["f"]
        vals = hoch_d_table(ring, module, t, degree)
    out = _TABLES[degree + 1].pack_tables(ring, {"f": vals}, normalized=True)
    return gens, cod, out


@lru_cache(maxsize=64)
def hoch_coboundaries(ring, module, degree) -> Subgroup:
    _, cod, out = _hoch_d_map(ring, module, degree - 1)
    return Subgroup(cod, out)


def hoch_cohomology_group(ring: FiniteRing, module: FiniteBimodule, degree: int) -> Cohomology:
    """``H^n`` for ``n`` in 1..3; ``H^1`` is derivations modulo inner derivations."""
    if degree not in (1, 2, 3):
        raise ValueError("Hochschild cohomology is available in degrees 1 to 3")
    Z, B = hoch_cocycles(ring, module, degree), hoch_coboundaries(ring, module, degree)
    q = quotient_invariants(B, Z)
    reps = [HochCochain.from_vector(ring, module, degree, r) for r in q.representatives]
    return Cohomology(q.group, reps, Z, B, "hochschild", degree)


def hoch_z1_group(ring, module):
    """Additive derivations ``u(xy) = x u(y) + u(x) y``."""
    return hoch_cocycles(ring, module, 1).presentation()


def hoch_coboundary_witness(f: HochCochain):
    """A multilinear ``g`` of degree ``f.degree - 1`` with ``hoch_d(g) = f``, or None."""
    if f.degree not in (2, 3):
        raise InvalidTable("witnesses are sought for degrees 2 and 3")
    gens, cod, out = _hoch_d_map(f.ring, f.module, f.degree - 1)
    dom = FiniteAbelianGroup([element_order(_TABLES[f.degree - 1].table_group(
        f.ring, f.module, normalized=True), g) for g in gens])
    x = solve_mod(LinearMap(dom, cod, out.T), f.pack())
    if x is None:
        return None
    vec = gens.T @ x
    return HochCochain.from_vector(f.ring, f.module, f.degree - 1, vec)
