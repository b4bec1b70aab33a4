"""Reduced Ann-categories ``(R, M, h)`` and functors of type ``(p, q)`` between them.

A functor of type ``(p, q)`` from ``(R, M, h)`` to ``(R', M', h')`` is given by
its associated functions ``mu, nu: R^2 -> M'`` (normalized).  It is an
Ann-functor exactly when

    sigma'*(x,y,z,t) - sigma_*(x,y,z,t) = mu(x,y) + mu(z,t) - mu(x+z,y+t)
                                          - mu(x,z) - mu(y,t) + mu(x+y,z+t)
    alpha'*(x,y,z)   - alpha_*(x,y,z)   = x nu(y,z) - nu(xy,z) + nu(x,yz) - nu(x,y) z
    lam'*(x,y,z)     - lam_*(x,y,z)     = nu(x,y+z) - nu(x,y) - nu(x,z) + x mu(y,z) - mu(xy,xz)
    rho'*(x,y,z)     - rho_*(x,y,z)     = nu(x+y,z) - nu(x,z) - nu(y,z) + mu(x,y) z - mu(xz,yz)

where ``h'* = p^* h'`` and ``h_* = q_* h``.  The right-hand side is the
coboundary of the 2-cochain ``(-mu, nu)``, which is what ``cochain()`` returns.
Throughout, ``M'`` is an ``R``-bimodule through ``p``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .algebra import EquivariantMap, FiniteBimodule, FiniteRing, RingHom, zero_map
from .cochains import CheckReport, Cochain1, Cochain2, Cochain3, first_failures, grid, take
from .errors import CarrierMismatch, InvalidTable, MismatchedType, NotACocycle, NotNormalized
from .hochschild import (HochCochain, additivity_defects, hoch_coboundary_witness,
                         hoch_cocycles, hoch_cohomology_group)
from .linalg import AbelianGroupPresentation, LinearMap, Subgroup, quotient_invariants, solve_mod
from .maclane import (_full, _left, _right, cohomology_group, d1_witness, in_b3, is_z3, pullback,
                      pushforward, z1_subgroup)

EXHAUSTIVE_LIMIT = 2 ** 20


@dataclass(frozen=True, eq=False)
class ReducedAnnCategory:
    """``(R, M, h)`` with ``h`` a Mac Lane 3-cocycle; validated on construction."""

    ring: FiniteRing
    module: FiniteBimodule
    h: Cochain3 = None

    def __post_init__(self):
        if self.module.ring != self.ring:
            raise CarrierMismatch("bimodule is not over the category's ring")
        if self.h is None:
            object.__setattr__(self, "h", Cochain3.zero(self.ring, self.module))
        if self.h.module != self.module:
            raise CarrierMismatch("constraint cochain has different coefficients")
        if self.h.is_zero():
            return
        report = is_z3(self.h)
        if not report.passed:
            f = report.failures[0]
            raise NotACocycle(f"constraint cochain fails {f['relation']} at {f['witness']}",
                              witness=(f["relation"], tuple(f["witness"])))


@dataclass(frozen=True)
class Morphism:
    """The arrow ``(x, a)``: an automorphism ``a`` of the object ``x``."""

    category: ReducedAnnCategory = field(repr=False, compare=False)
    x: int
    a: tuple

    def _make(self, x, a):
        a = tuple(int(v) for v in self.category.module.reduce(np.asarray(a, dtype=np.int64)))
        return Morphism(self.category, int(x), a)

    def compose(self, other: "Morphism") -> "Morphism":
        if other.x != self.x:
            raise CarrierMismatch("arrows between different objects do not compose")
        return self._make(self.x, np.add(self.a, other.a))

    def oplus(self, other: "Morphism") -> "Morphism":
        return self._make(self.category.ring.add[self.x, other.x], np.add(self.a, other.a))

    def otimes(self, other: "Morphism") -> "Morphism":
        """``(x, a) (x) (y, b) = (xy, a y + x b)``."""
        M = self.category.module
        a, b = np.asarray(self.a, dtype=np.int64), np.asarray(other.a, dtype=np.int64)
        return self._make(self.category.ring.mul[self.x, other.x],
                          M.act_right(a, other.x) + M.act_left(self.x, b))


class AnnFunctorStructure:
    """A functor of type ``(p, q)`` with associated functions ``(mu, nu)``."""

    def __init__(self, p: RingHom, q: EquivariantMap, mu=None, nu=None):
        if q.hom != p:
            raise CarrierMismatch("q is not equivariant over p")
        self.p, self.q = p, q
        self.module = q.target.restrict(p)
        g = Cochain2(p.source, self.module, mu=mu, nu=nu)
        if not g.is_normalized():
            raise NotNormalized("associated functions must vanish when an argument is 0")
        self.mu, self.nu = g.mu, g.nu

    @property
    def ring(self):
        return self.p.source

    def cochain(self) -> Cochain2:
        """The 2-cochain ``(-mu, nu)`` whose coboundary is the right-hand side."""
        return Cochain2(self.ring, self.module, mu=-self.mu, nu=self.nu)

    @classmethod
    def from_cochain(cls, p, q, g: Cochain2):
        return cls(p, q, mu=-g.mu, nu=g.nu)

    def same_type(self, other):
        return self.p == other.p and np.array_equal(self.q.table, other.q.table) \
            and self.q.source == other.q.source and self.q.target == other.q.target

    def to_json(self):
        return {"p": self.p.table.tolist(), "q": self.q.table.tolist(),
                "mu": self.mu.tolist(), "nu": self.nu.tolist()}

    def __repr__(self):
        return f"AnnFunctorStructure(p={self.p.table.tolist()}, q={self.q.table.tolist()})"


@dataclass
class StructurePair:
    """Tables ``xi: R^3 -> M`` and ``eta: R^2 -> M``."""

    ring: FiniteRing
    module: FiniteBimodule
    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        n, k = self.ring.n, self.module.k
        self.xi = _shaped(self.xi, (n,) * 3, k, "xi")
        self.eta = _shaped(self.eta, (n,) * 2, k, "eta")


def _shaped(t, prefix, k, name):
    t = np.asarray(t, dtype=np.int64)
    if k == 1 and t.shape == prefix:
        t = t[..., None]
    if t.shape != prefix + (k,):
        raise InvalidTable(f"{name} must have shape {prefix + (k,)}")
    return t


def build_sigma_from_structure(s: StructurePair) -> np.ndarray:
    """``sigma(x,y,z,t) = xi(x+y,z,t) - xi(x,y,z) + eta(y,z) + xi(x,z,y) - xi(x+z,y,t)``."""
    A = s.ring.add
    x, y, z, t = grid(s.ring.n, 4)
    v = (take(s.xi, A[x, y], z, t) - take(s.xi, x, y, z) + take(s.eta, y, z)
         + take(s.xi, x, z, y) - take(s.xi, A[x, z], y, t))
    return s.module.reduce(_full(v, s.ring.n, 4, s.module.k))


# -- obstruction and the functor equations -----------------------------------

def _check_type(p, q, source, target):
    if p.source != source.ring or p.target != target.ring:
        raise CarrierMismatch("p does not map the source ring to the target ring")
    if q.hom != p or q.source != source.module or q.target != target.module:
        raise CarrierMismatch("q does not map the source bimodule to the target bimodule over p")


def obstruction(p: RingHom, q: EquivariantMap, source: ReducedAnnCategory,
                target: ReducedAnnCategory) -> Cochain3:
    """``k = p^* h' - q_* h`` over ``(R, M')``."""
    _check_type(p, q, source, target)
    return pullback(p, target.h) - pushforward(q, source.h)


def functor_rhs_tables(ring, module, mu, nu):
    """Right-hand sides of the four functor equations for (batched) ``mu, nu``."""
    A, P, n, k = ring.add, ring.mul, ring.n, module.k
    L = lambda a, v: _left(module, a, v)
    R = lambda v, a: _right(module, v, a)
    x, y, z, t = grid(n, 4)
    sigma = (take(mu, x, y) + take(mu, z, t) - take(mu, A[x, z], A[y, t])
             - take(mu, x, z) - take(mu, y, t) + take(mu, A[x, y], A[z, t]))
    x, y, z = grid(n, 3)
    alpha = (L(x, take(nu, y, z)) - take(nu, P[x, y], z) + take(nu, x, P[y, z])
             - R(take(nu, x, y), z))
    lam = (take(nu, x, A[y, z]) - take(nu, x, y) - take(nu, x, z) + L(x, take(mu, y, z))
           - take(mu, P[x, y], P[x, z]))
    rho = (take(nu, A[x, y], z) - take(nu, x, z) - take(nu, y, z) + R(take(mu, x, y), z)
           - take(mu, P[x, z], P[y, z]))
    tables = {"sigma": (sigma, 4), "alpha": (alpha, 3), "lam": (lam, 3), "rho": (rho, 3)}
    return {c: module.reduce(_full(v, n, a, k)) for c, (v, a) in tables.items()}


_JSON = {"sigma": "sigma", "alpha": "alpha", "lam": "lambda", "rho": "rho"}


def is_functor(F: AnnFunctorStructure, source, target) -> CheckReport:
    """Evaluate the four functor equations; failures are named by component."""
    k = obstruction(F.p, F.q, source, target)
    rhs = functor_rhs_tables(F.ring, F.module, F.mu, F.nu)
    return first_failures({_JSON[c]: getattr(k, c) - rhs[c] for c in rhs}, F.module)


def _rhs_map(ring, module, mu_free=True):
    """The functor equations as a linear map on normalized ``(mu, nu)`` coordinates.

    With ``mu_free=False`` only ``nu`` is unknown and ``mu = 0``.
    """
    dom = Cochain2.table_group(ring, module, normalized=True)
    cod = Cochain3.table_group(ring, module)
    if not mu_free:
        half = dom.dim // 2
        dom2 = type(dom)(dom.moduli[half:])

        def fn(eye):
            vec = np.concatenate([np.zeros((len(eye), half), dtype=np.int64), eye], axis=1)
            t = Cochain2.unpack_tables(ring, module, vec, normalized=True)
            return Cochain3.pack_tables(ring, functor_rhs_tables(ring, module, t["mu"], t["nu"]))

        return LinearMap.from_function(dom2, cod, fn)

    def fn(eye):
        t = Cochain2.unpack_tables(ring, module, eye, normalized=True)
        return Cochain3.pack_tables(ring, functor_rhs_tables(ring, module, t["mu"], t["nu"]))

    return LinearMap.from_function(dom, cod, fn)


def functor_exists(p, q, source, target):
    """Solve the functor equations for normalized ``(mu, nu)``; a structure or None."""
    k = obstruction(p, q, source, target)
    module = k.module
    x = solve_mod(_rhs_map(p.source, module), k.pack())
    if x is None:
        return None
    t = Cochain2.unpack_tables(p.source, module, x, normalized=True)
    return AnnFunctorStructure(p, q, mu=t["mu"], nu=t["nu"])


def obstruction_vanishes(p, q, source, target) -> bool:
    """Whether the obstruction lies in ``B^3`` (membership test)."""
    return in_b3(obstruction(p, q, source, target))


def is_congruent(F: AnnFunctorStructure, G: AnnFunctorStructure, source=None, target=None):
    """A 1-cochain ``u`` with ``G.cochain() = F.cochain() - d1(u)``, or None."""
    if not F.same_type(G):
        raise MismatchedType("congruence compares functors of one type (p, q)")
    return d1_witness(F.cochain() - G.cochain())


# -- classification -----------------------------------------------------------

def _gate(ring, module, limit=EXHAUSTIVE_LIMIT):
    count = Cochain2.table_group(ring, module, normalized=True).order
    if ring.n * module.size > 16 or count > limit:
        raise ValueError(f"exhaustive search needs |R||M'| <= 16 and at most {limit} "
                         f"candidates; here |R||M'| = {ring.n * module.size}, "
                         f"{count} candidates")
    return count


def enumerate_functor_structures(p, q, source, target, batch=4096):
    """Every normalized ``(mu, nu)`` satisfying the functor equations (small carriers only)."""
    k = obstruction(p, q, source, target)
    ring, module = p.source, k.module
    _gate(ring, module)
    G = Cochain2.table_group(ring, module, normalized=True)
    target_vec = k.pack()
    found = []
    it = itertools.product(*[range(int(m)) for m in G.moduli])
    while True:
        chunk = np.array(list(itertools.islice(it, batch)), dtype=np.int64).reshape(-1, G.dim)
        if not len(chunk):
            break
        t = Cochain2.unpack_tables(ring, module, chunk, normalized=True)
        rhs = Cochain3.pack_tables(ring, functor_rhs_tables(ring, module, t["mu"], t["nu"]))
        ok = np.all(Cochain3.table_group(ring, module).reduce(rhs - target_vec) == 0, axis=1)
        for row in chunk[ok]:
            tt = Cochain2.unpack_tables(ring, module, row, normalized=True)
            found.append(AnnFunctorStructure(p, q, mu=tt["mu"], nu=tt["nu"]))
    return found


def congruence_classes(structures, source=None, target=None):
    """Group structures into congruence classes by pairwise ``is_congruent``."""
    classes = []
    for F in structures:
        for cls in classes:
            if is_congruent(cls[0], F) is not None:
                cls.append(F)
                break
        else:
            classes.append([F])
    return classes


def classify_functors(p, q, source, target, exhaustive=False):
    """One representative per congruence class of Ann-functors of type ``(p, q)``.

    Representatives are ``g0 + z`` with ``g0`` the solver's witness and ``z``
    running over the classes of ``H^2`` of ``(R, M')``.  With ``exhaustive``
    the classes are instead found by enumerating every structure.
    """
    if exhaustive:
        return [cls[0] for cls in congruence_classes(
            enumerate_functor_structures(p, q, source, target))]
    F0 = functor_exists(p, q, source, target)
    if F0 is None:
        return []
    H = cohomology_group(F0.ring, F0.module, 2)
    g0 = F0.cochain()
    reps = []
    for z in H.classes():
        g = g0 + Cochain2.from_vector(F0.ring, F0.module, z, normalized=True)
        reps.append(AnnFunctorStructure.from_cochain(p, q, g))
    return reps


@dataclass
class AutGroup:
    """A finite abelian group with generators; ``elements()`` lists it exhaustively."""

    group: AbelianGroupPresentation
    generators: list
    subgroup: Subgroup = field(repr=False)
    _make: object = field(repr=False, default=None)

    @property
    def order(self):
        return self.group.order

    def __iter__(self):
        return iter((self.group, self.generators))

    def elements(self):
        return [self._make(v) for v in self.subgroup.elements()]


def aut_group(F: AnnFunctorStructure, source=None, target=None) -> AutGroup:
    """Automorphisms of ``F``: normalized 1-cochains ``u`` with ``d1(u) = 0``."""
    ring, module = F.ring, F.module
    Z = z1_subgroup(ring, module)
    q = quotient_invariants(Subgroup(Z.ambient), Z)
    make = lambda v: Cochain1.from_vector(ring, module, v, normalized=True)
    return AutGroup(q.group, [make(r) for r in q.representatives], Z, make)


# -- strong functors of type (p, 0) -------------------------------------------

@dataclass
class StrongReport:
    sigma_star_zero: bool
    alpha_multilinear: bool
    hochschild_class_zero: bool
    exists: bool
    witness: object = None  # bi-additive nu table or None

    def to_json(self):
        return {"sigma_star_zero": self.sigma_star_zero,
                "alpha_multilinear": self.alpha_multilinear,
                "hochschild_class_zero": self.hochschild_class_zero,
                "exists": self.exists,
                "witness": None if self.witness is None else self.witness.tolist()}


def _coefficients(p, target):
    return target.module.restrict(p)


def strong_functor_exists(p: RingHom, source: ReducedAnnCategory,
                          target: ReducedAnnCategory) -> StrongReport:
    """Strong Ann-functor of type ``(p, 0)``: ``mu = 0`` and ``nu`` bi-additive.

    The equations then read ``sigma'* = lam'* = rho'* = 0`` and
    ``alpha'* = d nu`` in the Hochschild complex.
    """
    if p.source != source.ring or p.target != target.ring:
        raise CarrierMismatch("p does not map the source ring to the target ring")
    hs = pullback(p, target.h)
    a = not (hs.sigma.any() or hs.lam.any() or hs.rho.any())
    b = not additivity_defects(hs.ring, hs.module, hs.alpha, 3).any()
    witness = None
    if b:
        w = hoch_coboundary_witness(HochCochain(hs.ring, hs.module, 3, hs.alpha, check=False))
        if w is not None:
            witness = w.table
    c = witness is not None
    return StrongReport(a, b, c, a and b and c, witness if (a and b and c) else None)


def strong_structure(p, source, target, nu) -> AnnFunctorStructure:
    """The type ``(p, 0)`` structure with ``mu = 0`` and the given ``nu``."""
    q = zero_map(p, source.module, target.module)
    return AnnFunctorStructure(p, q, mu=None, nu=nu)


def strong_classify(p, source, target) -> list:
    """Representatives ``nu0 + z`` over the classes of ``H^2`` (Hochschild)."""
    rep = strong_functor_exists(p, source, target)
    if not rep.exists:
        return []
    module = _coefficients(p, target)
    H = hoch_cohomology_group(p.source, module, 2)
    nu0 = HochCochain(p.source, module, 2, rep.witness, check=False)
    out = []
    for z in H.classes():
        nu = nu0 + HochCochain.from_vector(p.source, module, 2, z)
        out.append(strong_structure(p, source, target, nu.table))
    return out


def strong_aut(F: AnnFunctorStructure) -> AutGroup:
    """Additive derivations ``R -> M'``, the automorphisms of a strong functor."""
    ring, module = F.ring, F.module
    Z = hoch_cocycles(ring, module, 1)
    q = quotient_invariants(Subgroup(Z.ambient), Z)
    make = lambda v: HochCochain.from_vector(ring, module, 1, v)
    return AutGroup(q.group, [make(r) for r in q.representatives], Z, make)


def type_p0_verdicts(p, source, target) -> dict:
    """Two answers to "is there an Ann-functor of type ``(p, 0)`` with ``mu = 0``?".

    ``equations_solvable``: the functor equations with ``q = 0`` and ``mu = 0``
    have a normalized solution ``nu`` (which forces ``sigma'* = 0`` pointwise).
    ``class_zero``: ``p^* h'`` lies in ``B^3``.  They need not agree.
    """
    hs = pullback(p, target.h)
    f = _rhs_map(hs.ring, hs.module, mu_free=False)
    x = solve_mod(f, hs.pack())
    nu = None
    if x is not None:
        half = Cochain2.table_group(hs.ring, hs.module, normalized=True).dim // 2
        vec = np.concatenate([np.zeros(half, dtype=np.int64), x])
        nu = Cochain2.unpack_tables(hs.ring, hs.module, vec, normalized=True)["nu"]
    return {"equations_solvable": x is not None, "class_zero": in_b3(hs),
            "witness": None if nu is None else nu}
