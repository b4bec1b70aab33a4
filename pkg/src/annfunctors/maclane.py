"""Mac Lane cochains of a ring ``R`` with coefficients in a bimodule ``M``.

Degrees 1 to 3 only.  Normalized 1- and 2-cochains vanish as soon as one
argument is zero; 3-cochains are unrestricted quadruples
``(sigma, alpha, lam, rho)`` and the normalization of ``alpha`` and
``sigma`` is part of the cocycle conditions.

Sign conventions.  The coboundary of ``(mu, nu)`` is

    sigma = mu(x,z) + mu(y,t) + mu(x+z,y+t) - mu(x,y) - mu(z,t) - mu(x+y,z+t)
    alpha = x nu(y,z) - nu(xy,z) + nu(x,yz) - nu(x,y) z
    lam   = nu(x,y+z) - nu(x,y) - nu(x,z) + mu(xy,xz) - x mu(y,z)
    rho   = nu(x+y,z) - nu(x,z) - nu(y,z) + mu(xz,yz) - mu(x,y) z

(up to the order of terms) and the cocycle relations ``M1``..``M10`` below are
written so that every coboundary satisfies them.  In ``M2``, ``M3``, ``M5``
and ``M7`` this amounts to the ``rho`` terms entering with the opposite sign
of the naive reading, and in ``M8`` the middle group of ``sigma`` terms
carries a minus sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import EquivariantMap, FiniteBimodule, FiniteRing, RingHom
from .cochains import (CheckReport, Cochain1, Cochain2, Cochain3, first_failures, grid, take,
                       zero_arg_mask)
from .errors import CarrierMismatch, NotNormalized
from .linalg import (AbelianGroupPresentation, FiniteAbelianGroup, LinearMap, Subgroup, image,
                     kernel, quotient_invariants, solve_mod)

RELATIONS = ("M1", "M2", "M3", "M4", "M5", "M6", "M7", "M8", "M9", "M10")
# optional extra conditions: lambda and rho vanish when an argument is 0
LR_NORMALIZATION = ("lambda_normalized", "rho_normalized")
ARITY = {"M1": 4, "M2": 4, "M3": 4, "M4": 4, "M5": 4, "M6": 5, "M7": 5, "M8": 8,
         "M9": 3, "M10": 4, "lambda_normalized": 3, "rho_normalized": 3}


def relation_names(normalize_lambda_rho=False):
    return RELATIONS + (LR_NORMALIZATION if normalize_lambda_rho else ())


# -- formula evaluation on (batched) tables ----------------------------------

def _left(module, x, v):
    return (module.left[x] @ v[..., None])[..., 0]


def _right(module, v, x):
    return (module.right[x] @ v[..., None])[..., 0]


def _full(values, n, arity, k):
    lead = values.shape[: values.ndim - arity - 1]
    return np.broadcast_to(values, lead + (n,) * arity + (k,))


def d1_tables(ring, module, u):
    """``(mu_u, nu_u)`` for a (batched) table ``u`` of shape ``(..., n, k)``."""
    A, P = ring.add, ring.mul
    x, y = grid(ring.n, 2)
    ux, uy = take(u, x), take(u, y)
    mu = take(u, A[x, y]) - ux - uy
    nu = _left(module, x, uy) + _right(module, ux, y) - take(u, P[x, y])
    k = module.k
    return (module.reduce(_full(mu, ring.n, 2, k)), module.reduce(_full(nu, ring.n, 2, k)))


def d2_tables(ring, module, mu, nu):
    """The four components of the coboundary of (batched) ``(mu, nu)``."""
    A, P = ring.add, ring.mul
    n, k = ring.n, module.k
    L = lambda a, v: _left(module, a, v)
    R = lambda v, a: _right(module, v, a)
    x, y, z, t = grid(n, 4)
    sigma = (-take(mu, x, y) - take(mu, z, t) + take(mu, A[x, z], A[y, t])
             + take(mu, x, z) + take(mu, y, t) - take(mu, A[x, y], A[z, t]))
    x, y, z = grid(n, 3)
    alpha = (L(x, take(nu, y, z)) - take(nu, P[x, y], z) + take(nu, x, P[y, z])
             - R(take(nu, x, y), z))
    lam = (-take(nu, x, y) - take(nu, x, z) + take(nu, x, A[y, z])
           - L(x, take(mu, y, z)) + take(mu, P[x, y], P[x, z]))
    rho = (-take(nu, x, z) - take(nu, y, z) + take(nu, A[x, y], z)
           + take(mu, P[x, z], P[y, z]) - R(take(mu, x, y), z))
    return (module.reduce(_full(sigma, n, 4, k)), module.reduce(_full(alpha, n, 3, k)),
            module.reduce(_full(lam, n, 3, k)), module.reduce(_full(rho, n, 3, k)))


def relation_values(ring, module, sigma, alpha, lam, rho, name):
    """Values of relation ``name`` on the full argument grid (batched tables).

    ``M9`` and ``M10`` are masked to the argument tuples they constrain.
    """
    v = _raw_relation(ring, module, sigma, alpha, lam, rho, name)
    return module.reduce(_full(v, ring.n, ARITY[name], module.k))


def _raw_relation(ring, module, sigma, alpha, lam, rho, name):
    A, P = ring.add, ring.mul
    n = ring.n
    L = lambda a, v: _left(module, a, v)
    R = lambda v, a: _right(module, v, a)
    s, al, la = sigma, alpha, lam
    rr = -rho
    if name == "M1":
        x, y, z, t = grid(n, 4)
        v = (L(x, take(al, y, z, t)) - take(al, P[x, y], z, t) + take(al, x, P[y, z], t)
             - take(al, x, y, P[z, t]) + R(take(al, x, y, z), t))
    elif name == "M2":
        x, y, z, t = grid(n, 4)
        v = (take(al, x, z, t) + take(al, y, z, t) - take(al, A[x, y], z, t)
             + take(rr, P[x, z], P[y, z], t) - take(rr, x, y, P[z, t]) + R(take(rr, x, y, z), t))
    elif name == "M3":
        x, y, z, t = grid(n, 4)
        v = (-take(al, x, y, t) - take(al, x, z, t) + take(al, x, A[y, z], t)
             + L(x, take(rr, y, z, t)) - take(rr, P[x, y], P[x, z], t)
             - take(la, x, P[y, t], P[z, t]) + R(take(la, x, y, z), t))
    elif name == "M4":
        x, y, z, t = grid(n, 4)
        v = (take(al, x, y, z) + take(al, x, y, t) - take(al, x, y, A[z, t])
             + L(x, take(la, y, z, t)) - take(la, P[x, y], z, t) + take(la, x, P[y, z], P[y, t]))
    elif name == "M5":
        x, y, z, t = grid(n, 4)
        v = (take(la, x, z, t) + take(la, y, z, t) - take(la, A[x, y], z, t)
             + take(rr, x, y, z) + take(rr, x, y, t) - take(rr, x, y, A[z, t])
             + take(s, P[x, z], P[x, t], P[y, z], P[y, t]))
    elif name == "M6":
        x, a, b, c, d = grid(n, 5)
        v = (take(la, x, a, b) + take(la, x, c, d) - take(la, x, A[a, c], A[b, d])
             - take(la, x, a, c) - take(la, x, b, d) + take(la, x, A[a, b], A[c, d])
             - L(x, take(s, a, b, c, d)) + take(s, P[x, a], P[x, b], P[x, c], P[x, d]))
    elif name == "M7":
        a, b, c, d, x = grid(n, 5)
        v = (take(rr, a, b, x) + take(rr, c, d, x) - take(rr, A[a, c], A[b, d], x)
             - take(rr, a, c, x) - take(rr, b, d, x) + take(rr, A[a, b], A[c, d], x)
             - take(s, P[a, x], P[b, x], P[c, x], P[d, x]) + R(take(s, a, b, c, d), x))
    elif name == "M8":
        v = _m8_values(ring, s)
    elif name == "M9":
        v = al * zero_arg_mask(ring, 3)[..., None]
    elif name == "M10":
        x, y, z, t = grid(n, 4)
        O = ring.zero
        mask = (((x == O) & (y == O)) | ((z == O) & (t == O)) | ((x == O) & (z == O))
                | ((y == O) & (t == O)) | ((y == O) & (z == O)))
        v = s * mask[..., None]
    elif name == "lambda_normalized":
        v = la * zero_arg_mask(ring, 3)[..., None]
    elif name == "rho_normalized":
        v = rho * zero_arg_mask(ring, 3)[..., None]
    else:
        raise KeyError(f"unknown relation {name!r}")
    return v


@lru_cache(maxsize=4)
def _m8_sum_indices(ring):
    """Flat ``R^4`` indices of the three sums of argument pairs occurring in ``M8``."""
    n, A = ring.n, ring.add
    a, b, c, d, x, y, z, t = grid(n, 8)
    # native index width avoids a conversion on every gather; halve memory on big rings
    dtype = np.intp if n ** 8 <= 2 ** 22 else np.int32
    flat = lambda p, q, r, u: (((p * n + q) * n + r) * n + u).astype(dtype)
    return (flat(A[a, x], A[b, y], A[c, z], A[d, t]),
            flat(A[a, c], A[b, d], A[x, z], A[y, t]),
            flat(A[a, b], A[c, d], A[x, y], A[z, t]))


def _m8_values(ring, sigma):
    """``M8`` on the grid ``(a,b,c,d,x,y,z,t)``.

    The six terms with plain arguments are broadcast views of ``sigma``; the
    three with summed arguments are gathers through cached flat indices.  The
    coordinate axis is moved to the front so every gather is contiguous.
    """
    n = ring.n
    s = np.moveaxis(sigma, -1, 0)
    if s.size and np.abs(s).max() < 2 ** 28:
        s = s.astype(np.int32)
    s = np.ascontiguousarray(s)
    head = s.shape[:-4]
    at = lambda *axes: s.reshape(head + tuple(n if i in axes else 1 for i in range(8)))
    flat = s.reshape(head + (n ** 4,))
    i1, i2, i3 = _m8_sum_indices(ring)
    v = at(0, 1, 2, 3) + at(4, 5, 6, 7)
    v -= at(0, 1, 4, 5)
    v -= at(2, 3, 6, 7)
    v += at(0, 2, 4, 6)
    v += at(1, 3, 5, 7)
    v -= np.take(flat, i1, axis=-1)
    v += np.take(flat, i2, axis=-1)
    v -= np.take(flat, i3, axis=-1)
    return np.moveaxis(v, 0, -1)


# -- cochain level API --------------------------------------------------------

def _require_normalized(c):
    if not c.is_normalized():
        raise NotNormalized(f"{type(c).__name__} does not vanish on arguments containing 0")


def d1(u: Cochain1) -> Cochain2:
    """``(mu_u, nu_u)`` with ``mu_u(x,y) = u(x+y) - u(x) - u(y)`` and
    ``nu_u(x,y) = x u(y) + u(x) y - u(xy)``."""
    _require_normalized(u)
    mu, nu = d1_tables(u.ring, u.module, u.u)
    return Cochain2(u.ring, u.module, mu=mu, nu=nu)


def d2(g: Cochain2) -> Cochain3:
    _require_normalized(g)
    s, a, l, r = d2_tables(g.ring, g.module, g.mu, g.nu)
    return Cochain3(g.ring, g.module, sigma=s, alpha=a, lam=l, rho=r)


def is_z3(h: Cochain3, normalize_lambda_rho=False) -> CheckReport:
    """Check ``M1``..``M10``; failures name the relation and a witness tuple.

    With ``normalize_lambda_rho`` the components ``lam`` and ``rho`` must in
    addition vanish whenever an argument is 0.
    """
    n, k = h.ring.n, h.module.k
    vals = {name: _full(_raw_relation(h.ring, h.module, h.sigma, h.alpha, h.lam, h.rho, name),
                        n, ARITY[name], k)
            for name in relation_names(normalize_lambda_rho)}
    return first_failures(vals, h.module)


def is_z2(g: Cochain2) -> bool:
    return d2(g).is_zero()


def is_z1(u: Cochain1) -> bool:
    return d1(u).is_zero()


# -- linear operators ---------------------------------------------------------

@lru_cache(maxsize=64)
def d1_map(ring: FiniteRing, module: FiniteBimodule) -> LinearMap:
    """``d1`` from normalized 1-cochains to normalized 2-cochains."""
    dom = Cochain1.table_group(ring, module, normalized=True)
    cod = Cochain2.table_group(ring, module, normalized=True)

    def fn(eye):
        u = Cochain1.unpack_tables(ring, module, eye, normalized=True)["u"]
        mu, nu = d1_tables(ring, module, u)
        return Cochain2.pack_tables(ring, {"mu": mu, "nu": nu}, normalized=True)

    return LinearMap.from_function(dom, cod, fn)


@lru_cache(maxsize=64)
def d2_map(ring: FiniteRing, module: FiniteBimodule) -> LinearMap:
    """``d2`` from normalized 2-cochains to full 3-cochain tables."""
    dom = Cochain2.table_group(ring, module, normalized=True)
    cod = Cochain3.table_group(ring, module)

    def fn(eye):
        t = Cochain2.unpack_tables(ring, module, eye, normalized=True)
        s, a, l, r = d2_tables(ring, module, t["mu"], t["nu"])
        return Cochain3.pack_tables(ring, {"sigma": s, "alpha": a, "lam": l, "rho": r})

    return LinearMap.from_function(dom, cod, fn)


def _constraint_map(domain, rows, moduli):
    """A map whose kernel is cut out by ``rows`` (deduplicated) with given moduli."""
    key = np.concatenate([rows, moduli[:, None]], axis=1)
    key = np.unique(key, axis=0)
    key = key[key[:, :-1].any(axis=1)]
    if not len(key):
        return LinearMap(domain, FiniteAbelianGroup([]), np.zeros((0, domain.dim)))
    return LinearMap(domain, FiniteAbelianGroup(key[:, -1]), key[:, :-1])


@lru_cache(maxsize=32)
def z3_subgroup(ring: FiniteRing, module: FiniteBimodule, normalize_lambda_rho=False) -> Subgroup:
    """``Z^3`` inside the group of full 3-cochain tables."""
    dom = Cochain3.table_group(ring, module)
    if dom.dim == 0:
        return Subgroup(dom, np.zeros((0, 0), dtype=np.int64))
    mod = np.asarray(module.invariant_factors, dtype=np.int64)
    rows, moduli = [], []
    chunk = 64
    for name in relation_names(normalize_lambda_rho):
        cols = []
        for start in range(0, dom.dim, chunk):
            eye = np.eye(dom.dim, dtype=np.int64)[start: start + chunk]
            t = Cochain3.unpack_tables(ring, module, eye)
            v = relation_values(ring, module, t["sigma"], t["alpha"], t["lam"], t["rho"], name)
            cols.append(v.reshape(len(eye), -1, module.k).astype(np.int32))
        v = np.concatenate(cols)  # (basis, argument tuple, coordinate)
        for j in range(module.k):
            block = np.unique(v[:, :, j].T, axis=0)
            rows.append(block)
            moduli.append(np.full(len(block), mod[j]))
    rows = np.concatenate(rows) if rows else np.zeros((0, dom.dim), dtype=np.int64)
    moduli = np.concatenate(moduli) if moduli else np.zeros(0, dtype=np.int64)
    return kernel(_constraint_map(dom, rows.astype(np.int64), moduli))


@lru_cache(maxsize=64)
def z2_subgroup(ring, module) -> Subgroup:
    return kernel(d2_map(ring, module))


@lru_cache(maxsize=64)
def z1_subgroup(ring, module) -> Subgroup:
    """Normalized 1-cocycles: additive maps ``u`` with ``u(xy) = x u(y) + u(x) y``."""
    return kernel(d1_map(ring, module))


@lru_cache(maxsize=64)
def b2_subgroup(ring, module) -> Subgroup:
    return image(d1_map(ring, module))


@lru_cache(maxsize=64)
def b3_subgroup(ring, module) -> Subgroup:
    return image(d2_map(ring, module))


@dataclass
class Cohomology:
    """A cohomology group with representative cocycles of a cyclic basis."""

    group: AbelianGroupPresentation
    representatives: list
    cocycles: Subgroup = field(repr=False)
    coboundaries: Subgroup = field(repr=False)
    theory: str = "maclane"
    degree: int = 2

    @property
    def order(self):
        return self.group.order

    def __iter__(self):
        return iter((self.group, self.representatives))

    def classes(self):
        """Every class once, as coordinate vectors of cocycles."""
        q = quotient_invariants(self.coboundaries, self.cocycles)
        return list(q.elements())


def cohomology_group(ring: FiniteRing, module: FiniteBimodule, degree: int,
                     normalize_lambda_rho=False) -> Cohomology:
    """``H^2`` or ``H^3`` via Howell kernels and a Smith normal form.

    ``H^3`` is practical for rings with at most four elements.
    """
    if degree == 2:
        Z, B, cls, norm = z2_subgroup(ring, module), b2_subgroup(ring, module), Cochain2, True
    elif degree == 3:
        Z, B = z3_subgroup(ring, module, normalize_lambda_rho), b3_subgroup(ring, module)
        cls, norm = Cochain3, False
    else:
        raise ValueError("Mac Lane cohomology is available in degrees 2 and 3")
    q = quotient_invariants(B, Z)
    reps = [cls.from_vector(ring, module, r, normalized=norm) for r in q.representatives]
    return Cohomology(q.group, reps, Z, B, "maclane", degree)


def z1_group(ring, module) -> AbelianGroupPresentation:
    return z1_subgroup(ring, module).presentation()


def coboundary_witness(h: Cochain3):
    """A normalized 2-cochain ``g`` with ``d2(g) = h``, or None."""
    f = d2_map(h.ring, h.module)
    x = solve_mod(f, h.pack())
    if x is None:
        return None
    return Cochain2.from_vector(h.ring, h.module, x, normalized=True)


def d1_witness(g: Cochain2):
    """A normalized 1-cochain ``u`` with ``d1(u) = g``, or None."""
    _require_normalized(g)
    f = d1_map(g.ring, g.module)
    x = solve_mod(f, g.pack(normalized=True))
    if x is None:
        return None
    return Cochain1.from_vector(g.ring, g.module, x, normalized=True)


def in_b3(h: Cochain3) -> bool:
    return h.pack() in b3_subgroup(h.ring, h.module)


# -- change of rings and coefficients ----------------------------------------

def pullback(p: RingHom, h: Cochain3) -> Cochain3:
    """``p^* h``: precompose every component with ``p``; values in ``M`` viewed over the source."""
    if p.target != h.ring:
        raise CarrierMismatch("pullback along a homomorphism into a different ring")
    t = p.table
    return Cochain3(p.source, h.module.restrict(p),
                    sigma=h.sigma[np.ix_(t, t, t, t)], alpha=h.alpha[np.ix_(t, t, t)],
                    lam=h.lam[np.ix_(t, t, t)], rho=h.rho[np.ix_(t, t, t)])


def pushforward(q: EquivariantMap, h: Cochain3) -> Cochain3:
    """``q_* h``: postcompose every component with ``q``; the result is over ``q.target``
    restricted to the ring of ``h``."""
    if h.module != q.source:
        raise CarrierMismatch("pushforward along a map out of a different module")
    if h.ring != q.hom.source:
        raise CarrierMismatch("cochain ring differs from the map's source ring")
    target = q.target.restrict(q.hom)
    return Cochain3(h.ring, target, **{n: q(v) for n, v in h.tables().items()})
