"""Dense cochain tables valued in a bimodule.

A table of arity ``a`` over ``(R, M)`` is an int array of shape
``(n,)*a + (k,)``: row-major in the ring arguments, last axis the
invariant-factor coordinates of the value.  Leading batch axes are allowed
in the evaluation helpers so that a linear operator can be tabulated on many
basis cochains at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FiniteBimodule, FiniteRing
from .errors import CarrierMismatch, InvalidTable
from .linalg import FiniteAbelianGroup


def grid(n, arity):
    """Open index grids, one per argument, broadcasting to ``(n,)*arity``."""
    out = []
    for i in range(arity):
        shape = [1] * arity
        shape[i] = n
        out.append(np.arange(n).reshape(shape))
    return tuple(out)


def take(table, *args):
    """``table(args...)`` for broadcastable index arrays; keeps batch axes."""
    return table[(Ellipsis,) + tuple(args) + (slice(None),)]


def zero_arg_mask(ring, arity):
    """True where at least one argument is the ring's zero."""
    mask = np.zeros((ring.n,) * arity, dtype=bool)
    for g in grid(ring.n, arity):
        mask |= g == ring.zero
    return mask


class Cochain:
    """Base class: a fixed set of named tables over ``(ring, module)``."""

    slots: tuple = ()  # (name, arity)

    def __init__(self, ring: FiniteRing, module: FiniteBimodule, **tables):
        if module.ring != ring:
            raise CarrierMismatch("module is not over the cochain's ring")
        self.ring, self.module = ring, module
        n, k = ring.n, module.k
        for name, arity in self.slots:
            t = tables.get(name)
            if t is None:
                t = np.zeros((n,) * arity + (k,), dtype=np.int64)
            t = np.asarray(t, dtype=np.int64)
            if t.shape == (n,) * arity and k == 1:
                t = t[..., None]
            if t.shape != (n,) * arity + (k,):
                raise InvalidTable(f"{name} must have shape {(n,) * arity + (k,)}, got {t.shape}")
            t = module.reduce(np.broadcast_to(t, (n,) * arity + (k,))).astype(np.int64)
            t.flags.writeable = False
            setattr(self, name, t)

    @classmethod
    def zero(cls, ring, module):
        return cls(ring, module)

    def tables(self):
        return {name: getattr(self, name) for name, _ in self.slots}

    def _combine(self, other, op):
        if type(other) is not type(self) or other.module != self.module:
            raise CarrierMismatch("cochains live over different coefficients")
        return type(self)(self.ring, self.module,
                          **{name: op(getattr(self, name), getattr(other, name))
                             for name, _ in self.slots})

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __neg__(self):
        return type(self)(self.ring, self.module, **{n: -t for n, t in self.tables().items()})

    def scale(self, c):
        return type(self)(self.ring, self.module, **{n: c * t for n, t in self.tables().items()})

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return other.module == self.module and all(
            np.array_equal(getattr(self, n), getattr(other, n)) for n, _ in self.slots)

    __hash__ = None

    def is_zero(self):
        return not any(t.any() for t in self.tables().values())

    def is_normalized(self):
        return all(not getattr(self, name)[zero_arg_mask(self.ring, arity)].any()
                   for name, arity in self.slots)

    # flat coordinates

    @classmethod
    def table_group(cls, ring, module, normalized=False) -> FiniteAbelianGroup:
        """Coordinate group of all tables (or of the normalized entries only)."""
        moduli = []
        for _, arity in cls.slots:
            count = _slot_count(ring, arity, normalized)
            moduli.extend(list(module.invariant_factors) * count)
        return FiniteAbelianGroup(moduli)

    def pack(self, normalized=False):
        return self.pack_tables(self.ring, self.tables(), normalized)

    @classmethod
    def pack_tables(cls, ring, tables, normalized=False):
        """Flatten (batched) tables into coordinate vectors."""
        parts = []
        for name, arity in cls.slots:
            t = tables[name]
            lead = t.shape[: t.ndim - arity - 1]
            if normalized:
                keep = ~zero_arg_mask(ring, arity)
                t = t[(Ellipsis,) + np.nonzero(keep) + (slice(None),)]
            parts.append(t.reshape(lead + (int(np.prod(t.shape[len(lead):])),)))
        return np.concatenate(parts, axis=-1)

    @classmethod
    def unpack_tables(cls, ring, module, vec, normalized=False):
        """Inverse of ``pack_tables``; ``vec`` may carry leading batch axes."""
        vec = np.asarray(vec, dtype=np.int64)
        lead = vec.shape[:-1]
        n, k = ring.n, module.k
        out, pos = {}, 0
        for name, arity in cls.slots:
            count = _slot_count(ring, arity, normalized)
            chunk = vec[..., pos: pos + count * k].reshape(lead + (count, k))
            pos += count * k
            if normalized:
                full = np.zeros(lead + (n,) * arity + (k,), dtype=np.int64)
                keep = ~zero_arg_mask(ring, arity)
                full[(Ellipsis,) + np.nonzero(keep) + (slice(None),)] = chunk
                out[name] = full
            else:
                out[name] = chunk.reshape(lead + (n,) * arity + (k,))
        if pos != vec.shape[-1]:
            raise InvalidTable("coordinate vector has the wrong length")
        return out

    @classmethod
    def from_vector(cls, ring, module, vec, normalized=False):
        return cls(ring, module, **cls.unpack_tables(ring, module, vec, normalized))

    json_names: dict = {}

    def to_json(self):
        return {self.json_names.get(name, name): getattr(self, name).tolist()
                for name, _ in self.slots}

    @classmethod
    def from_json(cls, ring, module, data):
        """Inverse of ``to_json``; missing components default to zero."""
        return cls(ring, module, **{name: data.get(cls.json_names.get(name, name))
                                    for name, _ in cls.slots})

    def __repr__(self):
        return f"{type(self).__name__}({self.ring!r}, {self.module!r})"


def _slot_count(ring, arity, normalized):
    if normalized:
        return (ring.n - 1) ** arity
    return ring.n ** arity


class Cochain1(Cochain):
    """A 1-cochain ``u: R -> M``."""

    slots = (("u", 1),)


class Cochain2(Cochain):
    """A 2-cochain ``(mu, nu)``, both ``R^2 -> M``."""

    slots = (("mu", 2), ("nu", 2))


class Cochain3(Cochain):
    """A 3-cochain ``(sigma, alpha, lambda, rho)``; ``lambda`` is stored as ``lam``."""

    slots = (("sigma", 4), ("alpha", 3), ("lam", 3), ("rho", 3))
    json_names = {"lam": "lambda"}


@dataclass
class CheckReport:
    """Failed relations, each with its first witness tuple."""

    failures: list

    @property
    def passed(self):
        return not self.failures

    def failed_relations(self):
        return [f["relation"] for f in self.failures]

    def to_json(self):
        return [dict(f) for f in self.failures]


def first_failures(values_by_relation, module):
    """Build a report from ``{name: values}`` arrays (no batch axes)."""
    failures = []
    for name, values in values_by_relation.items():
        nonzero = module.reduce(values).any(axis=-1)
        if nonzero.any():
            bad = np.argwhere(nonzero)
            failures.append({"relation": name, "witness": [int(i) for i in bad[0]]})
    return CheckReport(failures)
