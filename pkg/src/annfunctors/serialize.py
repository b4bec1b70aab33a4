"""JSON problem files: rings, bimodules, maps and cochains.

Formats::

    ring      "Z2" | {"order": n, "add": [[..]], "mul": [[..]], "zero": i, "one": j}
    bimodule  "regular" | "trivial" | "reduction:m" | {"preset": "reduction", "modulus": m}
              | {"invariant_factors": [..], "left": T, "right": T}
              with T[x][a] the coordinates of x.a (resp. a.x), a in lexicographic order
    cochain3  {"sigma": .., "alpha": .., "lambda": .., "rho": ..} nested arrays of coordinates
    cochain2  {"mu": .., "nu": ..}
    hom       flat index array
"""

from __future__ import annotations

import numpy as np

from .algebra import (EquivariantMap, RingHom, FiniteRing, identity_hom, make_bimodule,
                      preset_bimodule, preset_ring)
from .annfunctor import ReducedAnnCategory
from .cochains import Cochain2, Cochain3
from .errors import InvalidTable


def parse_ring(spec) -> FiniteRing:
    if isinstance(spec, str):
        return preset_ring(spec)
    if not isinstance(spec, dict):
        raise InvalidTable("ring must be a preset name or an object")
    missing = {"add", "mul", "zero", "one"} - set(spec)
    if missing:
        raise InvalidTable(f"ring object lacks {sorted(missing)}")
    ring = FiniteRing(spec["add"], spec["mul"], spec["zero"], spec["one"], name=spec.get("name"))
    if "order" in spec and int(spec["order"]) != ring.n:
        raise InvalidTable(f"ring order {spec['order']} does not match its {ring.n}-element tables")
    return ring


def parse_bimodule(ring, spec):
    if spec is None:
        spec = "regular"
    if isinstance(spec, str):
        name, _, modulus = spec.partition(":")
        return preset_bimodule(ring, name, int(modulus) if modulus else None)
    if not isinstance(spec, dict):
        raise InvalidTable("bimodule must be a preset name or an object")
    if "preset" in spec:
        return preset_bimodule(ring, spec["preset"], spec.get("modulus"))
    missing = {"invariant_factors", "left", "right"} - set(spec)
    if missing:
        raise InvalidTable(f"bimodule object lacks {sorted(missing)}")
    return make_bimodule(ring, spec["invariant_factors"], spec["left"], spec["right"])


def parse_category(spec) -> ReducedAnnCategory:
    ring = parse_ring(spec.get("ring", "Z2"))
    module = parse_bimodule(ring, spec.get("bimodule"))
    h = spec.get("h")
    h = Cochain3.zero(ring, module) if h is None else Cochain3.from_json(ring, module, h)
    return ReducedAnnCategory(ring, module, h)


def parse_hom(spec, source, target) -> RingHom:
    if spec is None:
        if source != target:
            raise InvalidTable("p must be given when source and target rings differ")
        return identity_hom(source)
    return RingHom(source, target, spec)


def parse_map(spec, p, source, target) -> EquivariantMap:
    if spec is None:
        if source != target:
            raise InvalidTable("q must be given when source and target bimodules differ")
        spec = list(range(source.size))
    return EquivariantMap(p, source, target, spec)


def cochain2_json(g: Cochain2):
    return {"mu": g.mu.tolist(), "nu": g.nu.tolist()}


def jsonable(obj):
    """Recursively turn numpy scalars and arrays into plain Python values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
