"""Command-line front end.

Every command reads one JSON problem file and prints one JSON report.  Exit
status: 0 when the answer is affirmative (or a group / list was computed),
1 when it is negative, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import annfunctor as af
from . import hochschild as hs
from . import maclane as ml
from .annfunctor import AnnFunctorStructure, StructurePair
from .cochains import Cochain2, Cochain3
from .errors import AlgebraError
from .serialize import (cochain2_json, jsonable, parse_bimodule, parse_category, parse_hom,
                        parse_map, parse_ring)


def conventions(normalize_lambda_rho=False):
    return {
        "normalized_cochains": True,
        "z3_relations": ("M1-M10 plus lambda/rho normalization" if normalize_lambda_rho
                         else "M1-M10 verbatim"),
        "lambda_rho_normalized": bool(normalize_lambda_rho),
        "functor_cochain": "(-mu, nu)",
    }


class InputError(Exception):
    def __init__(self, message, invariant="InvalidInput"):
        super().__init__(message)
        self.invariant = invariant


def _load(path):
    if path is None:
        return {}
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read problem file: {exc}") from None


def _single(doc, args):
    """The category described at top level (or under "category"), with CLI overrides."""
    spec = dict(doc.get("category", doc))
    if getattr(args, "ring", None):
        spec["ring"] = args.ring
    if getattr(args, "bimodule", None):
        spec["bimodule"] = args.bimodule
    ring = parse_ring(spec.get("ring", "Z2"))
    module = parse_bimodule(ring, spec.get("bimodule"))
    return ring, module, spec


def _pair(doc):
    if "source" not in doc or "target" not in doc:
        raise InputError("problem file needs 'source' and 'target' categories")
    source, target = parse_category(doc["source"]), parse_category(doc["target"])
    p = parse_hom(doc.get("p"), source.ring, target.ring)
    return source, target, p


def _typed(doc):
    source, target, p = _pair(doc)
    q = parse_map(doc.get("q"), p, source.module, target.module)
    return source, target, p, q


def _structure(doc, p, q):
    f = doc.get("functor")
    if f is None:
        return None
    return AnnFunctorStructure(p, q, mu=f.get("mu"), nu=f.get("nu"))


# -- commands ------------------------------------------------------------------

def cmd_check_cocycle(doc, args):
    ring, module, spec = _single(doc, args)
    if args.theory == "hochschild":
        degree = args.degree or 3
        table = spec.get("f", spec.get("cochain"))
        if table is None:
            raise InputError("hochschild check needs a table under 'f'")
        f = hs.HochCochain(ring, module, degree, table)
        ok = hs.is_hoch_cocycle(f)
        return {"cocycle": ok, "theory": "hochschild", "degree": degree}, ok
    degree = args.degree or 3
    if degree == 2:
        g = Cochain2.from_json(ring, module, spec.get("g", {}))
        ok = ml.is_z2(g)
        return {"cocycle": ok, "degree": 2}, ok
    h = Cochain3.from_json(ring, module, spec.get("h", {}))
    report = ml.is_z3(h, args.normalize_lambda_rho)
    return {"cocycle": report.passed, "failures": report.to_json()}, report.passed


def cmd_cohomology(doc, args):
    ring, module, _ = _single(doc, args)
    if args.theory == "hochschild":
        H = hs.hoch_cohomology_group(ring, module, args.degree)
        reps = [r.to_json() for r in H.representatives]
    else:
        H = ml.cohomology_group(ring, module, args.degree, args.normalize_lambda_rho)
        reps = [r.to_json() for r in H.representatives]
    out = {"theory": args.theory, "degree": args.degree,
           "invariant_factors": list(H.group.torsion), "order": H.order,
           "representatives": reps}
    return out, True


def cmd_obstruction(doc, args):
    source, target, p, q = _typed(doc)
    k = af.obstruction(p, q, source, target)
    g = ml.coboundary_witness(k)
    out = {"obstruction": k.to_json(), "class_zero": g is not None,
           "witness": None if g is None else cochain2_json(g)}
    return out, g is not None


def cmd_exists(doc, args):
    source, target, p, q = _typed(doc)
    F = af.functor_exists(p, q, source, target)
    out = {"exists": F is not None,
           "witness": None if F is None else {"mu": F.mu.tolist(), "nu": F.nu.tolist()}}
    if args.verify:
        check = _structure(doc, p, q) or F
        if check is None:
            # "no functor" must agree with the membership test on the obstruction
            out["verified"] = not af.obstruction_vanishes(p, q, source, target)
        else:
            report = af.is_functor(check, source, target)
            out["verified"] = report.passed
            out["failures"] = report.to_json()
        return out, out["verified"] and (F is not None)
    return out, F is not None


def cmd_classify(doc, args):
    source, target, p, q = _typed(doc)
    reps = af.classify_functors(p, q, source, target, exhaustive=args.exhaustive)
    out = {"count": len(reps), "classes": [{"mu": F.mu.tolist(), "nu": F.nu.tolist()} for F in reps]}
    return out, bool(reps)


def cmd_aut(doc, args):
    source, target, p, q = _typed(doc)
    F = _structure(doc, p, q) or af.functor_exists(p, q, source, target)
    if F is None:
        return {"exists": False}, False
    A = af.aut_group(F, source, target)
    return {"invariant_factors": list(A.group.torsion), "order": A.order,
            "generators": [g.u.tolist() for g in A.generators]}, True


def cmd_strong_exists(doc, args):
    source, target, p = _pair(doc)
    rep = af.strong_functor_exists(p, source, target)
    out = rep.to_json()
    v = af.type_p0_verdicts(p, source, target)
    out["type_p0"] = {"equations_solvable": v["equations_solvable"],
                      "maclane_class_zero": v["class_zero"]}
    return out, rep.exists


def cmd_strong_classify(doc, args):
    source, target, p = _pair(doc)
    reps = af.strong_classify(p, source, target)
    out = {"count": len(reps), "classes": [F.nu.tolist() for F in reps]}
    if reps:
        A = af.strong_aut(reps[0])
        out["aut"] = {"invariant_factors": list(A.group.torsion), "order": A.order}
    return out, bool(reps)


def cmd_sigma_from_structure(doc, args):
    ring, module, spec = _single(doc, args)
    s = StructurePair(ring, module, spec.get("xi"), spec.get("eta"))
    return {"sigma": af.build_sigma_from_structure(s).tolist()}, True


COMMANDS = {
    "check-cocycle": cmd_check_cocycle,
    "cohomology": cmd_cohomology,
    "obstruction": cmd_obstruction,
    "exists": cmd_exists,
    "classify": cmd_classify,
    "aut": cmd_aut,
    "strong-exists": cmd_strong_exists,
    "strong-classify": cmd_strong_classify,
    "sigma-from-structure": cmd_sigma_from_structure,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="annfunctors", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("problem", nargs="?", help="JSON problem file ('-' for stdin)")
        if name in ("check-cocycle", "cohomology", "sigma-from-structure"):
            sp.add_argument("--ring", help="ring preset overriding the file")
            sp.add_argument("--bimodule", help="bimodule preset overriding the file")
        if name in ("check-cocycle", "cohomology"):
            sp.add_argument("--theory", choices=("maclane", "hochschild"), default="maclane")
            sp.add_argument("--degree", type=int, choices=(1, 2, 3),
                            default=None if name == "check-cocycle" else 2)
            sp.add_argument("--normalize-lambda-rho", action="store_true",
                            help="also require lambda and rho to vanish on arguments containing 0")
        if name == "exists":
            sp.add_argument("--verify", action="store_true",
                            help="re-validate the witness (or a given 'functor') against the equations")
        if name == "classify":
            sp.add_argument("--exhaustive", action="store_true",
                            help="enumerate all structures (tiny carriers only)")
    return ap


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    nlr = getattr(args, "normalize_lambda_rho", False)
    if args.command == "cohomology" and args.theory == "maclane" and args.degree == 1:
        args.degree = None
    try:
        if args.command == "cohomology" and args.degree is None:
            raise InputError("Mac Lane cohomology is available in degrees 2 and 3")
        doc = _load(args.problem)
        if not isinstance(doc, dict):
            raise InputError("problem file must contain a JSON object")
        body, positive = COMMANDS[args.command](doc, args)
        code = 0 if positive else 1
    except AlgebraError as exc:
        body = {"error": {"invariant": exc.invariant, "message": str(exc),
                          "witness": jsonable(exc.witness)}}
        code = 2
    except (InputError, ValueError, KeyError, TypeError) as exc:
        body = {"error": {"invariant": getattr(exc, "invariant", type(exc).__name__),
                          "message": str(exc), "witness": None}}
        code = 2
    report = {"command": args.command, **jsonable(body), "conventions": conventions(nlr)}
    stdout.write(json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n")
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
