"""Command-line front end.

Every command reads JSON files, writes one JSON report to stdout, and exits
0 on success, 1 on validation failure, 2 on structural or file errors, 3 on
resource-guard trips.  Reports are deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .bundles import center_dimension
from .cocycles import is_cohomologous
from .errors import GerbeError, ResourceError, StructuralError, ValidationError
from .gerbes import equivalence_check, tensor_gerbes
from .geochar import ch_on_morphism, end_count_formula, homG_dimension, push_forward
from .io import Workspace, complex_to_json, gerbe_to_json
from .transgression import flat_sections, transgress, twisted_character
from .verify import run_suite


def _emit(report: dict) -> None:
    json.dump(report, sys.stdout, sort_keys=True, indent=2)
    sys.stdout.write("\n")


def _matrix_json(m: np.ndarray) -> list:
    return [[complex_to_json(z) for z in row] for row in m]


def cmd_validate(ws: Workspace, args) -> int:
    kind, _ = ws.load_with_kind(args.file)
    _emit({"valid": True, "kind": kind, "file": args.file})
    return 0


def cmd_cohomology(ws: Workspace, args) -> int:
    phi = ws.cocycle(args.phi)
    psi = ws.cocycle(args.psi)
    lam = is_cohomologous(phi, psi)
    report = {"cohomologous": lam is not None, "witness": None}
    if lam is not None:
        report["witness"] = {"N": lam.N, "exp": lam.exp.tolist()}
    _emit(report)
    return 0


def cmd_equiv(ws: Workspace, args) -> int:
    a = ws.gerbe(args.a)
    b = ws.gerbe(args.b)
    found = equivalence_check(a, b)
    report = {"equivalent": found is not None, "iso": None, "cochain": None}
    if found is not None:
        f, lam = found
        report["iso"] = [int(v) for v in f]
        report["cochain"] = {"N": lam.N, "exp": lam.exp.tolist()}
    _emit(report)
    return 0


def cmd_transgress(ws: Workspace, args) -> int:
    x = ws.gerbe(args.gerbe)
    T = transgress(x)
    dim, _, _ = flat_sections(T)
    tau = {}
    for g in range(x.group.order):
        for n in range(len(T.loops)):
            tau[f"{g},{n}"] = complex_to_json(T.phase(g, n))
    _emit({
        "loops": [[i, xg] for (i, xg) in T.loops.loops],
        "tau": tau,
        "flat_dim": dim,
    })
    return 0


def cmd_char(ws: Workspace, args) -> int:
    E = ws.bundle(args.bundle)
    chi = twisted_character(E)
    _emit({
        "loops": [[i, xg] for (i, xg) in chi.bundle.loops.loops],
        "values": [complex_to_json(z) for z in chi.values],
    })
    return 0


def cmd_ch(ws: Workspace, args) -> int:
    x = ws.gerbe(args.gerbe)
    P = push_forward(x)
    action = {}
    for (g, xg), m in sorted(P.maps.items()):
        action[f"{g},{xg}"] = _matrix_json(m)
    _emit({
        "fibers": {str(xg): int(d) for xg, d in enumerate(P.dims)},
        "action": action,
    })
    return 0


def cmd_chmor(ws: Workspace, args) -> int:
    K = ws.kernel(args.kernel)
    mats = ch_on_morphism(K)
    _emit({"matrices": {str(xg): _matrix_json(m) for xg, m in sorted(mats.items())}})
    return 0


def _fraction_json(q: Fraction):
    return int(q) if q.denominator == 1 else str(q)


def cmd_dims(ws: Workspace, args) -> int:
    a = ws.gerbe(args.gerbe)
    b = ws.gerbe(args.other) if args.other else a
    kernel_gerbe = tensor_gerbes(b, a)
    flat = flat_sections(transgress(kernel_gerbe))[0]
    center = center_dimension(kernel_gerbe)
    plain, weighted = end_count_formula(a)
    hg = homG_dimension(push_forward(a), push_forward(b))
    _emit({
        "flat_dim": flat,
        "center_dim": center,
        "end_plain": _fraction_json(plain),
        "end_weighted": complex_to_json(weighted),
        "homG": hg,
    })
    return 0


def cmd_extension(ws: Workspace, args) -> int:
    gerbe = ws.extension(args.file)
    _emit(gerbe_to_json(gerbe))
    return 0


def cmd_verify(ws: Workspace, args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    report = {
        "suite": args.suite,
        "seed": args.seed,
        "passed": all(r.passed for r in results),
        "criteria": [
            {"number": r.number, "name": r.name, "passed": r.passed, "details": _jsonable(r.details)}
            for r in results
        ],
    }
    _emit(report)
    return 0 if report["passed"] else 1


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return _fraction_json(v)
    if isinstance(v, complex):
        return complex_to_json(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gerbechar",
        description="finite equivariant gerbes, twisted bundles, transgression, "
        "and geometric characters",
    )
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized property-test inputs")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="validate any object file")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("cohomology", help="decide whether two cocycles differ by a coboundary")
    s.add_argument("phi")
    s.add_argument("psi")
    s.set_defaults(fn=cmd_cohomology)

    s = sub.add_parser("equiv", help="search for an isometric equivalence of gerbes")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(fn=cmd_equiv)

    s = sub.add_parser("transgress", help="transgressed bundle over the loop groupoid")
    s.add_argument("gerbe")
    s.set_defaults(fn=cmd_transgress)

    s = sub.add_parser("char", help="twisted character of a bundle")
    s.add_argument("bundle")
    s.set_defaults(fn=cmd_char)

    s = sub.add_parser("ch", help="geometric character of a gerbe")
    s.add_argument("gerbe")
    s.set_defaults(fn=cmd_ch)

    s = sub.add_parser("chmor", help="geometric character of a kernel morphism")
    s.add_argument("kernel")
    s.set_defaults(fn=cmd_chmor)

    s = sub.add_parser("dims", help="dimension report for one gerbe or a pair")
    s.add_argument("gerbe")
    s.add_argument("other", nargs="?")
    s.set_defaults(fn=cmd_dims)

    s = sub.add_parser("extension", help="build a gerbe from an abelian extension file")
    s.add_argument("file")
    s.set_defaults(fn=cmd_extension)

    s = sub.add_parser("verify", help="run the acceptance suite")
    s.add_argument("--suite", default="core")
    s.set_defaults(fn=cmd_verify)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ws = Workspace()
    try:
        return args.fn(ws, args)
    except ValidationError as e:
        _emit({"valid": False, "error": str(e), "witness": _jsonable(e.witness)})
        return 1
    except ResourceError as e:
        _emit({"error": str(e), "witness": _jsonable(e.witness)})
        return 3
    except (StructuralError, GerbeError) as e:
        _emit({"error": str(e), "witness": _jsonable(getattr(e, "witness", {}))})
        return 2


if __name__ == "__main__":
    sys.exit(main())
