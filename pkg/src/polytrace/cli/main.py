"""Command line front end.  Every command prints one JSON document."""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .. import __version__, bench
from ..algebra import ParametricFamily, coefficient_vector, format_system, parse_system
from ..certify import certify
from ..errors import Inconclusive, PolytraceError, StalledBeforeCount
from ..nag import membership_test, monodromy_solve, numerical_irreducible_decomposition, regenerate
from ..polyhedral import mixed_cells_generic, mixed_volume, polyhedral_solve
from ..rng import stream
from ..solve import gauss_newton_filter, parameter_solve, square_up, total_degree_solve
from ..tracker import TrackerOptions

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2

log = logging.getLogger("polytrace")


# JSON encoding


def _number(x: float):
    x = float(x)
    return x if math.isfinite(x) else None


def encode_point(x) -> list[list[float]]:
    return [[_number(z.real), _number(z.imag)] for z in np.asarray(x, complex)]


def decode_point(obj) -> np.ndarray:
    """Accepts [[re, im], ...], a list of numbers or a string "1, 2+3j"."""
    if isinstance(obj, str):
        return np.array([complex(s.replace(" ", "").replace("i", "j")) for s in obj.split(",") if s.strip()])
    vals = []
    for z in obj:
        vals.append(complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z))
    return np.array(vals, complex)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _number(obj)
    return obj


def dumps(doc: dict) -> str:
    # json writes floats with the shortest repr that round-trips binary64
    return json.dumps(_clean(doc), indent=2, allow_nan=False)


# Helpers


def _options(args) -> TrackerOptions:
    kw = {}
    if args.tol_corrector is not None:
        kw["corrector_tolerance"] = args.tol_corrector
    if args.tol_residual is not None:
        kw["residual_tolerance"] = args.tol_residual
    return TrackerOptions(**kw)


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _load(args):
    parsed = parse_system(_read(args.system))
    if parsed.has_parameters:
        fam = ParametricFamily(parsed.system, len(parsed.parameters))
        if getattr(args, "params", None) is None:
            return parsed, fam, None
        p = decode_point(args.params)
        if len(p) != fam.nparams:
            raise PolytraceError(f"expected {fam.nparams} parameter values, got {len(p)}")
        return parsed, fam, p
    return parsed, None, None


def _target(parsed, fam, p):
    if fam is None:
        return parsed.system
    if p is None:
        raise PolytraceError("the system declares parameters; pass --params")
    return fam.specialize(p)


def _residual(F, x) -> float:
    return float(np.linalg.norm(F.evaluate(x), np.inf)) if len(F) else 0.0


def _certificate_summary(c) -> dict:
    out = {"method": c.method.value, "certified": c.certified, "unique": c.unique, "real": c.real,
           "distinct_from": c.distinct_from}
    if c.method.value == "alpha":
        out.update(beta=c.beta, gamma=c.gamma, alpha=c.alpha, radius=c.radius, arithmetic="floating, conservative")
    else:
        out.update(contraction=c.contraction, rounds=c.rounds, box_radius=c.box_radius())
    return out


def _records(F, solutions, multiplicities=None, certificates=None) -> list[dict]:
    out = []
    for k, x in enumerate(solutions):
        rec = {"id": k, "coordinates": encode_point(x), "residual": _residual(F, x), "status": "success"}
        if multiplicities:
            rec["multiplicity"] = multiplicities[k]
        if certificates is not None:
            rec["certificate"] = _certificate_summary(certificates[k])
        out.append(rec)
    return out


def _path_summary(paths) -> dict:
    counts: dict[str, int] = {}
    for p in paths:
        if p is not None:
            counts[p.status.value] = counts.get(p.status.value, 0) + 1
    return dict(sorted(counts.items()))


# Commands


def _solve_monodromy(parsed, fam, p, args, opts):
    """Monodromy on the given family, or on the coefficient family of a
    plain system, then a parameter continuation to the target."""
    if fam is None:
        F = parsed.system
        supports = [sorted(f.terms) for f in F.polys]
        if not F.has_negative_exponents():
            # with the constant term in every support the generic fiber
            # counts affine solutions, not only those in the torus
            origin = (0,) * F.nvars
            supports = [s if origin in s else [origin] + s for s in supports]
        fam = ParametricFamily.from_coefficients(supports, F.variables)
        target = coefficient_vector(F, supports)
        known = args.known_count if args.known_count is not None else mixed_volume(supports, seed=args.seed)
    else:
        target, known = p, args.known_count
    status = EXIT_OK
    try:
        fiber = monodromy_solve(fam, known, seed=args.seed, budget=args.budget, opts=opts, threads=args.threads,
                                max_loops=args.max_loops or 500)
    except StalledBeforeCount as exc:
        fiber, status = exc.result, EXIT_INCONCLUSIVE
    info = {"loops": fiber.loops, "fiber_size": len(fiber), "known_count": known,
            "stopped_by": fiber.info.get("stopped_by"), "stagnation_budget": args.budget}
    if target is None:
        info["parameters"] = encode_point(fiber.parameters)
        return fam.specialize(fiber.parameters), fiber.solutions, None, info, fiber.loops, status
    res = parameter_solve(fam, fiber.parameters, fiber.solutions, target, opts, args.seed, args.threads)
    return fam.specialize(target), res.solutions, res.multiplicities, info, len(fiber), status


def cmd_solve(args) -> tuple[dict, int]:
    parsed, fam, p = _load(args)
    opts = _options(args)
    doc: dict = {"method": args.method}
    status = EXIT_OK
    if args.method == "monodromy":
        F, sols, mult, info, npaths, status = _solve_monodromy(parsed, fam, p, args, opts)
        doc.update(info)
    else:
        F = _target(parsed, fam, p)
        if any(f.terms and f.degree() == 0 and not f.has_negative_exponents() for f in F.polys):
            sols, mult, npaths = [], [], 0
        else:
            square = F
            if len(F) > F.nvars:
                square, _ = square_up(F, seed=args.seed)
                doc["squared_up"] = True
            solver = polyhedral_solve if args.method == "polyhedral" else total_degree_solve
            res = solver(square, opts, seed=args.seed, threads=args.threads)
            sols, mult, npaths = res.solutions, res.multiplicities, res.npaths
            if square is not F:
                refined = [(gauss_newton_filter(F, [x]), m) for x, m in zip(sols, mult)]
                sols, mult = [r[0] for r, _ in refined if r], [m for r, m in refined if r]
            doc["path_status"] = _path_summary(res.paths)
    certs = certify(F, sols, args.certify) if args.certify and sols else None
    doc.update(variables=list(parsed.variables), paths=npaths, count=len(sols),
               solutions=_records(F, sols, mult, certs))
    return doc, status


def cmd_mixedvol(args) -> tuple[dict, int]:
    parsed, _, _ = _load(args)
    F = parsed.system
    supports = [sorted(f.terms) for f in F.polys]
    doc = {"mixed_volume": mixed_volume(supports, seed=args.seed)}
    if args.cells:
        cells, lifting = mixed_cells_generic(supports, seed=args.seed)
        doc["lifting"] = lifting
        doc["cells"] = [{"normal": list(c.normal), "volume": c.volume, "edges": [[list(a), list(b)] for a, b in c.edges]}
                        for c in cells]
    return doc, EXIT_OK


def cmd_certify(args) -> tuple[dict, int]:
    parsed, fam, p = _load(args)
    F = _target(parsed, fam, p)
    if args.points:
        raw = json.loads(_read(args.points))
        if isinstance(raw, dict):
            raw = [r["coordinates"] for r in raw["solutions"]]
        points = [decode_point(x) for x in raw]
    else:
        points = total_degree_solve(F, _options(args), seed=args.seed, threads=args.threads).solutions
    certs = certify(F, points, args.method)
    recs = [{"id": k, "coordinates": encode_point(c.point), **_certificate_summary(c)} for k, c in enumerate(certs)]
    doc = {"method": args.method, "count": len(certs), "certified": sum(c.certified for c in certs),
           "real": sum(bool(c.real) for c in certs), "certificates": recs}
    return doc, EXIT_OK


def _decompose(args, F):
    fn = regenerate if args.algorithm == "regeneration" else numerical_irreducible_decomposition
    kw = {"max_loops": args.max_loops} if args.max_loops else {}
    return fn(F, _options(args), seed=args.seed, threads=args.threads, **kw)


def _component_doc(k, W, verified) -> dict:
    return {"id": k, "dimension": W.dim, "degree": W.degree, "verified": verified,
            "slice": [encode_point(row) for row in W.slice.coeffs], "points": [encode_point(x) for x in W.points]}


def cmd_decompose(args) -> tuple[dict, int]:
    parsed, fam, p = _load(args)
    dec = _decompose(args, _target(parsed, fam, p))
    doc = {"algorithm": args.algorithm, "variables": list(parsed.variables), "inconclusive": dec.inconclusive,
           "summary": [list(s) for s in dec.summary()],
           "components": [_component_doc(k, W, ok) for k, (W, ok) in enumerate(zip(dec.components, dec.verified))],
           "permutations": dec.permutations}
    return doc, EXIT_INCONCLUSIVE if dec.inconclusive else EXIT_OK


def cmd_member(args) -> tuple[dict, int]:
    parsed, fam, p = _load(args)
    F = _target(parsed, fam, p)
    x0 = decode_point(args.point)
    if len(x0) != F.nvars:
        raise PolytraceError(f"point has {len(x0)} coordinates, system has {F.nvars} variables")
    residual = _residual(F, x0)
    evidence = []
    if residual <= args.residual_gate * max(1.0, float(np.linalg.norm(x0))):
        dec = _decompose(args, F)
        for k, W in enumerate(dec.components):
            hit = membership_test(W, x0, seed=int(stream(args.seed, "cli-member", k).integers(2**62)),
                                  opts=_options(args), threads=args.threads)
            evidence.append({"component": k, "dimension": W.dim, "degree": W.degree, "member": hit})
    doc = {"point": encode_point(x0), "residual": residual, "member": any(e["member"] for e in evidence),
           "components": [e["component"] for e in evidence if e["member"]], "evidence": evidence}
    return doc, EXIT_OK


def _write_system(doc: dict, text: str, args):
    doc["system"] = text
    if args.output:
        out = Path(args.output)
        out.write_text(text)
        side = out.with_name(out.name + ".oracle.json")
        side.write_text(dumps(doc["oracle"]) + "\n")
        doc["files"] = [str(out), str(side)]


def cmd_bench(args) -> tuple[dict, int]:
    opts = _options(args)
    doc: dict = {"problem": args.problem}
    if args.problem == "kuramoto":
        g = bench.parse_graph(args.graph)
        F = bench.kuramoto_system(g, seed=args.seed)
        doc["oracle"] = {"graph": args.graph, "edges": [list(e) for e in g.edges], "count": bench.kuramoto_count(g),
                         "closed_form": bench.kuramoto_count_formula(g)}
        if args.solve:
            doc["solved"] = len(polyhedral_solve(F, opts, seed=args.seed, threads=args.threads))
    elif args.problem == "p3p":
        F, truth = bench.p3p_system(args.seed)
        doc["oracle"] = {"depths": encode_point(truth), "degree": 8}
        if args.solve:
            res = total_degree_solve(F, opts, seed=args.seed, threads=args.threads)
            doc["solved"] = len(res)
            doc["truth_error"] = min((float(np.linalg.norm(s - truth)) for s in res), default=None)
    else:
        F, truth = bench.five_point_system(args.seed)
        doc["oracle"] = {"depths": encode_point(truth), "degree": 20}
        if args.solve:
            out = bench.five_point_solve(args.seed, opts=opts, threads=args.threads)
            doc["solved"] = len(out.solutions)
            doc["truth_error"] = min((float(np.linalg.norm(s - truth)) for s in out.solutions), default=None)
    _write_system(doc, format_system(F), args)
    return doc, EXIT_OK


COMMANDS = {"solve": cmd_solve, "mixedvol": cmd_mixedvol, "certify": cmd_certify, "decompose": cmd_decompose,
            "member": cmd_member, "bench": cmd_bench}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: POLYTRACE_THREADS or 1)")
    common.add_argument("--tol-corrector", type=float, default=None)
    common.add_argument("--tol-residual", type=float, default=None)
    common.add_argument("--max-loops", type=int, default=None)
    common.add_argument("--verbose", "-v", action="store_true")

    def system_arg(p):
        p.add_argument("system", help="system file, or - for stdin")
        p.add_argument("--params", help="parameter values, comma separated (e.g. 1,2+3j)")

    ap = argparse.ArgumentParser(prog="polytrace", description="Homotopy continuation for polynomial systems.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="isolated solutions")
    system_arg(p)
    p.add_argument("--method", choices=["total", "polyhedral", "monodromy"], default="total")
    p.add_argument("--certify", choices=["alpha", "krawczyk"], default=None)
    p.add_argument("--known-count", type=int, default=None)
    p.add_argument("--budget", type=int, default=10, help="monodromy loops without progress before stopping")

    p = sub.add_parser("mixedvol", parents=[common], help="mixed volume of the supports")
    system_arg(p)
    p.add_argument("--cells", action="store_true")

    p = sub.add_parser("certify", parents=[common], help="certify approximate solutions")
    system_arg(p)
    p.add_argument("--method", choices=["alpha", "krawczyk"], default="krawczyk")
    p.add_argument("--points", help="JSON file: solve output or a list of points (default: solve first)")

    for name, helptext in (("decompose", "numerical irreducible decomposition"), ("member", "membership test")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        system_arg(p)
        p.add_argument("--algorithm", choices=["cascade", "regeneration"], default="cascade")
        if name == "member":
            p.add_argument("--point", required=True, help="coordinates, comma separated (e.g. 1,2+3j)")
            p.add_argument("--residual-gate", type=float, default=1e-6,
                           help="points with a larger residual are reported as non-members without tracking")

    p = sub.add_parser("bench", parents=[common], help="benchmark systems with oracles")
    p.add_argument("problem", choices=["kuramoto", "p3p", "5pt"])
    p.add_argument("--graph", default="cycle:4", help="kind:N, kind in path, tree, star, cycle, complete, wheel")
    p.add_argument("--output", help="write the system here and the oracle next to it")
    p.add_argument("--solve", action="store_true", help="also solve and report the count")
    return ap


def run(argv=None) -> tuple[dict, int]:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    doc = {"schema_version": SCHEMA_VERSION, "command": args.command, "seed": args.seed}
    try:
        body, code = COMMANDS[args.command](args)
        doc.update(body)
    except Inconclusive as exc:
        doc["error"] = {"type": "Inconclusive", "message": str(exc)}
        code = EXIT_INCONCLUSIVE
    except (PolytraceError, OSError, ValueError, json.JSONDecodeError) as exc:
        doc["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = EXIT_ERROR
    doc["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return doc, code


def main(argv=None) -> int:
    doc, code = run(argv)
    sys.stdout.write(dumps(doc) + "\n")
    return code
