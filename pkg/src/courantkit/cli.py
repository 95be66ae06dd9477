"""Deterministic command-line checks over JSON definition files.

Every command reads a definition (file or stdin), runs exact verdicts, and
emits a JSON report with a canonical field order.  Identical inputs and seed
produce byte-identical output: verdicts are sorted by name, sampled sections
are embedded in the report, and the timing field stays null unless explicitly
requested.

Exit codes: 0 all verdicts pass, 1 at least one verdict failed, 2 malformed
input (JSON syntax, schema violation, unbuildable object, unknown name).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import catalog, io
from .dirac import (
    anchor_intersection,
    closure_report,
    is_lagrangian,
    projection_closure,
)
from .gcr import (
    GCRError,
    decompose_jacobi,
    extract_bivector,
    l_generators,
    tangent_restriction,
    validate_gcr,
)
from .io import SchemaError
from .ring import ParseError
from .schouten import check_jacobi_pair

_ALGEBRA_ALIASES = {
    "sl2": "point-sl2",
    "abelian2": "point-abelian2",
    "heisenberg": "point-heisenberg",
    "heisenberg-mod": "point-heisenberg-mod",
}


def _read_text(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as ex:
        raise SchemaError(f"cannot read {path!r}: {ex.strerror}", "$") from None


def _parse_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as ex:
        raise SchemaError(
            f"invalid JSON: {ex.msg} (line {ex.lineno} column {ex.colno})", "$"
        ) from None


def _load_defs(args) -> tuple:
    doc = _parse_json(_read_text(getattr(args, "defs", None)))
    payload = io.definition_from_json(doc)
    return doc, payload


def _write(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(args, report: dict, started: float) -> int:
    report["timing"] = (
        {"seconds": round(time.monotonic() - started, 6)}
        if getattr(args, "timing", False)
        else None
    )
    report["verdicts"] = sorted(report.get("verdicts", []), key=lambda v: v["name"])
    report["ok"] = all(v["pass"] for v in report["verdicts"])
    _write(args, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0 if report["ok"] else 1


def _verdict(name: str, ok: bool, witness=None, residual=None) -> dict:
    return {"name": name, "pass": bool(ok), "witness": witness, "residual": residual}


# -- commands ------------------------------------------------------------------


def _cmd_validate(args) -> int:
    started = time.monotonic()
    doc, payload = _load_defs(args)
    alg = payload["algebroid"]
    v = alg.validate()
    verdicts = [
        _verdict("anchor_morphism", v["anchor_ok"], residual=v["anchor_defects"][:4] or None),
        _verdict("flat_module", v["flat_ok"], residual=v["curvature_defects"][:4] or None),
        _verdict("jacobi", v["jacobi_ok"], residual=v["jacobi_defects"][:4] or None),
    ]
    C = payload.get("courant")
    if C is not None and not C.twist.is_zero():
        verdicts.append(_verdict("closed_twist", C.closed_twist))
    report = {"command": "validate", "inputs": io.digest(doc), "verdicts": verdicts}
    return _emit(args, report, started)


def _cmd_cohomology(args) -> int:
    if (args.algebra is None) == (args.defs is None):
        raise SchemaError("pass exactly one of --algebra or --defs", "$")
    if args.algebra is not None:
        name = _ALGEBRA_ALIASES.get(args.algebra, args.algebra)
        try:
            payload = catalog.load(name)
        except catalog.CatalogError as ex:
            raise SchemaError(str(ex), "$.algebra") from None
    else:
        _, payload = _load_defs(args)
    alg = payload["algebroid"]
    betti = alg.ce_cohomology()
    dim = betti[args.k] if 0 <= args.k < len(betti) else 0
    _write(args, io.canonical_dumps({"dim": dim}) + "\n")
    return 0


def _cmd_bracket(args) -> int:
    started = time.monotonic()
    doc, payload = _load_defs(args)
    C = payload["courant"]
    e1 = io.csection_from_json(C.alg, _parse_json(args.e1), "$.e1")
    e2 = io.csection_from_json(C.alg, _parse_json(args.e2), "$.e2")
    result = C.bracket(e1, e2)
    report = {
        "command": "bracket",
        "inputs": io.digest(doc),
        "result": io.csection_to_json(result),
        "pairing": [c.to_str() for c in C.pairing(e1, e2)],
        "verdicts": [],
    }
    return _emit(args, report, started)


def _cmd_check_axioms(args) -> int:
    started = time.monotonic()
    doc, payload = _load_defs(args)
    C = payload["courant"]
    rep = C.verify(seed=args.seed, samples=args.samples, frame_sweep=True)
    ax = rep["axioms"]
    alg_ok = rep["algebroid"]
    verdicts = [
        _verdict(
            "algebroid_valid",
            alg_ok["jacobi_ok"] and alg_ok["anchor_ok"] and alg_ok["flat_ok"],
        ),
        _verdict("closed_twist", rep["closed_twist"]),
        _verdict(
            "leibniz",
            ax["leibniz"]["holds"],
            witness=(ax["leibniz"]["violations"][:1] or [None])[0],
            residual=ax["leibniz"]["violations"] or None,
        ),
        _verdict("leibniz_insertion", ax["leibniz"]["defect_matches_insertion"]),
        _verdict(
            "anchor",
            ax["anchor"]["holds"],
            residual=ax["anchor"]["violations"] or None,
        ),
        _verdict(
            "symmetric_part",
            ax["symmetric_part"]["holds"],
            residual=ax["symmetric_part"]["violations"] or None,
        ),
        _verdict(
            "invariance",
            ax["invariance"]["holds"],
            residual=ax["invariance"]["violations"] or None,
        ),
    ]
    report = {
        "command": "check-axioms",
        "inputs": io.digest(doc),
        "seed": args.seed,
        "samples": {
            "requested": args.samples,
            "sections": rep["samples"],
            "leibniz_triples": ax["leibniz"]["random_triples"],
        },
        "checked": {k: ax[k]["checked"] for k in sorted(ax)},
        "verdicts": verdicts,
    }
    return _emit(args, report, started)


def _cmd_check_dirac(args) -> int:
    started = time.monotonic()
    doc, payload = _load_defs(args)
    C = payload["courant"]
    bundles = dict(payload.get("subbundles", {}))
    if args.subbundle:
        sdoc = _parse_json(_read_text(args.subbundle))
        if not isinstance(sdoc, list):
            raise SchemaError("expected a list of sections", "$.subbundle")
        name = os.path.splitext(os.path.basename(args.subbundle))[0]
        bundles[name] = [
            io.csection_from_json(C.alg, s, f"$.subbundle[{i}]")
            for i, s in enumerate(sdoc)
        ]
    if not bundles:
        raise SchemaError("no subbundles to check", "$.subbundles")
    verdicts = []
    details = {}
    for name in sorted(bundles):
        gens = bundles[name]
        lag_ok, lag = is_lagrangian(C, gens)
        closed = closure_report(C, gens)
        proj = projection_closure(C, gens)
        rank_a, _, _ = anchor_intersection(C, gens)
        verdicts.append(
            _verdict(
                f"{name}.lagrangian",
                lag_ok,
                witness=lag.get("pairing_witness"),
                residual={"rank": lag["rank"], "expected_rank": lag["expected_rank"]},
            )
        )
        verdicts.append(
            _verdict(
                f"{name}.involutive",
                closed["closed"],
                witness=closed.get("witness"),
            )
        )
        verdicts.append(
            _verdict(f"{name}.projection_closed", proj["closed"], witness=proj.get("witness"))
        )
        details[name] = {
            "generators": len(gens),
            "intersect_A": rank_a,
            "excluded": sorted(set(lag["excluded"]) | set(closed["excluded"])),
        }
    report = {
        "command": "check-dirac",
        "inputs": io.digest(doc),
        "details": details,
        "verdicts": verdicts,
    }
    return _emit(args, report, started)


def _cmd_check_gcr(args) -> int:
    started = time.monotonic()
    doc, payload = _load_defs(args)
    C = payload["courant"]
    S = payload.get("gcr")
    if args.gcr:
        gdoc = _parse_json(_read_text(args.gcr))
        wrapped = dict(doc)
        wrapped["gcr"] = gdoc
        S = io.definition_from_json(wrapped).get("gcr")
    if S is None:
        raise SchemaError("no gcr block to check", "$.gcr")
    rep = validate_gcr(S)
    verdicts = [
        _verdict("j_square", rep["j_square_ok"], witness=rep.get("j_square_witness")),
        _verdict("orthogonal", rep["orthogonal_ok"], witness=rep.get("orthogonal_witness")),
    ]
    if not rep.get("dirac_skipped"):
        verdicts.append(_verdict("lagrangian", rep["lagrangian_ok"]))
        verdicts.append(
            _verdict(
                "involutive",
                rep["involutive_ok"],
                witness=rep["dirac_report"].get("involutive_witness"),
            )
        )
        verdicts.append(
            _verdict(
                "conjugate_intersection",
                rep["intersection_ok"],
                residual={"span_rank": rep["conjugate_span_rank"]},
            )
        )
    details = {"excluded": sorted(rep.get("excluded", []))}
    if rep["ok"]:
        gens = l_generators(S)
        details["l_generators"] = [io.csection_to_json(g) for g in gens]
        try:
            P = extract_bivector(S)
            details["bivector"] = io.multivector_to_json(P)
        except GCRError:
            P = None
            details["bivector"] = None
        if P is not None:
            try:
                dec = decompose_jacobi(C.alg, P)
                details["jacobi_pair"] = {
                    "lambda": io.multivector_to_json(dec["lambda"]),
                    "e": io.multivector_to_json(dec["e"]),
                }
            except (GCRError, ValueError):
                details["jacobi_pair"] = None
    report = {
        "command": "check-gcr",
        "inputs": io.digest(doc),
        "details": details,
        "verdicts": verdicts,
    }
    return _emit(args, report, started)


def _cmd_check_jacobi(args) -> int:
    started = time.monotonic()
    doc, payload = _load_defs(args)
    alg = payload["algebroid"]
    if args.lam or args.evec:
        if not (args.lam and args.evec):
            raise SchemaError("pass both --lambda and --e", "$")
        if args.restrict:
            tangent = tangent_restriction(alg)
        else:
            tangent = alg
        lam = io.multivector_from_json(
            tangent.sig, tangent.rank, _parse_json(args.lam), "$.lambda"
        )
        evec = io.multivector_from_json(
            tangent.sig, tangent.rank, _parse_json(args.evec), "$.e"
        )
        if lam.degree != 2 or evec.degree != 1:
            raise SchemaError("expected a bivector and a vector", "$.lambda")
    elif payload.get("jacobi") is not None:
        jj = payload["jacobi"]
        tangent, lam, evec = jj["algebroid"], jj["lambda"], jj["e"]
    else:
        raise SchemaError("no jacobi pair to check", "$.jacobi")
    rep = check_jacobi_pair(tangent, lam, evec)
    verdicts = [
        _verdict(
            "square",
            rep["square_ok"],
            residual=None if rep["square_ok"] else io.multivector_to_json(rep["square_residual"]),
        ),
        _verdict(
            "e_compat",
            rep["e_ok"],
            residual=None if rep["e_ok"] else io.multivector_to_json(rep["e_residual"]),
        ),
    ]
    report = {
        "command": "check-jacobi",
        "inputs": io.digest(doc),
        "details": {"nondegenerate": rep["nondegenerate"]},
        "verdicts": verdicts,
    }
    return _emit(args, report, started)


def _cmd_catalog(args) -> int:
    if args.action == "list":
        _write(args, json.dumps(catalog.names(), indent=2) + "\n")
        return 0
    if not args.entry:
        raise SchemaError("catalog build requires an entry name", "$")
    try:
        payload = catalog.load(args.entry)
    except catalog.CatalogError as ex:
        raise SchemaError(str(ex), "$") from None
    doc = io.definition_to_json(payload)
    _write(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0


# -- argument parsing ------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="courantkit",
        description="exact checks for bracket presentations and their structures",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, seeded=False):
        p.add_argument("--defs", default=None, help="definition file ('-' or omit for stdin)")
        p.add_argument("--out", default=None, help="write the report to this file")
        p.add_argument("--timing", action="store_true", help="include wall-clock timing")
        if seeded:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--samples", type=int, default=25)

    p = sub.add_parser("validate", help="algebroid axioms and module flatness")
    common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("cohomology", help="cochain complex dimension at one degree")
    p.add_argument("--algebra", default=None, help="catalog algebra name")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--defs", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_cohomology)

    p = sub.add_parser("bracket", help="bracket and pairing of two sections")
    common(p)
    p.add_argument("--e1", required=True, help="section as JSON")
    p.add_argument("--e2", required=True, help="section as JSON")
    p.set_defaults(func=_cmd_bracket)

    p = sub.add_parser("check-axioms", help="full axiom sweep with random sections")
    common(p, seeded=True)
    p.set_defaults(func=_cmd_check_axioms)

    p = sub.add_parser("check-dirac", help="isotropy, rank and involutivity of subbundles")
    common(p)
    p.add_argument("--subbundle", default=None, help="extra subbundle file (JSON list)")
    p.set_defaults(func=_cmd_check_dirac)

    p = sub.add_parser("check-gcr", help="orthogonal structure checks and derived data")
    common(p)
    p.add_argument("--gcr", default=None, help="structure file with h, frame, j")
    p.set_defaults(func=_cmd_check_gcr)

    p = sub.add_parser("check-jacobi", help="bivector-vector pair compatibility")
    common(p)
    p.add_argument("--lambda", dest="lam", default=None, help="bivector as JSON")
    p.add_argument("--e", dest="evec", default=None, help="vector as JSON")
    p.add_argument(
        "--restrict",
        action="store_true",
        help="interpret the pair on the split-off tangent part",
    )
    p.set_defaults(func=_cmd_check_jacobi)

    p = sub.add_parser("catalog", help="list or emit built-in definitions")
    p.add_argument("action", choices=("list", "build"))
    p.add_argument("entry", nargs="?", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_catalog)
    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as ex:
        sys.stderr.write(f"error: {ex}\n")
        return 2
    except ParseError as ex:
        sys.stderr.write(f"error: {ex}\n")
        return 2
    except ValueError as ex:
        sys.stderr.write(f"error: {ex}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
