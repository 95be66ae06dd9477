"""JSON definitions: serialize and parse presentations with path diagnostics.

A definition document is a single JSON object.  All ring elements are strings
in the expression grammar of the coefficient ring; all frame and coordinate
indices are 1-based in documents and 0-based in memory.  Parsing is strict:
unknown keys, malformed indices and inconsistent shapes raise SchemaError with
the JSON path of the offending value, and ring expression errors keep their
character position.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .algebroid import Algebroid
from .courant import CourantPresentation, CSection
from .exterior import AForm, FScalar, Multivector
from .gcr import Distribution, GCRStructure, HBundle, build_H_bundle
from .ring import ExpGen, ParseError, RingElem, RingSignature


class SchemaError(ValueError):
    def __init__(self, message: str, path: str):
        super().__init__(f"{message} (at {path})")
        self.message = message
        self.path = path


def _expect(doc, typ, path, what):
    if not isinstance(doc, typ):
        raise SchemaError(f"expected {what}", path)
    return doc


def _check_keys(doc, allowed, path):
    extra = set(doc) - set(allowed)
    if extra:
        raise SchemaError(f"unknown keys {sorted(extra)}", path)


def _fraction(value, path) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError("expected a rational number", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"bad rational {value!r}", path) from None
    raise SchemaError("expected a rational number", path)


def parse_elem(sig: RingSignature, value, path) -> RingElem:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise SchemaError("expected a ring expression string", path)
    text = str(value)
    try:
        return sig.parse(text)
    except ParseError as ex:
        raise SchemaError(str(ex), path) from None


def _matrix(sig, doc, nrows, ncols, path):
    _expect(doc, list, path, "a matrix (list of rows)")
    if nrows is not None and len(doc) != nrows:
        raise SchemaError(f"expected {nrows} rows, got {len(doc)}", path)
    out = []
    for i, row in enumerate(doc):
        _expect(row, list, f"{path}[{i}]", "a row (list)")
        if ncols is not None and len(row) != ncols:
            raise SchemaError(f"expected {ncols} entries, got {len(row)}", f"{path}[{i}]")
        out.append([parse_elem(sig, v, f"{path}[{i}][{j}]") for j, v in enumerate(row)])
    return out


def _index_key(key, size, width, path) -> tuple:
    parts = key.split(",") if key else []
    if len(parts) != width:
        raise SchemaError(f"expected {width} indices, got {len(parts)}", path)
    out = []
    for p in parts:
        try:
            k = int(p)
        except ValueError:
            raise SchemaError(f"bad index {p!r}", path) from None
        if not 1 <= k <= size:
            raise SchemaError(f"index {k} out of range 1..{size}", path)
        out.append(k - 1)
    if any(out[i] >= out[i + 1] for i in range(len(out) - 1)):
        raise SchemaError("indices must be strictly increasing", path)
    return tuple(out)


# -- ring signature --------------------------------------------------------------


def sig_to_json(sig: RingSignature) -> dict:
    doc = {"coords": list(sig.coords), "mode": sig.mode}
    if sig.exps:
        doc["exps"] = [
            {"name": e.name, "row": [str(f) for f in e.row]} for e in sig.exps
        ]
    return doc


def sig_from_json(doc, path="$.ring") -> RingSignature:
    _expect(doc, dict, path, "an object")
    _check_keys(doc, ("coords", "exps", "mode"), path)
    coords = _expect(doc.get("coords", []), list, f"{path}.coords", "a list of names")
    for i, c in enumerate(coords):
        _expect(c, str, f"{path}.coords[{i}]", "a name string")
    exps = []
    for i, e in enumerate(doc.get("exps", [])):
        epath = f"{path}.exps[{i}]"
        _expect(e, dict, epath, "an object")
        _check_keys(e, ("name", "row"), epath)
        name = _expect(e.get("name"), str, f"{epath}.name", "a name string")
        row = _expect(e.get("row"), list, f"{epath}.row", "a list of rationals")
        exps.append(
            ExpGen(name, tuple(_fraction(v, f"{epath}.row[{j}]") for j, v in enumerate(row)))
        )
    mode = doc.get("mode", "gaussian")
    if mode not in ("gaussian", "rational"):
        raise SchemaError(f"unknown mode {mode!r}", f"{path}.mode")
    try:
        return RingSignature(tuple(coords), tuple(exps), mode=mode)
    except ValueError as ex:
        raise SchemaError(str(ex), path) from None


# -- forms, scalars, sections ------------------------------------------------------


def aform_to_json(w: AForm) -> dict:
    return {
        "degree": w.degree,
        "terms": {
            ",".join(str(i + 1) for i in I): [c.to_str() for c in vec]
            for I, vec in w.sorted_terms()
        },
    }


def aform_from_json(sig, rank, rank_v, vvalued, doc, path) -> AForm:
    _expect(doc, dict, path, "an object")
    _check_keys(doc, ("degree", "terms"), path)
    degree = doc.get("degree")
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 0:
        raise SchemaError("expected a non-negative integer degree", f"{path}.degree")
    width = rank_v if vvalued else 1
    terms = {}
    tdoc = _expect(doc.get("terms", {}), dict, f"{path}.terms", "an object")
    for key, vec in tdoc.items():
        kpath = f"{path}.terms[{key!r}]"
        I = _index_key(key, rank, degree, kpath)
        _expect(vec, list, kpath, "a coefficient list")
        if len(vec) != width:
            raise SchemaError(f"expected {width} coefficients, got {len(vec)}", kpath)
        terms[I] = tuple(parse_elem(sig, v, f"{kpath}[{j}]") for j, v in enumerate(vec))
    return AForm(sig, rank, rank_v, vvalued, degree, terms)


def fscalar_to_json(s: FScalar) -> dict:
    return {str(g): s.parts[g].to_str() for g in sorted(s.parts)}


def fscalar_from_json(sig, doc, path) -> FScalar:
    _expect(doc, dict, path, "an object mapping grade to expression")
    parts = {}
    for key, value in doc.items():
        try:
            g = int(key)
        except ValueError:
            raise SchemaError(f"bad grade {key!r}", path) from None
        e = parse_elem(sig, value, f"{path}[{key!r}]")
        if not e.is_zero():
            parts[g] = e
    return FScalar(sig, parts)


def multivector_to_json(P: Multivector) -> dict:
    return {
        "degree": P.degree,
        "terms": {
            ",".join(str(i + 1) for i in I): fscalar_to_json(c)
            for I, c in P.sorted_terms()
        },
    }


def multivector_from_json(sig, rank, doc, path) -> Multivector:
    _expect(doc, dict, path, "an object")
    _check_keys(doc, ("degree", "terms"), path)
    degree = doc.get("degree")
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 0:
        raise SchemaError("expected a non-negative integer degree", f"{path}.degree")
    terms = {}
    tdoc = _expect(doc.get("terms", {}), dict, f"{path}.terms", "an object")
    for key, value in tdoc.items():
        kpath = f"{path}.terms[{key!r}]"
        I = _index_key(key, rank, degree, kpath)
        terms[I] = fscalar_from_json(sig, value, kpath)
    return Multivector(sig, rank, degree, terms)


def csection_to_json(s: CSection) -> dict:
    return {"x": [c.to_str() for c in s.x], "xi": aform_to_json(s.xi)}


def csection_from_json(alg: Algebroid, doc, path) -> CSection:
    _expect(doc, dict, path, "an object")
    _check_keys(doc, ("x", "xi"), path)
    xdoc = _expect(doc.get("x", []), list, f"{path}.x", "a coefficient list")
    if len(xdoc) != alg.rank:
        raise SchemaError(f"expected {alg.rank} coefficients, got {len(xdoc)}", f"{path}.x")
    x = [parse_elem(alg.sig, v, f"{path}.x[{j}]") for j, v in enumerate(xdoc)]
    xi = None
    if "xi" in doc:
        xi = aform_from_json(alg.sig, alg.rank, alg.rank_v, True, doc["xi"], f"{path}.xi")
        if xi.degree != 1:
            raise SchemaError("section form part must have degree 1", f"{path}.xi.degree")
    return CSection(alg, x, xi)


# -- algebroid ----------------------------------------------------------------------


def algebroid_to_json(alg: Algebroid) -> dict:
    """Top-level definition fragment: rankA, anchor, structure, module."""
    doc = {
        "rankA": alg.rank,
        "anchor": [[c.to_str() for c in row] for row in alg.anchor],
    }
    if alg.structure:
        doc["structure"] = {
            f"{i + 1},{j + 1}": [c.to_str() for c in vec]
            for (i, j), vec in sorted(alg.structure.items())
        }
    has_action = any(
        any(any(not c.is_zero() for c in row) for row in mat) for mat in alg.theta
    )
    if alg.rank_v != 1 or has_action:
        module = {"rankV": alg.rank_v}
        if has_action:
            module["action"] = [
                [[c.to_str() for c in row] for row in mat] for mat in alg.theta
            ]
        doc["module"] = module
    return doc


def algebroid_from_json(sig: RingSignature, doc, path="$") -> Algebroid:
    rank = doc.get("rankA")
    if not isinstance(rank, int) or isinstance(rank, bool) or rank < 1:
        raise SchemaError("expected a positive integer rankA", f"{path}.rankA")
    rank_v = 1
    if "module" in doc:
        mdoc = _expect(doc["module"], dict, f"{path}.module", "an object")
        _check_keys(mdoc, ("rankV", "action"), f"{path}.module")
        rank_v = mdoc.get("rankV", 1)
        if not isinstance(rank_v, int) or isinstance(rank_v, bool) or rank_v < 1:
            raise SchemaError("expected a positive integer rankV", f"{path}.module.rankV")
    anchor = _matrix(sig, doc.get("anchor", []), rank, sig.ncoords, f"{path}.anchor")
    structure = {}
    sdoc = _expect(doc.get("structure", {}), dict, f"{path}.structure", "an object")
    for key, vec in sdoc.items():
        kpath = f"{path}.structure[{key!r}]"
        i, j = _index_key(key, rank, 2, kpath)
        _expect(vec, list, kpath, "a coefficient list")
        if len(vec) != rank:
            raise SchemaError(f"expected {rank} coefficients, got {len(vec)}", kpath)
        structure[(i, j)] = tuple(
            parse_elem(sig, v, f"{kpath}[{m}]") for m, v in enumerate(vec)
        )
    theta = None
    if "module" in doc and "action" in doc["module"]:
        adoc = _expect(doc["module"]["action"], list, f"{path}.module.action", "a list")
        if len(adoc) != rank:
            raise SchemaError(
                f"expected {rank} matrices, got {len(adoc)}", f"{path}.module.action"
            )
        theta = [
            _matrix(sig, mat, rank_v, rank_v, f"{path}.module.action[{i}]")
            for i, mat in enumerate(adoc)
        ]
    try:
        return Algebroid(sig, rank, rank_v, anchor, structure, theta)
    except ValueError as ex:
        raise SchemaError(str(ex), path) from None


# -- whole definitions ---------------------------------------------------------------

_TOP_KEYS = (
    "name",
    "ring",
    "rankA",
    "anchor",
    "structure",
    "module",
    "H",
    "allow_nonclosed",
    "two_form",
    "subbundles",
    "gcr",
    "jacobi",
    "expected",
)


def definition_to_json(payload: dict) -> dict:
    """Catalog payload (rich objects) to a plain JSON-able document."""
    alg = payload["algebroid"]
    doc = {"ring": sig_to_json(alg.sig)}
    doc.update(algebroid_to_json(alg))
    if "name" in payload:
        doc["name"] = payload["name"]
    C = payload.get("courant")
    if C is not None and not C.twist.is_zero():
        doc["H"] = aform_to_json(C.twist)
        if not C.closed_twist:
            doc["allow_nonclosed"] = True
    if payload.get("two_form") is not None:
        doc["two_form"] = aform_to_json(payload["two_form"])
    if payload.get("subbundles"):
        doc["subbundles"] = {
            name: [csection_to_json(s) for s in gens]
            for name, gens in sorted(payload["subbundles"].items())
        }
    S = payload.get("gcr")
    if S is None and payload.get("distribution") is not None:
        from .gcr import cr_to_gcr

        S = cr_to_gcr(payload["courant"], payload["distribution"], payload["j_matrix"])
    if S is not None:
        dist = S.hb.dist
        doc["gcr"] = {
            "h": dist.h,
            "frame": [[c.to_str() for c in row] for row in dist.frame],
            "j": [[c.to_str() for c in row] for row in S.j],
        }
    if payload.get("jacobi") is not None:
        jj = payload["jacobi"]
        doc["jacobi"] = {
            "restrict": jj["algebroid"].rank != alg.rank,
            "lambda": multivector_to_json(jj["lambda"]),
            "e": multivector_to_json(jj["e"]),
        }
    if payload.get("expected"):
        doc["expected"] = payload["expected"]
    return doc


def definition_from_json(doc, path="$") -> dict:
    """Parse a definition document back into rich objects.

    Construction errors (invalid brackets, non-closed twist without the
    explicit flag, degenerate frames) are schema errors: the document
    describes an object that cannot be built.
    """
    _expect(doc, dict, path, "an object")
    _check_keys(doc, _TOP_KEYS, path)
    if "ring" not in doc:
        raise SchemaError("missing required key 'ring'", path)
    if "rankA" not in doc:
        raise SchemaError("missing required key 'rankA'", path)
    sig = sig_from_json(doc["ring"], f"{path}.ring")
    alg = algebroid_from_json(sig, doc, path)
    payload = {"algebroid": alg}
    if "name" in doc:
        payload["name"] = _expect(doc["name"], str, f"{path}.name", "a string")

    twist = None
    if "H" in doc:
        twist = aform_from_json(sig, alg.rank, alg.rank_v, True, doc["H"], f"{path}.H")
        if twist.degree != 3:
            raise SchemaError("twist must have degree 3", f"{path}.H.degree")
    allow = doc.get("allow_nonclosed", False)
    if not isinstance(allow, bool):
        raise SchemaError("expected a boolean", f"{path}.allow_nonclosed")
    try:
        payload["courant"] = CourantPresentation(alg, twist, allow_nonclosed=allow)
    except ValueError as ex:
        raise SchemaError(str(ex), f"{path}.H") from None

    if "two_form" in doc:
        w = aform_from_json(sig, alg.rank, alg.rank_v, True, doc["two_form"], f"{path}.two_form")
        if w.degree != 2:
            raise SchemaError("two_form must have degree 2", f"{path}.two_form.degree")
        payload["two_form"] = w

    if "subbundles" in doc:
        sdoc = _expect(doc["subbundles"], dict, f"{path}.subbundles", "an object")
        payload["subbundles"] = {
            name: [
                csection_from_json(alg, s, f"{path}.subbundles[{name!r}][{i}]")
                for i, s in enumerate(_expect(gens, list, f"{path}.subbundles[{name!r}]", "a list"))
            ]
            for name, gens in sdoc.items()
        }

    if "gcr" in doc:
        gdoc = _expect(doc["gcr"], dict, f"{path}.gcr", "an object")
        _check_keys(gdoc, ("h", "frame", "j"), f"{path}.gcr")
        h = gdoc.get("h")
        if not isinstance(h, int) or isinstance(h, bool) or h < 1:
            raise SchemaError("expected a positive integer h", f"{path}.gcr.h")
        frame = _matrix(sig, gdoc.get("frame", []), alg.rank, alg.rank, f"{path}.gcr.frame")
        j = _matrix(sig, gdoc.get("j", []), 2 * h, 2 * h, f"{path}.gcr.j")
        try:
            dist = Distribution(alg, frame, h)
            hb = build_H_bundle(payload["courant"], dist)
            payload["gcr"] = GCRStructure(hb, j)
        except ValueError as ex:
            raise SchemaError(str(ex), f"{path}.gcr") from None

    if "jacobi" in doc:
        jdoc = _expect(doc["jacobi"], dict, f"{path}.jacobi", "an object")
        _check_keys(jdoc, ("restrict", "lambda", "e"), f"{path}.jacobi")
        restrict = jdoc.get("restrict", True)
        if not isinstance(restrict, bool):
            raise SchemaError("expected a boolean", f"{path}.jacobi.restrict")
        if restrict:
            from .gcr import tangent_restriction

            try:
                tangent = tangent_restriction(alg)
            except ValueError as ex:
                raise SchemaError(str(ex), f"{path}.jacobi") from None
        else:
            tangent = alg
        lam = multivector_from_json(sig, tangent.rank, jdoc.get("lambda", {}), f"{path}.jacobi.lambda")
        e = multivector_from_json(sig, tangent.rank, jdoc.get("e", {}), f"{path}.jacobi.e")
        if lam.degree != 2:
            raise SchemaError("expected a bivector", f"{path}.jacobi.lambda.degree")
        if e.degree != 1:
            raise SchemaError("expected a vector", f"{path}.jacobi.e.degree")
        payload["jacobi"] = {"algebroid": tangent, "lambda": lam, "e": e}

    if "expected" in doc:
        payload["expected"] = _expect(doc["expected"], dict, f"{path}.expected", "an object")
    return payload


def canonical_dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def digest(doc) -> str:
    return hashlib.sha256(canonical_dumps(doc).encode("utf-8")).hexdigest()


def loads_definition(text: str) -> dict:
    """JSON text to a rich payload; JSON syntax errors keep their position."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as ex:
        raise SchemaError(f"invalid JSON: {ex.msg} (line {ex.lineno} column {ex.colno})", "$") from None
    return definition_from_json(doc)
