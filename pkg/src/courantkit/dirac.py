"""Subbundle analysis: isotropy, maximal isotropy and bracket closure.

Subbundles are presented by finite generator lists of sections.  Rank and
membership verdicts are generic (valid away from the recorded excluded locus),
which matches how such structures degenerate in examples: a graph of a
bivector may drop rank along a hypersurface while still being a structure on
the open complement.
"""

from __future__ import annotations

from .courant import CourantPresentation, CSection
from .exterior import AForm, Multivector, contract
from . import linalg


class DiracError(ValueError):
    pass


def coordinates_matrix(gens) -> list:
    return [g.coordinates() for g in gens]


def span_rank(C: CourantPresentation, gens) -> tuple:
    return linalg.rank(C.alg.sig, coordinates_matrix(gens))


def pairing_gram(C: CourantPresentation, gens, component: int = 0) -> list:
    """Gram matrix of the module-valued pairing, one module component at a time."""
    return [
        [C.pairing(g1, g2)[component] for g2 in gens] for g1 in gens
    ]


def is_isotropic(C: CourantPresentation, gens) -> tuple:
    """(verdict, witness): witness names the first nonvanishing pairing."""
    for i, g1 in enumerate(gens):
        for j in range(i, len(gens)):
            p = C.pairing(g1, gens[j])
            if any(not c.is_zero() for c in p):
                return False, {"pair": [i, j], "value": [str(c) for c in p]}
    return True, None


def is_lagrangian(C: CourantPresentation, gens) -> tuple:
    """(verdict, report) for maximal isotropy.

    With a rank-one module the pairing is a split form on a rank-2r bundle, so
    maximal isotropic means isotropic of generic rank r.
    """
    if C.alg.rank_v != 1:
        raise DiracError("maximal-isotropy test requires a rank-one module")
    iso, witness = is_isotropic(C, gens)
    r, excluded = span_rank(C, gens)
    report = {
        "isotropic": iso,
        "rank": r,
        "expected_rank": C.alg.rank,
        "excluded": [str(e) for e in excluded],
    }
    if witness:
        report["pairing_witness"] = witness
    return iso and r == C.alg.rank, report


def perp(C: CourantPresentation, gens) -> list:
    """Basis of the pairing-orthogonal subbundle (rank-one module only)."""
    alg = C.alg
    if alg.rank_v != 1:
        raise DiracError("orthogonal complement requires a rank-one module")
    r = alg.rank
    M = coordinates_matrix(gens)
    # <v, w> in coordinates: x-part of v against xi-part of w and vice versa
    rows = []
    for row in M:
        flipped = list(row[r:]) + list(row[:r])
        rows.append(flipped)
    basis, _ = linalg.nullspace(alg.sig, rows)
    return [CSection.from_coordinates(alg, vec) for vec in basis]


def closure_report(C: CourantPresentation, gens) -> dict:
    """Bracket-closure check with a residual witness on failure."""
    sig = C.alg.sig
    M = coordinates_matrix(gens)
    witness = None
    closed = True
    excluded: list = []
    for i, g1 in enumerate(gens):
        for j, g2 in enumerate(gens):
            if i == j:
                continue
            b = C.bracket(g1, g2)
            ok, residual, exc = linalg.membership(sig, M, b.coordinates())
            for e in exc:
                if not any(x == e for x in excluded):
                    excluded.append(e)
            if not ok and witness is None:
                closed = False
                witness = {
                    "pair": [i, j],
                    "bracket": b.describe(),
                    "residual": CSection.from_coordinates(C.alg, residual).describe(),
                }
    return {
        "closed": closed,
        "witness": witness,
        "excluded": [str(e) for e in excluded],
    }


def is_dirac(C: CourantPresentation, gens) -> tuple:
    """(verdict, report): maximal isotropy plus bracket closure."""
    lag, report = is_lagrangian(C, gens)
    report = dict(report)
    closure = closure_report(C, gens)
    report.update(
        {
            "lagrangian": lag,
            "involutive": closure["closed"],
            "involutive_witness": closure["witness"],
            "involutive_excluded": closure["excluded"],
        }
    )
    return lag and closure["closed"], report


def graph_two_form(C: CourantPresentation, B: AForm) -> list:
    """Graph generators e_i + i_{e_i} B of a module-valued 2-form."""
    if not B.vvalued or B.degree != 2:
        raise DiracError("graph requires a module-valued 2-form")
    alg = C.alg
    out = []
    for i in range(alg.rank):
        X = Multivector.frame(alg.sig, alg.rank, i)
        out.append(CSection(alg, alg.frame_section(i), contract(X, B)))
    return out


def anchor_intersection(C: CourantPresentation, gens) -> tuple:
    """Generic rank of (span of gens) meet A, with a basis of section parts."""
    alg = C.alg
    r, s = alg.rank, alg.rank_v
    form_cols = [g.coordinates()[r : r + r * s] for g in gens]
    combos, excluded = linalg.nullspace(alg.sig, _transpose(alg.sig, form_cols))
    vectors = []
    for c in combos:
        vec = [alg.sig.zero()] * r
        for k, ck in enumerate(c):
            if ck.is_zero():
                continue
            for m in range(r):
                vec[m] = vec[m] + ck * gens[k].x[m]
        if any(not x.is_zero() for x in vec):
            vectors.append(vec)
    if not vectors:
        return 0, [], [str(e) for e in excluded]
    rk, exc2 = linalg.rank(alg.sig, vectors)
    return rk, vectors, [str(e) for e in excluded + exc2]


def intersect_with_A(C: CourantPresentation, gens) -> int:
    """Generic rank of the intersection with the image of the splitting."""
    rk, _, _ = anchor_intersection(C, gens)
    return rk


def projection_closure(C: CourantPresentation, gens) -> dict:
    """Whether the projected section parts close under the anchor bracket.

    Projections of generator brackets are checked for membership in the span
    of projected generators; the first failure is returned as a witness.
    """
    alg = C.alg
    rows = [list(g.x) for g in gens]
    excluded: set = set()
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            vec = alg.bracket(gens[i].x, gens[j].x)
            ok, residual, exc = linalg.membership(alg.sig, rows, vec)
            excluded |= {str(e) for e in exc}
            if not ok:
                return {
                    "closed": False,
                    "witness": {"pair": [i, j], "residual": [r.to_str() for r in residual]},
                    "excluded": sorted(excluded),
                }
    return {"closed": True, "excluded": sorted(excluded)}


def _transpose(sig, rows):
    if not rows:
        return []
    return [[rows[i][j] for i in range(len(rows))] for j in range(len(rows[0]))]
