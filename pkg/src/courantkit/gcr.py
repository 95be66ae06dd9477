"""Orthogonal complex structures on the reduced pairing bundle.

A distribution inside the base algebroid is presented by an adapted frame:
an invertible matrix of sections whose first h rows span the distribution.
The reduced bundle then has the basis (X_1..X_h, u (x) D^1..u (x) D^h), where
the D^a are the dual rows of the adapted frame, and the pairing restricts to
the split form on that basis.  An endomorphism J of the reduced bundle is
admissible when J^2 = -1 and J preserves the pairing; its +i eigenspace,
lifted back and padded with the annihilator covectors, is a complex
subbundle handed to the Dirac checker, so "valid" means exactly "the lifted
eigenspace is involutive and Lagrangian".

The bivector attached to an admissible J pairs two module covectors through
J and lives one grade down; on the contact fixtures its pieces recover the
Jacobi pair after splitting off the suspension direction.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct

from . import linalg
from .algebroid import Algebroid
from .courant import CourantPresentation, CSection
from .dirac import coordinates_matrix, is_dirac
from .exterior import AForm, FForm, FScalar, Multivector, contract, wedge
from .linalg import LinalgError
from .ring import GR_I, RingElem, coerce_elem
from .schouten import tilde


class GCRError(ValueError):
    pass


class Distribution:
    """A subbundle of the base algebroid, presented by an adapted frame."""

    __slots__ = ("alg", "frame", "h", "inverse")

    def __init__(self, alg: Algebroid, frame, h: int):
        self.alg = alg
        rows = linalg.coerce_matrix(alg.sig, frame)
        if len(rows) != alg.rank or any(len(r) != alg.rank for r in rows):
            raise GCRError("adapted frame must be square of the algebroid rank")
        if not 0 < h <= alg.rank:
            raise GCRError("distribution rank out of range")
        self.frame = tuple(tuple(r) for r in rows)
        self.h = h
        try:
            self.inverse = tuple(
                tuple(r) for r in linalg.invert(alg.sig, rows)
            )
        except LinalgError as exc:
            raise GCRError(f"adapted frame is not invertible over the ring: {exc}")

    def h_rows(self) -> list:
        return [list(self.frame[a]) for a in range(self.h)]

    def dual_row(self, a: int) -> list:
        """Covector row with dual_row(a) . frame(b) = delta_ab."""
        return [self.inverse[k][a] for k in range(self.alg.rank)]

    def ann_rows(self) -> list:
        """Covectors annihilating the distribution: the trailing dual rows."""
        return [self.dual_row(a) for a in range(self.h, self.alg.rank)]

    def vector_section(self, a: int) -> list:
        return list(self.frame[a])


def full_distribution(alg: Algebroid) -> Distribution:
    s = alg.sig
    eye = [
        [s.one() if i == j else s.zero() for j in range(alg.rank)]
        for i in range(alg.rank)
    ]
    return Distribution(alg, eye, alg.rank)


class HBundle:
    """Reduced bundle of a distribution: lifts of H plus the dual covectors."""

    __slots__ = ("C", "dist")

    def __init__(self, C: CourantPresentation, dist: Distribution):
        if C.alg.rank_v != 1:
            raise GCRError("reduction needs a rank-one module")
        if dist.alg is not C.alg:
            raise GCRError("distribution lives over a different presentation")
        self.C = C
        self.dist = dist

    @property
    def h(self) -> int:
        return self.dist.h

    def basis_sections(self) -> list:
        """2h sections: lifted distribution frame, then dual covectors."""
        alg = self.C.alg
        zero = [alg.sig.zero()] * alg.rank
        out = [CSection(alg, self.dist.vector_section(a)) for a in range(self.h)]
        for a in range(self.h):
            row = self.dist.dual_row(a)
            terms = {(k,): (row[k],) for k in range(alg.rank) if not row[k].is_zero()}
            out.append(CSection(alg, zero, AForm(alg.sig, alg.rank, 1, True, 1, terms)))
        return out

    def lift(self, coords) -> CSection:
        """Section of the ambient bundle from 2h reduced coordinates."""
        alg = self.C.alg
        coords = [coerce_elem(alg.sig, c) for c in coords]
        if len(coords) != 2 * self.h:
            raise GCRError("expected 2h reduced coordinates")
        x = [alg.sig.zero()] * alg.rank
        xi = [alg.sig.zero()] * alg.rank
        for a in range(self.h):
            if not coords[a].is_zero():
                for k, v in enumerate(self.dist.vector_section(a)):
                    x[k] = x[k] + coords[a] * v
            c = coords[self.h + a]
            if not c.is_zero():
                for k, v in enumerate(self.dist.dual_row(a)):
                    xi[k] = xi[k] + c * v
        terms = {(k,): (v,) for k, v in enumerate(xi) if not v.is_zero()}
        return CSection(self.C.alg, x, AForm(alg.sig, alg.rank, 1, True, 1, terms))

    def pairing_matrix(self) -> list:
        basis = self.basis_sections()
        return [[self.C.pairing(a, b)[0] for b in basis] for a in basis]


def build_H_bundle(C: CourantPresentation, dist: Distribution) -> HBundle:
    hb = HBundle(C, dist)
    gram = hb.pairing_matrix()
    try:
        det = linalg.determinant(C.alg.sig, gram)
    except LinalgError as exc:
        raise GCRError(f"restricted pairing is not computable: {exc}")
    if det.is_zero():
        raise GCRError("pairing degenerates on the reduced bundle")
    return hb


class GCRStructure:
    """Candidate orthogonal complex structure on the reduced bundle."""

    __slots__ = ("hb", "j")

    def __init__(self, hb: HBundle, j):
        self.hb = hb
        rows = linalg.coerce_matrix(hb.C.alg.sig, j)
        n = 2 * hb.h
        if len(rows) != n or any(len(r) != n for r in rows):
            raise GCRError("endomorphism matrix must be 2h x 2h")
        self.j = tuple(tuple(r) for r in rows)


def j_square_defect(S: GCRStructure):
    """First nonzero entry of J^2 + 1, or None."""
    sig = S.hb.C.alg.sig
    n = 2 * S.hb.h
    for i in range(n):
        for j in range(n):
            acc = sig.one() if i == j else sig.zero()
            for k in range(n):
                acc = acc + S.j[i][k] * S.j[k][j]
            if not acc.is_zero():
                return ((i, j), acc)
    return None


def orthogonality_defect(S: GCRStructure):
    """First nonzero entry of J^T G J - G over the reduced pairing G."""
    sig = S.hb.C.alg.sig
    n = 2 * S.hb.h
    G = S.hb.pairing_matrix()
    for i in range(n):
        for j in range(n):
            acc = -G[i][j]
            for p in range(n):
                for q in range(n):
                    if G[p][q].is_zero():
                        continue
                    acc = acc + S.j[p][i] * G[p][q] * S.j[q][j]
            if not acc.is_zero():
                return ((i, j), acc)
    return None


def l_generators(S: GCRStructure) -> list:
    """The +i eigenspace, lifted, plus the annihilator covectors."""
    alg = S.hb.C.alg
    sig = alg.sig
    if sig.mode != "gaussian":
        raise GCRError("eigenspace construction needs gaussian coefficients")
    n = 2 * S.hb.h
    ii = coerce_elem(sig, GR_I)
    rows = [
        [S.j[a][b] - (ii if a == b else sig.zero()) for b in range(n)]
        for a in range(n)
    ]
    basis, _ = linalg.nullspace(sig, rows)
    gens = [S.hb.lift(vec) for vec in basis]
    zero = [sig.zero()] * alg.rank
    for row in S.hb.dist.ann_rows():
        terms = {(k,): (v,) for k, v in enumerate(row) if not v.is_zero()}
        gens.append(CSection(alg, zero, AForm(sig, alg.rank, 1, True, 1, terms)))
    return gens


def validate_gcr(S: GCRStructure) -> dict:
    """Full verdict: algebraic conditions, then the lifted-eigenspace checks."""
    report: dict = {"ok": False}
    sq = j_square_defect(S)
    report["j_square_ok"] = sq is None
    if sq is not None:
        report["j_square_witness"] = {"entry": list(sq[0]), "value": str(sq[1])}
    orth = orthogonality_defect(S)
    report["orthogonal_ok"] = orth is None
    if orth is not None:
        report["orthogonal_witness"] = {"entry": list(orth[0]), "value": str(orth[1])}
    if sq is not None or orth is not None:
        report["dirac_skipped"] = True
        return report
    gens = l_generators(S)
    dirac_ok, dirac_report = is_dirac(S.hb.C, gens)
    report["lagrangian_ok"] = dirac_report["lagrangian"]
    report["involutive_ok"] = dirac_report["involutive"]
    report["dirac_report"] = dirac_report
    alg = S.hb.C.alg
    stacked = coordinates_matrix(gens) + coordinates_matrix(
        [g.conjugate() for g in gens]
    )
    r, excluded = linalg.rank(alg.sig, stacked)
    report["conjugate_span_rank"] = r
    report["intersection_ok"] = r == alg.rank + S.hb.h
    report["excluded"] = sorted(
        set(dirac_report.get("excluded", [])) | {str(e) for e in excluded}
    )
    report["ok"] = bool(dirac_ok and report["intersection_ok"])
    return report


def extract_bivector(S: GCRStructure) -> Multivector:
    """Grade -1 bivector pairing module covectors through the endomorphism."""
    alg = S.hb.C.alg
    sig = alg.sig
    h, r = S.hb.h, alg.rank
    M = S.hb.dist.h_rows()
    full = [[sig.zero()] * r for _ in range(r)]
    for m in range(r):
        for mp in range(r):
            acc = sig.zero()
            for a in range(h):
                if M[a][mp].is_zero():
                    continue
                for b in range(h):
                    if S.j[a][h + b].is_zero() or M[b][m].is_zero():
                        continue
                    acc = acc + S.j[a][h + b] * M[b][m] * M[a][mp]
            full[m][mp] = acc
    for m in range(r):
        for mp in range(m, r):
            if not (full[m][mp] + full[mp][m]).is_zero():
                raise GCRError("bivector extraction needs an orthogonal J with J^2=-1")
    terms = {}
    for m in range(r):
        for mp in range(m + 1, r):
            if not full[m][mp].is_zero():
                terms[(m, mp)] = FScalar(sig, {-1: full[m][mp]})
    return Multivector(sig, r, 2, terms)


def cr_to_gcr(C: CourantPresentation, dist: Distribution, jh) -> GCRStructure:
    """Block structure J (+) -J* from an almost complex structure on the distribution."""
    sig = C.alg.sig
    h = dist.h
    rows = linalg.coerce_matrix(sig, jh)
    if len(rows) != h or any(len(r) != h for r in rows):
        raise GCRError("complex structure matrix must be h x h")
    for i in range(h):
        for j in range(h):
            acc = sig.one() if i == j else sig.zero()
            for k in range(h):
                acc = acc + rows[i][k] * rows[k][j]
            if not acc.is_zero():
                raise GCRError("matrix does not square to minus the identity")
    z = sig.zero()
    big = [[z] * (2 * h) for _ in range(2 * h)]
    for i in range(h):
        for j in range(h):
            big[i][j] = rows[i][j]
            big[h + i][h + j] = -rows[j][i]
    return GCRStructure(build_H_bundle(C, dist), big)


def symplectic_gcr(C: CourantPresentation, omega: AForm) -> GCRStructure:
    """Structure of symplectic type on the full frame, from a nondegenerate 2-form."""
    alg = C.alg
    sig = alg.sig
    if omega.degree != 2 or not omega.vvalued or alg.rank_v != 1:
        raise GCRError("expected a module-valued 2-form over a rank-one module")
    r = alg.rank
    B = [[sig.zero()] * r for _ in range(r)]
    for b in range(r):
        cb = contract(Multivector.frame(sig, r, b), omega)
        for (a,), vec in cb.terms.items():
            B[a][b] = vec[0]
    try:
        Binv = linalg.invert(sig, B)
    except LinalgError as exc:
        raise GCRError(f"two-form is degenerate over the ring: {exc}")
    z = sig.zero()
    big = [[z] * (2 * r) for _ in range(2 * r)]
    for i in range(r):
        for j in range(r):
            big[i][r + j] = -Binv[i][j]
            big[r + i][j] = B[i][j]
    return GCRStructure(build_H_bundle(C, full_distribution(alg)), big)


# -- splitting off a suspension direction --------------------------------------


def tangent_restriction(alg: Algebroid) -> Algebroid:
    """Drop the final frame direction and the module action; tangent-type result.

    Only meaningful when the final direction is central for the anchor: its
    anchor row must vanish, so that dropping it leaves a genuine quotient.
    """
    s = alg.sig
    n = alg.rank - 1
    if n < 1:
        raise GCRError("nothing left after dropping the suspension direction")
    if any(not x.is_zero() for x in alg.anchor[n]):
        raise GCRError("final frame direction is not anchor-central")
    structure = {}
    for (i, j), vec in alg.structure.items():
        if max(i, j) >= n:
            if any(not x.is_zero() for x in vec):
                raise GCRError("suspension direction does not split off")
            continue
        if not vec[n].is_zero():
            raise GCRError("suspension direction does not split off")
        structure[(i, j)] = vec[:n]
    anchor = [list(alg.anchor[i]) for i in range(n)]
    theta = [[[s.zero()]] for _ in range(n)]
    return Algebroid(s, n, 1, anchor, structure, theta)


def decompose_jacobi(alg: Algebroid, P: Multivector) -> dict:
    """Split a grade -1 bivector as (plane part) + (suspension ^ vector)."""
    if P.degree != 2:
        raise GCRError("expected a bivector")
    n = alg.rank - 1
    tangent = tangent_restriction(alg)
    lam_terms = {}
    e_terms = {}
    for I, w in P.terms.items():
        if w.is_zero():
            continue
        if w.pure_grade() != -1:
            raise GCRError("expected a pure grade -1 bivector")
        c = w.parts[-1]
        if I[1] < n:
            lam_terms[I] = FScalar.of(c)
        elif I[0] < n:
            a = I[0]
            prev = e_terms.get((a,))
            val = FScalar.of(-c) if prev is None else prev + FScalar.of(-c)
            e_terms[(a,)] = val
        else:
            raise GCRError("repeated suspension index")
    return {
        "tangent": tangent,
        "lambda": Multivector(alg.sig, n, 2, lam_terms),
        "e": Multivector(alg.sig, n, 1, e_terms),
    }


def compose_jacobi(alg: Algebroid, lam: Multivector, e: Multivector) -> Multivector:
    """Inverse of the split: grade -1 bivector (lam + suspension ^ e) over alg."""
    n = alg.rank - 1
    terms = {}
    for I, w in lam.terms.items():
        g = w.grade_zero_elem()
        terms[I] = FScalar(alg.sig, {-1: g})
    for (a,), w in e.terms.items():
        g = w.grade_zero_elem()
        key = (a, n)
        prev = terms.get(key, FScalar.zero(alg.sig))
        terms[key] = prev + FScalar(alg.sig, {-1: -g})
    return Multivector(alg.sig, alg.rank, 2, terms)


# -- parallel trivializations ---------------------------------------------------


def parallel_trivializations(alg: Algebroid, P: Multivector, max_degree: int = 2) -> list:
    """Module sections killed by the bivector: solve tilde(P, d(g u)) = 0.

    Nonempty up to constants exactly when the bracket on module sections is
    of honest Poisson type; contact-type structures admit none.
    """
    s = alg.sig
    monos = [
        deg
        for deg in iproduct(range(max_degree + 1), repeat=s.ncoords)
        if sum(deg) <= max_degree
    ]
    monos.sort()
    eq_index: dict = {}
    rows: list = []

    def eq_row(key):
        if key not in eq_index:
            eq_index[key] = len(rows)
            rows.append([s.zero()] * len(monos))
        return rows[eq_index[key]]

    zero_c = (0,) * s.ncoords
    zero_e = (0,) * s.nexps
    for col, m in enumerate(monos):
        g = RingElem(s, {(tuple(m), zero_e): 1})
        dv = alg.d_graded(FForm(s, alg.rank, 0, {(): FScalar(s, {1: g})}))
        val = tilde(P, dv)
        for I, w in val.terms.items():
            for grade, elem in w.parts.items():
                for key, coeff in elem.terms.items():
                    row = eq_row((I, grade, key))
                    row[col] = row[col] + RingElem(s, {(zero_c, zero_e): coeff})
    if not rows:
        sols = [
            [s.one() if t == col else s.zero() for t in range(len(monos))]
            for col in range(len(monos))
        ]
    else:
        sols, _ = linalg.nullspace(s, rows)
    out = []
    for sol in sols:
        g = s.zero()
        for col, m in enumerate(monos):
            if not sol[col].is_zero():
                g = g + sol[col] * RingElem(s, {(tuple(m), zero_e): 1})
        out.append(g)
    return out
