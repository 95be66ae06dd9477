"""Finitely presented Lie algebroids with a flat module representation.

A presentation fixes a coefficient ring, a frame e_1..e_r, an anchor matrix
(each frame section maps to a combination of coordinate derivations), frame
structure functions [e_i, e_j] = sum_k c_ij^k e_k, and connection matrices
Theta_i describing the action on a module frame u_1..u_s:

    nabla_{e_i} u_b = sum_c Theta_i[b][c] u_c.

Nothing forces the axioms to hold: `validate` reports Jacobi, anchor-morphism
and curvature defects exactly, so broken presentations are first-class test
subjects rather than constructor errors.
"""

from __future__ import annotations

from .exterior import (
    AForm,
    FForm,
    FScalar,
    Multivector,
    insert_index,
    merge_indices,
)
from .ring import RingElem, RingSignature, coerce_elem
from . import linalg


class AlgebroidError(ValueError):
    pass


class Algebroid:
    __slots__ = ("sig", "rank", "rank_v", "anchor", "structure", "theta")

    def __init__(self, sig: RingSignature, rank: int, rank_v: int, anchor, structure, theta=None):
        if rank < 1 or rank_v < 1:
            raise AlgebroidError("rank and module rank must be positive")
        anchor = [[coerce_elem(sig, x) for x in row] for row in anchor]
        if len(anchor) != rank or any(len(r) != sig.ncoords for r in anchor):
            raise AlgebroidError("anchor must be rank x ncoords")
        table = {}
        for key, coeffs in dict(structure or {}).items():
            i, j = key
            if not (0 <= i < rank and 0 <= j < rank):
                raise AlgebroidError(f"structure key {key} out of range")
            if i >= j:
                raise AlgebroidError("structure table keys must have i < j")
            vec = tuple(coerce_elem(sig, x) for x in coeffs)
            if len(vec) != rank:
                raise AlgebroidError("structure coefficients must have length rank")
            if any(not x.is_zero() for x in vec):
                table[(i, j)] = vec
        if theta is None:
            theta = [
                [[sig.zero()] * rank_v for _ in range(rank_v)] for _ in range(rank)
            ]
        theta = [
            [[coerce_elem(sig, x) for x in row] for row in mat] for mat in theta
        ]
        if len(theta) != rank or any(
            len(m) != rank_v or any(len(r) != rank_v for r in m) for m in theta
        ):
            raise AlgebroidError("theta must be rank matrices of shape rank_v x rank_v")
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "rank_v", rank_v)
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "structure", table)
        object.__setattr__(self, "theta", theta)

    def __setattr__(self, name, value):
        raise AttributeError("Algebroid is immutable")

    # -- basic frame data ------------------------------------------------------

    def zero_section(self) -> list:
        return [self.sig.zero()] * self.rank

    def frame_section(self, i: int) -> list:
        out = self.zero_section()
        out[i] = self.sig.one()
        return out

    def frame_bracket(self, i: int, j: int) -> list:
        if i == j:
            return self.zero_section()
        if i < j:
            vec = self.structure.get((i, j))
            return list(vec) if vec else self.zero_section()
        vec = self.structure.get((j, i))
        return [-x for x in vec] if vec else self.zero_section()

    def theta_scalar(self, i: int) -> RingElem:
        if self.rank_v != 1:
            raise AlgebroidError("scalar connection requires a rank-one module")
        return self.theta[i][0][0]

    # -- anchor and bracket ----------------------------------------------------

    def anchor_vector(self, X) -> list:
        """Coordinate-derivation coefficients of the anchored section."""
        out = [self.sig.zero()] * self.sig.ncoords
        for i, c in enumerate(X):
            if c.is_zero():
                continue
            for j in range(self.sig.ncoords):
                out[j] = out[j] + c * self.anchor[i][j]
        return out

    def apply_anchor(self, X, f: RingElem) -> RingElem:
        out = self.sig.zero()
        for j, v in enumerate(self.anchor_vector(X)):
            if not v.is_zero():
                out = out + v * f.partial(self.sig.coords[j])
        return out

    def apply_frame_anchor(self, i: int, f: RingElem) -> RingElem:
        out = self.sig.zero()
        for j in range(self.sig.ncoords):
            v = self.anchor[i][j]
            if not v.is_zero():
                out = out + v * f.partial(self.sig.coords[j])
        return out

    def bracket(self, X, Y) -> list:
        """Section bracket with the anchor-Leibniz terms."""
        X = [coerce_elem(self.sig, x) for x in X]
        Y = [coerce_elem(self.sig, y) for y in Y]
        out = self.zero_section()
        for k in range(self.rank):
            acc = self.apply_anchor(X, Y[k]) - self.apply_anchor(Y, X[k])
            out[k] = acc
        for i, xi in enumerate(X):
            if xi.is_zero():
                continue
            for j, yj in enumerate(Y):
                if yj.is_zero() or i == j:
                    continue
                for k, c in enumerate(self.frame_bracket(i, j)):
                    if not c.is_zero():
                        out[k] = out[k] + xi * yj * c
        return out

    def nabla(self, X, v) -> list:
        """Module connection along a section: nabla_X of a width-rank_v vector."""
        X = [coerce_elem(self.sig, x) for x in X]
        v = [coerce_elem(self.sig, w) for w in v]
        out = [self.apply_anchor(X, vb) for vb in v]
        for i, xi in enumerate(X):
            if xi.is_zero():
                continue
            for b in range(self.rank_v):
                if v[b].is_zero():
                    continue
                for c in range(self.rank_v):
                    t = self.theta[i][b][c]
                    if not t.is_zero():
                        out[c] = out[c] + xi * v[b] * t
        return out

    # -- differential and Lie derivative ----------------------------------------

    def zero_form(self, degree: int, vvalued: bool = True) -> AForm:
        return AForm.zero(self.sig, self.rank, self.rank_v, vvalued, degree)

    def form(self, degree: int, terms, vvalued: bool = True) -> AForm:
        fixed = {}
        for I, vec in terms.items():
            if vvalued and not isinstance(vec, (tuple, list)):
                vec = (vec,)
            if not vvalued and not isinstance(vec, (tuple, list)):
                vec = (vec,)
            fixed[tuple(I)] = tuple(vec)
        return AForm(self.sig, self.rank, self.rank_v, vvalued, degree, fixed)

    def v_vector(self, coeffs) -> list:
        if isinstance(coeffs, (tuple, list)):
            out = [coerce_elem(self.sig, c) for c in coeffs]
        else:
            out = [coerce_elem(self.sig, coeffs)]
        if len(out) != self.rank_v:
            raise AlgebroidError("module vector has the wrong width")
        return out

    def d(self, w: AForm) -> AForm:
        """Koszul differential; connection term only for module-valued forms."""
        if w.sig != self.sig or w.rank != self.rank:
            raise AlgebroidError("form does not live on this algebroid")
        width = w.width
        out: dict = {}
        zero_vec = (self.sig.zero(),) * width

        def add(I, vec):
            cur = out.get(I, zero_vec)
            out[I] = tuple(a + b for a, b in zip(cur, vec))

        for I, vec in w.terms.items():
            for i in range(self.rank):
                hit = insert_index(i, I)
                if hit is None:
                    continue
                K, s = hit
                contrib = [self.apply_frame_anchor(i, x) for x in vec]
                if w.vvalued:
                    conn = [self.sig.zero()] * width
                    for b in range(width):
                        if vec[b].is_zero():
                            continue
                        for c in range(width):
                            t = self.theta[i][b][c]
                            if not t.is_zero():
                                conn[c] = conn[c] + vec[b] * t
                    contrib = [a + b for a, b in zip(contrib, conn)]
                if any(not x.is_zero() for x in contrib):
                    add(K, tuple(x if s > 0 else -x for x in contrib))
            for pos in range(len(I)):
                k = I[pos]
                rest = I[:pos] + I[pos + 1 :]
                for (p, q), svec in self.structure.items():
                    c = svec[k]
                    if c.is_zero():
                        continue
                    hit = merge_indices((p, q), rest)
                    if hit is None:
                        continue
                    K, s = hit
                    sign = s if pos % 2 == 0 else -s
                    coeff = -c if sign > 0 else c
                    add(K, tuple(x * coeff for x in vec))
        return AForm(self.sig, self.rank, self.rank_v, w.vvalued, w.degree + 1, out)

    def d_v(self, coeffs) -> AForm:
        """Differential of a module-valued function given as a width vector."""
        v = self.v_vector(coeffs)
        return self.d(
            AForm(self.sig, self.rank, self.rank_v, True, 0, {(): tuple(v)})
        )

    def d_graded(self, w: FForm) -> FForm:
        """Differential on graded forms; grade k feels k copies of the connection."""
        if self.rank_v != 1:
            raise AlgebroidError("graded calculus requires a rank-one module")
        out: dict = {}

        def add(I, c):
            cur = out.get(I, FScalar.zero(self.sig))
            s = cur + c
            if s:
                out[I] = s
            elif I in out:
                del out[I]

        for I, coeff in w.terms.items():
            for i in range(self.rank):
                hit = insert_index(i, I)
                if hit is None:
                    continue
                K, s = hit
                th = self.theta_scalar(i)
                parts = {}
                for g, elem in coeff.parts.items():
                    e = self.apply_frame_anchor(i, elem)
                    if not th.is_zero() and g:
                        e = e + elem * th * g
                    if not e.is_zero():
                        parts[g] = e
                if parts:
                    c = FScalar(self.sig, parts)
                    add(K, c if s > 0 else -c)
            for pos in range(len(I)):
                k = I[pos]
                rest = I[:pos] + I[pos + 1 :]
                for (p, q), svec in self.structure.items():
                    c = svec[k]
                    if c.is_zero():
                        continue
                    hit = merge_indices((p, q), rest)
                    if hit is None:
                        continue
                    K, s = hit
                    sign = s if pos % 2 == 0 else -s
                    add(K, coeff * (-c if sign > 0 else c))
        return FForm(self.sig, self.rank, w.degree + 1, out)

    def lie(self, X, w: AForm) -> AForm:
        """Lie derivative along a section, built directly from the presentation.

        Independent of `d`, so the Cartan relation [d, iota_X] = L_X is a real
        consistency check rather than a definition.
        """
        X = [coerce_elem(self.sig, x) for x in X]
        width = w.width
        out: dict = {}
        zero_vec = (self.sig.zero(),) * width

        def add(I, vec):
            cur = out.get(I, zero_vec)
            out[I] = tuple(a + b for a, b in zip(cur, vec))

        # L_X f^k = sum_j (a(e_j) X_k - sum_i X_i c_ij^k) f^j
        cov = [[self.sig.zero()] * self.rank for _ in range(self.rank)]
        for k in range(self.rank):
            for j in range(self.rank):
                acc = self.apply_frame_anchor(j, X[k])
                for i, xi in enumerate(X):
                    if xi.is_zero() or i == j:
                        continue
                    c = self.frame_bracket(i, j)[k]
                    if not c.is_zero():
                        acc = acc - xi * c
                cov[k][j] = acc
        for I, vec in w.terms.items():
            fn = [self.apply_anchor(X, x) for x in vec]
            if w.vvalued:
                for b in range(width):
                    if vec[b].is_zero():
                        continue
                    for c in range(width):
                        t = sum(
                            (
                                X[i] * self.theta[i][b][c]
                                for i in range(self.rank)
                                if not X[i].is_zero()
                            ),
                            self.sig.zero(),
                        )
                        if not t.is_zero():
                            fn[c] = fn[c] + vec[b] * t
            if any(not x.is_zero() for x in fn):
                add(I, tuple(fn))
            for pos in range(len(I)):
                k = I[pos]
                rest = I[:pos] + I[pos + 1 :]
                for j in range(self.rank):
                    g = cov[k][j]
                    if g.is_zero():
                        continue
                    hit = insert_index(j, rest)
                    if hit is None:
                        continue
                    K, s = hit
                    sign = s if pos % 2 == 0 else -s
                    coeff = g if sign > 0 else -g
                    add(K, tuple(x * coeff for x in vec))
        return AForm(self.sig, self.rank, self.rank_v, w.vvalued, w.degree, out)

    # -- validation -------------------------------------------------------------

    def jacobi_defect(self, i: int, j: int, k: int) -> list:
        ei, ej, ek = (self.frame_section(t) for t in (i, j, k))
        t1 = self.bracket(ei, self.bracket(ej, ek))
        t2 = self.bracket(ej, self.bracket(ek, ei))
        t3 = self.bracket(ek, self.bracket(ei, ej))
        return [a + b + c for a, b, c in zip(t1, t2, t3)]

    def anchor_defect(self, i: int, j: int) -> list:
        """[a(e_i), a(e_j)] - a([e_i, e_j]) as a coordinate-derivation vector."""
        ai, aj = self.anchor[i], self.anchor[j]
        out = []
        for m in range(self.sig.ncoords):
            acc = self.sig.zero()
            for t in range(self.sig.ncoords):
                xt = self.sig.coords[t]
                acc = acc + ai[t] * aj[m].partial(xt) - aj[t] * ai[m].partial(xt)
            out.append(acc)
        br = self.anchor_vector(self.frame_bracket(i, j))
        return [a - b for a, b in zip(out, br)]

    def curvature(self, i: int, j: int) -> list:
        """R(e_i, e_j) on the module frame, as a rank_v x rank_v matrix."""
        s = self.sig
        ti, tj = self.theta[i], self.theta[j]
        out = [[s.zero()] * self.rank_v for _ in range(self.rank_v)]
        for b in range(self.rank_v):
            for c in range(self.rank_v):
                acc = self.apply_frame_anchor(i, tj[b][c]) - self.apply_frame_anchor(
                    j, ti[b][c]
                )
                for m in range(self.rank_v):
                    acc = acc + tj[b][m] * ti[m][c] - ti[b][m] * tj[m][c]
                for k, ck in enumerate(self.frame_bracket(i, j)):
                    if not ck.is_zero():
                        acc = acc - ck * self.theta[k][b][c]
                out[b][c] = acc
        return out

    def validate(self) -> dict:
        """Exact defect report for Jacobi, anchor morphism and flatness."""
        jac = []
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                for k in range(j + 1, self.rank):
                    defect = self.jacobi_defect(i, j, k)
                    if any(not x.is_zero() for x in defect):
                        jac.append(((i, j, k), [str(x) for x in defect]))
        anc = []
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                defect = self.anchor_defect(i, j)
                if any(not x.is_zero() for x in defect):
                    anc.append(((i, j), [str(x) for x in defect]))
        curv = []
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                mat = self.curvature(i, j)
                if any(not x.is_zero() for row in mat for x in row):
                    curv.append(((i, j), [[str(x) for x in row] for row in mat]))
        return {
            "jacobi_ok": not jac,
            "anchor_ok": not anc,
            "flat_ok": not curv,
            "jacobi_defects": jac,
            "anchor_defects": anc,
            "curvature_defects": curv,
        }

    def is_valid(self) -> bool:
        rep = self.validate()
        return rep["jacobi_ok"] and rep["anchor_ok"] and rep["flat_ok"]

    # -- frame changes ------------------------------------------------------------

    def change_frame(self, M) -> "Algebroid":
        """Presentation in the frame e'_i = sum_j M[i][j] e_j (M invertible)."""
        s = self.sig
        M = linalg.coerce_matrix(s, M)
        Minv = linalg.invert(s, M)
        anchor = linalg.mat_mul(s, M, self.anchor) if s.ncoords else [[] for _ in range(self.rank)]
        structure = {}
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                br = self.bracket(M[i], M[j])
                # re-express in the primed frame: coefficients br . Minv
                coeffs = [
                    sum((br[a] * Minv[a][k] for a in range(self.rank)), s.zero())
                    for k in range(self.rank)
                ]
                structure[(i, j)] = coeffs
        theta = []
        for i in range(self.rank):
            mat = [[s.zero()] * self.rank_v for _ in range(self.rank_v)]
            for j in range(self.rank):
                c = M[i][j]
                if c.is_zero():
                    continue
                for b in range(self.rank_v):
                    for d2 in range(self.rank_v):
                        t = self.theta[j][b][d2]
                        if not t.is_zero():
                            mat[b][d2] = mat[b][d2] + c * t
            theta.append(mat)
        return Algebroid(s, self.rank, self.rank_v, anchor, structure, theta)

    # -- cohomology over a point ---------------------------------------------------

    def _point_basis(self, degree: int) -> list:
        from itertools import combinations

        return [
            (I, b)
            for I in combinations(range(self.rank), degree)
            for b in range(self.rank_v)
        ]

    def ce_cohomology(self) -> list:
        """Betti numbers of the module-valued complex over a point."""
        if self.sig.ncoords or self.sig.nexps:
            raise AlgebroidError("cohomology requires a presentation over a point")
        dims = []
        ranks = []
        for deg in range(self.rank + 1):
            basis = self._point_basis(deg)
            dims.append(len(basis))
            target = {pair: idx for idx, pair in enumerate(self._point_basis(deg + 1))}
            rows = [[self.sig.zero()] * len(basis) for _ in target] if target else []
            for col, (I, b) in enumerate(basis):
                vec = [self.sig.zero()] * self.rank_v
                vec[b] = self.sig.one()
                dw = self.d(AForm(self.sig, self.rank, self.rank_v, True, deg, {I: tuple(vec)}))
                for J, w in dw.terms.items():
                    for c in range(self.rank_v):
                        if not w[c].is_zero():
                            rows[target[(J, c)]][col] = w[c]
            if rows:
                r, _ = linalg.rank(self.sig, rows)
            else:
                r = 0
            ranks.append(r)
        out = []
        for deg in range(self.rank + 1):
            below = ranks[deg - 1] if deg else 0
            out.append(dims[deg] - ranks[deg] - below)
        return out

    # -- parallel sections ----------------------------------------------------------

    def parallel_sections(self, max_degree: int = 2) -> list:
        """Module sections with vanishing differential, polynomial up to a bound.

        The differential can raise polynomial degree, so the cut-off is applied
        to the unknowns only; every output is exactly parallel.
        """
        from itertools import product as iproduct

        s = self.sig
        monos = [
            deg
            for deg in iproduct(range(max_degree + 1), repeat=s.ncoords)
            if sum(deg) <= max_degree
        ]
        monos.sort()
        unknowns = [(m, b) for m in monos for b in range(self.rank_v)]
        eq_index: dict = {}
        rows: list = []

        def eq_row(key):
            if key not in eq_index:
                eq_index[key] = len(rows)
                rows.append([s.zero()] * len(unknowns))
            return rows[eq_index[key]]

        for col, (m, b) in enumerate(unknowns):
            vec = [s.zero()] * self.rank_v
            vec[b] = RingElem(s, {(tuple(m), (0,) * s.nexps): 1})
            dv = self.d_v(vec)
            for (i,), w in dv.terms.items():
                for c in range(self.rank_v):
                    e = w[c]
                    if e.is_zero():
                        continue
                    for key, coeff in e.terms.items():
                        row = eq_row(((i, c), key))
                        row[col] = row[col] + RingElem(s, {((0,) * s.ncoords, (0,) * s.nexps): coeff})
        if not rows:
            sols = [
                [s.one() if t == col else s.zero() for t in range(len(unknowns))]
                for col in range(len(unknowns))
            ]
        else:
            sols, _ = linalg.nullspace(s, rows)
        out = []
        for sol in sols:
            vec = [s.zero()] * self.rank_v
            for col, (m, b) in enumerate(unknowns):
                c = sol[col]
                if not c.is_zero():
                    vec[b] = vec[b] + c * RingElem(s, {(tuple(m), (0,) * s.nexps): 1})
            out.append(vec)
        return out

    # -- conversions -----------------------------------------------------------------

    def section_multivector(self, X) -> Multivector:
        return Multivector.section(self.sig, self.rank, X)

    def describe(self) -> dict:
        return {
            "rank": self.rank,
            "rank_v": self.rank_v,
            "coords": list(self.sig.coords),
            "exps": [g.name for g in self.sig.exps],
            "anchor": [[str(x) for x in row] for row in self.anchor],
            "structure": {
                f"{i + 1},{j + 1}": [str(x) for x in vec]
                for (i, j), vec in sorted(self.structure.items())
            },
            "theta": [
                [[str(x) for x in row] for row in mat] for mat in self.theta
            ],
        }
