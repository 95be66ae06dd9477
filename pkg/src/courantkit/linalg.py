"""Fraction-free linear algebra over the coefficient ring.

Matrices hold exact ring elements; elimination uses cross-multiplication so no
step ever leaves the ring.  Row operations divide out rational content and
common coordinate monomials, which is legitimate over the fraction field: the
verdicts (rank, span membership, nullspace) are *generic*, valid off the
vanishing locus of the recorded pivots and stripped factors.  The `excluded`
list returned alongside each verdict names those factors.
"""

from __future__ import annotations

from fractions import Fraction

from .ring import GaussRat, RingElem, RingSignature, coerce_elem


class LinalgError(ValueError):
    pass


def coerce_matrix(sig: RingSignature, rows) -> list:
    out = [[coerce_elem(sig, x) for x in row] for row in rows]
    if out and any(len(r) != len(out[0]) for r in out):
        raise LinalgError("ragged matrix")
    return out


def identity(sig: RingSignature, n: int) -> list:
    return [
        [sig.one() if i == j else sig.zero() for j in range(n)] for i in range(n)
    ]


def mat_mul(sig: RingSignature, A, B) -> list:
    if A and B and len(A[0]) != len(B):
        raise LinalgError("shape mismatch in product")
    return [
        [
            sum((A[i][k] * B[k][j] for k in range(len(B))), sig.zero())
            for j in range(len(B[0]) if B else 0)
        ]
        for i in range(len(A))
    ]


def mat_vec(sig: RingSignature, A, v) -> list:
    return [sum((A[i][k] * v[k] for k in range(len(v))), sig.zero()) for i in range(len(A))]


def _strip_row(sig: RingSignature, row):
    """Divide a row by its rational content and common monomial.

    Returns (row, monomial_factor_or_None); only coordinate monomials can
    vanish, so only those are worth excluding.
    """
    live = [e for e in row if not e.is_zero()]
    if not live:
        return row, None
    gcds = [e.monomial_gcd() for e in live]
    common = tuple(
        (
            tuple(min(g[0][k] for g in gcds) for k in range(len(gcds[0][0]))),
            tuple(min(g[1][k] for g in gcds) for k in range(len(gcds[0][1]))),
        )
    )
    cdeg, edeg = common
    content = None
    for e in live:
        c = e.rational_content()
        content = c if content is None else _frac_gcd(content, c)
    changed = any(cdeg) or any(edeg) or content != Fraction(1)
    if not changed:
        return row, None
    inv = Fraction(1) / content
    out = []
    for e in row:
        if e.is_zero():
            out.append(e)
        else:
            out.append(e.shift_monomial((cdeg, edeg), negate=True) * inv)
    witness = None
    if any(cdeg):
        witness = RingElem(
            sig, {(cdeg, (0,) * sig.nexps): GaussRat.coerce(1)}
        )
    return out, witness


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    from math import gcd

    num = gcd(a.numerator, b.numerator)
    den = (a.denominator * b.denominator) // gcd(a.denominator, b.denominator)
    return Fraction(num, den)


class Echelon:
    """Result of a fraction-free Gauss-Jordan pass."""

    __slots__ = ("sig", "rows", "pivots", "excluded")

    def __init__(self, sig, rows, pivots, excluded):
        self.sig = sig
        self.rows = rows
        self.pivots = pivots  # list of (row, col)
        self.excluded = excluded

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def excluded_strs(self) -> list:
        return sorted({str(e) for e in self.excluded})


def _note_excluded(excluded, elem: RingElem):
    if elem.is_constant():
        return
    if any(e == elem for e in excluded):
        return
    excluded.append(elem)


def rref(sig: RingSignature, M) -> Echelon:
    """Fraction-free reduced echelon form over the fraction field."""
    rows = [list(r) for r in coerce_matrix(sig, M)]
    excluded: list = []
    for i in range(len(rows)):
        rows[i], w = _strip_row(sig, rows[i])
        if w is not None:
            _note_excluded(excluded, w)
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    prow = 0
    for col in range(ncols):
        if prow >= nrows:
            break
        # sparsest nonzero pivot keeps intermediate swell down
        best = None
        for r in range(prow, nrows):
            e = rows[r][col]
            if e.is_zero():
                continue
            size = len(e.terms)
            if best is None or size < best[0]:
                best = (size, r)
        if best is None:
            continue
        r = best[1]
        rows[prow], rows[r] = rows[r], rows[prow]
        p = rows[prow][col]
        _note_excluded(excluded, p)
        for r2 in range(nrows):
            if r2 == prow or rows[r2][col].is_zero():
                continue
            c = rows[r2][col]
            rows[r2] = [p * a - c * b for a, b in zip(rows[r2], rows[prow])]
            rows[r2], w = _strip_row(sig, rows[r2])
            if w is not None:
                _note_excluded(excluded, w)
        pivots.append((prow, col))
        prow += 1
    return Echelon(sig, rows, pivots, excluded)


def rank(sig: RingSignature, M) -> tuple:
    ech = rref(sig, M)
    return ech.rank, ech.excluded


def nullspace(sig: RingSignature, M) -> tuple:
    """Denominator-cleared basis of the right nullspace."""
    M = coerce_matrix(sig, M)
    if not M:
        return [], []
    ncols = len(M[0])
    ech = rref(sig, M)
    pivot_cols = {c for _, c in ech.pivots}
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    prod = sig.one()
    for r, c in ech.pivots:
        prod = prod * ech.rows[r][c]
    basis = []
    for f in free_cols:
        vec = [sig.zero()] * ncols
        vec[f] = prod
        for r, c in ech.pivots:
            a = ech.rows[r][f]
            if a.is_zero():
                continue
            q = prod.exact_div(ech.rows[r][c])
            if q is None:
                raise LinalgError("pivot product division failed")
            vec[c] = -a * q
        vec, _ = _strip_row(sig, vec)
        basis.append(vec)
    return basis, ech.excluded


def membership(sig: RingSignature, rows, v) -> tuple:
    """Generic span membership with a residual witness.

    Returns (in_span, residual, excluded): residual is v reduced against an
    echelon form of the rows (scaled by nonzero pivots), so a nonzero residual
    certifies v outside the span over the fraction field.
    """
    ech = rref(sig, rows)
    vec = [coerce_elem(sig, x) for x in v]
    excluded = list(ech.excluded)
    for r, c in ech.pivots:
        if vec[c].is_zero():
            continue
        p = ech.rows[r][c]
        _note_excluded(excluded, p)
        coef = vec[c]
        vec = [p * a - coef * b for a, b in zip(vec, ech.rows[r])]
        vec, w = _strip_row(sig, vec)
        if w is not None:
            _note_excluded(excluded, w)
    return all(x.is_zero() for x in vec), vec, excluded


def solve_exact(sig: RingSignature, M, b) -> list:
    """One exact solution of M x = b (free variables set to zero).

    Requires consistency and divisions that land back in the ring; raises
    LinalgError otherwise.
    """
    M = coerce_matrix(sig, M)
    bvec = [coerce_elem(sig, x) for x in b]
    if len(bvec) != len(M):
        raise LinalgError("right-hand side length mismatch")
    ncols = len(M[0]) if M else 0
    aug = [row + [bvec[i]] for i, row in enumerate(M)]
    ech = rref(sig, aug)
    xs = [sig.zero()] * ncols
    for r, c in ech.pivots:
        if c == ncols:
            raise LinalgError("inconsistent linear system")
        q = ech.rows[r][ncols].exact_div(ech.rows[r][c])
        if q is None:
            raise LinalgError("solution does not lie in the ring")
        xs[c] = q
    return xs


def invert(sig: RingSignature, M) -> list:
    """Exact inverse with entries in the ring; raises if singular or non-integral."""
    M = coerce_matrix(sig, M)
    n = len(M)
    if any(len(r) != n for r in M):
        raise LinalgError("inverse of a non-square matrix")
    aug = [list(M[i]) + identity(sig, n)[i] for i in range(n)]
    ech = rref(sig, aug)
    left_pivots = [(r, c) for r, c in ech.pivots if c < n]
    if len(left_pivots) < n:
        raise LinalgError("matrix is singular")
    out = [[sig.zero()] * n for _ in range(n)]
    for r, c in left_pivots:
        p = ech.rows[r][c]
        for j in range(n):
            q = ech.rows[r][n + j].exact_div(p)
            if q is None:
                raise LinalgError("inverse entries do not lie in the ring")
            out[c][j] = q
    return out


def determinant(sig: RingSignature, M) -> RingElem:
    """Bareiss fraction-free determinant."""
    M = [list(r) for r in coerce_matrix(sig, M)]
    n = len(M)
    if any(len(r) != n for r in M):
        raise LinalgError("determinant of a non-square matrix")
    if n == 0:
        return sig.one()
    sign = 1
    prev = sig.one()
    for k in range(n - 1):
        if M[k][k].is_zero():
            for r in range(k + 1, n):
                if not M[r][k].is_zero():
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return sig.zero()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                q = num.exact_div(prev)
                if q is None:
                    raise LinalgError("Bareiss division failed")
                M[i][j] = q
            M[i][k] = sig.zero()
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return -det if sign < 0 else det
