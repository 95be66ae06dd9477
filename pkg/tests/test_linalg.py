from fractions import Fraction

import pytest

from courantkit import linalg
from courantkit.linalg import LinalgError
from courantkit.ring import RingSignature
from courantkit.sampling import SplitMix


SIG = RingSignature(("x", "y"))


def rand_matrix(rng, n, m, degree=1):
    return [
        [rng.ring_elem(SIG, max_degree=degree, terms=2) for _ in range(m)]
        for _ in range(n)
    ]


def test_rank_of_rational_matrices_matches_fraction_elimination():
    rng = SplitMix(7)
    for _ in range(25):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        A = [[Fraction(rng.randint(-3, 3)) for _ in range(m)] for _ in range(n)]
        rows = [[SIG.const(v) for v in row] for row in A]
        got, excluded = linalg.rank(SIG, rows)
        assert excluded == []
        # plain elimination oracle
        B = [list(r) for r in A]
        rk = 0
        for col in range(m):
            piv = next((i for i in range(rk, n) if B[i][col]), None)
            if piv is None:
                continue
            B[rk], B[piv] = B[piv], B[rk]
            B[rk] = [v / B[rk][col] for v in B[rk]]
            for i in range(n):
                if i != rk and B[i][col]:
                    f = B[i][col]
                    B[i] = [a - f * b for a, b in zip(B[i], B[rk])]
            rk += 1
        assert got == rk


def test_nullspace_vectors_annihilate():
    rng = SplitMix(19)
    for _ in range(20):
        n, m = rng.randint(1, 3), rng.randint(2, 4)
        A = rand_matrix(rng, n, m)
        basis, _ = linalg.nullspace(SIG, A)
        for v in basis:
            for row in A:
                acc = SIG.zero()
                for a, b in zip(row, v):
                    acc = acc + a * b
                assert acc.is_zero()
        # rank-nullity over the fraction field
        rk, _ = linalg.rank(SIG, A)
        assert rk + len(basis) == m


def test_membership_reports_honest_residual():
    x = SIG.coord("x")
    rows = [[SIG.one(), SIG.zero()], [SIG.zero(), x]]
    ok, residual, _ = linalg.membership(SIG, rows, [SIG.const(3), x * x])
    assert ok and all(r.is_zero() for r in residual)
    ok, residual, _ = linalg.membership(SIG, rows, [SIG.zero(), SIG.one()])
    # 1 is not an R-multiple of x over the polynomial ring's span at generic points;
    # membership works over the fraction field, so this IS in the span
    assert ok
    ok, residual, _ = linalg.membership(
        SIG, [[SIG.one(), SIG.zero()]], [SIG.zero(), SIG.one()]
    )
    assert not ok
    assert any(not r.is_zero() for r in residual)


def test_invert_and_failure():
    rng = SplitMix(37)
    for _ in range(15):
        n = rng.randint(1, 3)
        # unipotent upper-triangular noise keeps the inverse polynomial
        A = [[SIG.one() if i == j else SIG.zero() for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                A[i][j] = rng.ring_elem(SIG, max_degree=1, terms=1)
        inv = linalg.invert(SIG, A)
        prod = linalg.mat_mul(SIG, A, inv)
        for i in range(n):
            for j in range(n):
                expected = SIG.one() if i == j else SIG.zero()
                assert prod[i][j] == expected
    with pytest.raises(LinalgError):
        linalg.invert(SIG, [[SIG.coord("x"), SIG.coord("x")], [SIG.one(), SIG.one()]])


def test_determinant_small_cases():
    x, y = SIG.coord("x"), SIG.coord("y")
    assert linalg.determinant(SIG, [[x]]) == x
    d = linalg.determinant(SIG, [[x, SIG.one()], [y, x]])
    assert d == x * x - y
    # alternating: equal rows kill the determinant
    assert linalg.determinant(SIG, [[x, y], [x, y]]).is_zero()


def test_rank_excluded_locus_reported():
    x = SIG.coord("x")
    rows = [[x, SIG.zero()], [SIG.zero(), SIG.one()]]
    rk, excluded = linalg.rank(SIG, rows)
    assert rk == 2
    # pivoting on x divides by it: the locus x = 0 is excluded from the verdict
    assert any("x" in str(e) for e in excluded)
