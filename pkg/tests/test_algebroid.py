import ce_oracle
from courantkit import catalog
from courantkit.algebroid import Algebroid
from courantkit.exterior import AForm, contract
from courantkit.ring import RingSignature
from courantkit.sampling import SplitMix


def rand_vform(rng, alg, degree):
    from itertools import combinations

    terms = {}
    for I in combinations(range(alg.rank), degree):
        if rng.randint(0, 1):
            vec = tuple(
                rng.ring_elem(alg.sig, max_degree=1, terms=2)
                for _ in range(alg.rank_v)
            )
            if any(not c.is_zero() for c in vec):
                terms[I] = vec
    return AForm(alg.sig, alg.rank, alg.rank_v, True, degree, terms)


def test_extended_tangent_bracket_formula():
    # [X + f c, Y + g c] = [X, Y] + (X(g) - Y(f)) c with c the central direction
    C = catalog.e1m(2)
    alg = C.alg
    sig = alg.sig
    x, y = sig.coord("x"), sig.coord("y")
    X = [sig.one(), sig.zero(), x * y]  # d/dx + xy c
    Y = [sig.zero(), sig.one(), y]  # d/dy + y c
    got = alg.bracket(X, Y)
    assert got[0].is_zero() and got[1].is_zero()
    expected = X[0] * Y[2].partial("x") + X[1] * Y[2].partial("y") - (
        Y[0] * X[2].partial("x") + Y[1] * X[2].partial("y")
    )
    assert got[2] == expected
    assert got[2] == sig.zero() - x  # X(g) - Y(f) = 0 - x


def test_central_direction_leibniz():
    # bracket of frame X with g*(central) equals X(g)*(central)
    C = catalog.e1m(3)
    alg = C.alg
    sig = alg.sig
    g = sig.coord("x") * sig.coord("z")
    section = [sig.zero(), sig.zero(), sig.zero(), g]
    got = alg.bracket(alg.frame_section(0), section)
    assert got[:3] == [sig.zero()] * 3
    assert got[3] == g.partial("x")


def test_validate_passes_on_catalog_algebroids():
    for name in catalog.names():
        p = catalog.load(name)
        v = p["algebroid"].validate()
        expected_ok = p["expected"].get("valid", True)
        got_ok = v["jacobi_ok"] and v["anchor_ok"] and v["flat_ok"]
        assert got_ok == expected_ok, name


def test_curvature_control_fails_flatness_with_witness():
    p = catalog.load("curvature-control-r2")
    v = p["algebroid"].validate()
    assert not v["flat_ok"]
    assert v["curvature_defects"], "a curvature witness is required"
    (pair, mat) = v["curvature_defects"][0]
    assert tuple(pair) == (0, 1)


def test_d_squared_zero_random():
    rng = SplitMix(101)
    for name in ("tangent-r3", "e1m-r2", "point-sl2", "point-heisenberg-mod"):
        alg = catalog.load(name)["algebroid"]
        for _ in range(15):
            k = rng.randint(0, max(alg.rank - 1, 0))
            w = rand_vform(rng, alg, k)
            assert alg.d(alg.d(w)).is_zero(), name


def test_lie_is_commutator_of_d_and_contraction():
    # L_X = d i_X + i_X d on module-valued forms
    rng = SplitMix(59)
    alg = catalog.e1m(2).alg
    from courantkit.exterior import Multivector

    for _ in range(20):
        X = [rng.ring_elem(alg.sig, max_degree=1, terms=2) for _ in range(alg.rank)]
        k = rng.randint(1, 2)
        w = rand_vform(rng, alg, k)
        mv = Multivector.section(alg.sig, alg.rank, X)
        lhs = alg.lie(X, w)
        rhs = alg.d(contract(mv, w)) + contract(mv, alg.d(w))
        assert lhs.equals(rhs)


def test_change_frame_preserves_validity_and_cohomology():
    alg = catalog.load("point-sl2")["algebroid"]
    rng = SplitMix(71)
    n = alg.rank
    for _ in range(5):
        # unipotent upper-triangular frames are always invertible over Q
        M = [[alg.sig.const(1 if i == j else 0) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                M[i][j] = alg.sig.const(rng.randint(-2, 2))
        moved = alg.change_frame(M)
        v = moved.validate()
        assert v["jacobi_ok"] and v["anchor_ok"] and v["flat_ok"]
        assert moved.ce_cohomology() == alg.ce_cohomology()


def test_point_cohomology_matches_brute_force_oracle():
    for name in ("point-abelian2", "point-sl2", "point-heisenberg", "point-heisenberg-mod"):
        alg = catalog.load(name)["algebroid"]
        assert alg.ce_cohomology() == ce_oracle.betti(alg), name


def test_h0_is_invariant_dimension():
    for name in ("point-abelian2", "point-sl2", "point-heisenberg", "point-heisenberg-mod"):
        alg = catalog.load(name)["algebroid"]
        assert alg.ce_cohomology()[0] == ce_oracle.invariant_dimension(alg), name


def test_betti_golden_values():
    assert catalog.load("point-sl2")["algebroid"].ce_cohomology() == [1, 0, 0, 1]
    assert catalog.load("point-heisenberg")["algebroid"].ce_cohomology() == [1, 2, 2, 1]
    assert catalog.load("point-heisenberg-mod")["algebroid"].ce_cohomology() == [0, 0, 0, 0]
    assert catalog.load("point-abelian2")["algebroid"].ce_cohomology() == [1, 2, 1]


def test_anchor_bracket_homomorphism_defect_zero():
    alg = catalog.e1m(3).alg
    for i in range(alg.rank):
        for j in range(i + 1, alg.rank):
            assert all(c.is_zero() for c in alg.anchor_defect(i, j))


def test_invalid_jacobi_rejected():
    # structure constants violating Jacobi: [e1,e2]=e3, [e1,e3]=e2, [e2,e3]=e1+e2
    sig = RingSignature((), (), mode="rational")
    alg = Algebroid(
        sig,
        3,
        1,
        [[] for _ in range(3)],
        {
            (0, 1): (sig.zero(), sig.zero(), sig.one()),
            (0, 2): (sig.zero(), sig.one(), sig.zero()),
            (1, 2): (sig.one(), sig.one(), sig.zero()),
        },
        [[[sig.zero()]] for _ in range(3)],
    )
    v = alg.validate()
    assert not v["jacobi_ok"]
    assert v["jacobi_defects"]


def test_lie_function_linearity_with_leibniz_correction():
    # L_{fX} w = f L_X w + df ^ i_X w, df taken through the anchor
    from courantkit.exterior import Multivector

    rng = SplitMix(77)
    for name in ("e1m-r2", "tangent-r3"):
        alg = catalog.load(name)["algebroid"]
        sig = alg.sig
        for _ in range(25):
            X = [rng.ring_elem(sig, max_degree=1, terms=1) for _ in range(alg.rank)]
            f = rng.ring_elem(sig, max_degree=1, terms=2)
            fX = [f * c for c in X]
            df = AForm(
                sig,
                alg.rank,
                alg.rank_v,
                False,
                1,
                {
                    (i,): (
                        alg.apply_anchor(
                            [sig.one() if j == i else sig.zero() for j in range(alg.rank)],
                            f,
                        ),
                    )
                    for i in range(alg.rank)
                },
            )
            k = rng.randint(1, alg.rank - 1)
            w = rand_vform(rng, alg, k)
            corr = df.wedge(contract(Multivector.section(sig, alg.rank, X), w))
            assert alg.lie(fX, w).equals(alg.lie(X, w).scale(f) + corr)
            w0 = rand_vform(rng, alg, 0)
            assert alg.lie(fX, w0).equals(alg.lie(X, w0).scale(f))
