from fractions import Fraction

import pytest

from courantkit import catalog
from courantkit.courant import CourantError, CourantPresentation, CSection
from courantkit.exterior import AForm, Multivector, contract
from courantkit.sampling import SplitMix


def rand_section(rng, C):
    alg = C.alg
    x = rng.coeff_vector(alg.sig, alg.rank, max_degree=1, terms=1)
    terms = {}
    for i in range(alg.rank):
        if rng.randint(0, 1):
            vec = tuple(
                rng.ring_elem(alg.sig, max_degree=1, terms=1)
                for _ in range(alg.rank_v)
            )
            if any(not c.is_zero() for c in vec):
                terms[(i,)] = vec
    return CSection(alg, x, AForm(alg.sig, alg.rank, alg.rank_v, True, 1, terms))


def rand_two_form(rng, alg):
    terms = {}
    for i in range(alg.rank):
        for j in range(i + 1, alg.rank):
            if rng.randint(0, 1):
                vec = tuple(
                    rng.ring_elem(alg.sig, max_degree=1, terms=1)
                    for _ in range(alg.rank_v)
                )
                if any(not c.is_zero() for c in vec):
                    terms[(i, j)] = vec
    return AForm(alg.sig, alg.rank, alg.rank_v, True, 2, terms)


def test_bracket_lie_derivative_golden():
    C = catalog.standard_courant(3)
    alg = C.alg
    sig = alg.sig
    x, y = sig.coord("x"), sig.coord("y")
    e1 = C.section([sig.one(), sig.zero(), sig.zero()])  # d/dx
    e2 = C.section(alg.zero_section(), {(1,): (x * y,)})  # xy dy
    got = C.bracket(e1, e2)
    assert got.x == alg.zero_section()
    assert got.xi.coefficient((1,)) == (y,)
    assert all(got.xi.coefficient((i,)) == (sig.zero(),) for i in (0, 2))


def test_bracket_function_leibniz_rule():
    # [[e1, f e2]] = f [[e1, e2]] + (anchor(e1) f) e2 when <e1, e2> = 0
    rng = SplitMix(7)
    C = catalog.load("standard-r3-twisted")["courant"]
    alg = C.alg
    sig = alg.sig
    f = sig.coord("x") * sig.coord("y") + sig.const(2)
    e1 = C.frame_section(0)
    e2 = C.frame_section(2)
    lhs = C.bracket(e1, e2.scale(f))
    rhs = C.bracket(e1, e2).scale(f) + e2.scale(alg.apply_anchor(e1.x, f))
    assert lhs.equals(rhs)


def test_closed_twist_jacobiator_vanishes_on_frame():
    C = catalog.load("standard-r3-twisted")["courant"]
    frame = C.full_frame()
    for a in frame:
        for b in frame:
            for c in frame:
                assert C.jacobiator(a, b, c).is_zero()
                assert C.jacobiator_expected(a, b, c).is_zero()


def test_verify_ok_on_valid_presentations():
    for name in ("tangent-r3", "standard-r3-twisted", "e1m-r2"):
        C = catalog.load(name)["courant"]
        rep = C.verify(seed=3, samples=6)
        assert rep["ok"], name
        assert rep["closed_twist"], name
        assert rep["axioms"]["leibniz"]["defect_matches_insertion"], name


def test_nonclosed_control_fails_with_exact_insertion_defect():
    C = catalog.load("nonclosed-r4")["courant"]
    rep = C.verify(seed=0, samples=5)
    assert not rep["ok"]
    assert not rep["closed_twist"]
    assert not rep["axioms"]["leibniz"]["holds"]
    # the defect is never mysterious: it always equals the insertion of dH
    assert rep["axioms"]["leibniz"]["defect_matches_insertion"]
    # frame triple golden: legs (1,2,3) insert into dH = -f^{1234} leaving +f^4
    f = C.full_frame()
    defect = C.jacobiator(f[0], f[1], f[2])
    assert defect.x == C.alg.zero_section()
    assert defect.xi.coefficient((3,)) == (C.alg.sig.one(),)
    assert defect.equals(C.jacobiator_expected(f[0], f[1], f[2]))


def test_every_frame_triple_defect_matches_insertion_on_control():
    C = catalog.load("nonclosed-r4")["courant"]
    frame = C.full_frame()
    for a in frame:
        for b in frame:
            for c in frame:
                assert C.jacobiator(a, b, c).equals(C.jacobiator_expected(a, b, c))


def test_change_splitting_shifts_twist_and_transport_intertwines():
    rng = SplitMix(23)
    C = catalog.load("standard-r3-twisted")["courant"]
    alg = C.alg
    for _ in range(10):
        beta = rand_two_form(rng, alg)
        C2 = C.change_splitting(beta)
        assert C2.twist.equals(C.twist - alg.d(beta))
        e1, e2 = rand_section(rng, C), rand_section(rng, C)
        lhs = C.bracket(C.transport(e1, beta), C.transport(e2, beta))
        rhs = C.transport(C2.bracket(e1, e2), beta)
        assert lhs.equals(rhs)
        # the pairing never sees the shift
        assert C.pairing(C.transport(e1, beta), C.transport(e2, beta)) == C.pairing(e1, e2)


def test_gauge_by_exact_form_preserves_closed_twist():
    rng = SplitMix(29)
    C = catalog.standard_courant(3)
    alg = C.alg
    beta = rand_two_form(rng, alg)
    C2 = C.change_splitting(beta)
    assert alg.d(C2.twist).is_zero()
    assert C2.verify(seed=1, samples=4)["ok"]


def test_isotropize_splits_symmetric_part():
    rng = SplitMix(41)
    C = catalog.load("standard-r3-twisted")["courant"]
    alg = C.alg
    half = Fraction(1, 2)
    for _ in range(6):
        sigma = [
            AForm(
                alg.sig,
                alg.rank,
                alg.rank_v,
                True,
                1,
                {
                    (j,): (rng.ring_elem(alg.sig, max_degree=1, terms=1),)
                    for j in range(alg.rank)
                },
            )
            for _ in range(alg.rank)
        ]
        C2, beta = C.isotropize(sigma)
        for i in range(alg.rank):
            for j in range(i + 1, alg.rank):
                want = tuple(
                    (a - b) * half
                    for a, b in zip(sigma[i].coefficient((j,)), sigma[j].coefficient((i,)))
                )
                assert beta.coefficient((i, j)) == want
        # the corrected splitting e_i -> (e_i, i_{e_i} beta) is exactly isotropic
        corrected = [
            C.section(list(C.frame_section(i).x)) + CSection(
                alg, alg.zero_section(), contract(C._mv(C.frame_section(i).x), beta)
            )
            for i in range(alg.rank)
        ]
        for a in corrected:
            for b in corrected:
                assert all(c.is_zero() for c in C.pairing(a, b))
        assert C2.twist.equals(C.twist - alg.d(beta))


def test_coisotropic_leg_brackets():
    # [[e, j(xi)]] = j(L_{pi e} xi) and [[j(xi), e]] = -j(i_{pi e} d xi)
    rng = SplitMix(53)
    C = catalog.e1m(2)
    alg = C.alg
    for _ in range(10):
        e = rand_section(rng, C)
        xi = rand_section(rng, C).xi
        jxi = CSection(alg, alg.zero_section(), xi)
        left = C.bracket(e, jxi)
        assert left.x == alg.zero_section()
        assert left.xi.equals(alg.lie(e.x, xi))
        right = C.bracket(jxi, e)
        assert right.x == alg.zero_section()
        mv = Multivector.section(alg.sig, alg.rank, e.x)
        assert right.xi.equals(contract(mv, alg.d(xi)).scale(alg.sig.const(-1)))


def test_pairing_with_coisotropic_leg_is_insertion():
    rng = SplitMix(67)
    C = catalog.e1m(3)
    alg = C.alg
    for _ in range(10):
        e = rand_section(rng, C)
        xi = rand_section(rng, C).xi
        jxi = CSection(alg, alg.zero_section(), xi)
        mv = Multivector.section(alg.sig, alg.rank, e.x)
        inserted = contract(mv, xi)
        got = C.pairing(e, jxi)
        assert got == list(inserted.coefficient(()))


def test_differential_pairs_to_module_derivative():
    rng = SplitMix(79)
    C = catalog.e1m(2)
    alg = C.alg
    f = alg.sig.coord("x") * alg.sig.coord("y")
    Df = C.differential([f])
    for _ in range(8):
        e = rand_section(rng, C)
        assert C.pairing(Df, e) == alg.nabla(e.x, [f])


def test_symmetric_defect_vanishes():
    rng = SplitMix(83)
    for name in ("tangent-r3", "e1m-r2", "standard-r3-twisted"):
        C = catalog.load(name)["courant"]
        for _ in range(8):
            e = rand_section(rng, C)
            assert C.symmetric_defect(e).is_zero(), name


def test_section_coordinates_round_trip():
    rng = SplitMix(89)
    C = catalog.e1m(2)
    for _ in range(5):
        e = rand_section(rng, C)
        back = CSection.from_coordinates(C.alg, e.coordinates())
        assert back.equals(e)


def test_change_splitting_rejects_wrong_degree():
    C = catalog.standard_courant(2)
    alg = C.alg
    with pytest.raises(CourantError):
        C.change_splitting(alg.zero_form(1))


def test_nonclosed_twist_requires_flag():
    from courantkit.catalog import CatalogError

    alg = catalog.tangent_algebroid(("x", "y", "z", "w"))
    sig = alg.sig
    twist = AForm(sig, 4, 1, True, 3, {(0, 1, 2): (sig.coord("w"),)})
    with pytest.raises(CourantError):
        CourantPresentation(alg, twist)
