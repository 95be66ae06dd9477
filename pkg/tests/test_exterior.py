from fractions import Fraction

import pytest

from courantkit.exterior import (
    AForm,
    ExteriorError,
    FForm,
    FScalar,
    Multivector,
    aform_to_fform,
    breve_contract,
    contract,
    fform_to_aform,
    iota,
    pair_eval,
    wedge,
)
from courantkit.ring import RingSignature
from courantkit.sampling import SplitMix


SIG = RingSignature(("x", "y", "z"))
RANK = 3


def rand_plain_form(rng, degree, rank=RANK):
    terms = {}
    idx = [tuple(sorted(s)) for s in _subsets(range(rank), degree)]
    for I in idx:
        if rng.randint(0, 1):
            c = rng.ring_elem(SIG, max_degree=1, terms=2)
            if not c.is_zero():
                terms[I] = (c,)
    return AForm(SIG, rank, 1, False, degree, terms)


def _subsets(pool, k):
    from itertools import combinations

    return combinations(pool, k)


def frame(i):
    return Multivector.frame(SIG, RANK, i)


def test_pairing_is_determinant_delta():
    # <f^I, e_J> = delta_IJ for increasing index tuples
    for I in _subsets(range(RANK), 2):
        xi = AForm(SIG, RANK, 1, False, 2, {tuple(I): (SIG.one(),)})
        for J in _subsets(range(RANK), 2):
            P = Multivector(SIG, RANK, 2, {tuple(J): FScalar.of(SIG.one())})
            val = pair_eval(xi, P)
            expected = SIG.one() if I == J else SIG.zero()
            assert val.grade_zero_elem() == expected


def test_contract_front_signs():
    w = AForm(SIG, RANK, 1, False, 2, {(0, 1): (SIG.one(),)})
    c0 = contract(frame(0), w)
    c1 = contract(frame(1), w)
    assert c0.terms == {(1,): (SIG.one(),)}
    assert c1.terms == {(0,): (-SIG.one(),)}


def test_wedge_graded_commutative():
    rng = SplitMix(3)
    for _ in range(25):
        p = rng.randint(0, 2)
        q = rng.randint(0, 2)
        a = rand_plain_form(rng, p)
        b = rand_plain_form(rng, q)
        sign = Fraction(-1) ** (p * q)
        assert wedge(a, b).equals(wedge(b, a).scale(sign))


def test_wedge_associative():
    rng = SplitMix(17)
    for _ in range(20):
        a = rand_plain_form(rng, 1)
        b = rand_plain_form(rng, 1)
        c = rand_plain_form(rng, 1)
        assert wedge(wedge(a, b), c).equals(wedge(a, wedge(b, c)))


def test_contraction_antiderivation():
    # i_X(a ^ b) = (i_X a) ^ b + (-1)^|a| a ^ (i_X b)
    rng = SplitMix(23)
    for _ in range(25):
        p = rng.randint(1, 2)
        a = rand_plain_form(rng, p)
        b = rand_plain_form(rng, rng.randint(1, 2))
        X = frame(rng.randint(0, RANK - 1))
        lhs = contract(X, wedge(a, b))
        rhs = wedge(contract(X, a), b) + wedge(a, contract(X, b)).scale(Fraction(-1) ** p)
        assert lhs.equals(rhs)


def test_iterated_contraction_matches_bivector_insertion():
    # iota of a decomposable contracts its first factor innermost
    rng = SplitMix(29)
    for _ in range(20):
        w = rand_plain_form(rng, 3)
        P = Multivector(
            SIG,
            RANK,
            2,
            {(0, 1): FScalar.of(rng.ring_elem(SIG, max_degree=1, terms=1))},
        )
        viaP = iota(P, aform_to_fform(w))
        direct = contract(frame(1), contract(frame(0), w))
        coeff = P.terms.get((0, 1))
        if coeff is None:
            assert viaP.is_zero()
        else:
            expected = direct.scale(coeff.grade_zero_elem())
            assert fform_to_aform(viaP, vvalued=False).equals(expected)


def test_rear_contraction_duality():
    # <xi ^ eta, P> = <xi, breve(eta) P>
    rng = SplitMix(41)
    for _ in range(30):
        k = rng.randint(1, 2)
        xi = rand_plain_form(rng, k)
        eta = rand_plain_form(rng, 1)
        terms = {}
        for I in _subsets(range(RANK), k + 1):
            if rng.randint(0, 1):
                terms[tuple(I)] = FScalar.of(rng.ring_elem(SIG, max_degree=1, terms=1))
        P = Multivector(SIG, RANK, k + 1, terms)
        lhs = pair_eval(wedge(xi, eta), P)
        eta_f = aform_to_fform(eta)
        rhs = pair_eval(xi, breve_contract(eta_f, P))
        assert lhs == rhs


def test_fscalar_grade_bookkeeping():
    a = FScalar(SIG, {0: SIG.coord("x"), -1: SIG.one()})
    b = FScalar(SIG, {1: SIG.coord("y")})
    prod = a * b
    assert set(prod.parts) == {1, 0}
    assert prod.parts[1] == SIG.coord("x") * SIG.coord("y")
    assert prod.parts[0] == SIG.coord("y")
    assert a.shift(2).parts == {2: SIG.coord("x"), 1: SIG.one()}
    assert a.pure_grade() is None  # mixed grades have no single grade
    assert b.pure_grade() == 1


def test_aform_fform_round_trip():
    rng = SplitMix(53)
    for _ in range(20):
        terms = {}
        for I in _subsets(range(RANK), 2):
            vec = (rng.ring_elem(SIG, max_degree=1, terms=2),)
            if not vec[0].is_zero():
                terms[tuple(I)] = vec
        w = AForm(SIG, RANK, 1, True, 2, terms)
        f = aform_to_fform(w)
        assert isinstance(f, FForm)
        back = fform_to_aform(f, vvalued=True)
        assert back.equals(w)


def test_degree_and_width_guards():
    w = AForm(SIG, RANK, 1, True, 1, {(0,): (SIG.one(),)})
    v = AForm(SIG, RANK, 1, False, 1, {(0,): (SIG.one(),)})
    with pytest.raises(ExteriorError):
        w + v  # module-valued plus plain
    with pytest.raises(ExteriorError):
        AForm(SIG, RANK, 1, False, 1, {(7,): (SIG.one(),)})
    with pytest.raises(ExteriorError):
        AForm(SIG, RANK, 1, False, 2, {(1, 0): (SIG.one(),)})  # must be increasing


def test_multivector_section_round_trip():
    coeffs = [SIG.coord("x"), SIG.one(), SIG.zero()]
    m = Multivector.section(SIG, RANK, coeffs)
    assert m.degree == 1
    assert m.section_coeffs() == coeffs
