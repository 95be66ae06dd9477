import pytest

from courantkit import catalog
from courantkit.courant import CSection
from courantkit.dirac import (
    DiracError,
    closure_report,
    graph_two_form,
    intersect_with_A,
    is_dirac,
    is_isotropic,
    is_lagrangian,
    pairing_gram,
    perp,
    projection_closure,
    span_rank,
)
from courantkit.exterior import AForm
from courantkit.linalg import membership


def test_symplectic_graph_is_dirac():
    p = catalog.load("dirac-graph-r2")
    C, gens = p["courant"], p["subbundles"]["graph"]
    ok, rep = is_dirac(C, gens)
    assert ok
    assert rep["isotropic"] and rep["involutive"]
    assert rep["rank"] == rep["expected_rank"] == 2


def test_nonclosed_graph_is_lagrangian_but_not_involutive():
    p = catalog.load("dirac-nonclosed-r3")
    C, gens = p["courant"], p["subbundles"]["graph"]
    ok, rep = is_lagrangian(C, gens)
    assert ok and rep["isotropic"]
    ok, rep = is_dirac(C, gens)
    assert not ok
    assert not rep["involutive"]
    w = rep["involutive_witness"]
    assert w is not None and "pair" in w and "residual" in w
    assert any(r != "0" for r in w["residual"])


def test_closure_witness_pins_failing_pair():
    p = catalog.load("dirac-nonclosed-r3")
    C, gens = p["courant"], p["subbundles"]["graph"]
    rep = closure_report(C, gens)
    assert not rep["closed"]
    i, j = rep["witness"]["pair"]
    got = C.bracket(gens[i], gens[j])
    # the reported bracket really is outside the span
    rows = [g.coordinates() for g in gens]
    ok, _, _ = membership(C.alg.sig, rows, got.coordinates())
    assert not ok


def test_graph_intersects_splitting_trivially_iff_nondegenerate():
    p = catalog.load("dirac-graph-r2")
    assert intersect_with_A(p["courant"], p["subbundles"]["graph"]) == 0
    q = catalog.load("dirac-nonclosed-r3")
    # z dx^dy has a one-dimensional kernel spanned by d/dz
    assert intersect_with_A(q["courant"], q["subbundles"]["graph"]) == 1


def test_contact_graph_is_dirac_with_trivial_intersection():
    p = catalog.load("contact-r3")
    C, gens = p["courant"], p["subbundles"]["graph"]
    ok, rep = is_dirac(C, gens)
    assert ok, rep
    assert intersect_with_A(C, gens) == 0


def test_perp_of_lagrangian_is_itself():
    p = catalog.load("dirac-graph-r2")
    C, gens = p["courant"], p["subbundles"]["graph"]
    comp = perp(C, gens)
    rows = [g.coordinates() for g in gens]
    assert len(comp) == len(gens)
    for v in comp:
        ok, _, _ = membership(C.alg.sig, rows, v.coordinates())
        assert ok


def test_perp_drops_rank_by_pairing_rank():
    # a single isotropic generator on the plane: perp has corank one
    C = catalog.standard_courant(2)
    gens = [C.frame_section(0)]
    comp = perp(C, gens)
    rk, _ = span_rank(C, comp)
    assert rk == 2 * C.alg.rank - 1


def test_pairing_gram_symmetric_and_isotropy_detection():
    C = catalog.standard_courant(2)
    e0 = C.frame_section(0)
    j0 = C.coframe_section(0)
    G = pairing_gram(C, [e0, j0])
    assert G[0][1] == G[1][0] == C.alg.sig.one()
    ok, witness = is_isotropic(C, [e0, j0])
    assert not ok
    assert witness["pair"] == [0, 1]
    assert witness["value"] == ["1"]


def test_lagrangian_requires_full_rank():
    C = catalog.standard_courant(2)
    ok, rep = is_lagrangian(C, [C.frame_section(0)])
    assert not ok
    assert rep["isotropic"]
    assert rep["rank"] == 1 and rep["expected_rank"] == 2


def test_projection_closure_on_graphs():
    p = catalog.load("dirac-graph-r2")
    rep = projection_closure(p["courant"], p["subbundles"]["graph"])
    assert rep["closed"]
    q = catalog.load("contact-r3")
    rep = projection_closure(q["courant"], q["subbundles"]["graph"])
    assert rep["closed"]


def test_projection_closure_witness_on_open_distribution():
    # the plane field span{d/dx, d/dy + x d/dz} brackets out of itself
    C = catalog.standard_courant(3)
    sig = C.alg.sig
    x = sig.coord("x")
    g1 = C.frame_section(0)
    g2 = CSection(
        C.alg, [sig.zero(), sig.one(), x], C.alg.zero_form(1)
    )
    rep = projection_closure(C, [g1, g2])
    assert not rep["closed"]
    assert rep["witness"]["pair"] == [0, 1]


def test_graph_two_form_rejects_wrong_degree():
    C = catalog.standard_courant(2)
    with pytest.raises(DiracError):
        graph_two_form(C, C.alg.zero_form(1))


def test_graph_pairing_encodes_antisymmetry():
    # <e_i + i_{e_i}B, e_j + i_{e_j}B> = B_ij + B_ji = 0 for any two-form
    C = catalog.standard_courant(3)
    sig = C.alg.sig
    B = AForm(
        sig,
        3,
        1,
        True,
        2,
        {(0, 1): (sig.coord("z"),), (0, 2): (sig.coord("x") * sig.coord("y"),)},
    )
    gens = graph_two_form(C, B)
    ok, _ = is_lagrangian(C, gens)
    assert ok
