"""Built-in fixtures: concrete presentations with frozen expected verdicts.

Every entry is constructed from scratch on each build and carries the
verdicts its checkers are expected to produce, so the registry doubles as a
self-consistency gate: a fixture whose fresh run disagrees with its metadata
is a bug, not an input error.

The suspension fixtures use a single exponential ring generator with
derivative equal to itself; quotient invariance is imposed by construction
(forms are suspended and reduced through explicit degree bookkeeping),
rather than checked dynamically.
"""

from __future__ import annotations

from fractions import Fraction

from .algebroid import Algebroid
from .courant import CourantPresentation
from .dirac import graph_two_form
from .exterior import AForm, ExteriorError, FScalar, Multivector
from .gcr import Distribution, cr_to_gcr, full_distribution, symplectic_gcr, tangent_restriction
from .ring import ExpGen, RingElem, RingSignature


class CatalogError(ValueError):
    pass


_COORD_NAMES = ("x", "y", "z", "w")


def _coords(n: int) -> tuple:
    if n <= len(_COORD_NAMES):
        return _COORD_NAMES[:n]
    return tuple(f"x{i + 1}" for i in range(n))


def tangent_algebroid(coords) -> Algebroid:
    """Tangent presentation: identity anchor, zero brackets, trivial module."""
    sig = RingSignature(tuple(coords))
    n = len(coords)
    o, z = sig.one(), sig.zero()
    anchor = [[o if i == j else z for j in range(n)] for i in range(n)]
    return Algebroid(sig, n, 1, anchor, {}, [[[z]] for _ in range(n)])


def standard_courant(n: int, twist: AForm | None = None,
                     allow_nonclosed: bool = False) -> CourantPresentation:
    """Exact presentation over the tangent algebroid; rejects non-closed twists."""
    if n < 1:
        raise CatalogError("dimension must be positive")
    alg = tangent_algebroid(_coords(n))
    return CourantPresentation(alg, twist, allow_nonclosed=allow_nonclosed)


def e1m(n: int) -> CourantPresentation:
    """Tangent-plus-line presentation whose module is acted on by the extra leg.

    Frame: coordinate directions then one central direction with zero anchor
    whose module action is the identity.  All structure functions vanish on
    this frame; the interesting data is the module connection.
    """
    if n < 1:
        raise CatalogError("dimension must be positive")
    sig = RingSignature(_coords(n))
    o, z = sig.one(), sig.zero()
    anchor = [[o if i == j else z for j in range(n)] for i in range(n)]
    anchor.append([z] * n)
    theta = [[[z]] for _ in range(n)] + [[[o]]]
    alg = Algebroid(sig, n + 1, 1, anchor, {}, theta)
    return CourantPresentation(alg)


# -- suspension --------------------------------------------------------------


def suspended_tangent(alg: Algebroid) -> Algebroid:
    """Tangent presentation with one extra coordinate carrying its exponential.

    For a rank r = n+1 presentation over n coordinates this produces the
    rank-r tangent algebroid over n+1 coordinates whose ring contains a unit
    with derivative equal to itself in the new direction.
    """
    n = alg.sig.ncoords
    if alg.rank != n + 1:
        raise CatalogError("suspension expects one extra frame direction")
    coords = alg.sig.coords + ("t",)
    row = tuple(Fraction(1) if i == n else Fraction(0) for i in range(n + 1))
    sig = RingSignature(coords, (ExpGen("Et", row),))
    return tangent_algebroid_over(sig)


def tangent_algebroid_over(sig: RingSignature) -> Algebroid:
    n = sig.ncoords
    o, z = sig.one(), sig.zero()
    anchor = [[o if i == j else z for j in range(n)] for i in range(n)]
    return Algebroid(sig, n, 1, anchor, {}, [[[z]] for _ in range(n)])


def suspend_form(alg: Algebroid, sus: Algebroid, w: AForm) -> AForm:
    """Module-valued form to an invariant plain form: weight one in the unit."""
    ssig = sus.sig
    terms = {}
    for I, vec in w.terms.items():
        elem = vec[0]
        acc = {}
        for (cdeg, edeg), coeff in elem.terms.items():
            acc[(cdeg + (0,), (1,))] = coeff
        terms[I] = (RingElem(ssig, acc),)
    return AForm(ssig, sus.rank, 1, False, w.degree, terms)


def reduce_form(alg: Algebroid, sus: Algebroid, w: AForm) -> AForm:
    """Invariant plain form back to a module-valued form; rejects non-invariant input.

    Invariance means every coefficient is exactly weight one in the unit and
    free of the suspension coordinate.
    """
    sig = alg.sig
    n = sig.ncoords
    terms = {}
    for I, vec in w.terms.items():
        elem = vec[0]
        acc = {}
        for (cdeg, edeg), coeff in elem.terms.items():
            if edeg != (1,) or cdeg[n] != 0:
                raise CatalogError("form is not invariant of weight one")
            acc[(cdeg[:n], ())] = coeff
        terms[I] = (RingElem(sig, acc),)
    return AForm(sig, alg.rank, 1, True, w.degree, terms)


def contact_r3() -> dict:
    """The contact fixture: graph subbundle, structure matrix, and Jacobi pair.

    The two-form arises by differentiating (unit times contact form) upstairs
    and reducing; its graph is the distinguished subbundle, the associated
    orthogonal structure produces the bivector, and splitting off the extra
    leg leaves the plane pair.
    """
    C = e1m(3)
    alg = C.alg
    sus = suspended_tangent(alg)
    ssig = sus.sig
    y_up = ssig.coord("y")
    unit = ssig.exp_gen("Et")
    eta = AForm(ssig, 4, 1, False, 1, {(2,): (ssig.one(),), (0,): (-y_up,)})
    omega = sus.d(eta.scale(unit))
    if not sus.d(omega).is_zero():
        raise CatalogError("suspension two-form failed to close")
    beta = reduce_form(alg, sus, omega)
    graph = graph_two_form(C, beta)
    structure = symplectic_gcr(C, beta)
    tangent = tangent_restriction(alg)
    sig = alg.sig
    y = sig.coord("y")
    lam = Multivector(sig, 3, 2, {(0, 1): FScalar.of(sig.one()), (1, 2): FScalar.of(-y)})
    reeb = Multivector(sig, 3, 1, {(2,): FScalar.of(sig.one())})
    return {
        "courant": C,
        "algebroid": alg,
        "two_form": beta,
        "subbundles": {"graph": graph},
        "gcr": structure,
        "jacobi": {"algebroid": tangent, "lambda": lam, "e": reeb},
        "expected": {
            "axioms_ok": True,
            "dirac": {"graph": True},
            "intersect_a": {"graph": 0},
            "gcr_ok": True,
            "jacobi_ok": True,
        },
    }


# -- almost-complex fixtures --------------------------------------------------


def cr_examples() -> list:
    """Distribution-plus-rotation fixtures with their expected verdicts."""
    out = []

    t3 = tangent_algebroid(_coords(3))
    s3 = t3.sig
    o, z = s3.one(), s3.zero()
    C3 = CourantPresentation(t3)
    eye3 = [[o if i == j else z for j in range(3)] for i in range(3)]
    out.append(
        {
            "name": "cr-levi-flat-r3",
            "courant": C3,
            "algebroid": t3,
            "distribution": Distribution(t3, eye3, 2),
            "j_matrix": [[z, -o], [o, z]],
            "expected": {"gcr_ok": True},
        }
    )

    t5 = tangent_algebroid(_coords(5))
    s5 = t5.sig
    o5, z5 = s5.one(), s5.zero()
    x1 = s5.coord("x1")
    C5 = CourantPresentation(t5)
    frame5 = [
        [o5, z5, z5, z5, z5],
        [z5, o5, z5, z5, z5],
        [z5, z5, o5, z5, z5],
        [z5, z5, z5, o5, x1],
        [z5, z5, z5, z5, o5],
    ]
    j5 = [
        [z5, -o5, z5, z5],
        [o5, z5, z5, z5],
        [z5, z5, z5, -o5],
        [z5, z5, o5, z5],
    ]
    out.append(
        {
            "name": "cr-control-r5",
            "courant": C5,
            "algebroid": t5,
            "distribution": Distribution(t5, frame5, 4),
            "j_matrix": j5,
            "expected": {"gcr_ok": False, "involutive": False},
        }
    )

    t2 = tangent_algebroid(_coords(2))
    s2 = t2.sig
    o2, z2 = s2.one(), s2.zero()
    C2 = CourantPresentation(t2)
    out.append(
        {
            "name": "cr-complex-r2",
            "courant": C2,
            "algebroid": t2,
            "distribution": full_distribution(t2),
            "j_matrix": [[z2, -o2], [o2, z2]],
            "expected": {"gcr_ok": True},
        }
    )
    return out


def symplectic_r2() -> dict:
    C = standard_courant(2)
    sig = C.alg.sig
    omega = AForm(sig, 2, 1, True, 2, {(0, 1): (sig.one(),)})
    return {
        "courant": C,
        "algebroid": C.alg,
        "two_form": omega,
        "gcr": symplectic_gcr(C, omega),
        "expected": {"axioms_ok": True, "gcr_ok": True, "poisson": True},
    }


# -- graph subbundles ----------------------------------------------------------


def dirac_graph_r2() -> dict:
    C = standard_courant(2)
    sig = C.alg.sig
    omega = AForm(sig, 2, 1, True, 2, {(0, 1): (sig.one(),)})
    return {
        "courant": C,
        "algebroid": C.alg,
        "two_form": omega,
        "subbundles": {"graph": graph_two_form(C, omega)},
        "expected": {
            "axioms_ok": True,
            "dirac": {"graph": True},
            "lagrangian": {"graph": True},
        },
    }


def dirac_nonclosed_r3() -> dict:
    C = standard_courant(3)
    sig = C.alg.sig
    zc = sig.coord("z")
    omega = AForm(sig, 3, 1, True, 2, {(0, 1): (zc,)})
    return {
        "courant": C,
        "algebroid": C.alg,
        "two_form": omega,
        "subbundles": {"graph": graph_two_form(C, omega)},
        "expected": {
            "axioms_ok": True,
            "dirac": {"graph": False},
            "lagrangian": {"graph": True},
            "involutive": {"graph": False},
        },
    }


# -- point fixtures --------------------------------------------------------------


def _point_sig() -> RingSignature:
    return RingSignature((), (), mode="rational")


def _point_algebroid(rank: int, structure: dict, theta_scalars) -> Algebroid:
    sig = _point_sig()
    anchor = [[] for _ in range(rank)]
    struct = {
        key: tuple(sig.const(c) for c in vec) for key, vec in structure.items()
    }
    theta = [[[sig.const(t)]] for t in theta_scalars]
    return Algebroid(sig, rank, 1, anchor, struct, theta)


def point_algebras() -> list:
    """Constant-coefficient fixtures with frozen cohomology tables."""
    out = []
    out.append(
        {
            "name": "point-abelian2",
            "algebroid": _point_algebroid(2, {}, (0, 0)),
            "expected": {"betti": [1, 2, 1], "h3": 0, "invariants": 1},
        }
    )
    out.append(
        {
            "name": "point-sl2",
            "algebroid": _point_algebroid(
                3,
                {(0, 1): (0, 0, 1), (0, 2): (-2, 0, 0), (1, 2): (0, 2, 0)},
                (0, 0, 0),
            ),
            "expected": {"betti": [1, 0, 0, 1], "h3": 1, "invariants": 1},
        }
    )
    out.append(
        {
            "name": "point-heisenberg",
            "algebroid": _point_algebroid(3, {(0, 1): (0, 0, 1)}, (0, 0, 0)),
            "expected": {"betti": [1, 2, 2, 1], "h3": 1, "invariants": 1},
        }
    )
    out.append(
        {
            "name": "point-heisenberg-mod",
            "algebroid": _point_algebroid(3, {(0, 1): (0, 0, 1)}, (1, 0, 0)),
            "expected": {"betti": [0, 0, 0, 0], "h3": 0, "invariants": 0},
        }
    )
    return out


def curvature_control_r2() -> dict:
    """Non-flat module connection: the validator must flag it."""
    sig = RingSignature(_coords(2))
    o, z = sig.one(), sig.zero()
    x = sig.coord("x")
    alg = Algebroid(
        sig, 2, 1, [[o, z], [z, o]], {}, [[[z]], [[x]]]
    )
    return {
        "algebroid": alg,
        "expected": {"valid": False, "flat_ok": False},
    }


def nonclosed_r4() -> dict:
    """Top-coefficient twist with one live derivative: the first axiom must fail."""
    alg = tangent_algebroid(_coords(4))
    sig = alg.sig
    w = sig.coord("w")
    twist = AForm(sig, 4, 1, True, 3, {(0, 1, 2): (w,)})
    C = CourantPresentation(alg, twist, allow_nonclosed=True)
    return {
        "courant": C,
        "algebroid": alg,
        "expected": {"axioms_ok": False, "closed_twist": False},
    }


def standard_r3_twisted() -> dict:
    alg = tangent_algebroid(_coords(3))
    sig = alg.sig
    x = sig.coord("x")
    twist = AForm(sig, 3, 1, True, 3, {(0, 1, 2): (x,)})
    return {
        "courant": CourantPresentation(alg, twist),
        "algebroid": alg,
        "expected": {"axioms_ok": True, "closed_twist": True},
    }


# -- registry --------------------------------------------------------------------


def _courant_entry(C: CourantPresentation) -> dict:
    return {
        "courant": C,
        "algebroid": C.alg,
        "expected": {"axioms_ok": True},
    }


def _from_list(maker, name):
    def build():
        for fixture in maker():
            if fixture["name"] == name:
                return dict(fixture)
        raise CatalogError(f"missing fixture {name!r}")

    return build


_BUILDERS = {
    "tangent-r2": lambda: _courant_entry(standard_courant(2)),
    "tangent-r3": lambda: _courant_entry(standard_courant(3)),
    "standard-r3-twisted": standard_r3_twisted,
    "nonclosed-r4": nonclosed_r4,
    "e1m-r1": lambda: _courant_entry(e1m(1)),
    "e1m-r2": lambda: _courant_entry(e1m(2)),
    "e1m-r3": lambda: _courant_entry(e1m(3)),
    "contact-r3": contact_r3,
    "symplectic-r2": symplectic_r2,
    "dirac-graph-r2": dirac_graph_r2,
    "dirac-nonclosed-r3": dirac_nonclosed_r3,
    "curvature-control-r2": curvature_control_r2,
    "cr-levi-flat-r3": _from_list(cr_examples, "cr-levi-flat-r3"),
    "cr-control-r5": _from_list(cr_examples, "cr-control-r5"),
    "cr-complex-r2": _from_list(cr_examples, "cr-complex-r2"),
    "point-abelian2": _from_list(point_algebras, "point-abelian2"),
    "point-sl2": _from_list(point_algebras, "point-sl2"),
    "point-heisenberg": _from_list(point_algebras, "point-heisenberg"),
    "point-heisenberg-mod": _from_list(point_algebras, "point-heisenberg-mod"),
}


def names() -> list:
    return sorted(_BUILDERS)


def load(name: str) -> dict:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise CatalogError(f"unknown catalog entry {name!r}")
    payload = dict(builder())
    payload.setdefault("name", name)
    return payload
