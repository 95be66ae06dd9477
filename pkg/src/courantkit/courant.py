"""Module-twisted Courant structures on A + V (x) A*.

A presentation consists of a validated algebroid and a module-valued 3-form
twist H.  Sections are pairs (X, xi) with X a plain section and xi a
module-valued 1-form; the operations are

    <X+xi, Y+eta> = eta(X) + xi(Y)                      (module-valued pairing)
    [[X+xi, Y+eta]] = [X,Y] + L_X eta - i_Y d xi + i_X i_Y H
    D f = (0, d f)

The four structure axioms are exposed as exact defect computations: the
left-Leibniz defect of the bracket, anchor compatibility, the symmetric-part
rule [[e,e]] = (1/2) D<e,e>, and pairing invariance.  When the twist is not
closed the Leibniz defect is nonzero but still predictable: it equals the
insertion of the three anchored legs into dH, and `jacobiator_expected`
computes exactly that for comparison.
"""

from __future__ import annotations

from .algebroid import Algebroid, AlgebroidError
from .exterior import AForm, Multivector, contract
from .ring import coerce_elem


class CourantError(ValueError):
    pass


class CSection:
    """Section of the extension: a plain section plus a module-valued 1-form."""

    __slots__ = ("alg", "x", "xi")

    def __init__(self, alg: Algebroid, x, xi: AForm | None = None):
        x = [coerce_elem(alg.sig, c) for c in x]
        if len(x) != alg.rank:
            raise CourantError("section coefficients must have length rank")
        if xi is None:
            xi = alg.zero_form(1)
        if xi.degree != 1 or not xi.vvalued:
            raise CourantError("covector part must be a module-valued 1-form")
        if xi.sig != alg.sig or xi.rank != alg.rank or xi.rank_v != alg.rank_v:
            raise CourantError("covector part does not live on this algebroid")
        object.__setattr__(self, "alg", alg)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    def __setattr__(self, name, value):
        raise AttributeError("CSection is immutable")

    def __add__(self, other: "CSection") -> "CSection":
        self._check(other)
        return CSection(
            self.alg, [a + b for a, b in zip(self.x, other.x)], self.xi + other.xi
        )

    def __sub__(self, other: "CSection") -> "CSection":
        return self + (-other)

    def __neg__(self) -> "CSection":
        return CSection(self.alg, [-a for a in self.x], -self.xi)

    def scale(self, c) -> "CSection":
        c = coerce_elem(self.alg.sig, c)
        return CSection(self.alg, [a * c for a in self.x], self.xi.scale(c))

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def _check(self, other: "CSection"):
        if self.alg is not other.alg and self.alg.sig != other.alg.sig:
            raise CourantError("sections from different presentations")

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.x) and self.xi.is_zero()

    def equals(self, other: "CSection") -> bool:
        return all((a - b).is_zero() for a, b in zip(self.x, other.x)) and (
            self.xi.equals(other.xi)
        )

    def __eq__(self, other):
        if not isinstance(other, CSection):
            return NotImplemented
        return self.equals(other)

    def conjugate(self) -> "CSection":
        return CSection(self.alg, [c.conjugate() for c in self.x], self.xi.conjugate())

    def coordinates(self) -> list:
        """Flat coordinate vector: rank section entries then rank*rank_v form entries."""
        out = list(self.x)
        for i in range(self.alg.rank):
            vec = self.xi.coefficient((i,))
            out.extend(vec)
        return out

    @staticmethod
    def from_coordinates(alg: Algebroid, coords) -> "CSection":
        coords = [coerce_elem(alg.sig, c) for c in coords]
        r, s = alg.rank, alg.rank_v
        if len(coords) != r + r * s:
            raise CourantError("coordinate vector has the wrong length")
        terms = {}
        for i in range(r):
            vec = tuple(coords[r + i * s : r + (i + 1) * s])
            if any(not c.is_zero() for c in vec):
                terms[(i,)] = vec
        return CSection(alg, coords[:r], AForm(alg.sig, r, s, True, 1, terms))

    def describe(self) -> dict:
        return {
            "x": [str(c) for c in self.x],
            "xi": {
                "+".join(str(i + 1) for i in I): [str(c) for c in vec]
                for I, vec in self.xi.sorted_terms()
            },
        }

    def __repr__(self):
        return f"CSection(x={[str(c) for c in self.x]}, xi={self.xi.to_str()})"


class CourantPresentation:
    __slots__ = ("alg", "twist", "closed_twist")

    def __init__(self, alg: Algebroid, twist: AForm | None = None, allow_nonclosed=False):
        if twist is None:
            twist = alg.zero_form(3)
        if not twist.vvalued or twist.degree != 3:
            raise CourantError("twist must be a module-valued 3-form")
        if twist.sig != alg.sig or twist.rank != alg.rank or twist.rank_v != alg.rank_v:
            raise CourantError("twist does not live on this algebroid")
        closed = alg.d(twist).is_zero()
        if not closed and not allow_nonclosed:
            raise CourantError(
                "twist is not closed; pass allow_nonclosed=True to study the defect"
            )
        object.__setattr__(self, "alg", alg)
        object.__setattr__(self, "twist", twist)
        object.__setattr__(self, "closed_twist", closed)

    def __setattr__(self, name, value):
        raise AttributeError("CourantPresentation is immutable")

    # -- sections ----------------------------------------------------------------

    def section(self, x, xi_terms=None) -> CSection:
        alg = self.alg
        if xi_terms is None:
            xi = alg.zero_form(1)
        elif isinstance(xi_terms, AForm):
            xi = xi_terms
        else:
            xi = alg.form(1, xi_terms)
        return CSection(alg, x, xi)

    def frame_section(self, i: int) -> CSection:
        return CSection(self.alg, self.alg.frame_section(i))

    def coframe_section(self, i: int, b: int = 0) -> CSection:
        vec = [self.alg.sig.zero()] * self.alg.rank_v
        vec[b] = self.alg.sig.one()
        xi = AForm(self.alg.sig, self.alg.rank, self.alg.rank_v, True, 1, {(i,): tuple(vec)})
        return CSection(self.alg, self.alg.zero_section(), xi)

    def full_frame(self) -> list:
        out = [self.frame_section(i) for i in range(self.alg.rank)]
        for i in range(self.alg.rank):
            for b in range(self.alg.rank_v):
                out.append(self.coframe_section(i, b))
        return out

    def _mv(self, x) -> Multivector:
        return Multivector.section(self.alg.sig, self.alg.rank, x)

    # -- structure operations -------------------------------------------------------

    def pairing(self, e1: CSection, e2: CSection) -> list:
        """Module-valued symmetric pairing eta(X) + xi(Y)."""
        s = self.alg.sig
        out = [s.zero()] * self.alg.rank_v
        for i in range(self.alg.rank):
            v1 = e2.xi.coefficient((i,))
            v2 = e1.xi.coefficient((i,))
            for b in range(self.alg.rank_v):
                out[b] = out[b] + e1.x[i] * v1[b] + e2.x[i] * v2[b]
        return out

    def bracket(self, e1: CSection, e2: CSection) -> CSection:
        alg = self.alg
        x = alg.bracket(e1.x, e2.x)
        xi = alg.lie(e1.x, e2.xi)
        xi = xi - contract(self._mv(e2.x), alg.d(e1.xi))
        xi = xi + contract(self._mv(e1.x), contract(self._mv(e2.x), self.twist))
        return CSection(alg, x, xi)

    def differential(self, fvec) -> CSection:
        """D f: the image of d f under the coisotropic inclusion."""
        return CSection(self.alg, self.alg.zero_section(), self.alg.d_v(fvec))

    # -- axiom defects ----------------------------------------------------------------

    def jacobiator(self, e1: CSection, e2: CSection, e3: CSection) -> CSection:
        t1 = self.bracket(e1, self.bracket(e2, e3))
        t2 = self.bracket(self.bracket(e1, e2), e3)
        t3 = self.bracket(e2, self.bracket(e1, e3))
        return t1 - t2 - t3

    def jacobiator_expected(self, e1: CSection, e2: CSection, e3: CSection) -> CSection:
        """Insertion of the three section legs into dH (zero for a closed twist)."""
        alg = self.alg
        dh = alg.d(self.twist)
        w = contract(self._mv(e3.x), dh)
        w = contract(self._mv(e2.x), w)
        w = contract(self._mv(e1.x), w)
        return CSection(alg, alg.zero_section(), w)

    def anchor_defect(self, e1: CSection, e2: CSection) -> list:
        """Derivation coefficients of a(pi[[e1,e2]]) - [a(pi e1), a(pi e2)]."""
        alg = self.alg
        lhs = alg.anchor_vector(self.bracket(e1, e2).x)
        v1 = alg.anchor_vector(e1.x)
        v2 = alg.anchor_vector(e2.x)
        s = alg.sig
        out = []
        for m in range(s.ncoords):
            acc = s.zero()
            for t in range(s.ncoords):
                xt = s.coords[t]
                acc = acc + v1[t] * v2[m].partial(xt) - v2[t] * v1[m].partial(xt)
            out.append(lhs[m] - acc)
        return out

    def symmetric_defect(self, e: CSection) -> CSection:
        """[[e,e]] - (1/2) D<e,e>."""
        from fractions import Fraction

        half = Fraction(1, 2)
        pe = self.pairing(e, e)
        return self.bracket(e, e) - self.differential(pe).scale(half)

    def invariance_defect(self, e1: CSection, e2: CSection, e3: CSection) -> list:
        """nabla_{pi e1} <e2,e3> - <[[e1,e2]], e3> - <e2, [[e1,e3]]>."""
        alg = self.alg
        lhs = alg.nabla(e1.x, self.pairing(e2, e3))
        r1 = self.pairing(self.bracket(e1, e2), e3)
        r2 = self.pairing(e2, self.bracket(e1, e3))
        return [a - b - c for a, b, c in zip(lhs, r1, r2)]

    # -- splittings ---------------------------------------------------------------------

    def change_splitting(self, beta: AForm) -> "CourantPresentation":
        """Presentation induced by shifting the splitting with the 2-form beta."""
        if not beta.vvalued or beta.degree != 2:
            raise CourantError("splitting shift must be a module-valued 2-form")
        new_twist = self.twist - self.alg.d(beta)
        return CourantPresentation(self.alg, new_twist, allow_nonclosed=True)

    def transport(self, e: CSection, beta: AForm) -> CSection:
        """Coordinate change matching change_splitting: (X, xi) -> (X, xi + i_X beta)."""
        return CSection(self.alg, e.x, e.xi + contract(self._mv(e.x), beta))

    def isotropize(self, sigma) -> tuple:
        """Split off the symmetric part of a non-isotropic splitting.

        sigma lists, per frame section e_i, the module-valued 1-form sigma(e_i).
        Returns (presentation, beta) with beta the antisymmetric part; the new
        presentation is the one induced by the corrected isotropic splitting.
        """
        from fractions import Fraction

        alg = self.alg
        sigma = list(sigma)
        if len(sigma) != alg.rank:
            raise CourantError("sigma must list one 1-form per frame section")
        half = Fraction(1, 2)
        terms = {}
        for i in range(alg.rank):
            for j in range(i + 1, alg.rank):
                vi = sigma[i].coefficient((j,))
                vj = sigma[j].coefficient((i,))
                vec = tuple((a - b) * half for a, b in zip(vi, vj))
                if any(not c.is_zero() for c in vec):
                    terms[(i, j)] = vec
        beta = AForm(alg.sig, alg.rank, alg.rank_v, True, 2, terms)
        return self.change_splitting(beta), beta

    # -- verification sweep ----------------------------------------------------------------

    def verify(self, seed: int = 0, samples: int = 25, frame_sweep: bool = True) -> dict:
        """Exact axiom sweep over the full frame and random sections.

        Every defect is computed exactly; a single nonzero entry marks the
        axiom as violated and is reported in string form.
        """
        from .sampling import SplitMix

        rng = SplitMix(seed)
        alg = self.alg
        frame = self.full_frame() if frame_sweep else []

        def rand_section() -> CSection:
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

        drawn = [rand_section() for _ in range(samples)]
        pool = list(frame) + drawn
        report = {
            "rank": alg.rank,
            "rank_v": alg.rank_v,
            "closed_twist": self.closed_twist,
            "algebroid": alg.validate(),
            "samples": [s.describe() for s in drawn],
            "axioms": {},
        }

        # left-Leibniz property against the dH insertion law
        checked = 0
        violations = []
        matches = 0
        n = len(frame)
        triples = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
        for i, j, k in triples:
            defect = self.jacobiator(frame[i], frame[j], frame[k])
            expected = self.jacobiator_expected(frame[i], frame[j], frame[k])
            checked += 1
            if defect.equals(expected):
                matches += 1
            if not defect.is_zero():
                violations.append(
                    {"triple": [i, j, k], "defect": defect.describe()}
                )
        triples_drawn = []
        for _ in range(samples):
            a, b, c = rand_section(), rand_section(), rand_section()
            triples_drawn.append([a.describe(), b.describe(), c.describe()])
            defect = self.jacobiator(a, b, c)
            expected = self.jacobiator_expected(a, b, c)
            checked += 1
            if defect.equals(expected):
                matches += 1
            if not defect.is_zero():
                violations.append({"triple": "random", "defect": defect.describe()})
        report["axioms"]["leibniz"] = {
            "checked": checked,
            "holds": not violations,
            "defect_matches_insertion": matches == checked,
            "violations": violations[:4],
            "random_triples": triples_drawn,
        }

        # anchor compatibility
        bad = []
        checked = 0
        for e1 in pool:
            for e2 in pool[: max(4, len(frame))]:
                d = self.anchor_defect(e1, e2)
                checked += 1
                if any(not c.is_zero() for c in d):
                    bad.append([str(c) for c in d])
        report["axioms"]["anchor"] = {
            "checked": checked,
            "holds": not bad,
            "violations": bad[:4],
        }

        # symmetric part
        bad = []
        checked = 0
        for e in pool:
            d = self.symmetric_defect(e)
            checked += 1
            if not d.is_zero():
                bad.append(d.describe())
        report["axioms"]["symmetric_part"] = {
            "checked": checked,
            "holds": not bad,
            "violations": bad[:4],
        }

        # pairing invariance
        bad = []
        checked = 0
        short = pool[: max(6, len(frame))]
        for e1 in short:
            for e2 in short[:4]:
                for e3 in short[:4]:
                    d = self.invariance_defect(e1, e2, e3)
                    checked += 1
                    if any(not c.is_zero() for c in d):
                        bad.append([str(c) for c in d])
        report["axioms"]["invariance"] = {
            "checked": checked,
            "holds": not bad,
            "violations": bad[:4],
        }
        report["ok"] = (
            all(
                report["axioms"][k]["holds"]
                for k in ("leibniz", "anchor", "symmetric_part", "invariance")
            )
            and report["axioms"]["leibniz"]["defect_matches_insertion"]
            and report["algebroid"]["jacobi_ok"]
            and report["algebroid"]["anchor_ok"]
            and report["algebroid"]["flat_ok"]
        )
        return report

    def describe(self) -> dict:
        return {
            "algebroid": self.alg.describe(),
            "twist": {
                ",".join(str(i + 1) for i in I): [str(c) for c in vec]
                for I, vec in self.twist.sorted_terms()
            },
            "closed_twist": self.closed_twist,
        }
