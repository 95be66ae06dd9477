"""Sparse exterior algebra over a fixed frame.

Forms and multivector fields are stored as maps from strictly increasing
multi-indices to exact coefficients.  Two coefficient systems coexist:

* AForm carries module-valued (or plain scalar) coefficients: a tuple of ring
  elements per term, one entry per module frame vector.
* FForm and Multivector carry graded coefficients (FScalar): finite Laurent
  sums in the module frame after a rank-one trivialization, the grade counting
  the power of the frame section.

Sign conventions are pinned by the duality pairing

    <a_1 ^ ... ^ a_p , X_1 ^ ... ^ X_q> = det(a_i(X_j))  if p == q else 0,

from which the two contraction operators are derived:

    <xi, iota(P) omega-style>:   <xi, P ^ Q> = <iota_P xi, Q>   (front insertion)
    <xi ^ eta, P> = <xi, breve(eta) P>                          (rear insertion)

so iota_X is the usual interior product eating the first covector factor and
breve(alpha) contracts a multivector from the right.
"""

from __future__ import annotations

from fractions import Fraction

from .ring import GaussRat, RingElem, RingError, RingSignature, coerce_elem


class ExteriorError(ValueError):
    pass


# -- index bookkeeping --------------------------------------------------------


def merge_indices(I: tuple, J: tuple):
    """Merge two strictly increasing tuples; None if they collide.

    Returns (merged, sign) with sign the parity of the shuffle.
    """
    out = []
    sign = 1
    a, b = 0, 0
    while a < len(I) and b < len(J):
        if I[a] == J[b]:
            return None
        if I[a] < J[b]:
            out.append(I[a])
            a += 1
        else:
            # J[b] jumps over the remaining len(I) - a entries of I
            if (len(I) - a) % 2:
                sign = -sign
            out.append(J[b])
            b += 1
    out.extend(I[a:])
    out.extend(J[b:])
    return tuple(out), sign


def insert_index(i: int, I: tuple):
    """Sign and result of e_i ^ e_I (i prepended, then sorted in)."""
    return merge_indices((i,), I)


def contract_front(I: tuple, i: int):
    """Remove i from I with the front-contraction sign (-1)^position."""
    if i not in I:
        return None
    m = I.index(i)
    sign = -1 if m % 2 else 1
    return I[:m] + I[m + 1 :], sign


def contract_front_multi(S: tuple, I: tuple):
    """Iterated front contraction by e_S, innermost factor first."""
    sign = 1
    cur = I
    for s in S:
        hit = contract_front(cur, s)
        if hit is None:
            return None
        cur, sg = hit
        sign *= sg
    return cur, sign


def contract_rear(I: tuple, i: int):
    """Remove i from I with the rear-contraction sign (-1)^(len-1-position)."""
    if i not in I:
        return None
    m = I.index(i)
    sign = -1 if (len(I) - 1 - m) % 2 else 1
    return I[:m] + I[m + 1 :], sign


def contract_rear_multi(S: tuple, I: tuple):
    """Iterated rear contraction by the covector monomial S, last factor first."""
    sign = 1
    cur = I
    for s in reversed(S):
        hit = contract_rear(cur, s)
        if hit is None:
            return None
        cur, sg = hit
        sign *= sg
    return cur, sign


def _check_index(I: tuple, rank: int):
    if any(not isinstance(i, int) or i < 0 or i >= rank for i in I):
        raise ExteriorError(f"frame index out of range in {I}")
    if any(I[k] >= I[k + 1] for k in range(len(I) - 1)):
        raise ExteriorError(f"multi-index {I} is not strictly increasing")


# -- graded coefficients ------------------------------------------------------


class FScalar:
    """Finite Laurent sum over the trivialized module frame.

    Grade k holds the coefficient of the k-th power of the frame section; the
    grade-zero part is an ordinary function.
    """

    __slots__ = ("sig", "parts")

    def __init__(self, sig: RingSignature, parts: dict):
        clean = {}
        for k, elem in parts.items():
            if not isinstance(k, int):
                raise ExteriorError("grades must be integers")
            elem = coerce_elem(sig, elem)
            if not elem.is_zero():
                clean[k] = elem
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "parts", clean)

    def __setattr__(self, name, value):
        raise AttributeError("FScalar is immutable")

    @staticmethod
    def zero(sig: RingSignature) -> "FScalar":
        return FScalar(sig, {})

    @staticmethod
    def of(elem: RingElem, grade: int = 0) -> "FScalar":
        return FScalar(elem.sig, {grade: elem})

    @staticmethod
    def coerce(sig: RingSignature, value) -> "FScalar":
        if isinstance(value, FScalar):
            if value.sig != sig:
                raise ExteriorError("graded coefficient from a different ring")
            return value
        return FScalar(sig, {0: coerce_elem(sig, value)})

    def is_zero(self) -> bool:
        return not self.parts

    def __bool__(self):
        return bool(self.parts)

    def get(self, k: int) -> RingElem:
        return self.parts.get(k, self.sig.zero())

    def grades(self):
        return sorted(self.parts)

    def pure_grade(self) -> int | None:
        """The single grade present, 0 for the zero element, None if mixed."""
        if not self.parts:
            return 0
        if len(self.parts) == 1:
            return next(iter(self.parts))
        return None

    def grade_zero_elem(self) -> RingElem:
        if any(k != 0 for k in self.parts):
            raise ExteriorError("coefficient has nonzero grades")
        return self.get(0)

    def __add__(self, other):
        other = FScalar.coerce(self.sig, other)
        parts = dict(self.parts)
        for k, e in other.parts.items():
            s = parts.get(k, self.sig.zero()) + e
            if s.is_zero():
                parts.pop(k, None)
            else:
                parts[k] = s
        return FScalar(self.sig, parts)

    __radd__ = __add__

    def __neg__(self):
        return FScalar(self.sig, {k: -e for k, e in self.parts.items()})

    def __sub__(self, other):
        return self + (-FScalar.coerce(self.sig, other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussRat, RingElem, str)):
            other = FScalar.coerce(self.sig, other)
        if not isinstance(other, FScalar):
            return NotImplemented
        out: dict = {}
        for k1, e1 in self.parts.items():
            for k2, e2 in other.parts.items():
                k = k1 + k2
                s = out.get(k, self.sig.zero()) + e1 * e2
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        return FScalar(self.sig, out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "FScalar":
        return FScalar(self.sig, {g + k: e for g, e in self.parts.items()})

    def conjugate(self) -> "FScalar":
        return FScalar(self.sig, {k: e.conjugate() for k, e in self.parts.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussRat, RingElem, str)):
            other = FScalar.coerce(self.sig, other)
        if not isinstance(other, FScalar):
            return NotImplemented
        return self.sig == other.sig and self.parts == other.parts

    def to_str(self, frame_name: str = "u") -> str:
        if not self.parts:
            return "0"
        bits = []
        for k in sorted(self.parts):
            e = self.parts[k]
            if k == 0:
                bits.append(f"({e})")
            else:
                bits.append(f"({e})*{frame_name}^{k}")
        return " + ".join(bits)

    def __repr__(self):
        return f"FScalar({self.to_str()})"


# -- module-valued forms ------------------------------------------------------


class AForm:
    """Alternating form on the frame with module-vector (or scalar) values.

    vvalued distinguishes genuine module-valued forms from plain scalar forms;
    a wedge of two module-valued forms is rejected since the module carries no
    product.
    """

    __slots__ = ("sig", "rank", "rank_v", "vvalued", "degree", "terms")

    def __init__(self, sig, rank, rank_v, vvalued, degree, terms):
        width = rank_v if vvalued else 1
        if not 0 <= degree <= rank:
            if terms:
                raise ExteriorError(f"degree {degree} out of range for rank {rank}")
        clean = {}
        for I, vec in terms.items():
            I = tuple(I)
            _check_index(I, rank)
            if len(I) != degree:
                raise ExteriorError("term degree does not match form degree")
            vec = tuple(coerce_elem(sig, x) for x in vec)
            if len(vec) != width:
                raise ExteriorError(
                    f"coefficient vector has {len(vec)} entries, expected {width}"
                )
            if any(not x.is_zero() for x in vec):
                clean[I] = vec
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "rank_v", rank_v)
        object.__setattr__(self, "vvalued", vvalued)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("AForm is immutable")

    @staticmethod
    def zero(sig, rank, rank_v, vvalued, degree) -> "AForm":
        return AForm(sig, rank, rank_v, vvalued, degree, {})

    @property
    def width(self) -> int:
        return self.rank_v if self.vvalued else 1

    def _zero_vec(self):
        return (self.sig.zero(),) * self.width

    def _compat(self, other: "AForm", same_degree=True):
        if (
            self.sig != other.sig
            or self.rank != other.rank
            or self.rank_v != other.rank_v
        ):
            raise ExteriorError("forms live over different frames")
        if self.vvalued != other.vvalued:
            raise ExteriorError("cannot mix scalar and module-valued forms")
        if same_degree and self.degree != other.degree:
            raise ExteriorError("cannot add forms of different degree")

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, AForm):
            return NotImplemented
        return self.equals(other)

    def coefficient(self, I) -> tuple:
        return self.terms.get(tuple(I), self._zero_vec())

    def add(self, other: "AForm") -> "AForm":
        self._compat(other)
        terms = dict(self.terms)
        for I, vec in other.terms.items():
            cur = terms.get(I, self._zero_vec())
            terms[I] = tuple(a + b for a, b in zip(cur, vec))
        return AForm(self.sig, self.rank, self.rank_v, self.vvalued, self.degree, terms)

    __add__ = add

    def __neg__(self):
        return AForm(
            self.sig,
            self.rank,
            self.rank_v,
            self.vvalued,
            self.degree,
            {I: tuple(-x for x in vec) for I, vec in self.terms.items()},
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "AForm":
        c = coerce_elem(self.sig, c) if not isinstance(c, RingElem) else c
        return AForm(
            self.sig,
            self.rank,
            self.rank_v,
            self.vvalued,
            self.degree,
            {I: tuple(x * c for x in vec) for I, vec in self.terms.items()},
        )

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def wedge(self, other: "AForm") -> "AForm":
        if self.sig != other.sig or self.rank != other.rank or self.rank_v != other.rank_v:
            raise ExteriorError("forms live over different frames")
        if self.vvalued and other.vvalued:
            raise ExteriorError("cannot wedge two module-valued forms")
        vval = self.vvalued or other.vvalued
        deg = self.degree + other.degree
        out: dict = {}
        width = self.rank_v if vval else 1
        zero = (self.sig.zero(),) * width
        for I, u in self.terms.items():
            for J, w in other.terms.items():
                hit = merge_indices(I, J)
                if hit is None:
                    continue
                K, sign = hit
                if self.vvalued:
                    vec = tuple(x * w[0] for x in u)
                else:
                    vec = tuple(u[0] * y for y in w)
                if sign < 0:
                    vec = tuple(-x for x in vec)
                cur = out.get(K, zero)
                out[K] = tuple(a + b for a, b in zip(cur, vec))
        if deg > self.rank:
            return AForm.zero(self.sig, self.rank, self.rank_v, vval, 0)
        return AForm(self.sig, self.rank, self.rank_v, vval, deg, out)

    def eval_frame(self, indices) -> tuple:
        """Alternating evaluation on a (possibly unsorted) index sequence."""
        indices = tuple(indices)
        if len(indices) != self.degree:
            raise ExteriorError("wrong number of arguments")
        if len(set(indices)) != len(indices):
            return self._zero_vec()
        order = sorted(range(len(indices)), key=lambda k: indices[k])
        sign = _perm_sign(order)
        vec = self.terms.get(tuple(sorted(indices)))
        if vec is None:
            return self._zero_vec()
        return vec if sign > 0 else tuple(-x for x in vec)

    def map_coeffs(self, fn) -> "AForm":
        return AForm(
            self.sig,
            self.rank,
            self.rank_v,
            self.vvalued,
            self.degree,
            {I: tuple(fn(x) for x in vec) for I, vec in self.terms.items()},
        )

    def conjugate(self) -> "AForm":
        return self.map_coeffs(lambda x: x.conjugate())

    def equals(self, other: "AForm") -> bool:
        self._compat(other, same_degree=False)
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.terms == other.terms

    def sorted_terms(self):
        return sorted(self.terms.items())

    def to_str(self, covector="dx", sep="^") -> str:
        if not self.terms:
            return "0"
        bits = []
        for I, vec in self.sorted_terms():
            mono = sep.join(f"{covector}{i + 1}" for i in I) or "1"
            coeff = ",".join(str(x) for x in vec)
            bits.append(f"({coeff})*{mono}")
        return " + ".join(bits)

    def __repr__(self):
        kind = "V" if self.vvalued else "scalar"
        return f"AForm[{kind},deg={self.degree}]({self.to_str()})"


def _perm_sign(order) -> int:
    sign = 1
    seen = [False] * len(order)
    for start in range(len(order)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = order[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class _Graded:
    """Shared machinery for FForm / Multivector (graded coefficients)."""

    __slots__ = ("sig", "rank", "degree", "terms")

    def __init__(self, sig, rank, degree, terms):
        if not 0 <= degree <= rank and terms:
            raise ExteriorError(f"degree {degree} out of range for rank {rank}")
        clean = {}
        for I, coeff in terms.items():
            I = tuple(I)
            _check_index(I, rank)
            if len(I) != degree:
                raise ExteriorError("term degree does not match declared degree")
            coeff = FScalar.coerce(sig, coeff)
            if coeff:
                clean[I] = coeff
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("graded objects are immutable")

    @classmethod
    def zero(cls, sig, rank, degree):
        return cls(sig, rank, degree, {})

    def _compat(self, other, same_degree=True):
        if type(self) is not type(other):
            raise ExteriorError("mixing forms with multivectors")
        if self.sig != other.sig or self.rank != other.rank:
            raise ExteriorError("objects live over different frames")
        if same_degree and self.degree != other.degree and self.terms and other.terms:
            raise ExteriorError("degree mismatch")

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, I) -> FScalar:
        return self.terms.get(tuple(I), FScalar.zero(self.sig))

    def __add__(self, other):
        self._compat(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ExteriorError("cannot add different degrees")
        terms = dict(self.terms)
        for I, c in other.terms.items():
            terms[I] = terms.get(I, FScalar.zero(self.sig)) + c
        return type(self)(self.sig, self.rank, self.degree, terms)

    def __neg__(self):
        return type(self)(
            self.sig, self.rank, self.degree, {I: -c for I, c in self.terms.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = FScalar.coerce(self.sig, c)
        return type(self)(
            self.sig, self.rank, self.degree, {I: v * c for I, v in self.terms.items()}
        )

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def wedge(self, other):
        self._compat(other, same_degree=False)
        deg = self.degree + other.degree
        if deg > self.rank:
            return type(self).zero(self.sig, self.rank, 0)
        out: dict = {}
        for I, u in self.terms.items():
            for J, w in other.terms.items():
                hit = merge_indices(I, J)
                if hit is None:
                    continue
                K, sign = hit
                c = u * w
                if sign < 0:
                    c = -c
                out[K] = out.get(K, FScalar.zero(self.sig)) + c
        return type(self)(self.sig, self.rank, deg, out)

    def conjugate(self):
        return type(self)(
            self.sig,
            self.rank,
            self.degree,
            {I: c.conjugate() for I, c in self.terms.items()},
        )

    def equals(self, other) -> bool:
        self._compat(other, same_degree=False)
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return self.equals(other)

    def sorted_terms(self):
        return sorted(self.terms.items())

    def pure_grade(self) -> int | None:
        grade = None
        for c in self.terms.values():
            g = c.pure_grade()
            if g is None:
                return None
            if grade is None:
                grade = g
            elif grade != g:
                return None
        return 0 if grade is None else grade


class Multivector(_Graded):
    """Graded-coefficient multivector field over the frame."""

    @staticmethod
    def section(sig, rank, coeffs) -> "Multivector":
        """Degree-one, grade-zero multivector from plain ring coefficients."""
        terms = {}
        for i, c in enumerate(coeffs):
            c = coerce_elem(sig, c)
            if not c.is_zero():
                terms[(i,)] = FScalar.of(c)
        return Multivector(sig, rank, 1, terms)

    @staticmethod
    def frame(sig, rank, i) -> "Multivector":
        return Multivector(sig, rank, 1, {(i,): FScalar.of(sig.one())})

    def section_coeffs(self) -> list:
        """Plain ring coefficients of a degree-one, grade-zero multivector."""
        if self.degree != 1:
            raise ExteriorError("not a degree-one multivector")
        out = [self.sig.zero()] * self.rank
        for (i,), c in self.terms.items():
            out[i] = c.grade_zero_elem()
        return out

    def to_str(self):
        if not self.terms:
            return "0"
        bits = []
        for I, c in self.sorted_terms():
            mono = "^".join(f"e{i + 1}" for i in I) or "1"
            bits.append(f"[{c.to_str()}]*{mono}")
        return " + ".join(bits)

    def __repr__(self):
        return f"Multivector[deg={self.degree}]({self.to_str()})"


class FForm(_Graded):
    """Graded-coefficient alternating form over the frame."""

    @staticmethod
    def covector_frame(sig, rank, k, grade=0) -> "FForm":
        return FForm(sig, rank, 1, {(k,): FScalar(sig, {grade: sig.one()})})

    def to_str(self):
        if not self.terms:
            return "0"
        bits = []
        for I, c in self.sorted_terms():
            mono = "^".join(f"f{i + 1}" for i in I) or "1"
            bits.append(f"[{c.to_str()}]*{mono}")
        return " + ".join(bits)

    def __repr__(self):
        return f"FForm[deg={self.degree}]({self.to_str()})"


# -- conversions --------------------------------------------------------------


def aform_to_fform(w: AForm, grade: int | None = None) -> FForm:
    """View an AForm as a graded form after a rank-one trivialization.

    Module-valued forms sit in grade +1 by default, scalar forms in grade 0.
    """
    if w.vvalued:
        if w.rank_v != 1:
            raise ExteriorError("trivialization requires a rank-one module")
        g = 1 if grade is None else grade
    else:
        g = 0 if grade is None else grade
    return FForm(
        w.sig,
        w.rank,
        w.degree,
        {I: FScalar(w.sig, {g: vec[0]}) for I, vec in w.terms.items()},
    )


def fform_to_aform(w: FForm, rank_v: int = 1, vvalued: bool = True) -> AForm:
    grade = 1 if vvalued else 0
    terms = {}
    for I, c in w.terms.items():
        if set(c.grades()) - {grade}:
            raise ExteriorError("graded form is not homogeneous of the expected grade")
        terms[I] = (c.get(grade),)
    return AForm(w.sig, w.rank, rank_v, vvalued, w.degree, terms)


# -- the four spec operations -------------------------------------------------


def wedge(a, b):
    """Graded-commutative product; at most one AForm factor may be module-valued."""
    if isinstance(a, AForm) and isinstance(b, AForm):
        return a.wedge(b)
    if isinstance(a, type(b)) and isinstance(a, _Graded):
        return a.wedge(b)
    raise ExteriorError("wedge requires two forms or two multivectors of one kind")


def contract(X: Multivector, w: AForm) -> AForm:
    """Interior product of a plain section into a module-valued form."""
    if X.degree != 1:
        raise ExteriorError("contraction direction must have degree one")
    coeffs = X.section_coeffs()
    out: dict = {}
    deg = max(w.degree - 1, 0)
    if w.degree == 0:
        return AForm.zero(w.sig, w.rank, w.rank_v, w.vvalued, 0)
    for I, vec in w.terms.items():
        for m, i in enumerate(I):
            c = coeffs[i]
            if c.is_zero():
                continue
            K = I[:m] + I[m + 1 :]
            scaled = tuple(x * c for x in vec)
            if m % 2:
                scaled = tuple(-x for x in scaled)
            cur = out.get(K)
            out[K] = (
                scaled
                if cur is None
                else tuple(a + b for a, b in zip(cur, scaled))
            )
    return AForm(w.sig, w.rank, w.rank_v, w.vvalued, deg, out)


def iota(P: Multivector, w: FForm) -> FForm:
    """Interior product of a graded multivector into a graded form.

    Derived from the duality pairing: <xi, P ^ Q> = <iota(P) xi, Q>, hence
    iota of a decomposable contracts its first factor innermost.
    """
    if P.degree > w.degree:
        return FForm.zero(w.sig, w.rank, max(w.degree - P.degree, 0))
    deg = w.degree - P.degree
    out: dict = {}
    for S, c in P.terms.items():
        for I, v in w.terms.items():
            hit = contract_front_multi(S, I)
            if hit is None:
                continue
            K, sign = hit
            val = c * v
            if sign < 0:
                val = -val
            out[K] = out.get(K, FScalar.zero(w.sig)) + val
    return FForm(w.sig, w.rank, deg, out)


def breve_contract(alpha: FForm, P: Multivector) -> Multivector:
    """Rear contraction of a multivector by a form: <xi ^ alpha, P> = <xi, breve(alpha) P>."""
    if alpha.degree > P.degree:
        return Multivector.zero(P.sig, P.rank, max(P.degree - alpha.degree, 0))
    deg = P.degree - alpha.degree
    out: dict = {}
    for A, c in alpha.terms.items():
        for J, v in P.terms.items():
            hit = contract_rear_multi(A, J)
            if hit is None:
                continue
            K, sign = hit
            val = c * v
            if sign < 0:
                val = -val
            out[K] = out.get(K, FScalar.zero(P.sig)) + val
    return Multivector(P.sig, P.rank, deg, out)


def pair_eval(w, P: Multivector) -> FScalar:
    """Determinant pairing of a degree-p form with a degree-q multivector.

    Zero unless p == q; on increasing basis monomials the pairing is the
    Kronecker delta, so the sparse evaluation is a diagonal sum.
    """
    if isinstance(w, AForm):
        w = aform_to_fform(w)
    if w.sig != P.sig or w.rank != P.rank:
        raise ExteriorError("pairing across different frames")
    total = FScalar.zero(w.sig)
    if w.degree != P.degree:
        return total
    for I, c in w.terms.items():
        v = P.terms.get(I)
        if v is not None:
            total = total + c * v
    return total
