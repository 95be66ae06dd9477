"""Exact coefficient arithmetic.

The coefficient ring is a polynomial ring over the Gaussian rationals in a
finite set of coordinates, extended by formal exponential generators with
Laurent (integer, possibly negative) exponents.  Each exponential generator E
carries a constant derivative row (c_1, ..., c_n) declaring dE/dx_j = c_j * E,
which makes partial derivatives close on the ring.  All arithmetic is exact;
no floats ever appear.

Elements are kept in canonical form: a sparse map from monomials (a pair of
exponent tuples, coordinates then exponentials) to nonzero Gaussian-rational
coefficients.  Equality is therefore literal dict equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


class RingError(ValueError):
    pass


class SignatureMismatch(RingError):
    pass


class ParseError(RingError):
    """Raised on malformed ring-element text; carries the character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos
        self.message = message


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise RingError(f"expected an exact rational, got {type(x).__name__}")


def _frac_str(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GaussRat:
    """A Gaussian rational a + b*i with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @staticmethod
    def coerce(x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussRat(x)
        raise RingError(f"cannot coerce {type(x).__name__} to a Gaussian rational")

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussRat.coerce(other) - self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __mul__(self, other):
        other = GaussRat.coerce(other)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "GaussRat":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussRat.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) * self.inverse()

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def __eq__(self, other):
        try:
            other = GaussRat.coerce(other)
        except RingError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def to_str(self) -> str:
        if self.im == 0:
            return _frac_str(self.re)
        if self.im == 1:
            ipart = "i"
        elif self.im == -1:
            ipart = "-i"
        else:
            ipart = f"{_frac_str(self.im)}*i"
        if self.re == 0:
            return ipart
        if ipart.startswith("-"):
            return f"{_frac_str(self.re)}-{ipart[1:]}"
        return f"{_frac_str(self.re)}+{ipart}"

    def __repr__(self):
        return f"GaussRat({self.to_str()})"


GR_ZERO = GaussRat(0)
GR_ONE = GaussRat(1)
GR_I = GaussRat(0, 1)


@dataclass(frozen=True)
class ExpGen:
    """Formal exponential generator with constant derivative row."""

    name: str
    row: tuple[Fraction, ...]


@dataclass(frozen=True)
class RingSignature:
    """Names the coordinates and exponential generators of a coefficient ring.

    mode selects the scalar field used by the parser and validators:
    "gaussian" admits the imaginary unit, "rational" rejects it.  The mode is
    deliberately excluded from equality so that real and complexified views of
    the same ring interoperate.
    """

    coords: tuple[str, ...]
    exps: tuple[ExpGen, ...] = ()
    # mode excluded from comparisons: same generators -> same ring
    mode: str = field(default="gaussian", compare=False)

    def __post_init__(self):
        if self.mode not in ("gaussian", "rational"):
            raise RingError(f"unknown scalar mode {self.mode!r}")
        names = list(self.coords) + [e.name for e in self.exps]
        if len(set(names)) != len(names):
            raise RingError("coordinate/exponential names must be distinct")
        for nm in names:
            if not nm or not (nm[0].isalpha() or nm[0] == "_"):
                raise RingError(f"invalid generator name {nm!r}")
            if nm == "i":
                raise RingError("'i' is reserved for the imaginary unit")
        for e in self.exps:
            if len(e.row) != len(self.coords):
                raise RingError(
                    f"derivative row of {e.name!r} must have {len(self.coords)} entries"
                )

    @property
    def ncoords(self) -> int:
        return len(self.coords)

    @property
    def nexps(self) -> int:
        return len(self.exps)

    def coord_index(self, name: str) -> int:
        try:
            return self.coords.index(name)
        except ValueError:
            raise RingError(f"unknown coordinate {name!r}") from None

    def exp_index(self, name: str) -> int:
        for k, e in enumerate(self.exps):
            if e.name == name:
                return k
        raise RingError(f"unknown exponential generator {name!r}")

    def _key(self, cdeg, edeg):
        return (tuple(cdeg), tuple(edeg))

    def elem(self, terms: dict) -> "RingElem":
        return RingElem(self, terms)

    def zero(self) -> "RingElem":
        return RingElem(self, {})

    def one(self) -> "RingElem":
        return self.const(1)

    def const(self, c) -> "RingElem":
        c = GaussRat.coerce(c)
        key = ((0,) * self.ncoords, (0,) * self.nexps)
        return RingElem(self, {key: c} if c else {})

    def coord(self, name: str) -> "RingElem":
        j = self.coord_index(name)
        cdeg = tuple(1 if k == j else 0 for k in range(self.ncoords))
        return RingElem(self, {(cdeg, (0,) * self.nexps): GR_ONE})

    def exp_gen(self, name: str) -> "RingElem":
        j = self.exp_index(name)
        edeg = tuple(1 if k == j else 0 for k in range(self.nexps))
        return RingElem(self, {((0,) * self.ncoords, edeg): GR_ONE})

    def parse(self, text: str) -> "RingElem":
        return _Parser(self, text).run()

    def monomial_str(self, key) -> str:
        cdeg, edeg = key
        parts = []
        for name, d in zip(self.coords, cdeg):
            if d == 1:
                parts.append(name)
            elif d != 0:
                parts.append(f"{name}^{d}")
        for e, d in zip(self.exps, edeg):
            if d == 1:
                parts.append(e.name)
            elif d != 0:
                parts.append(f"{e.name}^{d}")
        return "*".join(parts)


class RingElem:
    """Sparse exact element of the coefficient ring attached to a signature."""

    __slots__ = ("sig", "terms")

    def __init__(self, sig: RingSignature, terms: dict):
        clean = {}
        nc, ne = sig.ncoords, sig.nexps
        for key, coeff in terms.items():
            cdeg, edeg = key
            if len(cdeg) != nc or len(edeg) != ne:
                raise RingError("monomial arity does not match signature")
            if any(d < 0 for d in cdeg):
                raise RingError("coordinate exponents must be nonnegative")
            coeff = GaussRat.coerce(coeff)
            if coeff:
                clean[(tuple(cdeg), tuple(edeg))] = coeff
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("RingElem is immutable")

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        if not self.terms:
            return True
        if len(self.terms) != 1:
            return False
        (cdeg, edeg), _ = next(iter(self.terms.items()))
        return not any(cdeg) and not any(edeg)

    def constant_value(self) -> GaussRat:
        if self.is_zero():
            return GR_ZERO
        if not self.is_constant():
            raise RingError("element is not constant")
        return next(iter(self.terms.values()))

    def is_real(self) -> bool:
        return all(c.im == 0 for c in self.terms.values())

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "RingElem"):
        if self.sig != other.sig:
            raise SignatureMismatch("ring elements come from different signatures")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            other = self.sig.const(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        self._check(other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            s = terms.get(key, GR_ZERO) + c
            if s:
                terms[key] = s
            else:
                terms.pop(key, None)
        return RingElem(self.sig, terms)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            other = self.sig.const(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RingElem(self.sig, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            c = GaussRat.coerce(other)
            if not c:
                return self.sig.zero()
            return RingElem(self.sig, {k: v * c for k, v in self.terms.items()})
        if not isinstance(other, RingElem):
            return NotImplemented
        self._check(other)
        out: dict = {}
        for (c1, e1), a in self.terms.items():
            for (c2, e2), b in other.terms.items():
                key = (
                    tuple(x + y for x, y in zip(c1, c2)),
                    tuple(x + y for x, y in zip(e1, e2)),
                )
                s = out.get(key, GR_ZERO) + a * b
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return RingElem(self.sig, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            return self * GaussRat.coerce(other).inverse()
        if isinstance(other, RingElem):
            return self * other.unit_inverse()
        return NotImplemented

    def unit_inverse(self) -> "RingElem":
        """Inverse of a unit: one term, no coordinate part (Laurent monomial)."""
        if len(self.terms) != 1:
            raise RingError("only single-term elements are invertible")
        (cdeg, edeg), c = next(iter(self.terms.items()))
        if any(cdeg):
            raise RingError("coordinate monomials are not invertible")
        return RingElem(
            self.sig, {(cdeg, tuple(-d for d in edeg)): c.inverse()}
        )

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise RingError("exponents must be integers")
        if n < 0:
            return self.unit_inverse() ** (-n)
        out = self.sig.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            other = self.sig.const(other)
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.sig == other.sig and self.terms == other.terms

    # -- calculus -----------------------------------------------------------

    def partial(self, var: str) -> "RingElem":
        """Exact partial derivative with respect to a coordinate."""
        j = self.sig.coord_index(var)
        out: dict = {}
        for (cdeg, edeg), c in self.terms.items():
            if cdeg[j]:
                key = (
                    tuple(d - 1 if k == j else d for k, d in enumerate(cdeg)),
                    edeg,
                )
                s = out.get(key, GR_ZERO) + c * cdeg[j]
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
            for m, e in enumerate(self.sig.exps):
                if edeg[m] and e.row[j]:
                    s = out.get((cdeg, edeg), GR_ZERO) + c * (edeg[m] * e.row[j])
                    if s:
                        out[(cdeg, edeg)] = s
                    else:
                        out.pop((cdeg, edeg), None)
        return RingElem(self.sig, out)

    def conjugate(self) -> "RingElem":
        return RingElem(self.sig, {k: c.conjugate() for k, c in self.terms.items()})

    # -- normal-form helpers (used by the fraction-field linear algebra) ----

    def monomial_gcd(self):
        """Componentwise minimum of all exponent vectors, or None if zero."""
        if not self.terms:
            return None
        keys = list(self.terms)
        cmin = tuple(min(k[0][j] for k in keys) for j in range(self.sig.ncoords))
        emin = tuple(min(k[1][j] for k in keys) for j in range(self.sig.nexps))
        return (cmin, emin)

    def rational_content(self) -> Fraction:
        """Positive rational c such that self/c has coprime integer parts."""
        nums: list[int] = []
        dens: list[int] = []
        for c in self.terms.values():
            for q in (c.re, c.im):
                if q:
                    nums.append(abs(q.numerator))
                    dens.append(q.denominator)
        if not nums:
            return Fraction(1)
        g = 0
        for n in nums:
            g = math.gcd(g, n)
        l = 1
        for d in dens:
            l = l * d // math.gcd(l, d)
        return Fraction(g, l)

    def shift_monomial(self, key, negate=False) -> "RingElem":
        cdeg0, edeg0 = key
        if negate:
            cdeg0 = tuple(-d for d in cdeg0)
            edeg0 = tuple(-d for d in edeg0)
        out = {}
        for (cdeg, edeg), c in self.terms.items():
            out[
                (
                    tuple(a + b for a, b in zip(cdeg, cdeg0)),
                    tuple(a + b for a, b in zip(edeg, edeg0)),
                )
            ] = c
        return RingElem(self.sig, out)

    def _lead(self):
        return max(self.terms)

    def exact_div(self, g: "RingElem"):
        """Return self/g if g divides exactly, else None."""
        self._check(g)
        if g.is_zero():
            raise ZeroDivisionError("division by zero ring element")
        if self.is_zero():
            return self.sig.zero()
        mf, me = self.monomial_gcd(), g.monomial_gcd()
        if any(a < b for a, b in zip(mf[0], me[0])):
            return None
        shift = (
            tuple(a - b for a, b in zip(mf[0], me[0])),
            tuple(a - b for a, b in zip(mf[1], me[1])),
        )
        f0 = self.shift_monomial(mf, negate=True)
        g0 = g.shift_monomial(me, negate=True)
        # classic multivariate division with lex order; exponents now >= 0
        quot = self.sig.zero()
        rem = f0
        glead = g0._lead()
        gc = g0.terms[glead]
        while not rem.is_zero():
            rlead = rem._lead()
            if any(a < b for a, b in zip(rlead[0], glead[0])) or any(
                a < b for a, b in zip(rlead[1], glead[1])
            ):
                return None
            key = (
                tuple(a - b for a, b in zip(rlead[0], glead[0])),
                tuple(a - b for a, b in zip(rlead[1], glead[1])),
            )
            t = RingElem(self.sig, {key: rem.terms[rlead] / gc})
            quot = quot + t
            rem = rem - t * g0
        return quot.shift_monomial(shift)

    # -- display ------------------------------------------------------------

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for key in sorted(self.terms, reverse=True):
            c = self.terms[key]
            mono = self.sig.monomial_str(key)
            cs = c.to_str()
            if not mono:
                chunks.append(cs)
            elif cs == "1":
                chunks.append(mono)
            elif cs == "-1":
                chunks.append(f"-{mono}")
            else:
                if ("+" in cs[1:]) or ("-" in cs[1:]):
                    cs = f"({cs})"
                chunks.append(f"{cs}*{mono}")
        out = chunks[0]
        for ch in chunks[1:]:
            if ch.startswith("-"):
                out += f" - {ch[1:]}"
            else:
                out += f" + {ch}"
        return out

    __str__ = to_str

    def __repr__(self):
        return f"RingElem({self.to_str()})"


def coerce_elem(sig: RingSignature, value) -> RingElem:
    """Accept a RingElem, an exact scalar, or parseable text."""
    if isinstance(value, RingElem):
        if value.sig != sig:
            raise SignatureMismatch("ring element from a different signature")
        return value
    if isinstance(value, (int, Fraction, GaussRat)):
        return sig.const(value)
    if isinstance(value, str):
        return sig.parse(value)
    raise RingError(f"cannot interpret {type(value).__name__} as a ring element")


# -- text syntax -------------------------------------------------------------
#
#   expr   := term (('+' | '-') term)*
#   term   := ['-'] factor (('*' | '/') factor)*
#   factor := atom ['^' ['-'] digits]
#   atom   := digits ['/' digits] | 'i' | name | '(' expr ')'
#
# Multiplication is always explicit.  '/' admits exact rationals and unit
# (Laurent-monomial) divisors only.  'i' is rejected for rational-mode rings.


class _Parser:
    def __init__(self, sig: RingSignature, text: str):
        self.sig = sig
        self.text = text
        self.pos = 0

    def run(self) -> RingElem:
        value = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise ParseError(f"unexpected character {self.text[self.pos]!r}", self.pos)
        return value

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expr(self) -> RingElem:
        value = self.term()
        while True:
            ch = self.peek()
            if ch == "+":
                self.pos += 1
                value = value + self.term()
            elif ch == "-":
                self.pos += 1
                value = value - self.term()
            else:
                return value

    def term(self) -> RingElem:
        negate = False
        while self.peek() == "-":
            self.pos += 1
            negate = not negate
        value = self.factor()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                value = value * self.factor()
            elif ch == "/":
                at = self.pos
                self.pos += 1
                rhs = self.factor()
                try:
                    value = value / rhs
                except RingError:
                    raise ParseError("division only by rationals or units", at) from None
            else:
                break
        return -value if negate else value

    def factor(self) -> RingElem:
        value = self.atom()
        if self.peek() == "^":
            at = self.pos
            self.pos += 1
            n = self.signed_int()
            try:
                value = value**n
            except RingError as exc:
                raise ParseError(str(exc), at) from None
        return value

    def signed_int(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        digits = self.digits("exponent")
        return -digits if self.text[start] == "-" else digits

    def digits(self, what: str) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError(f"expected {what}", start)
        return int(self.text[start : self.pos])

    def atom(self) -> RingElem:
        ch = self.peek()
        at = self.pos
        if ch == "(":
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return value
        if ch.isdigit():
            num = self.digits("number")
            save = self.pos
            if self.peek() == "/":
                self.pos += 1
                if self.peek().isdigit():
                    den = self.digits("denominator")
                    if den == 0:
                        raise ParseError("zero denominator", save)
                    return self.sig.const(Fraction(num, den))
                self.pos = save  # a '/' belonging to the enclosing term
            return self.sig.const(num)
        if ch.isalpha() or ch == "_":
            name = self.name()
            if name == "i":
                if self.sig.mode == "rational":
                    raise ParseError("imaginary unit not allowed in a rational ring", at)
                return self.sig.const(GR_I)
            try:
                return self.sig.coord(name)
            except RingError:
                pass
            try:
                return self.sig.exp_gen(name)
            except RingError:
                raise ParseError(f"unknown name {name!r}", at) from None
        raise ParseError("expected a number, name or '('", at)

    def name(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        return self.text[start : self.pos]
