"""Exact multivariate polynomials over QQ.

Arithmetic is delegated to sympy's sparse ``PolyElement`` (graded lex order);
this module fixes the variable bookkeeping and the textual form.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from .errors import SymcoreError

Rational = Fraction


_NAMES: dict[int, tuple[str, ...]] = {}


@lru_cache(maxsize=None)
def poly_ring(names: tuple[str, ...]) -> PolyRing:
    R = PolyRing(names, QQ, grlex)
    _NAMES[id(R)] = names
    return R


def to_qq(value) -> "QQ.dtype":
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


def to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def merge_names(a: Sequence[str], b: Sequence[str]) -> tuple[str, ...]:
    """Left operand's order first, then the new names of the right operand."""
    if tuple(a) == tuple(b):
        return tuple(a)
    seen = set(a)
    return tuple(a) + tuple(n for n in b if n not in seen)


class Poly:
    """Polynomial with rational coefficients in an ordered tuple of variables.

    Terms are kept in graded lexicographic order with respect to the declared
    variable order. Binary operations on polynomials over different variable
    tuples first lift both operands to the merged tuple.
    """

    __slots__ = ("_p",)

    def __init__(self, element):
        self._p = element

    # construction ---------------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str] = ()) -> "Poly":
        return cls(poly_ring(tuple(variables)).zero)

    @classmethod
    def one(cls, variables: Sequence[str] = ()) -> "Poly":
        return cls(poly_ring(tuple(variables)).one)

    @classmethod
    def constant(cls, value, variables: Sequence[str] = ()) -> "Poly":
        R = poly_ring(tuple(variables))
        return cls(R.ground_new(to_qq(value)))

    @classmethod
    def variable(cls, name: str, variables: Sequence[str] | None = None) -> "Poly":
        names = tuple(variables) if variables is not None else (name,)
        if name not in names:
            names = names + (name,)
        R = poly_ring(names)
        return cls(R.gens[names.index(name)])

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, ...], object], variables: Sequence[str]) -> "Poly":
        R = poly_ring(tuple(variables))
        acc: dict = {}
        for mono, c in terms.items():
            mono = tuple(mono)
            if len(mono) != len(variables):
                raise SymcoreError("exponent vector length does not match variables")
            acc[mono] = acc.get(mono, QQ.zero) + to_qq(c)
        return cls(R.from_dict({m: c for m, c in acc.items() if c}))

    # structure ------------------------------------------------------------

    @property
    def element(self):
        return self._p

    @property
    def variables(self) -> tuple[str, ...]:
        R = self._p.ring
        names = _NAMES.get(id(R))
        if names is None:
            names = tuple(str(s) for s in R.symbols)
        return names

    @property
    def ring(self) -> PolyRing:
        return self._p.ring

    def lift(self, variables: Sequence[str]) -> "Poly":
        names = tuple(variables)
        if names == self.variables:
            return self
        missing = self.free_symbols() - set(names)
        if missing:
            raise SymcoreError(f"cannot drop variables in use: {sorted(missing)}")
        return Poly(self._p.set_ring(poly_ring(names)))

    def _unify(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if self._p.ring is other._p.ring:
            return self, other
        if self.variables == other.variables:
            R = poly_ring(self.variables)
            return Poly(self._p.set_ring(R)), Poly(other._p.set_ring(R))
        names = merge_names(self.variables, other.variables)
        return self.lift(names), other.lift(names)

    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(other, self.variables)
        return None

    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Nonzero terms in canonical (descending grlex) order."""
        return [(m, to_fraction(c)) for m, c in self._p.terms()]

    def free_symbols(self) -> set[str]:
        names = self.variables
        used = set()
        for mono in self._p.itermonoms():
            for i, e in enumerate(mono):
                if e:
                    used.add(names[i])
        return used

    def is_zero(self) -> bool:
        return not self._p

    def is_one(self) -> bool:
        return self._p == self._p.ring.one

    def is_constant(self) -> bool:
        return self._p.is_ground

    def constant_value(self) -> Fraction:
        if not self._p.is_ground:
            raise SymcoreError("polynomial is not constant")
        return to_fraction(self._p.LC) if self._p else Fraction(0)

    def leading_coefficient(self) -> Fraction:
        return to_fraction(self._p.LC) if self._p else Fraction(0)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in descending grlex order over the alphabetically sorted names.

        Unlike ``terms`` this does not depend on the order in which the ring lists
        its variables, so it is what canonical forms and printing use.
        """
        names = self.variables
        order = sorted(range(len(names)), key=lambda i: names[i])
        key = lambda t: (sum(t[0]), tuple(t[0][i] for i in order))
        return sorted(self.terms(), key=key, reverse=True)

    def canonical_lc(self) -> Fraction:
        ts = self.sorted_terms()
        return ts[0][1] if ts else Fraction(0)

    def total_degree(self) -> int:
        if not self._p:
            return -1
        return max(sum(m) for m in self._p.itermonoms())

    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            return -1

    def degree(self, var: str) -> int:
        """Degree in ``var``; -1 for the zero polynomial."""
        if not self._p:
            return -1
        i = self._index(var)
        if i < 0:
            return 0
        return max(m[i] for m in self._p.itermonoms())

    def low_degree(self, var: str) -> int:
        if not self._p:
            return -1
        i = self._index(var)
        if i < 0:
            return 0
        return min(m[i] for m in self._p.itermonoms())

    def coefficients_in(self, var: str) -> dict[int, "Poly"]:
        """View as a univariate polynomial in ``var``: {power: coefficient}."""
        i = self._index(var)
        R = self._p.ring
        if i < 0:
            return {0: self} if self._p else {}
        out: dict[int, dict] = {}
        for mono, c in self._p.iterterms():
            k = mono[i]
            rest = mono[:i] + (0,) + mono[i + 1:]
            out.setdefault(k, {})[rest] = c
        return {k: Poly(R.from_dict(d)) for k, d in sorted(out.items())}

    def coefficient(self, var: str, power: int) -> "Poly":
        return self.coefficients_in(var).get(power, Poly.zero(self.variables))

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._unify(other)
        return Poly(a._p + b._p)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self._p)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._unify(other)
        return Poly(a._p - b._p)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._unify(other)
        return Poly(a._p * b._p)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise SymcoreError("polynomial powers must be non-negative integers")
        return Poly(self._p ** n)

    def scale(self, c) -> "Poly":
        return Poly(self._p.mul_ground(to_qq(c)))

    def exquo(self, other: "Poly") -> "Poly":
        """Exact division; raises if ``other`` does not divide ``self``."""
        a, b = self._unify(other)
        q, r = a._p.div(b._p)
        if r:
            raise SymcoreError("inexact polynomial division")
        return Poly(q)

    def divides(self, other: "Poly") -> bool:
        a, b = self._unify(other)
        return not b._p.rem(a._p)

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self._unify(other)
        return Poly(a._p.gcd(b._p))

    def cancel(self, other: "Poly") -> tuple["Poly", "Poly"]:
        a, b = self._unify(other)
        p, q = a._p.cancel(b._p)
        return Poly(p), Poly(q)

    def monic(self) -> "Poly":
        if not self._p:
            return self
        return Poly(self._p.quo_ground(self._p.LC))

    def diff(self, var: str) -> "Poly":
        i = self._index(var)
        if i < 0:
            return Poly.zero(self.variables)
        return Poly(self._p.diff(self._p.ring.gens[i]))

    def content_and_primitive(self) -> tuple[Fraction, "Poly"]:
        """Rational content c (sign of the leading coefficient) and primitive integer part."""
        if not self._p:
            return Fraction(0), self
        _, p = self._p.clear_denoms()
        cont, prim = p.primitive()
        if prim.LC < 0:
            prim = -prim
        c = self.leading_coefficient() / to_fraction(prim.LC)
        return c, Poly(prim.set_ring(self._p.ring))

    def factor_list(self) -> tuple[Fraction, list[tuple["Poly", int]]]:
        if self.is_constant():
            return self.constant_value(), []
        c, facs = self._p.factor_list()
        return to_fraction(c), [(Poly(f), m) for f, m in facs]

    def evaluate(self, values: Mapping[str, object]) -> "Poly":
        """Substitute rational numbers for some variables (variables kept)."""
        pairs = []
        for name, v in values.items():
            i = self._index(name)
            if i >= 0:
                pairs.append((self._p.ring.gens[i], to_qq(v)))
        if not pairs:
            return self
        return Poly(self._p.subs(pairs))

    def compose(self, var: str, value: "Poly") -> "Poly":
        a, b = self._unify(value)
        i = a._index(var)
        if i < 0:
            return a
        return Poly(a._p.compose(a._p.ring.gens[i], b._p))

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._unify(other)
        return a._p == b._p

    def __hash__(self):
        names = self.variables
        return hash(frozenset(
            (tuple(sorted((names[i], e) for i, e in enumerate(m) if e)), c)
            for m, c in self._p.iterterms()
        ))

    def __bool__(self):
        return bool(self._p)

    # text -----------------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, vars={self.variables})"


def _fmt_number(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _fmt_monomial(mono: Iterable[int], names: Sequence[str]) -> list[str]:
    parts = []
    for name, e in sorted(zip(names, mono)):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return parts


def format_poly(p: Poly) -> str:
    """Render in the expression grammar so that parsing gives the value back."""
    terms = p.sorted_terms()
    if not terms:
        return "0"
    names = p.variables
    out = []
    for k, (mono, c) in enumerate(terms):
        factors = _fmt_monomial(mono, names)
        neg = c < 0
        a = -c if neg else c
        if not factors:
            body = _fmt_number(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _fmt_number(a) + "*" + "*".join(factors)
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
