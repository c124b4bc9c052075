"""Canonical rational functions over QQ(symbols)."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .errors import PoleError, SymcoreError, ZeroDenominatorError
from .poly import Poly, format_poly, merge_names


class RatFunc:
    """Quotient num/den of polynomials in canonical form.

    Canonical form: gcd(num, den) = 1, and den has leading coefficient 1 in the
    graded lex order of its variable tuple. Zero is 0/1. Instances are
    immutable.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None, *, canonical: bool = False):
        if den is None:
            den = Poly.one(num.variables)
        if num.ring is not den.ring:
            num, den = num._unify(den)
        if not canonical:
            num, den = _canonical_pair(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, value, variables: Sequence[str] = ()) -> "RatFunc":
        value = Fraction(value)
        return cls(Poly.constant(value.numerator, variables), Poly.constant(value.denominator, variables))

    @classmethod
    def variable(cls, name: str, variables: Sequence[str] | None = None) -> "RatFunc":
        return cls(Poly.variable(name, variables), canonical=False)

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p, Poly.one(p.variables), canonical=True)

    @classmethod
    def coerce(cls, value, variables: Sequence[str] = ()) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, Poly):
            return cls.from_poly(value)
        if isinstance(value, (int, Fraction)):
            return cls.constant(value, variables)
        raise TypeError(f"cannot interpret {value!r} as a rational function")

    # structure ------------------------------------------------------------

    @property
    def variables(self) -> tuple[str, ...]:
        return self.num.variables

    def free_symbols(self) -> set[str]:
        return self.num.free_symbols() | self.den.free_symbols()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def depends_on(self, var: str) -> bool:
        return var in self.free_symbols()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise SymcoreError(f"{self} is not a rational constant")
        return self.num.constant_value() / self.den.constant_value()

    def lift(self, variables: Sequence[str]) -> "RatFunc":
        return RatFunc(self.num.lift(variables), self.den.lift(variables), canonical=True)

    def _unify(self, other: "RatFunc") -> tuple["RatFunc", "RatFunc"]:
        if self.num.ring is other.num.ring:
            return self, other
        names = merge_names(self.variables, other.variables)
        return self.lift(names), other.lift(names)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction, Poly)):
            return RatFunc.coerce(other, self.variables)
        return None

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._unify(other)
        if a.den == b.den:
            return RatFunc(a.num + b.num, a.den)
        return RatFunc(a.num * b.den + b.num * a.den, a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self._unify(other)
        return RatFunc(a.num * b.num, a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDenominatorError("division by the zero rational function")
        a, b = self._unify(other)
        return RatFunc(a.num * b.den, a.den * b.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise SymcoreError("only integer powers are supported")
        if n >= 0:
            return RatFunc(self.num ** n, self.den ** n, canonical=True) if n else RatFunc.constant(1, self.variables)
        if self.is_zero():
            raise ZeroDenominatorError("negative power of zero")
        return RatFunc(self.den ** (-n), self.num ** (-n))

    def inverse(self) -> "RatFunc":
        return self ** -1

    # comparison -----------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.num.ring is other.num.ring:
            return self.num == other.num and self.den == other.den
        a, b = self._unify(other)
        return a.num * b.den == b.num * a.den

    def __hash__(self):
        if self._hash is None:
            names = tuple(sorted(self.free_symbols()))
            c = RatFunc(self.num.lift(merge_names(names, self.variables)),
                        self.den.lift(merge_names(names, self.variables)))
            self._hash = hash((hash(c.num), hash(c.den)))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # text -----------------------------------------------------------------

    def __str__(self):
        return format_ratfunc(self)

    def __repr__(self):
        return f"RatFunc({format_ratfunc(self)!r})"


def _canonical_pair(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if den.is_zero():
        raise ZeroDenominatorError("zero denominator")
    if num.is_zero():
        return Poly.zero(num.variables), Poly.one(num.variables)
    if den.is_constant():
        c = den.canonical_lc()
        return num.scale(1 / c), Poly.one(num.variables)
    num, den = num.cancel(den)
    c = den.canonical_lc()
    if c != 1:
        num, den = num.scale(1 / c), den.scale(1 / c)
    return num, den


def normalize(r: RatFunc) -> RatFunc:
    """Canonical form; idempotent."""
    return RatFunc(r.num, r.den)


def _single_factor(p: Poly) -> bool:
    terms = p.terms()
    if len(terms) != 1:
        return False
    mono, c = terms[0]
    return c == 1 and sum(1 for e in mono if e) == 1


def format_ratfunc(r: RatFunc) -> str:
    num = format_poly(r.num)
    if r.den.is_one():
        return num
    if len(r.num.terms()) > 1:
        num = f"({num})"
    den = format_poly(r.den)
    if not _single_factor(r.den):
        den = f"({den})"
    return f"{num}/{den}"


# substitution -------------------------------------------------------------

def _poly_substitute(p: Poly, bindings: Mapping[str, RatFunc], target: tuple[str, ...]) -> tuple[Poly, Poly]:
    """p(bindings) as numerator/denominator polynomials over ``target``."""
    names = p.variables
    bound = [(i, bindings[n]) for i, n in enumerate(names) if n in bindings]
    p = p.lift(merge_names(names, target))
    names_full = p.variables
    if not bound:
        return p, Poly.one(names_full)
    idx = {i for i, _ in bound}
    degs = {i: max((m[i] for m, _ in p.terms()), default=0) for i, _ in bound}
    nums = {i: b.num.lift(names_full) for i, b in bound}
    dens = {i: b.den.lift(names_full) for i, b in bound}
    npow: dict = {}
    dpow: dict = {}

    def power(cache, i, base, e):
        key = (i, e)
        if key not in cache:
            cache[key] = base ** e
        return cache[key]

    zero_mono = [0] * len(names_full)
    total = Poly.zero(names_full)
    for mono, c in p.terms():
        free = list(zero_mono)
        for j, e in enumerate(mono):
            if j not in idx:
                free[j] = e
        term = Poly.from_terms({tuple(free): c}, names_full)
        for i, _ in bound:
            e = mono[i]
            if e:
                term = term * power(npow, i, nums[i], e)
            if degs[i] - e:
                term = term * power(dpow, i, dens[i], degs[i] - e)
        total = total + term
    den = Poly.one(names_full)
    for i, _ in bound:
        if degs[i]:
            den = den * power(dpow, i, dens[i], degs[i])
    return total, den


def substitute(r: RatFunc, bindings: Mapping[str, object]) -> RatFunc:
    """Simultaneous substitution of rational functions for variables."""
    binds = {}
    for name, value in bindings.items():
        binds[name] = RatFunc.coerce(value, r.variables)
    binds = {n: v for n, v in binds.items() if n in r.variables}
    if not binds:
        return r
    target = tuple(r.variables)
    for v in binds.values():
        target = merge_names(target, v.variables)
    pn, pd = _poly_substitute(r.num, binds, target)
    qn, qd = _poly_substitute(r.den, binds, target)
    if qn.is_zero():
        raise ZeroDenominatorError(f"substitution makes the denominator of {r} vanish")
    return RatFunc(pn * qd, pd * qn)


def differentiate(r: RatFunc, var: str) -> RatFunc:
    dn = r.num.diff(var)
    dd = r.den.diff(var)
    if dd.is_zero():
        return RatFunc(dn, r.den)
    return RatFunc(dn * r.den - r.num * dd, r.den * r.den)


def epsilon_expansion(r: RatFunc, eps: str, order: int) -> list[RatFunc]:
    """Taylor coefficients c_0..c_order of ``r`` in ``eps`` at 0.

    Raises PoleError when the denominator vanishes at eps = 0.
    """
    if order < 0:
        raise SymcoreError("expansion order must be non-negative")
    ncoef = r.num.coefficients_in(eps)
    dcoef = r.den.coefficients_in(eps)
    names = r.variables
    zero = Poly.zero(names)
    d0 = dcoef.get(0, zero)
    if d0.is_zero():
        raise PoleError(f"{r} has a pole at {eps} = 0")
    P: list[Poly] = []
    d0pow = [Poly.one(names)]
    for k in range(order + 1):
        d0pow.append(d0pow[-1] * d0)
    out = []
    for k in range(order + 1):
        acc = ncoef.get(k, zero) * d0pow[k]
        for j in range(1, k + 1):
            dj = dcoef.get(j)
            if dj is not None and not P[k - j].is_zero():
                acc = acc - dj * P[k - j] * d0pow[j - 1]
        P.append(acc)
        out.append(RatFunc(acc, d0pow[k + 1]))
    return out
