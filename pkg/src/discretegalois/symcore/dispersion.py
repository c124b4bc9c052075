"""Orbit shifts between polynomial roots under z -> z+h or z -> q z."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import SymcoreError
from .poly import Poly, merge_names
from .ratfunc import RatFunc, substitute

SHIFT_SYMBOL = "_K"


def phi_power(var: str, kind: str, step: RatFunc, k: int) -> RatFunc:
    """The k-th iterate of the normalized transform, as a function of ``var``."""
    z = RatFunc.variable(var, step.variables)
    if kind == "translation":
        return z + step * k
    if kind == "dilation":
        return z * step ** k
    raise SymcoreError(f"transform of kind {kind!r} is not normalized")


def strip_fixed_factor(p: Poly, var: str) -> tuple[Poly, int]:
    """Remove the largest power of ``var`` dividing p."""
    k = p.low_degree(var)
    if k <= 0:
        return p, 0
    return p.exquo(Poly.variable(var, p.variables) ** k), k


def power_exponent(value: RatFunc, base: RatFunc, search: int = 64) -> int | None:
    """Integer k with value == base**k exactly, or None."""
    if value.is_zero() or base.is_zero():
        return None
    if base == 1:
        return 0 if value == 1 else None
    if base.is_constant() and value.is_constant():
        b, v = base.constant_value(), value.constant_value()
        if abs(b) != 1:
            k = round(math.log(abs(v)) / math.log(abs(b))) if v != 0 else 0
            for cand in (k - 1, k, k + 1):
                if b ** cand == v:
                    return cand
            return None
        return next((k for k in (0, 1) if b ** k == v), None)
    for var in sorted(base.free_symbols()):
        db = base.num.degree(var) - base.den.degree(var)
        if db:
            dv = value.num.degree(var) - value.den.degree(var)
            if dv % db:
                return None
            k = dv // db
            return k if base ** k == value else None
    for k in range(-search, search + 1):
        if base ** k == value:
            return k
    return None


@dataclass
class DispersionResult:
    shifts: set[int]
    # root-ratio / root-difference constants that are not symbolically
    # orbit shifts but could become one for special parameter values
    ambiguous: list[RatFunc] = field(default_factory=list)
    # orbit shifts of either sign (k may be negative)
    relations: set[int] = field(default_factory=set)
    # irreducible factors in the shift symbol of degree > 1 whose roots depend
    # on parameters, so may meet the orbit for special parameter values
    nonlinear: list[Poly] = field(default_factory=list)


def dispersion_analysis(p: Poly, r: Poly, var: str, kind: str, step: RatFunc) -> DispersionResult:
    """Shifts k with gcd(p(z), r(phi^k z)) nonconstant, via a resultant in the shift.

    Translation: res_z(p(z), r(z + T)) has roots T = k h.
    Dilation: res_z(p(z), r(K z)) has roots K = q^k; the fixed factor z is
    stripped from both inputs first.
    """
    if kind not in ("translation", "dilation"):
        raise SymcoreError(f"transform of kind {kind!r} is not normalized")
    if p.is_zero() or r.is_zero():
        raise SymcoreError("dispersion of the zero polynomial")
    if kind == "dilation":
        p, _ = strip_fixed_factor(p, var)
        r, _ = strip_fixed_factor(r, var)
    if p.degree(var) < 1 or r.degree(var) < 1:
        return DispersionResult(set())
    result = DispersionResult(set())
    pf = [f for f, _ in p.factor_list()[1] if f.degree(var) >= 1]
    rf = [f for f, _ in r.factor_list()[1] if f.degree(var) >= 1]
    for a in pf:
        for b in rf:
            # irreducible factors can only meet along the orbit when their degrees agree
            if a.degree(var) == b.degree(var):
                _pair_shifts(a, b, var, kind, step, result)
    return result


def _shift_factors(a: Poly, b: Poly, var: str, kind: str, step: RatFunc) -> list[Poly]:
    """Irreducible factors in the shift symbol of res_z(a(z), b(phi_K z))."""
    K = SHIFT_SYMBOL
    names = merge_names((var, K), merge_names(a.variables, b.variables))
    names = merge_names(names, step.variables)
    al, bl = a.lift(names), b.lift(names)
    zvar = Poly.variable(var, names)
    kvar = Poly.variable(K, names)
    if a.degree(var) == 1:
        # a = a1 z + a0 has the single root -a0/a1; substitute it into b(phi_K z)
        a1, a0 = al.coefficient(var, 1), al.coefficient(var, 0)
        root = RatFunc(-a0, a1)
        arg = RatFunc.from_poly(kvar) + root if kind == "translation" else RatFunc.from_poly(kvar) * root
        res = substitute(RatFunc.from_poly(bl), {var: arg}).num
    else:
        shifted = bl.compose(var, zvar + kvar if kind == "translation" else kvar * zvar)
        res = Poly(al.element.resultant(shifted.element))
    if res.is_zero():
        raise SymcoreError("resultant vanished identically; inputs share a shift-invariant factor")
    if res.degree(K) < 1:
        return []
    return [fac for fac, _ in res.factor_list()[1] if fac.degree(var) <= 0 and fac.degree(K) >= 1]


def _pair_shifts(a: Poly, b: Poly, var: str, kind: str, step: RatFunc, result: DispersionResult):
    K = SHIFT_SYMBOL
    for fac in _shift_factors(a, b, var, kind, step):
        if fac.degree(K) > 1:
            if fac.free_symbols() - {K} or step.free_symbols():
                result.nonlinear.append(fac)
            continue
        c1 = fac.coefficient(K, 1)
        c0 = fac.coefficient(K, 0)
        root = RatFunc(-c0, c1)
        if kind == "translation":
            ratio = root / step
            if not ratio.is_constant():
                result.ambiguous.append(ratio)
                continue
            if ratio.constant_value().denominator != 1:
                continue
            k = int(ratio.constant_value())
        else:
            k = power_exponent(root, step)
            if k is None:
                if root.free_symbols() or step.free_symbols():
                    result.ambiguous.append(root)
                continue
        target = substitute(RatFunc.from_poly(b), {var: phi_power(var, kind, step, k)})
        if a.gcd(target.num).degree(var) >= 1:
            result.relations.add(k)
            if k >= 0:
                result.shifts.add(k)


def dispersion_set(p: Poly, r: Poly, phi) -> set[int]:
    """All k >= 0 with gcd(p(z), r(phi^k z)) nonconstant (exact).

    ``phi`` is a normalized transform exposing ``kind``, ``step`` and ``variable``.
    """
    return dispersion_analysis(p, r, phi.variable, phi.kind, phi.step).shifts
