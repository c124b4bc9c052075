"""Linear problems whose unknowns are constants (free of some variables).

The typical question is: find constants c_k with sum c_k e_k = t, where the
e_k and t are rational functions of ``vars`` and of parameters. Clearing
denominators and equating coefficients of the monomials in ``vars`` turns this
into a linear system over QQ(parameters).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .matrix import LinearSolution, solve_linear
from .poly import Poly
from .ratfunc import RatFunc


def poly_lcm(a: Poly, b: Poly) -> Poly:
    g = a.gcd(b)
    return (a * b).exquo(g)


def collect(p: Poly, vars: Sequence[str]) -> dict[tuple[int, ...], RatFunc]:
    """Coefficients of p as a polynomial in ``vars`` (other symbols kept in the coefficients)."""
    names = p.variables
    idx = [names.index(v) if v in names else -1 for v in vars]
    rest = tuple(n for n in names if n not in vars)
    ridx = [names.index(n) for n in rest]
    out: dict[tuple[int, ...], dict] = {}
    for mono, c in p.terms():
        key = tuple(mono[i] if i >= 0 else 0 for i in idx)
        inner = out.setdefault(key, {})
        rkey = tuple(mono[i] for i in ridx)
        inner[rkey] = inner.get(rkey, 0) + c
    return {k: RatFunc.from_poly(Poly.from_terms(v, rest)) for k, v in out.items()}


def _all_rational(rows) -> bool:
    return all(e.is_constant() for row in rows for e in row)


def solve_linear_auto(A: list[list[RatFunc]], b: list[RatFunc], names: Sequence[str]) -> tuple[LinearSolution, bool]:
    """Solve over QQ when every entry is rational, else over QQ(params).

    Returns the solution (entries as RatFunc) and whether the QQ path was used.
    """
    if _all_rational(A) and all(e.is_constant() for e in b):
        Af = [[e.constant_value() for e in row] for row in A]
        bf = [e.constant_value() for e in b]
        sol = solve_linear(Af, bf, Fraction(1), Fraction(0))

        def conv(v):
            return [RatFunc.constant(x, names) for x in v]

        return LinearSolution(
            conv(sol.particular) if sol.particular is not None else None,
            [conv(v) for v in sol.basis],
            conv(sol.witness) if sol.witness is not None else None,
        ), True
    one = RatFunc.constant(1, names)
    return solve_linear(A, b, one, one * 0), False


def constant_combination(basis: Sequence[RatFunc], target: RatFunc, vars: Sequence[str]) -> tuple[LinearSolution, tuple]:
    """Constants c (free of ``vars``) with sum c_k basis_k == target.

    Returns the solution set and the (matrix, rhs) that was solved.
    """
    dens = [e.den for e in basis] + [target.den]
    D = dens[0]
    for d in dens[1:]:
        D = poly_lcm(D, d)
    cols = [collect((e.num * D.exquo(e.den)), vars) for e in basis]
    rhs = collect(target.num * D.exquo(target.den), vars)
    keys = sorted(set(rhs).union(*[set(c) for c in cols]))
    names = tuple(n for n in D.variables if n not in vars)
    zero = RatFunc.constant(0, names)
    A = [[c.get(k, zero) for c in cols] for k in keys]
    b = [rhs.get(k, zero) for k in keys]
    if not keys:
        A, b = [[zero] * len(basis)], [zero]
    sol, _ = solve_linear_auto(A, b, names)
    return sol, (A, b)
