"""Rational maps, their Jacobians, and first-integral checks.

Symplectic conventions: phase variables are ordered (positions, momenta),
J = [[0, I], [-I, 0]], {F, G} = grad(F)^T J grad(G), and X_H = J grad(H),
so that {x_i, x_(n+i)} = 1 and {F, G} = dF(X_G).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .symcore import RatFunc, ZeroDenominatorError, differentiate, parse_expression, substitute
from .symcore.matrix import Matrix, det, mat_eq, mat_mul, rank, transpose


class CompositionPoleError(ValueError):
    """The image of a map lies identically in the polar locus of a function."""


@dataclass(frozen=True)
class SymplecticStructure:
    """Canonical symplectic form on the ordered phase variables."""

    variables: tuple[str, ...]

    def __post_init__(self):
        if len(self.variables) % 2:
            raise ValueError("symplectic structures need an even number of variables")

    @property
    def n(self) -> int:
        return len(self.variables) // 2

    @property
    def dimension(self) -> int:
        return len(self.variables)

    def matrix(self, variables: Sequence[str] = ()) -> Matrix:
        n = self.n
        one = RatFunc.constant(1, variables)
        zero = RatFunc.constant(0, variables)
        rows = []
        for i in range(2 * n):
            row = []
            for j in range(2 * n):
                if j == i + n:
                    row.append(one)
                elif i == j + n:
                    row.append(-one)
                else:
                    row.append(zero)
            rows.append(tuple(row))
        return tuple(rows)


@dataclass(frozen=True)
class VectorFieldSym:
    components: tuple[RatFunc, ...]


@dataclass(frozen=True)
class RationalMap:
    variables: tuple[str, ...]
    components: tuple[RatFunc, ...]
    parameters: tuple[str, ...] = ()
    symplectic_claimed: bool = False

    def __post_init__(self):
        if len(self.components) != len(self.variables):
            raise ValueError("a map needs one component per variable")
        if self.symplectic_claimed and len(self.variables) % 2:
            raise ValueError("a symplectic map needs an even number of variables")

    @classmethod
    def from_strings(cls, variables: Sequence[str], components: Sequence[str],
                     parameters: Sequence[str] = (), symplectic: bool = False) -> "RationalMap":
        symbols = tuple(variables) + tuple(parameters)
        comps = tuple(parse_expression(c, symbols) for c in components)
        return cls(tuple(variables), comps, tuple(parameters), symplectic)

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.variables + self.parameters

    def structure(self) -> SymplecticStructure:
        return SymplecticStructure(self.variables)

    def apply(self, h: RatFunc) -> RatFunc:
        """h o f."""
        try:
            return substitute(h, dict(zip(self.variables, self.components)))
        except ZeroDenominatorError as exc:
            raise CompositionPoleError(str(exc)) from exc

    def compose(self, other: "RationalMap") -> "RationalMap":
        """self o other."""
        if other.variables != self.variables:
            raise ValueError("maps act on different variables")
        comps = tuple(other.apply(c) for c in self.components)
        params = self.parameters + tuple(p for p in other.parameters if p not in self.parameters)
        return RationalMap(self.variables, comps, params, self.symplectic_claimed and other.symplectic_claimed)

    def jacobian_determinant(self) -> RatFunc:
        return det(jacobian(self))


def gradient(h: RatFunc, variables: Sequence[str]) -> tuple[RatFunc, ...]:
    return tuple(differentiate(h, v) for v in variables)


def jacobian(f: RationalMap) -> Matrix:
    return tuple(gradient(c, f.variables) for c in f.components)


def is_symplectic(f: RationalMap, S: SymplecticStructure | None = None) -> bool:
    """(Df)^T J (Df) == J exactly."""
    S = S or SymplecticStructure(f.variables)
    if S.dimension != len(f.variables):
        raise ValueError("dimension of the map and of the symplectic structure differ")
    Df = jacobian(f)
    J = S.matrix(f.symbols)
    return mat_eq(mat_mul(mat_mul(transpose(Df), J), Df), J)


def poisson_bracket(h1: RatFunc, h2: RatFunc, S: SymplecticStructure) -> RatFunc:
    n = S.n
    xs = S.variables
    total = RatFunc.constant(0, h1.variables)
    for i in range(n):
        a = differentiate(h1, xs[i]) * differentiate(h2, xs[n + i])
        b = differentiate(h1, xs[n + i]) * differentiate(h2, xs[i])
        total = total + a - b
    return total


def symplectic_gradient(h: RatFunc, S: SymplecticStructure) -> VectorFieldSym:
    g = gradient(h, S.variables)
    n = S.n
    return VectorFieldSym(tuple(g[n + i] for i in range(n)) + tuple(-g[i] for i in range(n)))


def apply_differential(h: RatFunc, X: VectorFieldSym, variables: Sequence[str]) -> RatFunc:
    """dh(X)."""
    total = RatFunc.constant(0, h.variables)
    for v, c in zip(variables, X.components):
        total = total + differentiate(h, v) * c
    return total


@dataclass(frozen=True)
class FirstIntegralCheck:
    holds: bool
    trivial: bool

    def __bool__(self):
        return self.holds


def is_first_integral(h: RatFunc, f: RationalMap) -> FirstIntegralCheck:
    trivial = not (h.free_symbols() & set(f.variables))
    return FirstIntegralCheck(f.apply(h) == h, trivial)


def functional_rank(hs: Sequence[RatFunc], variables: Sequence[str]) -> int:
    """Rank of the Jacobian [dH_i/dx_j] over the field of rational functions."""
    if not hs:
        raise ValueError("functional rank of an empty family")
    return rank(tuple(gradient(h, variables) for h in hs))


@dataclass
class IsotropicReport:
    n: int
    ell: int
    first_integrals: list[bool]
    trivial: list[bool]
    rank: int
    rank_ok: bool
    brackets: dict[tuple[int, int], RatFunc] = field(default_factory=dict)
    involution_ok: bool = True

    @property
    def verdict(self) -> bool:
        return all(self.first_integrals) and self.rank_ok and self.involution_ok


def check_isotropic_integrability(f: RationalMap, hs: Sequence[RatFunc], ell: int,
                                  S: SymplecticStructure | None = None) -> IsotropicReport:
    """Check the n+ell first integrals of non-commutative integrability.

    The first n-ell entries of ``hs`` are taken as the isotropic generators:
    each H_i must Poisson-commute with all of them.
    """
    S = S or SymplecticStructure(f.variables)
    n = S.n
    if not 0 <= ell <= n:
        raise ValueError(f"ell must lie in [0, {n}], got {ell}")
    if len(hs) != n + ell:
        raise ValueError(f"expected {n + ell} functions, got {len(hs)}")
    checks = [is_first_integral(h, f) for h in hs]
    r = functional_rank(hs, S.variables)
    report = IsotropicReport(n, ell, [c.holds for c in checks], [c.trivial for c in checks], r, r == n + ell)
    for i in range(n + ell):
        for j in range(n - ell):
            if i == j:
                continue
            b = poisson_bracket(hs[i], hs[j], S)
            report.brackets[(i, j)] = b
            if not b.is_zero():
                report.involution_ok = False
    return report
