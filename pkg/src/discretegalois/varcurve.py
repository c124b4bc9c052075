"""Moebius transforms, adapted curves and the discrete variational equation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dynsys import RationalMap, SymplecticStructure, jacobian
from .symcore import Poly, RatFunc, SymcoreError, ZeroDenominatorError, substitute
from .symcore.matrix import Matrix, det, identity, inverse, mat_eq, mat_mul, mat_subs, shape, transpose

PERIOD_BOUND = 12


class DegenerateMoebiusError(ValueError):
    pass


class PoleOnCurveError(ValueError):
    """A function needed along the curve has the whole curve in its polar locus."""


def _coeffs_linear(p: Poly, var: str) -> tuple[RatFunc, RatFunc] | None:
    """(c1, c0) with p = c1*var + c0, or None if p has higher degree in var."""
    if p.degree(var) > 1:
        return None
    co = p.coefficients_in(var)
    zero = Poly.zero(p.variables)
    return RatFunc.from_poly(co.get(1, zero)), RatFunc.from_poly(co.get(0, zero))


def sqrt_ratfunc(r: RatFunc) -> RatFunc | None:
    """A square root of r inside QQ(symbols), or None."""
    if r.is_zero():
        return r
    parts = []
    for p in (r.num, r.den):
        c, facs = p.factor_list()
        if c < 0 and p is r.den:
            return None
        root = Poly.one(p.variables)
        for fac, m in facs:
            if m % 2:
                return None
            root = root * fac ** (m // 2)
        parts.append((c, root))
    (cn, rn), (cd, rd) = parts
    c = cn / cd
    if c < 0:
        return None
    sn, sd = math.isqrt(c.numerator), math.isqrt(c.denominator)
    if sn * sn != c.numerator or sd * sd != c.denominator:
        return None
    return RatFunc(rn, rd) * Fraction(sn, sd)


@dataclass(frozen=True)
class MoebiusTransform:
    """z -> (a z + b)/(c z + d) with coefficients free of z."""

    a: RatFunc
    b: RatFunc
    c: RatFunc
    d: RatFunc
    variable: str = "z"

    def __post_init__(self):
        for e in (self.a, self.b, self.c, self.d):
            if e.depends_on(self.variable):
                raise DegenerateMoebiusError(f"coefficient {e} depends on {self.variable}")
        if (self.a * self.d - self.b * self.c).is_zero():
            raise DegenerateMoebiusError("ad - bc vanishes")

    @classmethod
    def from_ratfunc(cls, r: RatFunc, variable: str = "z") -> "MoebiusTransform":
        num = _coeffs_linear(r.num, variable)
        den = _coeffs_linear(r.den, variable)
        if num is None or den is None:
            raise DegenerateMoebiusError(f"{r} is not a Moebius transform of {variable}")
        return cls(num[0], num[1], den[0], den[1], variable)

    @classmethod
    def dilation(cls, q, variable: str = "z", variables: Sequence[str] = ()) -> "MoebiusTransform":
        q = RatFunc.coerce(q, variables)
        return cls(q, q * 0, q * 0, q ** 0, variable)

    @classmethod
    def translation(cls, h, variable: str = "z", variables: Sequence[str] = ()) -> "MoebiusTransform":
        h = RatFunc.coerce(h, variables)
        one = h ** 0
        return cls(one, h, h * 0, one, variable)

    def as_ratfunc(self) -> RatFunc:
        z = RatFunc.variable(self.variable, self.a.variables)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def apply(self, w: RatFunc) -> RatFunc:
        return (self.a * w + self.b) / (self.c * w + self.d)

    def matrix(self) -> Matrix:
        return ((self.a, self.b), (self.c, self.d))

    @classmethod
    def from_matrix(cls, M: Matrix, variable: str) -> "MoebiusTransform":
        return cls(M[0][0], M[0][1], M[1][0], M[1][1], variable)

    def compose(self, other: "MoebiusTransform") -> "MoebiusTransform":
        """self o other."""
        return MoebiusTransform.from_matrix(mat_mul(self.matrix(), other.matrix()), self.variable)

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.d, -self.b, -self.c, self.a, self.variable)

    def power(self, k: int) -> "MoebiusTransform":
        base = self if k >= 0 else self.inverse()
        out = MoebiusTransform(self.a ** 0, self.a * 0, self.a * 0, self.a ** 0, self.variable)
        for _ in range(abs(k)):
            out = base.compose(out)
        return out

    def is_identity(self) -> bool:
        return self.c.is_zero() and self.b.is_zero() and self.a == self.d

    @property
    def kind(self) -> str:
        """Kind of the transform as written (no change of variable)."""
        if self.c.is_zero() and self.a == self.d:
            return "translation"
        if self.c.is_zero() and self.b.is_zero():
            return "dilation"
        return "general"

    @property
    def step(self) -> RatFunc:
        kind = self.kind
        if kind == "translation":
            return self.b / self.d
        if kind == "dilation":
            return self.a / self.d
        raise SymcoreError("general Moebius transforms have no step")

    def period(self, bound: int = PERIOD_BOUND) -> int | None:
        M = self.matrix()
        P = M
        for k in range(1, bound + 1):
            if P[0][1].is_zero() and P[1][0].is_zero() and P[0][0] == P[1][1]:
                return k
            P = mat_mul(P, M)
        return None

    def __str__(self):
        return str(self.as_ratfunc())


@dataclass(frozen=True)
class MoebiusClassification:
    kind: str                      # translation | dilation | general
    step: RatFunc | None           # h or q of the normal form
    fixed_points: tuple[str, ...]  # textual, "oo" for infinity
    normalizer: RatFunc | None     # w(z) conjugating phi to the normal form
    period: int | None

    @property
    def periodic(self) -> bool:
        return self.period is not None

    def normal_form(self, variable: str) -> MoebiusTransform:
        if self.kind == "translation":
            return MoebiusTransform.translation(self.step, variable)
        if self.kind == "dilation":
            return MoebiusTransform.dilation(self.step, variable)
        raise SymcoreError("no normal form for a general transform")


def _conjugated_step(phi: MoebiusTransform, w: RatFunc, kind: str) -> RatFunc:
    wphi = substitute(w, {phi.variable: phi.as_ratfunc()})
    val = wphi - w if kind == "translation" else wphi / w
    if val.depends_on(phi.variable):
        raise SymcoreError("normalizer does not conjugate to the expected normal form")
    return val


def classify_moebius(phi: MoebiusTransform, bound: int = PERIOD_BOUND) -> MoebiusClassification:
    a, b, c, d = phi.a, phi.b, phi.c, phi.d
    var = phi.variable
    names = a.variables
    z = RatFunc.variable(var, names)
    period = phi.period(bound)
    if c.is_zero():
        lam = a / d
        if lam == 1:
            return MoebiusClassification("translation", b / d, ("oo",), z, period)
        z0 = (b / d) / (1 - lam)
        return MoebiusClassification("dilation", lam, (str(z0), "oo"), z - z0, period)
    disc = (a + d) ** 2 - (a * d - b * c) * 4
    if disc.is_zero():
        z0 = (a - d) / (c * 2)
        w = 1 / (z - z0)
        return MoebiusClassification("translation", _conjugated_step(phi, w, "translation"), (str(z0),), w, period)
    s = sqrt_ratfunc(disc)
    if s is None:
        return MoebiusClassification("general", None, (), None, period)
    z1 = (a - d + s) / (c * 2)
    z2 = (a - d - s) / (c * 2)
    w = (z - z1) / (z - z2)
    return MoebiusClassification("dilation", _conjugated_step(phi, w, "dilation"), (str(z1), str(z2)), w, period)


@dataclass(frozen=True)
class AdaptedCurve:
    variable: str
    components: tuple[RatFunc, ...]

    def __post_init__(self):
        if all(not c.depends_on(self.variable) for c in self.components):
            raise ValueError("curve components are all constant")

    @classmethod
    def from_strings(cls, variable: str, components: Sequence[str], parameters: Sequence[str] = ()):
        from .symcore import parse_expression
        symbols = (variable,) + tuple(parameters)
        return cls(variable, tuple(parse_expression(c, symbols) for c in components))

    def bindings(self, variables: Sequence[str]) -> dict[str, RatFunc]:
        return dict(zip(variables, self.components))


@dataclass
class AdaptednessResult:
    holds: bool
    phi: MoebiusTransform | None
    inferred: bool
    image: tuple[RatFunc, ...]          # f o iota
    shifted: tuple[RatFunc, ...] | None  # iota o phi
    mismatches: list[int] = field(default_factory=list)
    message: str = ""

    def __bool__(self):
        return self.holds


def compose_on_curve(f: RationalMap, curve: AdaptedCurve) -> tuple[RatFunc, ...]:
    binds = curve.bindings(f.variables)
    out = []
    for comp in f.components:
        try:
            out.append(substitute(comp, binds))
        except ZeroDenominatorError as exc:
            raise PoleOnCurveError(f"map component {comp} has a pole along the curve") from exc
    return tuple(out)


def _infer_phi(curve: AdaptedCurve, image: Sequence[RatFunc]) -> MoebiusTransform | None:
    var = curve.variable
    for comp, target in zip(curve.components, image):
        if not comp.depends_on(var):
            continue
        try:
            mu = MoebiusTransform.from_ratfunc(comp, var)
        except DegenerateMoebiusError:
            continue
        cand = substitute(mu.inverse().as_ratfunc(), {var: target})
        try:
            return MoebiusTransform.from_ratfunc(cand, var)
        except DegenerateMoebiusError:
            return None
    return None


def verify_adapted(f: RationalMap, curve: AdaptedCurve, phi: MoebiusTransform | None = None) -> AdaptednessResult:
    """Check f o iota == iota o phi; infer phi from a Moebius component when omitted."""
    if len(curve.components) != len(f.variables):
        raise ValueError("curve and map dimensions differ")
    image = compose_on_curve(f, curve)
    inferred = phi is None
    if inferred:
        phi = _infer_phi(curve, image)
        if phi is None:
            return AdaptednessResult(False, None, True, image, None, message="could not infer phi")
    if phi.variable != curve.variable:
        raise ValueError("phi and the curve use different variables")
    z_phi = phi.as_ratfunc()
    shifted = tuple(substitute(c, {curve.variable: z_phi}) for c in curve.components)
    bad = [i for i, (u, v) in enumerate(zip(image, shifted)) if u != v]
    return AdaptednessResult(not bad, phi, inferred, image, shifted, bad)


@dataclass(frozen=True)
class DifferenceSystem:
    """phi Y = A Y, i.e. Y(phi z) = A(z) Y(z)."""

    phi: MoebiusTransform
    A: Matrix
    symplectic: bool = False

    def __post_init__(self):
        n, m = shape(self.A)
        if n != m:
            raise ValueError("system matrix must be square")
        if det(self.A).is_zero():
            raise ValueError("system matrix is singular")
        if self.symplectic and not verify_symplectic_system(self):
            raise ValueError("system flagged symplectic but A^T J A != J")

    @property
    def variable(self) -> str:
        return self.phi.variable

    @property
    def rank(self) -> int:
        return len(self.A)

    def shift(self, M: Matrix, k: int = 1) -> Matrix:
        """M(phi^k z)."""
        return mat_subs(M, {self.variable: self.phi.power(k).as_ratfunc()})


def variational_system(f: RationalMap, curve: AdaptedCurve, phi: MoebiusTransform) -> DifferenceSystem:
    from .dynsys import is_symplectic

    binds = curve.bindings(f.variables)
    rows = []
    for row in jacobian(f):
        new_row = []
        for e in row:
            try:
                new_row.append(substitute(e, binds))
            except ZeroDenominatorError as exc:
                raise PoleOnCurveError(f"Jacobian entry {e} has a pole along the curve") from exc
        rows.append(tuple(new_row))
    symp = len(f.variables) % 2 == 0 and is_symplectic(f)
    return DifferenceSystem(phi, tuple(rows), symp)


def verify_symplectic_system(s: DifferenceSystem) -> bool:
    n = len(s.A)
    if n % 2:
        raise ValueError("symplectic check needs even dimension")
    names = s.A[0][0].variables
    J = SymplecticStructure(tuple(f"_{i}" for i in range(n))).matrix(names)
    return mat_eq(mat_mul(mat_mul(transpose(s.A), J), s.A), J)


def gauge_transform(s: DifferenceSystem, P: Matrix) -> DifferenceSystem:
    """System with matrix (P o phi)^{-1} A P."""
    if det(P).is_zero():
        raise ZeroDenominatorError("gauge matrix is singular")
    Pphi = s.shift(P)
    A = mat_mul(mat_mul(inverse(Pphi), s.A), P)
    return DifferenceSystem(s.phi, A, False)


def normalize_system(s: DifferenceSystem, cls: MoebiusClassification | None = None) -> tuple[DifferenceSystem, MoebiusClassification]:
    """Rewrite the system in the coordinate w where phi becomes z -> z+h or z -> q z.

    The new variable reuses the old name. With Yt(w) = Y(mu^{-1}(w)) one gets
    Yt(phit w) = A(mu^{-1} w) Yt(w).
    """
    cls = cls or classify_moebius(s.phi)
    if cls.kind == "general":
        raise SymcoreError("phi has no normal form over the ground field")
    var = s.variable
    normal = cls.normal_form(var)
    z = RatFunc.variable(var, cls.normalizer.variables)
    if cls.normalizer == z:
        return DifferenceSystem(normal, s.A, s.symplectic), cls
    mu = MoebiusTransform.from_ratfunc(cls.normalizer, var)
    A = mat_subs(s.A, {var: mu.inverse().as_ratfunc()})
    return DifferenceSystem(normal, A, s.symplectic), cls


def identity_gauge(n: int, variables: Sequence[str]) -> Matrix:
    return identity(n, variables)
