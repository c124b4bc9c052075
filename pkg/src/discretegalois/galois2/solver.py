"""Rational solutions u of u(phi z) d(z) = a(z) u(z) + b(z).

phi is z -> z + h or z -> q z. After clearing denominators the equation reads
c1 u(phi z) + c0 u(z) = g. A universal denominator U is built from the orbit
structure of c0 and c1 (Abramov's construction; for dilations the factor z
is handled by allowing Laurent numerators), then the numerator is found by
exact linear algebra inside certified degree bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..symcore import Poly, RatFunc
from ..symcore.dispersion import strip_fixed_factor
from ..symcore.linear import constant_combination, poly_lcm
from .characters import orbit_relations, shift
from .registry import AssumptionRegistry, Fact

DEFAULT_FALLBACK_BOUND = 6


@dataclass
class FirstOrderSolution:
    particular: RatFunc | None
    homogeneous: list[RatFunc]
    denominator: RatFunc
    bounds: tuple[int, int]
    certified: bool
    used: list[Fact] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)
    transcript: list[str] = field(default_factory=list)
    witness: list[RatFunc] | None = None  # y with y M = 0, y rhs != 0 when no solution

    @property
    def found(self) -> bool:
        return self.particular is not None


def residual(u: RatFunc, a: RatFunc, b: RatFunc, d: RatFunc, var: str, kind: str, step: RatFunc) -> RatFunc:
    return shift(u, var, kind, step) * d - a * u - b


def _poly_shift(p: Poly, var: str, kind: str, step: RatFunc, k: int) -> Poly:
    """Numerator of p(phi^k z); for dilations the z-free denominator is dropped."""
    r = shift(RatFunc.from_poly(p), var, kind, step, k)
    return r.num


def _quo(A: Poly, G: Poly, var: str) -> Poly:
    r = RatFunc.from_poly(A) / RatFunc.from_poly(G)
    if r.den.degree(var) > 0:
        raise AssertionError("expected an exact division in z")
    return r.num


def universal_denominator(c1: Poly, c0: Poly, var: str, kind: str, step: RatFunc,
                          registry: AssumptionRegistry) -> tuple[Poly, list[Fact], list[str], list[str]]:
    """A polynomial U divisible by the denominator of every rational solution.

    Poles of a solution run along phi-chains beta, phi(beta), .., phi^N(beta)
    with c0(phi^N beta) = 0 and c1(phi^{-1} beta) = 0, so N is an orbit shift
    between B(z) = c1(phi^{-1} z) and A(z) = c0(z).
    """
    A = c0
    B = _poly_shift(c1, var, kind, step, -1)
    if kind == "dilation":
        A, _ = strip_fixed_factor(A, var)
        B, _ = strip_fixed_factor(B, var)
    U = Poly.one(A.variables)
    used: list[Fact] = []
    missing: list[str] = []
    log: list[str] = []
    for _ in range(64):
        if A.degree(var) < 1 or B.degree(var) < 1:
            break
        dec = orbit_relations(B, A, var, kind, step, registry)
        used.extend(dec.used)
        missing.extend(dec.missing)
        shifts = sorted(k for k in dec.shifts if k >= 0)
        if not shifts:
            break
        N = shifts[-1]
        G = B.gcd(_poly_shift(A, var, kind, step, N))
        if G.degree(var) < 1:
            break
        A = _quo(A, _poly_shift(G, var, kind, step, -N), var)
        B = _quo(B, G, var)
        for i in range(N + 1):
            U = U * _poly_shift(G, var, kind, step, -i)
        log.append(f"dispersion {N}: factor {G}")
    return U, used, missing, log


def _lead(p: Poly, var: str) -> RatFunc:
    return RatFunc.from_poly(p.coefficient(var, p.degree(var)))


def _trail(p: Poly, var: str) -> RatFunc:
    return RatFunc.from_poly(p.coefficient(var, p.low_degree(var)))


def _translation_bound(P1: Poly, P0: Poly, R: Poly, var: str, step: RatFunc):
    """Degree bound n for polynomial W with P1 W(z+h) + P0 W(z) = R."""
    used: list[Fact] = []
    missing: list[str] = []
    s = P1 + P0
    dP1 = P1.degree(var)
    dR = R.degree(var)  # -1 for R = 0
    cands: list[int] = []
    if s.is_zero():
        cands.append(dR - dP1 + 1 if not R.is_zero() else 0)
    else:
        ds = s.degree(var)
        if ds > dP1 - 1:
            if not R.is_zero():
                cands.append(dR - ds)
        elif ds < dP1 - 1:
            if not R.is_zero():
                cands.append(dR - dP1 + 1)
        else:
            if not R.is_zero():
                cands.append(dR - dP1 + 1)
            n0 = -_lead(s, var) / (_lead(P1, var) * step)
            if n0.is_constant():
                v = n0.constant_value()
                if v.denominator == 1 and v >= 0:
                    cands.append(int(v))
            else:
                missing.append(f"({n0}) is not a non-negative integer")
    hi = max(cands) if cands else -1
    return (0, hi), used, missing


def _dilation_bounds(P1: Poly, P0: Poly, R: Poly, var: str, q: RatFunc, registry: AssumptionRegistry):
    """Exponent range [lo, hi] for Laurent W with P1 W(q z) + P0 W(z) = R."""
    used: list[Fact] = []
    missing: list[str] = []

    def exceptional(ratio: RatFunc) -> list[int]:
        st = registry.constant_status(ratio, q)
        used.extend(st.used)
        if st.kind == "trivial":
            return [st.exponent]
        if st.kind == "unknown":
            missing.extend(st.missing)
        return []

    his: list[int] = []
    los: list[int] = []
    d1, d0 = P1.degree(var), P0.degree(var)
    e1, e0 = P1.low_degree(var), P0.low_degree(var)
    if not R.is_zero():
        his.append(R.degree(var) - max(d1, d0))
        los.append(R.low_degree(var) - min(e1, e0))
    if d1 == d0:
        his.extend(exceptional(-_lead(P0, var) / _lead(P1, var)))
    if e1 == e0:
        los.extend(exceptional(-_trail(P0, var) / _trail(P1, var)))
    if not his or not los:
        return (0, -1), used, missing
    return (min(los), max(his)), used, missing


def solve_first_order(a: RatFunc, b: RatFunc, d: RatFunc, var: str, kind: str, step: RatFunc,
                      registry: AssumptionRegistry | None = None,
                      degree_bound: int | None = None) -> FirstOrderSolution:
    """All rational u with u(phi z) d(z) = a(z) u(z) + b(z) inside certified bounds.

    When a bound depends on an undecided parameter condition, ``degree_bound``
    (or a default) is used instead and the result is marked uncertified; a
    solution found that way is still exact.
    """
    registry = registry or AssumptionRegistry()
    if a.is_zero() or d.is_zero():
        raise ValueError("a and d must be nonzero")
    if kind not in ("translation", "dilation"):
        raise ValueError("phi must be a translation or a dilation")
    names = a.variables
    for e in (b, d, step):
        names = tuple(dict.fromkeys(names + e.variables))
    if var not in names:
        names = names + (var,)
    a, b, d, step = (e.lift(names) for e in (a, b, d, step))
    c1, c0, g = cleared_equation(a, b, d)
    log = [f"cleared: ({c1}) u(phi z) + ({c0}) u(z) = {g}"]
    U, used, missing, ulog = universal_denominator(c1, c0, var, kind, step, registry)
    log += ulog
    log.append(f"universal denominator U = {U}")
    Ur = RatFunc.from_poly(U)
    P1p, P0p, Rp = cleared_numerator_equation(c1, c0, g, U, var, kind, step)
    bounds, bu, bm = numerator_bounds(P1p, P0p, Rp, var, kind, step, registry)
    used += bu
    missing += bm
    certified = not missing
    if not certified:
        B = degree_bound if degree_bound is not None else DEFAULT_FALLBACK_BOUND
        lo = min(bounds[0], -B) if kind == "dilation" else 0
        hi = max(bounds[1], B)
        log.append(f"bounds need undecided facts {missing}; falling back to [{lo}, {hi}]")
        bounds = (lo, hi)
    lo, hi = bounds
    log.append(f"numerator exponent range [{lo}, {hi}]")
    sol_u = FirstOrderSolution(None, [], Ur, bounds, certified, _dedup(used), sorted(set(missing)), log)
    if hi < lo:
        if Rp.is_zero():
            sol_u.particular = RatFunc.constant(0, names)
            return sol_u
        log.append("empty exponent range: no rational solution")
        sol_u.witness = []
        return sol_u
    system = numerator_system(P1p, P0p, Rp, var, kind, step, lo, hi)
    sol, (M, rhs) = constant_combination(system[0], system[1], (var,))
    z = RatFunc.variable(var, names)
    if sol.particular is None:
        sol_u.witness = sol.witness
        log.append("linear system inconsistent; witness recorded")
        return sol_u
    W = sum((c * z ** j for c, j in zip(sol.particular, range(lo, hi + 1))), RatFunc.constant(0, names))
    u = W / Ur
    if not residual(u, a, b, d, var, kind, step).is_zero():
        raise AssertionError("solver returned a non-solution")
    sol_u.particular = u
    for v in sol.basis:
        Wh = sum((c * z ** j for c, j in zip(v, range(lo, hi + 1))), RatFunc.constant(0, names))
        sol_u.homogeneous.append(Wh / Ur)
    return sol_u


def cleared_equation(a: RatFunc, b: RatFunc, d: RatFunc) -> tuple[Poly, Poly, Poly]:
    """Polynomials (c1, c0, g) with c1 u(phi z) + c0 u(z) = g equivalent to the equation."""
    D = RatFunc.from_poly(poly_lcm(poly_lcm(a.den, b.den), d.den))
    return (d * D).num, (-a * D).num, (b * D).num


def cleared_numerator_equation(c1: Poly, c0: Poly, g: Poly, U: Poly, var: str, kind: str,
                               step: RatFunc) -> tuple[Poly, Poly, Poly]:
    """(P1, P0, R) with P1 W(phi z) + P0 W(z) = R for u = W/U, common factors removed."""
    Ur = RatFunc.from_poly(U)
    Uphi = shift(Ur, var, kind, step)
    P1 = RatFunc.from_poly(c1) * Ur
    P0 = RatFunc.from_poly(c0) * Uphi
    R = RatFunc.from_poly(g) * Ur * Uphi
    den = RatFunc.from_poly(poly_lcm(poly_lcm(P1.den, P0.den), R.den))
    P1p, P0p, Rp = ((e * den).num for e in (P1, P0, R))
    common = P1p.gcd(P0p)
    if not Rp.is_zero():
        common = common.gcd(Rp)
    P1p, P0p = P1p.exquo(common), P0p.exquo(common)
    if not Rp.is_zero():
        Rp = Rp.exquo(common)
    return P1p, P0p, Rp


def numerator_bounds(P1: Poly, P0: Poly, R: Poly, var: str, kind: str, step: RatFunc,
                     registry: AssumptionRegistry):
    if kind == "translation":
        return _translation_bound(P1, P0, R, var, step)
    return _dilation_bounds(P1, P0, R, var, step, registry)


def numerator_system(P1: Poly, P0: Poly, R: Poly, var: str, kind: str, step: RatFunc,
                     lo: int, hi: int) -> tuple[list[RatFunc], RatFunc]:
    """Images L(z^j) = P1 (phi z)^j + P0 z^j for lo <= j <= hi, and the target R."""
    names = tuple(dict.fromkeys(P1.variables + P0.variables + R.variables + step.variables + (var,)))
    z = RatFunc.variable(var, names)
    zphi = shift(z, var, kind, step)
    P1r, P0r = RatFunc.from_poly(P1), RatFunc.from_poly(P0)
    images = [P1r * zphi ** j + P0r * z ** j for j in range(lo, hi + 1)]
    return images, RatFunc.from_poly(R).lift(names)


def check_no_solution(P1: Poly, P0: Poly, R: Poly, var: str, kind: str, step: RatFunc,
                      lo: int, hi: int, witness: Sequence[RatFunc]) -> bool:
    """Re-verify an infeasibility witness against the rebuilt numerator system."""
    if hi < lo:
        return not R.is_zero()
    images, target = numerator_system(P1, P0, R, var, kind, step, lo, hi)
    _, (M, rhs) = constant_combination(images, target, (var,))
    if len(witness) != len(M):
        return False
    for j in range(len(images)):
        s = sum((w * row[j] for w, row in zip(witness, M)), RatFunc.constant(0, target.variables))
        if not s.is_zero():
            return False
    s = sum((w * x for w, x in zip(witness, rhs)), RatFunc.constant(0, target.variables))
    return not s.is_zero()


def _dedup(facts: list[Fact]) -> list[Fact]:
    out: list[Fact] = []
    for f in facts:
        if all(str(f) != str(g) for g in out):
            out.append(f)
    return out
