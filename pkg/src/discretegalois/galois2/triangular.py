"""Reduction of rank-2 systems Y(phi z) = A(z) Y(z) to upper triangular form.

A rational gauge P whose first column spans an invariant line puts the system
in the form [[a, b], [0, d]]. Lines are searched in order: coordinate axes,
constant lines (1, c), then rational lines (1, w(z)) through hypergeometric
solutions of the scalar equation satisfied by the first coordinate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from ..symcore import Poly, RatFunc, power_exponent
from ..symcore.linear import collect, constant_combination, poly_lcm
from ..symcore.matrix import Matrix, det
from ..varcurve import DifferenceSystem, gauge_transform, sqrt_ratfunc
from .characters import shift
from .registry import AssumptionRegistry

N_SYMBOL = "_n"


@dataclass
class TriangularForm:
    P: Matrix
    a: RatFunc
    b: RatFunc
    d: RatFunc
    method: str
    orientation: str = "upper"

    @property
    def matrix(self) -> Matrix:
        return ((self.a, self.b), (self.a * 0, self.d))


@dataclass
class TriangularResult:
    form: TriangularForm | None
    transcript: list[str] = field(default_factory=list)
    exhausted: bool = False


def _matrix_consts(A: Matrix):
    one = A[0][0] ** 0
    return one, one * 0


def _form(s: DifferenceSystem, P: Matrix, method: str) -> TriangularForm | None:
    t = gauge_transform(s, P)
    if not t.A[1][0].is_zero():
        return None
    return TriangularForm(P, t.A[0][0], t.A[0][1], t.A[1][1], method)


def _quadratic_roots(a2: RatFunc, a1: RatFunc, a0: RatFunc) -> list[RatFunc]:
    """Roots in QQ(params) of a2 x^2 + a1 x + a0 (not all zero)."""
    if a2.is_zero():
        if a1.is_zero():
            return []
        return [-a0 / a1]
    disc = a1 * a1 - a2 * a0 * 4
    s = sqrt_ratfunc(disc)
    if s is None:
        return []
    roots = [(-a1 + s) / (a2 * 2), (-a1 - s) / (a2 * 2)]
    return roots if roots[0] != roots[1] else roots[:1]


def constant_invariant_lines(A: Matrix, var: str) -> list[RatFunc]:
    """Constants c with A (1, c) proportional to (1, c)."""
    A11, A12 = A[0]
    A21, A22 = A[1]
    coeffs = [A12, A11 - A22, -A21]
    D = poly_lcm(poly_lcm(coeffs[0].den, coeffs[1].den), coeffs[2].den)
    Dr = RatFunc.from_poly(D)
    nums = [collect((c * Dr).num, (var,)) for c in coeffs]
    keys = sorted(set().union(*nums), reverse=True)
    zero = RatFunc.constant(0, ())
    cands: list[RatFunc] | None = None
    for k in keys:
        a2, a1, a0 = (n.get(k, zero) for n in nums)
        if a2.is_zero() and a1.is_zero():
            if not a0.is_zero():
                return []
            continue
        cands = _quadratic_roots(a2, a1, a0)
        break
    if cands is None:
        return []
    out = []
    for c in cands:
        val = coeffs[0] * c * c + coeffs[1] * c + coeffs[2]
        if val.is_zero():
            out.append(c)
    return out


def _monic_divisors(p: Poly, var: str, limit: int) -> list[RatFunc] | None:
    _, facs = p.factor_list()
    parts = []
    for f, m in facs:
        if f.degree(var) < 1:
            continue
        lc = f.coefficient(var, f.degree(var))
        parts.append((RatFunc(f, lc), m))
    total = 1
    for _, m in parts:
        total *= m + 1
    if total > limit:
        return None
    out = []
    for exps in itertools.product(*[range(m + 1) for _, m in parts]):
        d = RatFunc.constant(1, p.variables)
        for (f, _), e in zip(parts, exps):
            d = d * f ** e
        out.append(d)
    return out


def _lead(p: Poly, var: str) -> tuple[int, RatFunc]:
    return p.degree(var), RatFunc.from_poly(p.coefficient(var, p.degree(var)))


def _trail(p: Poly, var: str) -> tuple[int, RatFunc]:
    return p.low_degree(var), RatFunc.from_poly(p.coefficient(var, p.low_degree(var)))


def _binom_poly(j: int, n: RatFunc) -> RatFunc:
    out = RatFunc.constant(1, n.variables)
    for i in range(j):
        out = out * (n - i) / (i + 1)
    return out


def _integer_roots(poly_n: RatFunc) -> tuple[list[int], bool]:
    """Non-negative integer roots of a polynomial in N_SYMBOL; flag if undecided roots exist."""
    p = poly_n.num
    _, facs = p.factor_list()
    roots, undecided = [], False
    for f, _ in facs:
        if f.degree(N_SYMBOL) != 1:
            if f.degree(N_SYMBOL) > 1 and f.free_symbols() - {N_SYMBOL}:
                undecided = True
            continue
        r = RatFunc(-f.coefficient(N_SYMBOL, 0), f.coefficient(N_SYMBOL, 1))
        if r.is_constant():
            v = r.constant_value()
            if v.denominator == 1 and v >= 0:
                roots.append(int(v))
        else:
            undecided = True
    return roots, undecided


def _degree_candidates(Qs: Sequence[Poly], Z: RatFunc, var: str, kind: str, step: RatFunc,
                       registry: AssumptionRegistry) -> tuple[list[int], bool]:
    """Possible degrees n of C in Z^2 Q2 C(phi^2 z) + Z Q1 C(phi z) + Q0 C = 0."""
    Q2, Q1, Q0 = Qs
    D = max(q.degree(var) for q in Qs)
    if kind == "dilation":
        coeffs = []
        for i, Q in ((2, Q2), (1, Q1), (0, Q0)):
            dq, lc = _lead(Q, var) if not Q.is_zero() else (-1, None)
            coeffs.append(Z ** i * lc if dq == D else Z * 0)
        roots = _quadratic_roots(*coeffs)
        out, undecided = [], False
        for X in roots:
            if X.is_zero():
                continue
            st = registry.constant_status(X, step)
            if st.kind == "trivial" and st.exponent >= 0:
                out.append(st.exponent)
            elif st.kind == "unknown":
                undecided = True
        return out, undecided
    names = tuple(dict.fromkeys(Z.variables + step.variables + (N_SYMBOL,)))
    n = RatFunc.variable(N_SYMBOL, names)
    S = []
    for j in range(D + 3):
        acc = RatFunc.from_poly(Q0) if j == 0 else Z * 0
        acc = acc + Z * RatFunc.from_poly(Q1) + Z * Z * RatFunc.from_poly(Q2) * 2 ** j
        S.append(acc * step ** j)
    coeff_cache = [collect(s.num, (var,)) for s in S]
    dens = [s.den for s in S]
    for k in range(1, D + 3):
        poly_n = RatFunc.constant(0, names)
        for j in range(0, k + 1):
            c = coeff_cache[j].get((D - k + j,))
            if c is None:
                continue
            poly_n = poly_n + _binom_poly(j, n) * c / RatFunc.from_poly(dens[j])
        if not poly_n.is_zero():
            return _integer_roots(poly_n)
    return [], True


def _hyper_ratios(p2: Poly, p1: Poly, p0: Poly, var: str, kind: str, step: RatFunc,
                  registry: AssumptionRegistry, limit: int, log: list[str]) -> tuple[list[RatFunc], bool]:
    """Rational r with r(phi z) r(z) p2 + r(z) p1 + p0 = 0 (hypergeometric solutions)."""
    alphas = _monic_divisors(p0, var, limit)
    p2b = shift(RatFunc.from_poly(p2), var, kind, step, -1).num
    betas = _monic_divisors(p2b, var, limit)
    if alphas is None or betas is None or len(alphas) * len(betas) > limit:
        log.append("divisor pairs exceed the search budget")
        return [], True
    found: list[RatFunc] = []
    undecided = False
    for al, be in itertools.product(alphas, betas):
        Q2r = RatFunc.from_poly(p2) * shift(al, var, kind, step) / shift(be, var, kind, step)
        Q0r = RatFunc.from_poly(p0) * be / al
        if not (Q2r.is_polynomial() and Q0r.is_polynomial()):
            continue
        den = RatFunc.from_poly(poly_lcm(Q2r.den, Q0r.den))
        Qs = [(q * den).num for q in (Q2r, RatFunc.from_poly(p1), Q0r)]
        if kind == "translation":
            D = max(q.degree(var) for q in Qs if not q.is_zero())
            cs = [(_lead(q, var)[1] if not q.is_zero() and q.degree(var) == D else RatFunc.constant(0, ())) for q in Qs]
        else:
            e = min(q.low_degree(var) for q in Qs if not q.is_zero())
            cs = [(_trail(q, var)[1] if not q.is_zero() and q.low_degree(var) == e else RatFunc.constant(0, ())) for q in Qs]
        for Z in _quadratic_roots(*cs):
            if Z.is_zero():
                continue
            degs, und = _degree_candidates(Qs, Z, var, kind, step, registry)
            undecided = undecided or und
            if not degs:
                continue
            nmax = max(degs)
            names = tuple(dict.fromkeys(Qs[0].variables + Qs[1].variables + Qs[2].variables + Z.variables + (var,)))
            z = RatFunc.variable(var, names)
            images = []
            for j in range(nmax + 1):
                zj = z ** j
                images.append(Z * Z * RatFunc.from_poly(Qs[0]) * shift(zj, var, kind, step, 2)
                              + Z * RatFunc.from_poly(Qs[1]) * shift(zj, var, kind, step, 1)
                              + RatFunc.from_poly(Qs[2]) * zj)
            sol, _ = constant_combination(images, RatFunc.constant(0, names), (var,))
            for v in sol.basis:
                C = sum((c * z ** j for j, c in enumerate(v)), RatFunc.constant(0, names))
                if C.is_zero():
                    continue
                r = Z * al / be * shift(C, var, kind, step) / C
                found.append(r)
                log.append(f"hypergeometric ratio {r}")
                return found, undecided
    return found, undecided


def triangularize(s: DifferenceSystem, registry: AssumptionRegistry | None = None,
                  pair_limit: int = 256) -> TriangularResult:
    """Upper triangular form (P o phi)^{-1} A P = [[a, b], [0, d]], or None within the search budget."""
    registry = registry or AssumptionRegistry()
    if s.rank != 2:
        raise ValueError("triangularize handles rank 2 only")
    A = s.A
    one, zero = _matrix_consts(A)
    var = s.variable
    log: list[str] = []
    if A[1][0].is_zero():
        return TriangularResult(_form(s, ((one, zero), (zero, one)), "already triangular"), ["already triangular"])
    if A[0][1].is_zero():
        P = ((zero, one), (one, zero))
        return TriangularResult(_form(s, P, "coordinate swap"), ["second axis invariant; swapped"])
    for c in constant_invariant_lines(A, var):
        P = ((one, zero), (c, one))
        form = _form(s, P, "constant invariant line")
        if form is not None:
            log.append(f"constant invariant line (1, {c})")
            return TriangularResult(form, log)
    log.append("no constant invariant line")
    kind = s.phi.kind
    if kind == "general":
        log.append("phi not normalized; rational line search skipped")
        return TriangularResult(None, log, exhausted=True)
    step = s.phi.step
    A11, A12 = A[0]
    A21, A22 = A[1]
    A11p = shift(A11, var, kind, step)
    A12p = shift(A12, var, kind, step)
    T = A11p + A12p * A22 / A12
    Dd = A12p * det(A) / A12
    L = RatFunc.from_poly(poly_lcm(T.den, Dd.den))
    p2 = L.num
    p1 = (-T * L).num
    p0 = (Dd * L).num
    ratios, undecided = _hyper_ratios(p2, p1, p0, var, kind, step, registry, pair_limit, log)
    for r in ratios:
        w = (r - A11) / A12
        P = ((one, zero), (w, one))
        form = _form(s, P, "rational invariant line")
        if form is not None:
            log.append(f"rational invariant line (1, {w})")
            return TriangularResult(form, log)
    log.append("no rational invariant line found")
    return TriangularResult(None, log, exhausted=undecided)
