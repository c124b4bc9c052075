"""Generic valuations and junior parts of functions along an adapted curve."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from .dynsys import functional_rank
from .symcore import Poly, RatFunc, SymcoreError, ZeroDenominatorError, substitute
from .symcore.linear import constant_combination
from .symcore.matrix import mat_vec
from .varcurve import AdaptedCurve, DifferenceSystem

EPS = "_eps"


def fiber_names(m: int) -> tuple[str, ...]:
    return tuple(f"Y{i + 1}" for i in range(m))


def _check_names(curve: AdaptedCurve, variables: Sequence[str], extra: Sequence[str] = ()):
    fib = fiber_names(len(variables))
    clash = (set(fib) | {EPS, curve.variable}) & (set(variables) | set(extra))
    if clash:
        raise ValueError(f"names {sorted(clash)} clash with the curve/fiber variables")


@dataclass(frozen=True)
class JuniorPart:
    valuation: int
    expr: RatFunc
    variables: tuple[str, ...]  # (z, Y1, .., Ym)

    def __post_init__(self):
        if self.expr.is_zero():
            raise ValueError("junior part must be nonzero")

    def __mul__(self, other: "JuniorPart") -> "JuniorPart":
        return JuniorPart(self.valuation + other.valuation, self.expr * other.expr, self.variables)

    def __str__(self):
        return f"{self.expr} (valuation {self.valuation})"


def _poly_jet(p: Poly, curve: AdaptedCurve, variables: Sequence[str]) -> tuple[int, RatFunc]:
    """epsilon-order and leading coefficient of p(iota(z) + eps Y)."""
    z = curve.variable
    fib = fiber_names(len(variables))
    names = merge = tuple(p.variables)
    for c in curve.components:
        merge = tuple(dict.fromkeys(merge + c.variables))
    names = tuple(dict.fromkeys(merge + (z,) + fib + (EPS,)))
    eps = RatFunc.variable(EPS, names)
    binds = {v: c.lift(names) + eps * RatFunc.variable(y, names)
             for v, c, y in zip(variables, curve.components, fib)}
    try:
        jet = substitute(RatFunc.from_poly(p).lift(names), binds)
    except ZeroDenominatorError as exc:
        raise SymcoreError("jet evaluation hit a pole along the curve") from exc
    if jet.is_zero():
        raise ValueError("function vanishes identically on every jet of the curve")
    if jet.den.degree(EPS) > 0:
        raise SymcoreError("unexpected epsilon in a jet denominator")
    k = jet.num.low_degree(EPS)
    lead = RatFunc(jet.num.coefficient(EPS, k), jet.den)
    return k, lead


def _split(H: RatFunc) -> tuple[Poly, Poly]:
    return H.num, H.den


def generic_valuation(H: RatFunc, curve: AdaptedCurve, variables: Sequence[str]) -> int:
    """nu(F) - nu(G) for H = F/G with F, G polynomial."""
    return junior_part(H, curve, variables).valuation


def junior_part(H: RatFunc, curve: AdaptedCurve, variables: Sequence[str]) -> JuniorPart:
    """Leading epsilon-coefficient of H(iota(z) + eps Y), quotient rule for H = F/G."""
    if H.is_zero():
        raise ValueError("the zero function has no junior part")
    _check_names(curve, variables, tuple(s for s in H.free_symbols() if s not in variables))
    F, G = _split(H)
    kf, lf = _poly_jet(F, curve, variables)
    kg, lg = _poly_jet(G, curve, variables)
    vars_out = (curve.variable,) + fiber_names(len(variables))
    return JuniorPart(kf - kg, lf / lg, vars_out)


def verify_difference_first_integral(h: RatFunc, s: DifferenceSystem, fibers: Sequence[str] | None = None) -> bool:
    """h(phi z, A(z) Y) == h(z, Y)."""
    fib = tuple(fibers) if fibers is not None else fiber_names(s.rank)
    z = s.variable
    names = tuple(dict.fromkeys(h.variables + s.A[0][0].variables + (z,) + fib))
    Y = tuple(RatFunc.variable(y, names) for y in fib)
    AY = mat_vec(s.A, Y)
    binds = {z: s.phi.as_ratfunc()}
    binds.update(dict(zip(fib, AY)))
    return substitute(h.lift(names), binds) == h


def junior_independence_rank(js: Sequence[JuniorPart]) -> int:
    if not js:
        return 0
    return functional_rank([j.expr for j in js], js[0].variables)


@dataclass
class ZiglinResult:
    combinations: list[RatFunc]       # P_i in the symbols F1..Fk
    functions: list[RatFunc]          # G_i = P_i(F)
    juniors: list[JuniorPart]
    rank: int
    exhausted: bool
    transcript: list[str] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return not self.exhausted and self.rank == len(self.functions)


def _monomials(k: int, budget: int):
    for deg in range(1, budget + 1):
        for exps in itertools.product(range(deg + 1), repeat=k):
            if sum(exps) == deg:
                yield exps


def ziglin_combination(Fs: Sequence[RatFunc], curve: AdaptedCurve, variables: Sequence[str],
                       budget: int = 4, seed: int = 0, max_rounds: int = 8,
                       random_trials: int = 16) -> ZiglinResult:
    """Triangular recombination G_i = F_i - sum c_m m(G_1..G_{i-1}) with independent junior parts.

    Dependent juniors are first eliminated exactly: the junior of G_i is
    written as a constant combination of junior parts of monomials in the
    earlier G's of the same valuation and of degree <= budget, and that
    combination is subtracted. If no such combination exists, a seeded random
    search over small integer combinations is tried before giving up.
    """
    k = len(Fs)
    if functional_rank(list(Fs), variables) != k:
        raise ValueError("input functions are not functionally independent")
    rng = random.Random(seed)
    sym = tuple(f"F{i + 1}" for i in range(k))
    Psym = [RatFunc.variable(s, sym) for s in sym]
    Ps: list[RatFunc] = []
    Gs: list[RatFunc] = []
    Js: list[JuniorPart] = []
    log: list[str] = []
    exhausted = False
    for i, F in enumerate(Fs):
        cur, P = F, Psym[i]
        accepted = False
        for _round in range(max_rounds):
            j = junior_part(cur, curve, variables)
            if junior_independence_rank(Js + [j]) == len(Js) + 1:
                accepted = True
                break
            mons = []
            for exps in _monomials(len(Gs), budget):
                val = sum(e * jj.valuation for e, jj in zip(exps, Js))
                if val != j.valuation:
                    continue
                expr = RatFunc.constant(1, j.expr.variables)
                for e, jj in zip(exps, Js):
                    expr = expr * jj.expr ** e
                mons.append((exps, expr))
            sol = None
            if mons:
                sol, _ = constant_combination([m for _, m in mons], j.expr, j.variables)
            if sol is None or sol.particular is None:
                log.append(f"G{i + 1}: junior {j.expr} not a combination of degree <= {budget}")
                break
            corr_f = RatFunc.constant(0, cur.variables)
            corr_p = RatFunc.constant(0, sym)
            for (exps, _), c in zip(mons, sol.particular):
                if c.is_zero():
                    continue
                mf = RatFunc.constant(1, cur.variables)
                mp = RatFunc.constant(1, sym)
                for e, G, Pp in zip(exps, Gs, Ps):
                    mf = mf * G ** e
                    mp = mp * Pp ** e
                corr_f = corr_f + mf * c
                corr_p = corr_p + mp * c
            cur, P = cur - corr_f, P - corr_p
            log.append(f"G{i + 1}: subtracted {corr_p}")
            if cur.is_zero():
                raise ValueError("recombination cancelled a function; inputs are dependent")
        if not accepted:
            found = _random_search(cur, P, Gs, Ps, Js, curve, variables, budget, rng, random_trials, sym)
            if found is not None:
                cur, P = found
                log.append(f"G{i + 1}: random combination {P}")
                accepted = True
        if not accepted:
            exhausted = True
            log.append(f"budget exhausted at G{i + 1} (degree <= {budget})")
        Gs.append(cur)
        Ps.append(P)
        Js.append(junior_part(cur, curve, variables))
    return ZiglinResult(Ps, Gs, Js, junior_independence_rank(Js), exhausted, log)


def _random_search(cur, P, Gs, Ps, Js, curve, variables, budget, rng, trials, sym):
    if not Gs:
        return None
    mons = list(_monomials(len(Gs), budget))
    for _ in range(trials):
        chosen = rng.sample(mons, min(len(mons), rng.randint(1, 3)))
        f, p = cur, P
        for exps in chosen:
            c = rng.choice([-2, -1, 1, 2])
            mf = RatFunc.constant(c, cur.variables)
            mp = RatFunc.constant(c, sym)
            for e, G, Pp in zip(exps, Gs, Ps):
                mf = mf * G ** e
                mp = mp * Pp ** e
            f, p = f + mf, p + mp
        if f.is_zero():
            continue
        j = junior_part(f, curve, variables)
        if junior_independence_rank(Js + [j]) == len(Js) + 1:
            return f, p
    return None
