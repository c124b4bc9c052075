"""Declared facts about symbolic parameters and the decisions that consume them.

Nonzero elements of QQ(params) form {+-1} x (free abelian group on primes and
on irreducible primitive polynomials in the parameters). Every constant is
mapped to its exponent vector over these atoms. A multiplicative relation
that holds between the vectors holds for all parameter values; the absence
of a relation only holds for parameters "in general position", and that is
what registry facts certify.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import factorint

from ..symcore import RatFunc, parse_expression, power_exponent
from ..symcore.matrix import solve_linear

FACT_ARITY = {
    "nonzero": 1,
    "not_root_of_unity": 1,
    "not_in_power_lattice": 2,
    "independent_multiplicative": 3,
}


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class Fact:
    kind: str
    args: tuple[RatFunc, ...]

    def __post_init__(self):
        if self.kind not in FACT_ARITY:
            raise RegistryError(f"unknown fact kind {self.kind!r}")
        if len(self.args) != FACT_ARITY[self.kind]:
            raise RegistryError(f"{self.kind} takes {FACT_ARITY[self.kind]} arguments")

    def __str__(self):
        return f"{self.kind}({', '.join(str(a) for a in self.args)})"

    def to_json(self) -> dict:
        return {"fact": self.kind, "args": [str(a) for a in self.args]}


# multiplicative atoms -------------------------------------------------------

def _poly_key(p) -> str:
    names = tuple(sorted(p.free_symbols()))
    return "(" + str(p.lift(names)) + ")"


def _add_rational(vec: dict, value: Fraction, mult: int):
    for prime, k in factorint(value.numerator).items():
        vec[f"#{prime}"] = vec.get(f"#{prime}", 0) + k * mult
    for prime, k in factorint(value.denominator).items():
        vec[f"#{prime}"] = vec.get(f"#{prime}", 0) - k * mult


def atom_vector(e: RatFunc) -> tuple[int, dict[str, int]]:
    """(sign, exponent vector) of a nonzero constant of QQ(params)."""
    if e.is_zero():
        raise RegistryError("zero has no multiplicative decomposition")
    sign = 1
    vec: dict[str, int] = {}
    for p, mult in ((e.num, 1), (e.den, -1)):
        c, facs = p.factor_list()
        for f, m in facs:
            cont, prim = f.content_and_primitive()
            c *= cont ** m
            vec[_poly_key(prim)] = vec.get(_poly_key(prim), 0) + m * mult
        if c < 0:
            sign = -sign
            c = -c
        if c != 1:
            _add_rational(vec, Fraction(c), mult)
    return sign, {k: v for k, v in vec.items() if v}


def is_prime_atom(key: str) -> bool:
    return key.startswith("#")


def _span_coords(target: dict, gens: Sequence[dict]) -> list[Fraction] | None:
    """Rational coordinates of target in span(gens), or None."""
    keys = sorted(set(target).union(*gens))
    if not keys:
        return [Fraction(0)] * len(gens)
    A = [[Fraction(g.get(k, 0)) for g in gens] for k in keys]
    b = [Fraction(target.get(k, 0)) for k in keys]
    if not gens:
        return [] if all(x == 0 for x in b) else None
    sol = solve_linear(A, b, Fraction(1), Fraction(0))
    return sol.particular


def _rank(vectors: Sequence[dict]) -> int:
    keys = sorted(set().union(*vectors)) if vectors else []
    if not keys:
        return 0
    from ..symcore.matrix import rank
    return rank(tuple(tuple(Fraction(v.get(k, 0)) for v in vectors) for k in keys))


# decisions -------------------------------------------------------------------

@dataclass
class ConstStatus:
    """Class of a constant c in C* / base^Z (base None means the trivial group {1}).

    kind: trivial (c = base^exponent), torsion (order > 1, finite), free
    (infinite order), unknown (needs a fact that is not declared).
    """

    kind: str
    order: int | None = None
    exponent: int | None = None
    used: list[Fact] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)
    note: str = ""

    @property
    def finite(self) -> bool | None:
        if self.kind in ("trivial", "torsion"):
            return True
        if self.kind == "free":
            return False
        return None


class AssumptionRegistry:
    """Immutable set of facts, validated against exact symbolic truth."""

    def __init__(self, facts: Iterable[Fact] = (), parameters: Sequence[str] = ()):
        self.parameters = tuple(parameters)
        self.facts = tuple(facts)
        for f in self.facts:
            self._validate(f)

    @classmethod
    def from_json(cls, items: Sequence[dict], parameters: Sequence[str]) -> "AssumptionRegistry":
        facts = []
        for item in items:
            kind = item.get("fact")
            args = item.get("args", [])
            if kind not in FACT_ARITY:
                raise RegistryError(f"unknown fact kind {kind!r}")
            facts.append(Fact(kind, tuple(parse_expression(str(a), parameters) for a in args)))
        return cls(facts, parameters)

    def to_json(self) -> list[dict]:
        return [f.to_json() for f in self.facts]

    def with_facts(self, more: Iterable[Fact]) -> "AssumptionRegistry":
        return AssumptionRegistry(self.facts + tuple(more), self.parameters)

    def __iter__(self):
        return iter(self.facts)

    def __len__(self):
        return len(self.facts)

    def _validate(self, f: Fact):
        for a in f.args:
            if a.free_symbols() - set(self.parameters):
                raise RegistryError(f"fact {f} mentions non-parameter symbols")
        if f.kind == "nonzero":
            if f.args[0].is_zero():
                raise RegistryError(f"inconsistent fact {f}")
            return
        for a in f.args:
            if a.is_zero():
                raise RegistryError(f"inconsistent fact {f}: zero argument")
        if f.kind == "not_root_of_unity":
            _, v = atom_vector(f.args[0])
            if not v:
                raise RegistryError(f"inconsistent fact {f}: argument is +-1")
        elif f.kind == "not_in_power_lattice":
            e, base = f.args
            _, ve = atom_vector(e)
            _, vb = atom_vector(base)
            if not ve or _span_coords(ve, [vb]) is not None:
                raise RegistryError(f"inconsistent fact {f}: a power of {e} lies in {base}^Z")
        else:
            e1, e2, base = f.args
            vs = [atom_vector(x)[1] for x in (e1, e2, base)]
            if _rank(vs) != _rank(vs[2:]) + 2:
                raise RegistryError(f"inconsistent fact {f}: a multiplicative relation holds")

    def _same(self, a: RatFunc | None, b: RatFunc | None) -> bool:
        if a is None or b is None:
            return a is None and b is None
        return a == b

    def _free_by_facts(self, vecs: Sequence[dict], base: RatFunc | None, vb: dict) -> Fact | None:
        """A fact showing that vecs are jointly multiplicatively free modulo base."""
        r = len(vecs)
        for f in self.facts:
            if f.kind == "not_in_power_lattice":
                gens_c = [f.args[0]]
                fbase = f.args[1]
                if base is None:
                    ok_base = True  # e^n != 1 follows from e^n not in any lattice
                else:
                    ok_base = self._same(fbase, base)
            elif f.kind == "independent_multiplicative":
                gens_c = list(f.args[:2])
                fbase = f.args[2]
                ok_base = True if base is None else self._same(fbase, base)
            elif f.kind == "not_root_of_unity":
                gens_c = [f.args[0]]
                ok_base = base is None
            else:
                continue
            if not ok_base or len(gens_c) < r:
                continue
            gv = [atom_vector(g)[1] for g in gens_c]
            extra = [vb] if base is not None else []
            coords = []
            for v in vecs:
                c = _span_coords(v, gv + extra)
                if c is None:
                    break
                coords.append(c[:len(gv)])
            else:
                from ..symcore.matrix import rank
                if rank(tuple(tuple(c) for c in coords)) == r:
                    return f
        return None

    def constant_status(self, c: RatFunc, base: RatFunc | None) -> ConstStatus:
        if c.is_zero():
            raise RegistryError("status of zero")
        if base is None:
            if c == 1:
                return ConstStatus("trivial", 1, 0)
            sign, vc = atom_vector(c)
            if not vc:
                return ConstStatus("torsion", 2, note="c = -1")
            if all(is_prime_atom(k) for k in vc):
                return ConstStatus("free", note="rational constant other than +-1")
            f = self._free_by_facts([vc], None, {})
            if f is not None:
                return ConstStatus("free", used=[f])
            return ConstStatus("unknown", missing=[f"not_root_of_unity({c})"])
        k = power_exponent(c, base)
        if k is not None:
            return ConstStatus("trivial", 1, k)
        _, vc = atom_vector(c)
        _, vb = atom_vector(base)
        coords = _span_coords(vc, [vb])
        if coords is not None:
            r = Fraction(coords[0]) if coords else Fraction(0)
            b, a = r.denominator, r.numerator
            order = b if c ** b == base ** a else 2 * b
            return ConstStatus("torsion", order, note=f"c^{order} in {base}^Z")
        if all(is_prime_atom(k) for k in set(vc) | set(vb)):
            return ConstStatus("free", note="rational constants without multiplicative relation")
        f = self._free_by_facts([vc], base, vb)
        if f is not None:
            return ConstStatus("free", used=[f])
        return ConstStatus("unknown", missing=[f"not_in_power_lattice({c}, {base})"])

    def jointly_free(self, cs: Sequence[RatFunc], base: RatFunc | None) -> ConstStatus:
        """Whether prod c_i^{m_i} has infinite order modulo base^Z for every m != 0."""
        vecs = [atom_vector(c)[1] for c in cs]
        vb = atom_vector(base)[1] if base is not None else {}
        extra = [vb] if base is not None else []
        if _rank(vecs + extra) != len(vecs) + _rank(extra):
            return ConstStatus("torsion", note="a multiplicative relation holds symbolically")
        atoms = set().union(*vecs, vb)
        if all(is_prime_atom(k) for k in atoms):
            return ConstStatus("free", note="rational constants without multiplicative relation")
        f = self._free_by_facts(vecs, base, vb)
        if f is not None:
            return ConstStatus("free", used=[f])
        names = ", ".join(str(c) for c in cs)
        return ConstStatus("unknown", missing=[f"independent_multiplicative({names}, {base if base is not None else 1})"])

    def nonperiodic(self, kind: str, step: RatFunc) -> ConstStatus:
        """Whether z -> z+h / z -> q z has infinite order."""
        if kind == "translation":
            if step.is_zero():
                return ConstStatus("torsion", 1, note="identity")
            return ConstStatus("free", note="nonzero translation")
        sign, v = atom_vector(step)
        if not v:
            return ConstStatus("torsion", 1 if sign == 1 else 2, note="q = +-1")
        if all(is_prime_atom(k) for k in v):
            return ConstStatus("free", note="rational q other than +-1")
        f = self._free_by_facts([v], None, {})
        if f is not None:
            return ConstStatus("free", used=[f])
        return ConstStatus("unknown", missing=[f"not_root_of_unity({step})"])
