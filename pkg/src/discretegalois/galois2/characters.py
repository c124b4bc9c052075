"""Rank-one difference equations y(phi z) = r(z) y(z) up to rational gauge.

For phi(z) = z + h or phi(z) = q z, every nonzero r factors as

    r = c * z^e * prod rep_i(z)^M_i * G(phi z) / G(z)

where the rep_i are monic irreducible factors lying in pairwise distinct
phi-orbits, e is only kept for dilations (z is fixed by z -> q z), and G is an
explicit rational function. Only the multiplicities, e and the constant c
modulo q^Z (or modulo 1 for translations) matter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from ..symcore import Poly, RatFunc, dispersion_analysis, substitute
from ..symcore.dispersion import phi_power
from .registry import AssumptionRegistry, ConstStatus, Fact


def shift(r: RatFunc, var: str, kind: str, step: RatFunc, k: int = 1) -> RatFunc:
    """r(phi^k z)."""
    if k == 0:
        return r
    return substitute(r, {var: phi_power(var, kind, step, k)})


@dataclass
class OrbitDecision:
    shifts: set[int]
    used: list[Fact] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)


def orbit_relations(p: Poly, r: Poly, var: str, kind: str, step: RatFunc,
                    registry: AssumptionRegistry) -> OrbitDecision:
    """All integers k with gcd(p(z), r(phi^k z)) nonconstant, decided with the registry."""
    res = dispersion_analysis(p, r, var, kind, step)
    out = OrbitDecision(set(res.relations))
    for root in res.ambiguous:
        if kind == "dilation":
            st = registry.constant_status(root, step)
            if st.kind in ("torsion", "free"):
                out.used.extend(st.used)
            else:
                out.missing.extend(st.missing or [f"{root} not in ({step})^Z"])
        else:
            out.missing.append(f"({root}) is not an integer")
    for fac in res.nonlinear:
        out.missing.append(f"roots of {fac} in the shift symbol avoid the orbit of phi")
    return out


@dataclass
class CharacterClass:
    kind: str
    step: RatFunc
    variable: str
    divisor: list[tuple[RatFunc, int]]
    z_exponent: int
    constant: RatFunc
    witness: RatFunc
    constant_status: ConstStatus
    used: list[Fact] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)  # undecided orbit relations

    @property
    def trivial(self) -> bool | None:
        if self.divisor or self.z_exponent:
            return False
        k = self.constant_status.kind
        if k == "trivial":
            return True
        if k in ("torsion", "free"):
            return False
        return None

    def reconstruct(self) -> RatFunc:
        """c * z^e * prod rep^M * G(phi z)/G(z)."""
        z = RatFunc.variable(self.variable, self.constant.variables)
        out = self.constant * z ** self.z_exponent
        for rep, m in self.divisor:
            out = out * rep ** m
        G = self.witness
        return out * shift(G, self.variable, self.kind, self.step) / G


def _blocks(r: RatFunc, var: str, kind: str) -> tuple[RatFunc, int, list[tuple[RatFunc, int]]]:
    """Constant, z-exponent and monic irreducible z-factors with signed multiplicities."""
    const = RatFunc.constant(1, r.variables)
    zexp = 0
    blocks: list[tuple[RatFunc, int]] = []
    for p, sgn in ((r.num, 1), (r.den, -1)):
        c, facs = p.factor_list()
        const = const * RatFunc.constant(c, r.variables) ** sgn
        for f, m in facs:
            if f.degree(var) < 1:
                const = const * RatFunc.from_poly(f) ** (sgn * m)
                continue
            lc = f.coefficient(var, f.degree(var))
            const = const * RatFunc.from_poly(lc) ** (sgn * m)
            monic = RatFunc(f, lc)
            if kind == "dilation" and f.degree(var) == 1 and f.coefficient(var, 0).is_zero():
                zexp += sgn * m
                continue
            blocks.append((monic, sgn * m))
    return const, zexp, blocks


def _telescoper(rep: RatFunc, var: str, kind: str, step: RatFunc, k: int) -> RatFunc:
    """g with g(phi z)/g(z) = rep(phi^k z)/rep(z)."""
    g = RatFunc.constant(1, rep.variables)
    if k > 0:
        for t in range(k):
            g = g * shift(rep, var, kind, step, t)
    else:
        for t in range(k, 0):
            g = g / shift(rep, var, kind, step, t)
    return g


def joint_character_classes(rs: Sequence[RatFunc], var: str, kind: str, step: RatFunc,
                            registry: AssumptionRegistry) -> list[CharacterClass]:
    """Character classes of several r's with a shared choice of orbit representatives."""
    if kind not in ("translation", "dilation"):
        raise ValueError("characters need a translation or a dilation")
    parsed = []
    for r in rs:
        if r.is_zero():
            raise ValueError("character of zero")
        parsed.append(_blocks(r, var, kind))
    reps: list[RatFunc] = []
    # block -> (rep index, k, lam) with block = rep(phi^k z) / lam
    placement: dict[int, tuple[int, int, RatFunc]] = {}
    used: list[Fact] = []
    missing: list[str] = []
    all_blocks: list[RatFunc] = []
    for _, _, blocks in parsed:
        for b, _ in blocks:
            if not any(b == x for x in all_blocks):
                all_blocks.append(b)
    for bi, b in enumerate(all_blocks):
        placed = False
        for ri, rep in enumerate(reps):
            if rep.num.degree(var) != b.num.degree(var):
                continue
            dec = orbit_relations(b.num, rep.num, var, kind, step, registry)
            used.extend(dec.used)
            missing.extend(dec.missing)
            if dec.shifts:
                k = min(dec.shifts, key=abs)
                shifted = shift(rep, var, kind, step, k)
                lam = shifted / b
                if lam.depends_on(var):
                    continue
                placement[bi] = (ri, k, lam)
                placed = True
                break
        if not placed:
            reps.append(b)
            placement[bi] = (len(reps) - 1, 0, RatFunc.constant(1, b.variables))
    out = []
    for r, (const, zexp, blocks) in zip(rs, parsed):
        mult = [0] * len(reps)
        G = RatFunc.constant(1, r.variables)
        c = const
        for b, m in blocks:
            bi = next(i for i, x in enumerate(all_blocks) if x == b)
            ri, k, lam = placement[bi]
            mult[ri] += m
            if k:
                G = G * _telescoper(reps[ri], var, kind, step, k) ** m
            c = c / lam ** m
        divisor = [(reps[i], m) for i, m in enumerate(mult) if m]
        status = registry.constant_status(c, step if kind == "dilation" else None)
        G = monic_in(G, var)
        cc = CharacterClass(kind, step, var, divisor, zexp, c, G, status, _dedup(used), sorted(set(missing)))
        if cc.reconstruct() != r:
            raise AssertionError("character decomposition failed to reproduce its input")
        out.append(cc)
    return out


def monic_in(r: RatFunc, var: str) -> RatFunc:
    """r rescaled by a constant so that numerator and denominator are monic in var."""
    ln = r.num.coefficient(var, r.num.degree(var))
    ld = r.den.coefficient(var, r.den.degree(var))
    return r * RatFunc(ld, ln)


def character_class(r: RatFunc, var: str, kind: str, step: RatFunc,
                    registry: AssumptionRegistry | None = None) -> CharacterClass:
    return joint_character_classes([r], var, kind, step, registry or AssumptionRegistry())[0]


def trivial_witness(cc: CharacterClass) -> RatFunc | None:
    """g with r = g(phi z)/g(z) when the class is trivial."""
    if cc.trivial is not True:
        return None
    z = RatFunc.variable(cc.variable, cc.constant.variables)
    g = cc.witness
    if cc.kind == "dilation":
        g = g * z ** cc.constant_status.exponent
    return g


def _dedup(facts: list[Fact]) -> list[Fact]:
    out: list[Fact] = []
    for f in facts:
        if all(str(f) != str(g) for g in out):
            out.append(f)
    return out


@dataclass
class RelationLattice:
    """L = {(m, n) : a^m d^n has a torsion character}, given by <= 2 generators."""

    generators: list[tuple[int, int]]
    complete: bool
    used: list[Fact] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)
    note: str = ""

    @property
    def rank(self) -> int:
        return len(self.generators)

    def contains(self, v: tuple[int, int]) -> bool:
        if not self.generators:
            return v == (0, 0)
        if len(self.generators) == 2:
            (a, b), (c, d) = self.generators
            det = a * d - b * c
            x = v[0] * d - v[1] * c
            y = a * v[1] - b * v[0]
            return x % det == 0 and y % det == 0
        (a, b), = self.generators
        if a:
            return v[0] % a == 0 and v[0] // a * b == v[1]
        return v[0] == 0 and v[1] % b == 0

    def inside_first_axis(self) -> bool:
        """L subset of Z x {0}, i.e. diag(1, C*) lies in the torus it cuts out."""
        return all(n == 0 for _, n in self.generators)


def _primitive(m: int, n: int) -> tuple[int, int]:
    g = gcd(m, n) or 1
    m, n = m // g, n // g
    if m < 0 or (m == 0 and n < 0):
        m, n = -m, -n
    return m, n


def relation_lattice(ca: CharacterClass, cd: CharacterClass, registry: AssumptionRegistry) -> RelationLattice:
    """Relation lattice of the pair of characters (joint classes required)."""
    keys = sorted({str(r) for r, _ in ca.divisor} | {str(r) for r, _ in cd.divisor})
    va = [dict((str(r), m) for r, m in ca.divisor).get(k, 0) for k in keys] + [ca.z_exponent]
    vd = [dict((str(r), m) for r, m in cd.divisor).get(k, 0) for k in keys] + [cd.z_exponent]
    used = _dedup(ca.used + cd.used)
    missing = sorted(set(ca.missing + cd.missing))
    base = ca.step if ca.kind == "dilation" else None
    za, zd = not any(va), not any(vd)
    if not za and not zd:
        # rank of the 2-column integer matrix
        i = next(i for i, x in enumerate(va) if x)
        m, n = vd[i], -va[i]
        if all(m * x + n * y == 0 for x, y in zip(va, vd)):
            div_gens = [_primitive(m, n)]
        else:
            return RelationLattice([], not missing, used, missing, "divisor parts independent")
    elif za and zd:
        div_gens = [(1, 0), (0, 1)]
    elif za:
        div_gens = [(1, 0)]
    else:
        div_gens = [(0, 1)]

    def const_of(m: int, n: int) -> RatFunc:
        return ca.constant ** m * cd.constant ** n

    if len(div_gens) == 1:
        m, n = div_gens[0]
        st = registry.constant_status(const_of(m, n), base)
        used = _dedup(used + st.used)
        if st.kind == "unknown":
            return RelationLattice([], False, used, sorted(set(missing + st.missing)), "constant undecided")
        gens = [div_gens[0]] if st.finite else []
        return RelationLattice(gens, not missing, used, missing)
    sa = registry.constant_status(ca.constant, base)
    sd = registry.constant_status(cd.constant, base)
    used = _dedup(used + sa.used + sd.used)
    if sa.finite and sd.finite:
        return RelationLattice([(1, 0), (0, 1)], not missing, used, missing)
    if sa.finite is None or sd.finite is None:
        return RelationLattice([], False, used, sorted(set(missing + sa.missing + sd.missing)), "constant undecided")
    if sa.finite:
        return RelationLattice([(1, 0)], not missing, used, missing)
    if sd.finite:
        return RelationLattice([(0, 1)], not missing, used, missing)
    joint = registry.jointly_free([ca.constant, cd.constant], base)
    used = _dedup(used + joint.used)
    if joint.kind == "free":
        return RelationLattice([], not missing, used, missing)
    if joint.kind == "unknown":
        return RelationLattice([], False, used, sorted(set(missing + joint.missing)), "joint freeness undecided")
    m, n = _symbolic_relation(ca.constant, cd.constant, base)
    return RelationLattice([_primitive(m, n)], not missing, used, missing)


def _symbolic_relation(a: RatFunc, d: RatFunc, base: RatFunc | None) -> tuple[int, int]:
    """Integers (m, n) != 0 with m vec(a) + n vec(d) in QQ vec(base)."""
    from fractions import Fraction
    from .registry import atom_vector
    from ..symcore.matrix import solve_linear

    vecs = [atom_vector(a)[1], atom_vector(d)[1]]
    if base is not None:
        vecs.append(atom_vector(base)[1])
    keys = sorted(set().union(*vecs))
    A = [[Fraction(v.get(k, 0)) for v in vecs] for k in keys]
    sol = solve_linear(A, [Fraction(0)] * len(keys), Fraction(1), Fraction(0))
    for v in sol.basis:
        if v[0] or v[1]:
            den = 1
            for x in v[:2]:
                den = den * x.denominator // gcd(den, x.denominator)
            return int(v[0] * den), int(v[1] * den)
    raise AssertionError("no symbolic relation found")
