"""Neutral component data for triangular rank-2 systems and the non-integrability verdict."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..symcore import RatFunc
from .characters import CharacterClass, RelationLattice, joint_character_classes, relation_lattice
from .registry import AssumptionRegistry, Fact
from .solver import FirstOrderSolution, solve_first_order
from .triangular import TriangularForm

NON_INTEGRABLE = "NON_INTEGRABLE"
INCONCLUSIVE = "INCONCLUSIVE"
HYPOTHESES_VIOLATED = "HYPOTHESES_VIOLATED"


def _dedup(facts) -> list[Fact]:
    out, seen = [], set()
    for f in facts:
        if str(f) not in seen:
            seen.add(str(f))
            out.append(f)
    return out


def torus_description(lattice: RelationLattice) -> str:
    gens = lattice.generators
    if not gens:
        return "diag(C*, C*)"
    if len(gens) == 2:
        return "{1}"
    (m, n), = gens
    if (m, n) == (1, 0):
        return "{1} x C*"
    if (m, n) == (0, 1):
        return "C* x {1}"
    return f"{{diag(x, y) : x^{m} y^{n} = 1}}"


@dataclass
class GaloisClassification:
    kind: str
    step: RatFunc
    variable: str
    characters: tuple[CharacterClass, CharacterClass]
    lattice: RelationLattice
    unipotent_dim: int | None       # None when the solver could not decide
    solver: FirstOrderSolution | None
    conditional_on: list[Fact] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return self.lattice.complete and self.unipotent_dim is not None

    @property
    def torus(self) -> str:
        return torus_description(self.lattice)

    @property
    def neutral_component(self) -> str:
        t = self.torus if self.lattice.complete else "undecided torus"
        if self.unipotent_dim == 1:
            return f"({t}) x| [[1, C], [0, 1]]"
        if self.unipotent_dim == 0:
            return t
        return f"{t}, unipotent part undecided"


def classify_triangular(t: TriangularForm, var: str, kind: str, step: RatFunc,
                        registry: AssumptionRegistry | None = None,
                        degree_bound: int | None = None) -> GaloisClassification:
    """Relation lattice of the diagonal characters and dimension of the unipotent part."""
    registry = registry or AssumptionRegistry()
    ca, cd = joint_character_classes([t.a, t.d], var, kind, step, registry)
    lattice = relation_lattice(ca, cd, registry)
    if t.b.is_zero():
        sol, udim = None, 0
    else:
        sol = solve_first_order(t.a, t.b, t.d, var, kind, step, registry, degree_bound)
        if sol.found:
            udim = 0
        elif sol.certified:
            udim = 1
        else:
            udim = None
    used = list(lattice.used) + (sol.used if sol else [])
    missing = list(lattice.missing) + (sol.missing if sol else [])
    return GaloisClassification(kind, step, var, (ca, cd), lattice, udim, sol,
                                _dedup(used), sorted(set(missing)))


@dataclass
class HypothesisContext:
    """Facts about the curve and the map collected before classification."""

    adapted: bool = True
    periodic_phi: bool = False
    phi_order_status: str = "free"      # free / torsion / unknown
    rank: int = 2
    triangular: bool = True
    integrability_verified: bool = False
    used: list[Fact] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


@dataclass
class Certificate:
    verdict: str
    criterion: str
    assumptions: list[Fact] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    guard_tripped: bool = False


def criteria_hold(c: GaloisClassification) -> list[str]:
    """Criteria established by a classification, in the order they are tried."""
    out = []
    if not c.lattice.complete:
        return out
    if c.lattice.rank == 0:
        out.append("torus_full_diag")
    if c.unipotent_dim == 1 and c.lattice.rank <= 1 and c.lattice.inside_first_axis():
        out.append("unipotent_affine")
    return out


def nonintegrability_certificate(c: GaloisClassification | None, ctx: HypothesisContext) -> Certificate:
    notes = list(ctx.notes)
    if not ctx.adapted:
        return Certificate(HYPOTHESES_VIOLATED, "none", notes=notes + ["curve is not adapted to the map"])
    if ctx.periodic_phi:
        return Certificate(HYPOTHESES_VIOLATED, "none", notes=notes + ["phi has finite order"])
    used = list(ctx.used)
    missing = list(ctx.missing)
    if ctx.phi_order_status == "unknown":
        notes.append("finite order of phi not excluded")
        return Certificate(INCONCLUSIVE, "none", _dedup(used), sorted(set(missing)), notes)
    if ctx.rank != 2:
        notes.append("classification implemented for rank 2 only")
        return Certificate(INCONCLUSIVE, "none", _dedup(used), sorted(set(missing)), notes)
    if c is None:
        notes.append("no invariant line found; irreducible systems are not classified here")
        return Certificate(INCONCLUSIVE, "none", _dedup(used), sorted(set(missing)), notes)
    used += c.conditional_on
    missing += c.missing
    fired = criteria_hold(c)
    if not fired:
        if not c.complete:
            notes.append("classification incomplete: " + "; ".join(c.missing))
        else:
            notes.append(f"neutral component {c.neutral_component}: no criterion applies")
        return Certificate(INCONCLUSIVE, "none", _dedup(used), sorted(set(missing)), notes)
    if ctx.integrability_verified:
        notes.append(f"criterion {fired[0]} contradicts a verified first integral; verdict withheld")
        return Certificate(INCONCLUSIVE, "none", _dedup(used), sorted(set(missing)), notes, guard_tripped=True)
    notes.append(f"neutral component {c.neutral_component}")
    return Certificate(NON_INTEGRABLE, fired[0], _dedup(used), [], notes)
