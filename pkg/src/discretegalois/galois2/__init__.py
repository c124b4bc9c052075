"""Galois data of rank-2 triangular difference systems and non-integrability certificates."""

from .characters import CharacterClass, RelationLattice, character_class, joint_character_classes, relation_lattice
from .classify import (
    HYPOTHESES_VIOLATED,
    INCONCLUSIVE,
    NON_INTEGRABLE,
    Certificate,
    GaloisClassification,
    HypothesisContext,
    classify_triangular,
    nonintegrability_certificate,
)
from .registry import AssumptionRegistry, Fact, RegistryError
from .solver import FirstOrderSolution, solve_first_order
from .triangular import TriangularForm, TriangularResult, triangularize

__all__ = [
    "AssumptionRegistry",
    "Certificate",
    "CharacterClass",
    "Fact",
    "FirstOrderSolution",
    "GaloisClassification",
    "HYPOTHESES_VIOLATED",
    "HypothesisContext",
    "INCONCLUSIVE",
    "NON_INTEGRABLE",
    "RegistryError",
    "RelationLattice",
    "TriangularForm",
    "TriangularResult",
    "character_class",
    "classify_triangular",
    "joint_character_classes",
    "nonintegrability_certificate",
    "relation_lattice",
    "solve_first_order",
    "triangularize",
]
