"""Declarative problem files: JSON with expression strings."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..dynsys import RationalMap
from ..galois2.registry import AssumptionRegistry, RegistryError
from ..junior import EPS, fiber_names
from ..symcore import ParseError, RatFunc, SymcoreError, parse_expression
from ..varcurve import AdaptedCurve, DegenerateMoebiusError, MoebiusTransform


class ProblemError(ValueError):
    """Invalid problem file (exit status 2)."""


@dataclass
class Problem:
    """Parsed objects of a problem spec."""

    spec: "ProblemSpec"
    f: RationalMap
    curve: AdaptedCurve
    phi: MoebiusTransform | None
    registry: AssumptionRegistry
    first_integrals: list[RatFunc]


@dataclass
class ProblemSpec:
    name: str
    variables: list[str]
    parameters: list[str]
    map: list[str]
    curve_variable: str
    curve: list[str]
    phi: str | None = None
    symplectic: bool = False
    assumptions: list[dict] = field(default_factory=list)
    first_integrals: list[str] = field(default_factory=list)
    ell: int | None = None
    degree_bound: int | None = None
    ziglin_budget: int = 4
    seed: int = 0
    description: str = ""

    @classmethod
    def from_json(cls, data: Any) -> "ProblemSpec":
        if not isinstance(data, dict):
            raise ProblemError("problem file must hold a JSON object")
        try:
            curve = data["curve"]
            bounds = data.get("bounds", {})
            spec = cls(
                name=str(data.get("name", "problem")),
                variables=list(data["variables"]),
                parameters=list(data.get("parameters", [])),
                map=[str(e) for e in data["map"]],
                curve_variable=str(curve.get("variable", "z")),
                curve=[str(e) for e in curve["components"]],
                phi=curve.get("phi"),
                symplectic=bool(data.get("symplectic", False)),
                assumptions=list(data.get("assumptions", [])),
                first_integrals=[str(e) for e in data.get("first_integrals", [])],
                ell=data.get("ell"),
                degree_bound=bounds.get("degree_bound"),
                ziglin_budget=int(bounds.get("ziglin_budget", 4)),
                seed=int(data.get("seed", 0)),
                description=str(data.get("description", "")),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ProblemError(f"malformed problem file: {exc!r}") from exc
        spec.validate()
        return spec

    @classmethod
    def load(cls, path: str | Path) -> "ProblemSpec":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ProblemError(f"cannot read {path}: {exc}") from exc
        return cls.from_json(data)

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "name": self.name,
            "variables": list(self.variables),
            "parameters": list(self.parameters),
            "map": list(self.map),
            "symplectic": self.symplectic,
            "curve": {"variable": self.curve_variable, "components": list(self.curve)},
            "assumptions": list(self.assumptions),
            "first_integrals": list(self.first_integrals),
            "bounds": {"degree_bound": self.degree_bound, "ziglin_budget": self.ziglin_budget},
            "seed": self.seed,
        }
        if self.phi is not None:
            out["curve"]["phi"] = self.phi
        if self.ell is not None:
            out["ell"] = self.ell
        if self.description:
            out["description"] = self.description
        return out

    def input_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(self.variables) + tuple(self.parameters)

    @property
    def report_symbols(self) -> tuple[str, ...]:
        """Every symbol that may appear in a serialized report expression."""
        fib = fiber_names(len(self.variables))
        ks = tuple(f"F{i + 1}" for i in range(len(self.first_integrals)))
        return tuple(dict.fromkeys(self.symbols + (self.curve_variable,) + fib + ks))

    def validate(self):
        names = self.variables + self.parameters + [self.curve_variable]
        for n in names:
            if not isinstance(n, str) or not n.isidentifier():
                raise ProblemError(f"invalid symbol name {n!r}")
        if len(set(names)) != len(names):
            raise ProblemError("variables, parameters and the curve variable must be distinct")
        reserved = set(fiber_names(len(self.variables))) | {EPS}
        reserved |= {f"F{i + 1}" for i in range(len(self.first_integrals))}
        if reserved & set(names):
            raise ProblemError(f"reserved names used: {sorted(reserved & set(names))}")
        if not self.variables:
            raise ProblemError("no variables")
        if len(self.map) != len(self.variables):
            raise ProblemError("map arity differs from the number of variables")
        if len(self.curve) != len(self.variables):
            raise ProblemError("curve arity differs from the number of variables")
        if self.ell is not None and (not isinstance(self.ell, int) or self.ell < 0):
            raise ProblemError("ell must be a non-negative integer")
        if self.degree_bound is not None and (not isinstance(self.degree_bound, int) or self.degree_bound < 0):
            raise ProblemError("degree_bound must be a non-negative integer")
        if self.ziglin_budget < 1:
            raise ProblemError("ziglin_budget must be positive")
        self.build()

    def build(self) -> Problem:
        try:
            f = RationalMap.from_strings(self.variables, self.map, self.parameters, self.symplectic)
            curve = AdaptedCurve.from_strings(self.curve_variable, self.curve, self.parameters)
            phi = None
            if self.phi is not None:
                r = parse_expression(self.phi, (self.curve_variable,) + tuple(self.parameters))
                phi = MoebiusTransform.from_ratfunc(r, self.curve_variable)
            registry = AssumptionRegistry.from_json(self.assumptions, self.parameters)
            fis = [parse_expression(h, self.symbols) for h in self.first_integrals]
        except (ParseError, SymcoreError, RegistryError, DegenerateMoebiusError, ValueError, TypeError) as exc:
            raise ProblemError(str(exc)) from exc
        return Problem(self, f, curve, phi, registry, fis)
