"""Independent re-verification of a serialized report.

Only exact identities are re-evaluated (substitutions, matrix products,
residuals, infeasibility witnesses); no search is re-run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..dynsys import check_isotropic_integrability, is_first_integral
from ..galois2.characters import CharacterClass, RelationLattice, relation_lattice
from ..galois2.classify import GaloisClassification, HypothesisContext, nonintegrability_certificate
from ..galois2.registry import Fact, RegistryError
from ..galois2.solver import (
    check_no_solution,
    cleared_equation,
    cleared_numerator_equation,
    numerator_bounds,
    residual,
    universal_denominator,
)
from ..junior import junior_independence_rank, junior_part, verify_difference_first_integral
from ..symcore import ParseError, RatFunc, SymcoreError, UndeclaredSymbolError, parse_expression, substitute
from ..symcore.matrix import inverse, mat_eq, mat_mul, mat_subs
from ..varcurve import (
    DifferenceSystem,
    MoebiusTransform,
    PoleOnCurveError,
    classify_moebius,
    compose_on_curve,
    variational_system,
    verify_adapted,
)
from .problem import ProblemError, ProblemSpec


class ReportCorrupted(ValueError):
    """The report cannot be parsed back into exact objects."""


@dataclass
class RecheckResult:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, bool(ok), detail))

    def failures(self) -> list[str]:
        return [f"{n}: {d}" if d else n for n, ok, d in self.checks if not ok]


class _Ctx:
    def __init__(self, report: dict):
        try:
            self.spec = ProblemSpec.from_json(report["problem"])
            self.prob = self.spec.build()
        except (KeyError, ProblemError) as exc:
            raise ReportCorrupted(f"embedded problem unusable: {exc}") from exc
        self.symbols = self.spec.report_symbols

    def parse(self, text: Any) -> RatFunc:
        if not isinstance(text, str):
            raise ReportCorrupted(f"expected an expression string, got {text!r}")
        try:
            return parse_expression(text, self.symbols)
        except (ParseError, UndeclaredSymbolError, SymcoreError) as exc:
            raise ReportCorrupted(f"unparseable expression {text!r}: {exc}") from exc

    def matrix(self, rows: Any):
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ReportCorrupted("matrix must be a list of rows")
        return tuple(tuple(self.parse(e) for e in row) for row in rows)

    def fact(self, item: dict) -> Fact:
        try:
            return Fact(item["fact"], tuple(self.parse(a) for a in item["args"]))
        except (KeyError, TypeError, RegistryError) as exc:
            raise ReportCorrupted(f"bad fact {item!r}") from exc


def recheck(report: dict) -> RecheckResult:
    """Re-verify every witness in ``report``; raises ReportCorrupted if it cannot be read."""
    if not isinstance(report, dict) or "certificate" not in report:
        raise ReportCorrupted("not an analysis report")
    c = _Ctx(report)
    res = RecheckResult()
    try:
        _run(c, report, res)
    except (KeyError, TypeError, IndexError) as exc:
        raise ReportCorrupted(f"missing or malformed field: {exc!r}") from exc
    return res


def _run(c: _Ctx, report: dict, res: RecheckResult):
    spec, prob = c.spec, c.prob
    res.add("input hash", report.get("input_hash") == spec.input_hash())
    for e, h in zip(report["first_integrals"], prob.first_integrals):
        stored = c.parse(e["expr"])
        res.add(f"first integral {e['expr']} parses back", stored == h)
        res.add(f"first integral {e['expr']} check", is_first_integral(h, prob.f).holds == e["holds"])
    ad = report.get("adaptedness") or {}
    s = None
    if ad.get("holds"):
        phi = MoebiusTransform.from_ratfunc(c.parse(ad["phi"]), spec.curve_variable)
        image = compose_on_curve(prob.f, prob.curve)
        shifted = tuple(substitute(x, {spec.curve_variable: phi.as_ratfunc()}) for x in prob.curve.components)
        res.add("adaptedness f o iota = iota o phi", image == shifted)
        s = variational_system(prob.f, prob.curve, phi)
        stored = c.matrix(report["variational"]["matrix"])
        res.add("variational matrix", mat_eq(stored, s.A))
        s = DifferenceSystem(phi, stored)
    for j in report.get("juniors") or []:
        if "junior" not in j:
            continue
        h = c.parse(j["function"])
        jj = junior_part(h, prob.curve, prob.f.variables)
        stored = c.parse(j["junior"])
        res.add(f"junior part of {j['function']}", jj.expr == stored and jj.valuation == j["valuation"])
        if s is not None:
            res.add(f"junior {j['junior']} is a first integral", verify_difference_first_integral(stored, s) == j["verified"])
    zg = report.get("ziglin")
    if zg and s is not None:
        _check_ziglin(c, zg, s, res)
    norm = report.get("normalized")
    sn = None
    if norm and s is not None:
        sn = _check_normalized(c, norm, s, res)
    tri = report.get("triangular")
    classification = None
    if tri and tri.get("found") and sn is not None:
        P = c.matrix(tri["P"])
        T = c.matrix(tri["matrix"])
        lhs = mat_mul(mat_mul(inverse(sn.shift(P)), sn.A), P)
        res.add("gauge identity (P o phi)^-1 A P = T", mat_eq(lhs, T))
        res.add("triangular shape", T[1][0].is_zero())
        cl = report.get("classification")
        if cl:
            classification = _check_classification(c, cl, T, res)
    _check_certificate(c, report, classification, res)


def _check_ziglin(c: _Ctx, zg: dict, s: DifferenceSystem, res: RecheckResult):
    prob = c.prob
    inputs = [c.parse(x) for x in zg["inputs"]]
    binds = {f"F{i + 1}": h for i, h in enumerate(inputs)}
    for k, (p, g, j) in enumerate(zip(zg["combinations"], zg["functions"], zg["juniors"])):
        P = c.parse(p)
        G = c.parse(g)
        res.add(f"ziglin G{k + 1} = P(F)", substitute(P, binds) == G)
        jj = junior_part(G, prob.curve, prob.f.variables)
        res.add(f"ziglin junior of G{k + 1}", jj.expr == c.parse(j["junior"]) and jj.valuation == j["valuation"])
    js = [junior_part(c.parse(g), prob.curve, prob.f.variables) for g in zg["functions"]]
    res.add("ziglin junior rank", junior_independence_rank(js) == zg["rank"])


def _check_normalized(c: _Ctx, norm: dict, s: DifferenceSystem, res: RecheckResult) -> DifferenceSystem:
    var = s.variable
    w = c.parse(norm["normalizer"])
    mu = MoebiusTransform.from_ratfunc(w, var)
    phin = MoebiusTransform.from_ratfunc(c.parse(norm["phi"]), var)
    conj = mu.compose(s.phi).compose(mu.inverse())
    res.add("normal form of phi", conj.as_ratfunc() == phin.as_ratfunc())
    An = c.matrix(norm["matrix"])
    res.add("normalized matrix", mat_eq(An, mat_subs(s.A, {var: mu.inverse().as_ratfunc()})))
    return DifferenceSystem(phin, An)


def _character(c: _Ctx, data: dict, var: str, kind: str, step: RatFunc) -> CharacterClass:
    divisor = [(c.parse(r), int(m)) for r, m in data["divisor"]]
    const = c.parse(data["constant"])
    base = step if kind == "dilation" else None
    status = c.prob.registry.constant_status(const, base)
    return CharacterClass(kind, step, var, divisor, int(data["z_exponent"]), const,
                          c.parse(data["witness"]), status)


def _check_classification(c: _Ctx, cl: dict, T, res: RecheckResult) -> GaloisClassification:
    var, kind = cl["variable"], cl["kind"]
    step = c.parse(cl["step"])
    ca = _character(c, cl["characters"]["a"], var, kind, step)
    cd = _character(c, cl["characters"]["d"], var, kind, step)
    res.add("character of a reconstructs a", ca.reconstruct() == T[0][0])
    res.add("character of d reconstructs d", cd.reconstruct() == T[1][1])
    stored_facts = [c.fact(f) for f in cl["conditional_on"]]
    declared = {str(f) for f in c.prob.registry.facts}
    res.add("conditional facts are declared", all(str(f) in declared for f in stored_facts))
    lat = relation_lattice(ca, cd, c.prob.registry)
    stored_gens = sorted(tuple(g) for g in cl["lattice"])
    res.add("relation lattice", stored_gens == sorted(lat.generators) and lat.complete == cl["lattice_complete"])
    a, b, d = T[0][0], T[0][1], T[1][1]
    sol = cl.get("solver")
    udim = cl["unipotent_dimension"]
    out = GaloisClassification(kind, step, var, (ca, cd), RelationLattice(stored_gens, cl["lattice_complete"]),
                               udim, None, stored_facts, list(cl["missing"]))
    if sol is None:
        res.add("unipotent part absent", b.is_zero() and udim == 0)
        return out
    if sol["found"]:
        u = c.parse(sol["particular"])
        res.add("conjugating solution back-substitutes", residual(u, a, b, d, var, kind, step).is_zero())
        zero = a * 0
        for h in sol["homogeneous"]:
            res.add("homogeneous solution back-substitutes", residual(c.parse(h), a, zero, d, var, kind, step).is_zero())
        res.add("unipotent dimension 0", udim == 0)
        return out
    c1, c0, g = cleared_equation(a, b, d)
    U = c.parse(sol["denominator"])
    res.add("denominator is polynomial", U.is_polynomial())
    P1, P0, R = cleared_numerator_equation(c1, c0, g, U.num, var, kind, step)
    lo, hi = sol["bounds"]
    bounds, _, missing = numerator_bounds(P1, P0, R, var, kind, step, c.prob.registry)
    if sol["certified"]:
        Ur, _, umissing, _ = universal_denominator(c1, c0, var, kind, step, c.prob.registry)
        res.add("universal denominator", RatFunc.from_poly(Ur) == U and not umissing)
        covered = bounds[1] < bounds[0] or (lo <= bounds[0] and hi >= bounds[1])
        res.add("certified exponent range", not missing and covered)
    else:
        res.add("uncertified bounds need undeclared facts", bool(missing or sol["missing"]))
    wit = sol["witness"]
    if wit is None:
        res.add("infeasibility witness present", False)
        return out
    ok = check_no_solution(P1, P0, R, var, kind, step, lo, hi, [c.parse(x) for x in wit])
    res.add("infeasibility witness", ok)
    res.add("unipotent dimension", udim == (1 if sol["certified"] else None))
    return out


def _hypotheses(c: _Ctx) -> HypothesisContext:
    """Hypothesis context rebuilt from the embedded problem."""
    prob, f = c.prob, c.prob.f
    ctx = HypothesisContext()
    hs = prob.first_integrals
    ell, n2 = prob.spec.ell, len(f.variables)
    if ell is not None and n2 % 2 == 0 and len(hs) == n2 // 2 + ell:
        ctx.integrability_verified = check_isotropic_integrability(f, hs, ell).verdict
    elif n2 == 2:
        checks = [is_first_integral(h, f) for h in hs]
        ctx.integrability_verified = any(ch.holds and not ch.trivial for ch in checks)
    try:
        ad = verify_adapted(f, prob.curve, prob.phi)
        if ad.holds:
            variational_system(f, prob.curve, ad.phi)
    except PoleOnCurveError:
        ctx.adapted = False
        return ctx
    if not ad.holds:
        ctx.adapted = False
        return ctx
    cls = classify_moebius(ad.phi)
    ctx.periodic_phi = cls.period is not None
    if cls.kind != "general" and not ctx.periodic_phi:
        status = prob.registry.nonperiodic(cls.kind, cls.step)
        ctx.phi_order_status = {"free": "free", "unknown": "unknown"}.get(status.kind, "torsion")
        ctx.periodic_phi = status.kind in ("torsion", "trivial")
    ctx.rank = n2
    return ctx


def _check_certificate(c: _Ctx, report: dict, classification: GaloisClassification | None, res: RecheckResult):
    cert = report["certificate"]
    declared = {str(f) for f in c.prob.registry.facts}
    used = [c.fact(f) for f in cert["assumptions"]]
    res.add("certificate assumptions are declared", all(str(f) in declared for f in used))
    ctx = _hypotheses(c)
    res.add("periodicity of phi", bool((report.get("phi") or {}).get("periodic")) == ctx.periodic_phi
            or not ctx.adapted)
    expected = nonintegrability_certificate(classification, ctx)
    res.add("verdict follows from the verified data",
            (cert["verdict"], cert["criterion"], cert["guard_tripped"])
            == (expected.verdict, expected.criterion, expected.guard_tripped),
            "" if cert["verdict"] == expected.verdict else f"expected {expected.verdict}")


def recheck_file(path: str | Path) -> RecheckResult:
    try:
        report = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportCorrupted(f"cannot read report {path}: {exc}") from exc
    return recheck(report)
