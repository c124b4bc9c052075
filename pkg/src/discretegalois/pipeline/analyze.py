"""Full analysis chain: adaptedness, variational system, junior parts, Galois data, verdict."""

from __future__ import annotations

import time
from typing import Any

from .. import __version__
from ..dynsys import check_isotropic_integrability, functional_rank, is_first_integral, is_symplectic
from ..galois2.characters import CharacterClass
from ..galois2.classify import (
    HYPOTHESES_VIOLATED,
    Certificate,
    GaloisClassification,
    HypothesisContext,
    classify_triangular,
    nonintegrability_certificate,
)
from ..galois2.registry import Fact
from ..galois2.solver import FirstOrderSolution
from ..galois2.triangular import TriangularResult, triangularize
from ..junior import junior_part, verify_difference_first_integral, ziglin_combination
from ..symcore import RatFunc, SymcoreError
from ..symcore.matrix import Matrix
from ..varcurve import (
    PoleOnCurveError,
    classify_moebius,
    normalize_system,
    variational_system,
    verify_adapted,
)
from .problem import Problem, ProblemSpec

TOOL = "discretegalois"


def expr(r: RatFunc | None) -> str | None:
    return None if r is None else str(r)


def matrix(M: Matrix) -> list[list[str]]:
    return [[str(e) for e in row] for row in M]


def facts(fs) -> list[dict]:
    return [f.to_json() for f in fs]


def character_json(c: CharacterClass) -> dict:
    return {
        "divisor": [[str(r), m] for r, m in c.divisor],
        "z_exponent": c.z_exponent,
        "constant": str(c.constant),
        "witness": str(c.witness),
        "constant_status": c.constant_status.kind,
        "trivial": c.trivial,
    }


def solver_json(s: FirstOrderSolution | None) -> dict | None:
    if s is None:
        return None
    return {
        "found": s.found,
        "particular": expr(s.particular),
        "homogeneous": [str(h) for h in s.homogeneous],
        "denominator": str(s.denominator),
        "bounds": list(s.bounds),
        "certified": s.certified,
        "witness": None if s.witness is None else [str(w) for w in s.witness],
        "used": facts(s.used),
        "missing": list(s.missing),
        "transcript": list(s.transcript),
    }


def classification_json(c: GaloisClassification) -> dict:
    return {
        "variable": c.variable,
        "kind": c.kind,
        "step": str(c.step),
        "lattice": [list(g) for g in c.lattice.generators],
        "lattice_complete": c.lattice.complete,
        "torus": c.torus,
        "unipotent_dimension": c.unipotent_dim,
        "neutral_component": c.neutral_component,
        "complete": c.complete,
        "conditional_on": facts(c.conditional_on),
        "missing": list(c.missing),
        "characters": {"a": character_json(c.characters[0]), "d": character_json(c.characters[1])},
        "solver": solver_json(c.solver),
    }


def certificate_json(c: Certificate) -> dict:
    return {
        "verdict": c.verdict,
        "criterion": c.criterion,
        "assumptions": facts(c.assumptions),
        "missing": list(c.missing),
        "notes": list(c.notes),
        "guard_tripped": c.guard_tripped,
    }


class _Timer:
    def __init__(self):
        self.t0 = time.perf_counter()
        self.last = self.t0
        self.stages: dict[str, float] = {}

    def mark(self, name: str):
        now = time.perf_counter()
        self.stages[name] = round(now - self.last, 6)
        self.last = now

    def as_json(self) -> dict:
        return {"stages": self.stages, "total_seconds": round(time.perf_counter() - self.t0, 6)}


def analyze(spec: ProblemSpec, seed: int | None = None, degree_bound: int | None = None,
            ziglin_budget: int | None = None) -> dict[str, Any]:
    """Run the whole chain and return a JSON-ready report."""
    if seed is not None:
        spec.seed = seed
    if degree_bound is not None:
        spec.degree_bound = degree_bound
    if ziglin_budget is not None:
        spec.ziglin_budget = ziglin_budget
    prob = spec.build()
    timer = _Timer()
    report: dict[str, Any] = {
        "tool": {"name": TOOL, "version": __version__},
        "input_hash": spec.input_hash(),
        "problem": spec.to_json(),
    }
    ctx = HypothesisContext()
    _first_integrals(prob, report, ctx)
    timer.mark("first_integrals")
    system = _curve_and_system(prob, report, ctx)
    timer.mark("variational")
    if system is not None:
        _juniors(prob, system, report)
    timer.mark("junior_parts")
    classification = None
    if system is not None and not ctx.periodic_phi:
        classification = _galois(prob, system, report, ctx)
    timer.mark("classification")
    cert = nonintegrability_certificate(classification, ctx)
    if cert.verdict == HYPOTHESES_VIOLATED and cert.criterion != "none":
        raise AssertionError("criterion fired under violated hypotheses")
    report["certificate"] = certificate_json(cert)
    timer.mark("certificate")
    report["timing"] = timer.as_json()
    return report


def _first_integrals(prob: Problem, report: dict, ctx: HypothesisContext):
    f = prob.f
    out = []
    for src, h in zip(prob.spec.first_integrals, prob.first_integrals):
        chk = is_first_integral(h, f)
        out.append({"expr": str(h), "source": src, "holds": chk.holds, "trivial": chk.trivial})
    report["first_integrals"] = out
    report["symplectic"] = {
        "claimed": prob.spec.symplectic,
        "holds": is_symplectic(f) if len(f.variables) % 2 == 0 else None,
    }
    iso = None
    ell = prob.spec.ell
    n2 = len(f.variables)
    if ell is not None and n2 % 2 == 0 and len(prob.first_integrals) == n2 // 2 + ell:
        rep = check_isotropic_integrability(f, prob.first_integrals, ell)
        iso = {
            "n": rep.n,
            "ell": rep.ell,
            "rank": rep.rank,
            "rank_ok": rep.rank_ok,
            "involution_ok": rep.involution_ok,
            "brackets": {f"{i},{j}": str(b) for (i, j), b in sorted(rep.brackets.items())},
            "verdict": rep.verdict,
        }
    report["isotropic"] = iso
    nontrivial = [e for e in out if e["holds"] and not e["trivial"]]
    if iso is not None:
        ctx.integrability_verified = iso["verdict"]
    elif n2 == 2:
        # in dimension two one non-constant first integral is integrability
        ctx.integrability_verified = bool(nontrivial)


def _curve_and_system(prob: Problem, report: dict, ctx: HypothesisContext):
    try:
        ad = verify_adapted(prob.f, prob.curve, prob.phi)
    except PoleOnCurveError as exc:
        report["adaptedness"] = {"holds": False, "message": str(exc)}
        ctx.adapted = False
        return None
    report["adaptedness"] = {
        "holds": ad.holds,
        "phi": expr(ad.phi.as_ratfunc()) if ad.phi else None,
        "inferred": ad.inferred,
        "image": [str(e) for e in ad.image],
        "shifted": None if ad.shifted is None else [str(e) for e in ad.shifted],
        "mismatches": list(ad.mismatches),
        "message": ad.message,
    }
    if not ad.holds:
        ctx.adapted = False
        return None
    phi = ad.phi
    cls = classify_moebius(phi)
    ctx.periodic_phi = cls.period is not None
    status = None
    if cls.kind != "general" and not ctx.periodic_phi:
        status = prob.registry.nonperiodic(cls.kind, cls.step)
        ctx.phi_order_status = {"free": "free", "unknown": "unknown"}.get(status.kind, "torsion")
        ctx.periodic_phi = status.kind in ("torsion", "trivial")
        ctx.used += status.used
        ctx.missing += status.missing
    report["phi"] = {
        "kind_as_written": phi.kind,
        "normal_form": cls.kind,
        "step": expr(cls.step),
        "normalizer": expr(cls.normalizer),
        "fixed_points": list(cls.fixed_points),
        "period": cls.period,
        "periodic": ctx.periodic_phi,
        "order_status": status.kind if status else None,
        "used": facts(status.used) if status else [],
        "missing": list(status.missing) if status else [],
    }
    if ctx.periodic_phi:
        ctx.notes.append("hypothesis warning: phi has finite order")
    try:
        s = variational_system(prob.f, prob.curve, phi)
    except PoleOnCurveError as exc:
        report["variational"] = {"error": str(exc)}
        ctx.adapted = False
        return None
    report["variational"] = {
        "variable": s.variable,
        "phi": str(phi),
        "matrix": matrix(s.A),
        "symplectic": s.symplectic,
    }
    ctx.rank = s.rank
    return s, cls


def _juniors(prob: Problem, system, report: dict):
    s, _ = system
    out = []
    verified = []
    for e, h in zip(report["first_integrals"], prob.first_integrals):
        if not e["holds"] or e["trivial"]:
            continue
        try:
            j = junior_part(h, prob.curve, prob.f.variables)
        except (ValueError, SymcoreError) as exc:
            out.append({"function": str(h), "error": str(exc)})
            continue
        ok = verify_difference_first_integral(j.expr, s)
        out.append({"function": str(h), "valuation": j.valuation, "junior": str(j.expr), "verified": ok})
        verified.append(h)
    report["juniors"] = out
    report["ziglin"] = None
    if len(verified) >= 2 and functional_rank(verified, prob.f.variables) == len(verified):
        z = ziglin_combination(verified, prob.curve, prob.f.variables, budget=prob.spec.ziglin_budget,
                               seed=prob.spec.seed)
        report["ziglin"] = {
            "inputs": [str(h) for h in verified],
            "combinations": [str(p) for p in z.combinations],
            "functions": [str(g) for g in z.functions],
            "juniors": [{"valuation": j.valuation, "junior": str(j.expr),
                         "verified": verify_difference_first_integral(j.expr, s)} for j in z.juniors],
            "rank": z.rank,
            "exhausted": z.exhausted,
            "success": z.success,
            "transcript": list(z.transcript),
        }


def _galois(prob: Problem, system, report: dict, ctx: HypothesisContext) -> GaloisClassification | None:
    s, cls = system
    if cls.kind == "general":
        ctx.notes.append("phi has no normal form over the ground field")
        report["normalized"] = None
        return None
    sn, _ = normalize_system(s, cls)
    report["normalized"] = {"phi": str(sn.phi), "normalizer": str(cls.normalizer), "matrix": matrix(sn.A)}
    if sn.rank != 2:
        report["triangular"] = None
        return None
    tri: TriangularResult = triangularize(sn, prob.registry)
    if tri.form is None:
        report["triangular"] = {"found": False, "exhausted": tri.exhausted, "transcript": tri.transcript}
        return None
    t = tri.form
    report["triangular"] = {
        "found": True,
        "method": t.method,
        "orientation": t.orientation,
        "P": matrix(t.P),
        "matrix": matrix(t.matrix),
        "transcript": tri.transcript,
    }
    c = classify_triangular(t, sn.variable, cls.kind, cls.step, prob.registry, prob.spec.degree_bound)
    report["classification"] = classification_json(c)
    return c


def render_text(report: dict) -> str:
    """Short human-readable summary."""
    lines = [f"problem: {report['problem']['name']}  ({report['tool']['name']} {report['tool']['version']})"]
    ad = report.get("adaptedness", {})
    lines.append(f"adapted curve: {ad.get('holds')}  phi: {ad.get('phi')}")
    ph = report.get("phi")
    if ph:
        lines.append(f"phi normal form: {ph['normal_form']} step {ph['step']}  periodic: {ph['periodic']}")
    var = report.get("variational")
    if var and "matrix" in var:
        lines.append(f"variational matrix: {var['matrix']}")
    for e in report.get("first_integrals", []):
        lines.append(f"first integral {e['expr']}: holds={e['holds']} trivial={e['trivial']}")
    for j in report.get("juniors", []):
        if "junior" in j:
            lines.append(f"junior of {j['function']}: {j['junior']} (valuation {j['valuation']}) verified={j['verified']}")
    tri = report.get("triangular")
    if tri and tri.get("found"):
        lines.append(f"triangular form via {tri['method']}: P={tri['P']}  matrix={tri['matrix']}")
    cl = report.get("classification")
    if cl:
        lines.append(f"relation lattice: {cl['lattice']}  unipotent dim: {cl['unipotent_dimension']}")
        lines.append(f"neutral component: {cl['neutral_component']}")
    cert = report["certificate"]
    lines.append(f"verdict: {cert['verdict']}  criterion: {cert['criterion']}")
    if cert["assumptions"]:
        lines.append("assumptions used: " + ", ".join(f"{a['fact']}({', '.join(a['args'])})" for a in cert["assumptions"]))
    if cert["missing"]:
        lines.append("missing facts: " + "; ".join(cert["missing"]))
    for n in cert["notes"]:
        lines.append(f"note: {n}")
    return "\n".join(lines)
