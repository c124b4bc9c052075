"""Seeded random instances with known answers, shared by the property and acceptance suites."""

from __future__ import annotations

import random
from dataclasses import dataclass

from discretegalois.dynsys import RationalMap
from discretegalois.galois2 import AssumptionRegistry, Fact
from discretegalois.symcore import RatFunc, parse_expression, substitute
from discretegalois.varcurve import AdaptedCurve, MoebiusTransform

XY = ("x", "y")


@dataclass
class ConjugatedInstance:
    f: RationalMap
    H: RatFunc
    curve: AdaptedCurve
    phi: MoebiusTransform
    psi: RationalMap
    lam: int


def _affine_pair(rng: random.Random):
    """A unimodular affine map and its inverse, as component strings."""
    while True:
        a, b, c, d = (rng.randint(-2, 2) for _ in range(4))
        if a * d - b * c == 1:
            break
    s, t = rng.randint(-2, 2), rng.randint(-2, 2)
    fwd = [f"{a}*x + {b}*y + {s}", f"{c}*x + {d}*y + {t}"]
    # inverse of v -> M v + w is v -> M^-1 (v - w)
    inv = [f"{d}*(x - {s}) - {b}*(y - {t})", f"-{c}*(x - {s}) + {a}*(y - {t})"]
    return fwd, inv


def conjugated_instance(rng: random.Random) -> ConjugatedInstance:
    """f = psi^-1 o D o psi with D = (lam x, y/lam), psi a degree <= 2 automorphism.

    H = (xy) o psi is a first integral of f and psi^-1(z, 0) is adapted to z -> lam z.
    """
    lam = rng.choice([2, 3, 5, -2, -3])
    k = rng.choice([-2, -1, 1, 2])
    if rng.random() < 0.5:
        shear, shear_inv = [f"x + {k}*y^2", "y"], [f"x - {k}*y^2", "y"]
    else:
        shear, shear_inv = ["x", f"y + {k}*x^2"], ["x", f"y - {k}*x^2"]
    aff, aff_inv = _affine_pair(rng)
    psi = RationalMap.from_strings(XY, shear).compose(RationalMap.from_strings(XY, aff))
    psi_inv = RationalMap.from_strings(XY, aff_inv).compose(RationalMap.from_strings(XY, shear_inv))
    D = RationalMap.from_strings(XY, [f"{lam}*x", f"y/{lam}"])
    f = psi_inv.compose(D).compose(psi)
    H = psi.apply(parse_expression("x*y", XY))
    names = ("z",)
    binds = {"x": parse_expression("z", names), "y": parse_expression("0", names)}
    curve = AdaptedCurve("z", tuple(substitute(c.lift(("x", "y", "z")), binds).lift(names)
                                    for c in psi_inv.components))
    phi = MoebiusTransform.dilation(parse_expression(str(lam), names), "z")
    return ConjugatedInstance(f, H, curve, phi, psi, lam)


@dataclass
class PlantedInstance:
    a: RatFunc
    b: RatFunc
    d: RatFunc
    u: RatFunc
    kind: str
    step: RatFunc
    registry: AssumptionRegistry


def _rand_poly(rng: random.Random, deg: int, monic: bool = False) -> str:
    coeffs = [rng.randint(-4, 4) for _ in range(deg)] + [1 if monic else rng.choice([-3, -1, 1, 2])]
    return " + ".join(f"({c})*z^{j}" for j, c in enumerate(coeffs))


def planted_instance(rng: random.Random) -> PlantedInstance:
    """a, d and a rational u with numerator degree <= 6; b is chosen so that u solves the equation."""
    choice = rng.random()
    if choice < 0.5:
        kind, names, step_text = "translation", ("z",), str(rng.choice([1, 2, -1]))
    elif choice < 0.9:
        kind, names, step_text = "dilation", ("z",), rng.choice(["2", "3", "1/2", "-3"])
    else:
        kind, names, step_text = "dilation", ("z", "q"), "q"
    step = parse_expression(step_text, names)
    reg = AssumptionRegistry([Fact("not_root_of_unity", (parse_expression("q", ("q",)),))], ("q",)) \
        if "q" in names else AssumptionRegistry()

    def coef_expr(deg):
        p = _rand_poly(rng, deg)
        return parse_expression(p, names)

    a = coef_expr(rng.randint(0, 2))
    d = coef_expr(rng.randint(0, 2))
    if rng.random() < 0.3:
        a = a / parse_expression(_rand_poly(rng, 1, monic=True), names)
    num = parse_expression(_rand_poly(rng, rng.randint(0, 6)), names)
    den = parse_expression(_rand_poly(rng, rng.randint(0, 2), monic=True), names)
    u = num / den
    z = parse_expression("z", names)
    zphi = z + step if kind == "translation" else z * step
    b = substitute(u, {"z": zphi}) * d - a * u
    return PlantedInstance(a, b, d, u, kind, step, reg)
