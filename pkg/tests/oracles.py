"""Reference routes that do not go through the package's algebra.

Expressions are evaluated by Python itself on Fractions, or handed to sympy's
expression layer (sympify/cancel/diff), never to symcore's Poly or RatFunc.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction

import sympy


def py_source(text: str) -> str:
    return text.replace("^", "**")


def eval_fraction(text: str, values: dict) -> Fraction:
    """Evaluate an expression string exactly with Fraction arithmetic."""
    env = {k: Fraction(v) for k, v in values.items()}
    env["_F"] = Fraction
    src = re.sub(r"\b(\d+)\b", r"_F(\1)", py_source(text))
    return eval(src, {"__builtins__": {}}, env)


def to_sympy(text: str, symbols) -> sympy.Expr:
    loc = {s: sympy.Symbol(s) for s in symbols}
    return sympy.sympify(py_source(text), locals=loc)


def sympy_equal(a: str, b: str, symbols) -> bool:
    return sympy.simplify(to_sympy(a, symbols) - to_sympy(b, symbols)) == 0


def random_point(names, rng: random.Random, lo: int = -9, hi: int = 9) -> dict:
    pt = {}
    for n in names:
        num = rng.randint(lo, hi)
        den = rng.randint(1, 5)
        pt[n] = Fraction(num, den)
    return pt


def agree_at_points(a: str, b: str, names, rng: random.Random, trials: int = 6) -> bool:
    """a == b at random rational points (points where either side has a pole are skipped)."""
    seen = 0
    for _ in range(trials * 10):
        pt = random_point(names, rng)
        try:
            va, vb = eval_fraction(a, pt), eval_fraction(b, pt)
        except ZeroDivisionError:
            continue
        if va != vb:
            return False
        seen += 1
        if seen >= trials:
            return True
    return seen > 0


def sympy_matrix(rows, symbols) -> sympy.Matrix:
    return sympy.Matrix([[to_sympy(e, symbols) for e in row] for row in rows])


def sympy_jacobian(components, variables, symbols) -> sympy.Matrix:
    F = sympy.Matrix([to_sympy(c, symbols) for c in components])
    return F.jacobian([sympy.Symbol(v) for v in variables])


def matrices_equal(A: sympy.Matrix, B: sympy.Matrix) -> bool:
    return all(sympy.simplify(x) == 0 for x in (A - B))
