import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discretegalois.dynsys import (
    RationalMap,
    SymplecticStructure,
    apply_differential,
    check_isotropic_integrability,
    functional_rank,
    is_first_integral,
    is_symplectic,
    jacobian,
    poisson_bracket,
    symplectic_gradient,
)
from discretegalois.symcore import RatFunc, parse_expression, substitute
from discretegalois.symcore.matrix import det

from oracles import matrices_equal, sympy_jacobian, sympy_matrix

EX1 = ["q*x/(1 - y/(x - 1))", "qb*y*(1 - y/(x - 1))"]
EX3 = ["y*(a0 + a1*x) - x + 1", "x*y*(b0 + b1*y)"]


def rmap(components, params=(), variables=("x", "y")):
    return RationalMap.from_strings(variables, components, params)


def pe(text, names=("x", "y")):
    return parse_expression(text, names)


def test_jacobian_example1_on_curve():
    f = rmap(EX1, ("q", "qb"))
    J = jacobian(f)
    ref = sympy_jacobian(EX1, ("x", "y"), ("x", "y", "q", "qb"))
    assert matrices_equal(sympy_matrix([[str(e) for e in row] for row in J], ("x", "y", "q", "qb")), ref)
    on_curve = [[substitute(e, {"y": RatFunc.constant(0)}) for e in row] for row in J]
    names = f.symbols
    expected = [["q", "q*x/(x - 1)"], ["0", "qb"]]
    assert all(on_curve[i][j] == parse_expression(expected[i][j], names) for i in range(2) for j in range(2))


def test_jacobian_example3_on_curve():
    params = ("a0", "a1", "b0", "b1")
    f = rmap(EX3, params)
    names = f.symbols
    J = [[substitute(e, {"y": RatFunc.constant(0)}) for e in row] for row in jacobian(f)]
    assert J[0][0] == parse_expression("-1", names)
    assert J[0][1] == parse_expression("a0 + a1*x", names)
    assert J[1][0].is_zero()
    assert J[1][1] == parse_expression("x*b0", names)


def test_identity_jacobian():
    J = jacobian(rmap(["x", "y"]))
    assert [[str(e) for e in row] for row in J] == [["1", "0"], ["0", "1"]]


def test_is_symplectic_examples():
    assert is_symplectic(rmap(["x + y", "y"]))
    assert not is_symplectic(rmap(["2*x", "y"]))
    assert is_symplectic(rmap(["x + c", "y"], ("c",)))


def test_poisson_bracket_examples():
    S = SymplecticStructure(("x1", "x2"))
    n = ("x1", "x2")
    H = parse_expression("x1^3*x2 + x2", n)
    assert poisson_bracket(H, H, S).is_zero()
    assert poisson_bracket(parse_expression("x1", n), parse_expression("x2", n), S) == 1
    assert poisson_bracket(parse_expression("x1^2", n), parse_expression("x2", n), S) == parse_expression("2*x1", n)


def test_symplectic_gradient_examples():
    S = SymplecticStructure(("x1", "x2"))
    n = ("x1", "x2")
    X = symplectic_gradient(parse_expression("x2", n), S)
    assert [str(c) for c in X.components] == ["1", "0"]
    X0 = symplectic_gradient(parse_expression("5", n), S)
    assert all(c.is_zero() for c in X0.components)
    H = parse_expression("x1*x2", n)
    XH = symplectic_gradient(H, S)
    # X_H(G) = {G, H} with X_H = J grad H
    for g in ("x1", "x2", "x1^2 + x2"):
        G = parse_expression(g, n)
        assert apply_differential(G, XH, n) == poisson_bracket(G, H, S)


def test_first_integral_examples():
    f = rmap(["q*x/(1 - y/(x - 1))", "y/q*(1 - y/(x - 1))"], ("q",))
    chk = is_first_integral(pe("x*y", f.symbols), f)
    assert chk and not chk.trivial
    chk5 = is_first_integral(pe("5", f.symbols), f)
    assert chk5 and chk5.trivial
    assert not is_first_integral(pe("x"), rmap(["x + 1", "y"]))


def test_functional_rank_examples():
    n = ("x", "y")
    assert functional_rank([pe("x"), pe("y")], n) == 2
    assert functional_rank([pe("x*y"), pe("x^2*y^2")], n) == 1
    assert functional_rank([pe("x"), pe("x^2")], n) == 1


def test_isotropic_examples():
    f = rmap(["q*x/(1 - y/(x - 1))", "y/q*(1 - y/(x - 1))"], ("q",))
    rep = check_isotropic_integrability(f, [pe("x*y", f.symbols)], 0)
    assert rep.verdict
    rep = check_isotropic_integrability(f, [pe("3", f.symbols)], 0)
    assert not rep.rank_ok and not rep.verdict
    g = rmap(["2*x", "y/2"])
    rep = check_isotropic_integrability(g, [pe("x*y")], 0)
    assert rep.first_integrals == [True] and rep.rank_ok and rep.verdict


def test_isotropic_four_dimensional():
    v = ("x1", "x2", "y1", "y2")
    f = rmap(["2*x1", "3*x2", "y1/2", "y2/3"], (), v)
    hs = [parse_expression(h, v) for h in ("x1*y1", "x2*y2")]
    assert check_isotropic_integrability(f, hs, 0).verdict
    bad = [parse_expression(h, v) for h in ("x1*y1", "x1*y2")]
    assert not check_isotropic_integrability(f, bad, 0).verdict
    with pytest.raises(ValueError):
        check_isotropic_integrability(f, hs, 3)


# properties -------------------------------------------------------------------

def _poly_text(rng, names, deg=3):
    terms = []
    for _ in range(rng.randint(1, 4)):
        c = rng.randint(-3, 3) or 1
        mono = "*".join(f"{v}^{rng.randint(0, deg)}" for v in names)
        terms.append(f"{c}*{mono}")
    return " + ".join(terms)


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_jacobi_identity(seed):
    rng = random.Random(seed)
    n = ("x1", "x2", "y1", "y2")
    S = SymplecticStructure(n)
    F, G, H = (parse_expression(_poly_text(rng, n, 2), n) for _ in range(3))
    pb = lambda a, b: poisson_bracket(a, b, S)
    total = pb(F, pb(G, H)) + pb(G, pb(H, F)) + pb(H, pb(F, G))
    assert total.is_zero()


def _shear(rng, names):
    x, y = names
    c = rng.randint(-3, 3)
    k = rng.randint(1, 3)
    if rng.random() < 0.5:
        return [f"{x} + {c}*{y}^{k}", y]
    return [x, f"{y} + {c}*{x}^{k}"]


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_symplectic_implies_unit_determinant(seed):
    rng = random.Random(seed)
    f = rmap(_shear(rng, ("x", "y")))
    g = rmap(_shear(rng, ("x", "y")))
    h = f.compose(g)
    assert is_symplectic(h)
    assert det(jacobian(h)) == 1


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_first_integral_closed_under_composition(seed):
    rng = random.Random(seed)
    a, b = rng.choice([2, 3, -2]), rng.choice([5, -1, 7])
    f = rmap([f"{a}*x", f"y/{a}"])
    g = rmap([f"{b}*x", f"y/{b}"])
    H = pe(f"(x*y)^{rng.randint(1, 3)} + {rng.randint(0, 4)}")
    assert is_first_integral(H, f) and is_first_integral(H, g)
    assert is_first_integral(H, f.compose(g))


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_functional_rank_invariant_under_recombination(seed):
    rng = random.Random(seed)
    n = ("x", "y")
    F1 = pe(_poly_text(rng, n))
    F2 = pe(_poly_text(rng, n))
    r = functional_rank([F1, F2], n)
    c = rng.randint(-3, 3)
    G1 = F1 + F2 * c
    G2 = F2 + G1 ** 2 if rng.random() < 0.5 else F2
    assert functional_rank([G1, G2], n) == r
