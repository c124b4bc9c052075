"""Exact arithmetic in QQ(symbols): parsing, polynomials, rational functions."""

from .dispersion import dispersion_analysis, dispersion_set, power_exponent
from .errors import (
    ParseError,
    PoleError,
    SymcoreError,
    UndeclaredSymbolError,
    ZeroDenominatorError,
)
from .parser import parse_ast, parse_expression
from .poly import Poly, Rational
from .ratfunc import RatFunc, differentiate, epsilon_expansion, normalize, substitute

__all__ = [
    "ParseError",
    "PoleError",
    "Poly",
    "RatFunc",
    "Rational",
    "SymcoreError",
    "UndeclaredSymbolError",
    "ZeroDenominatorError",
    "differentiate",
    "dispersion_analysis",
    "dispersion_set",
    "epsilon_expansion",
    "normalize",
    "parse_ast",
    "parse_expression",
    "power_exponent",
    "substitute",
]
