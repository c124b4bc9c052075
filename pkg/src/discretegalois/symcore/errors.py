"""Exceptions raised by the symbolic core."""


class SymcoreError(ValueError):
    pass


class ParseError(SymcoreError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UndeclaredSymbolError(ParseError):
    pass


class ZeroDenominatorError(SymcoreError, ZeroDivisionError):
    pass


class PoleError(SymcoreError):
    """Expansion point lies on the polar locus."""
