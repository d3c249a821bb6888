"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class FracAdamsError(Exception):
    """Base class for all errors raised by fracadams."""


class DomainError(FracAdamsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DuplicateNodes(FracAdamsError, ValueError):
    pass


class WindowTooLarge(FracAdamsError, ValueError):
    pass


class DegreeTooLarge(FracAdamsError, ValueError):
    pass


class ConfigError(FracAdamsError, ValueError):
    pass


class RhsDomainError(FracAdamsError, ArithmeticError):
    """The right-hand side could not be evaluated at ``(t, x)``."""

    def __init__(self, t: float, x: float, reason: str = ""):
        self.t = t = float(t)
        self.x = x = float(x)
        self.reason = reason
        msg = f"right-hand side undefined at t={t!r}, x={x!r}"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class NonFiniteValue(FracAdamsError, ArithmeticError):
    pass


class NoConvergence(FracAdamsError, ArithmeticError):
    pass


class ToleranceNotMet(FracAdamsError, ArithmeticError):
    def __init__(self, message: str, achieved: float):
        self.achieved = achieved
        super().__init__(f"{message} (estimated error {achieved:.3e})")


class GridMismatch(FracAdamsError, ValueError):
    pass


class PreconditionError(FracAdamsError, ValueError):
    pass


class ExpressionError(FracAdamsError, ValueError):
    """Base for problems found while parsing a right-hand side expression."""


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}")


class UnknownIdentifier(ExpressionError):
    def __init__(self, name: str, pos: int):
        self.name = name
        self.pos = pos
        super().__init__(f"unknown identifier {name!r} at position {pos}")
