"""Exception hierarchy.

Everything this package raises deliberately derives from MemlagError, so
callers can catch one base class.  The subtree mirrors the pipeline:
curve definition problems, netlist problems, and numerical failures.
"""

from __future__ import annotations


class MemlagError(Exception):
    """Base class for all errors raised by this package."""


class CurveError(MemlagError):
    """Invalid constitutive curve definition."""


class CurveDomainError(CurveError):
    """Evaluation point lies outside a curve's declared domain."""


class CurveRangeError(CurveError):
    """Inversion target lies outside a curve's range."""


class NetlistError(MemlagError):
    """Problem with a textual circuit description."""


class NetlistSyntaxError(NetlistError):
    """Malformed netlist text.  Carries the source location."""

    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column


class CircuitValidationError(NetlistError):
    """A system was requested for a circuit whose validation reports errors."""

    def __init__(self, diagnostics):
        msgs = [d.message for d in diagnostics if d.severity == "error"]
        super().__init__("; ".join(msgs) if msgs else "circuit failed validation")
        self.diagnostics = diagnostics


class NumericError(MemlagError):
    """Failure of the numerical machinery."""


class DegenerateInertiaError(NumericError):
    """The inertia block restricted to second-order coordinates is singular."""


class AlgebraicSolveError(NumericError):
    """A first-order (algebraic) row could not be solved for its velocity."""


class StepUnderflowError(NumericError):
    """Adaptive step control drove the step size below the resolvable limit."""


class DomainExitError(NumericError):
    """A trajectory left the declared domain of some element's curve."""

    def __init__(self, message: str, time: float | None = None,
                 element: str | None = None):
        super().__init__(message)
        self.time = time
        self.element = element
