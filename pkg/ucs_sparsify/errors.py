"""Exceptions raised by the numerical core.

Ingestion problems are reported as ``GraphFailure`` records inside a ``Result``
(see ``ucs_sparsify.graph.checks``); everything below that layer raises one of
these and lets the runner decide on the exit code.
"""


class UcsError(Exception):
    """Base class for every error raised by the sparsification pipeline."""

    exit_code: int = 1


class DomainError(UcsError, ValueError):
    """An argument lies outside the domain of the operation (e.g. a shift >= lambda_min)."""


class ParameterDomainError(DomainError):
    """(n, m, ell) or a parameter record violates its preconditions."""


class DimensionMismatchError(UcsError, ValueError):
    """Vector or matrix shapes do not agree with the graph."""


class NonFiniteMatrixError(UcsError, ValueError):
    """A matrix handed to an eigensolver holds NaN or infinite entries."""


class RankMismatchError(UcsError):
    """The numerical rank of W^{1/2}B differs from |V| - r."""


class SolverError(UcsError):
    """A scalar root solve failed to bracket or converge."""


class InfeasibleSelectionError(UcsError):
    """No remaining edge passes the trace test of the current iteration."""


class DegenerateUpdateError(UcsError):
    """The rank-one update denominator 1 + u^T M^{-1} u vanished."""


class CombinatorialGuardError(UcsError):
    """An exhaustive enumeration would exceed its subset limit."""


class SpanningStructureError(UcsError):
    """The selected edges could not be reduced to a spanning forest."""


class BoundViolationError(UcsError):
    """The achieved lambda_min does not exceed the guaranteed lower bound."""

    exit_code = 2
