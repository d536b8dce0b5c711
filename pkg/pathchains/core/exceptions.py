"""
Error hierarchy shared by the library, the CLI and the API
"""

from typing import Optional


class PathChainsError(Exception):
    """Base class for all pathchains errors"""


class DigraphParseError(PathChainsError, ValueError):
    """Malformed line in an edge-list document"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class DigraphValidationError(PathChainsError, ValueError):
    """Digraph violates a structural rule (loops, undeclared endpoints)"""


class RingSpecError(PathChainsError, ValueError):
    """Ring specification could not be parsed"""


class FamilyDomainError(PathChainsError, ValueError):
    """Unknown family or parameter outside the family's domain"""


class MaxDimRequiredError(PathChainsError, ValueError):
    """Paths are unbounded and no dimension cap was supplied"""


class UndefinedEndpointsError(PathChainsError, ValueError):
    """Head or tail set requested for the zero chain"""


class FaceGraphError(PathChainsError, ValueError):
    """Face multihypergraph violates one of its defining conditions"""


class NotInSpanError(PathChainsError, ArithmeticError):
    """Vector does not lie in the span of the given basis"""


class ContractViolation(PathChainsError):
    """A documented precondition was not met by the caller"""


class InvariantViolation(PathChainsError):
    """An internal guarantee failed; always indicates a bug"""


class MutationCapExceeded(PathChainsError):
    """Mutation-closure search exceeded the configured cap"""

    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"mutation closure exceeded {cap} canonical forms (undetermined)")
