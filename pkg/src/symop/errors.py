"""Exception types shared across the package.

Structural errors signal malformed data (shape or block mismatches);
domain errors signal inputs outside an operation's mathematical domain
(for example a non-self-adjoint element passed to a spectral routine).
The remaining types mark rejected verdicts of the classification
routines and are part of their public contract.
"""


class SymopError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(SymopError):
    """Shapes or block structures do not match."""


class DomainError(SymopError):
    """Input lies outside the mathematical domain of the operation."""


class NotSurjectiveError(SymopError):
    """The operator is singular where an invertible one is required."""


class NotFactorableError(SymopError):
    """No candidate factorization met the residual tolerance."""


class ClassificationFailedError(SymopError):
    """A map could not be classified as multiplicative or anti-multiplicative."""


class FactorizationRejectedError(SymopError):
    """A proposed factorization failed its verification identities."""


class HypothesisViolatedError(SymopError):
    """A hypothesis guaranteed by exact arithmetic failed numerically."""
