"""
dS QFT Lab - Errors

Exception hierarchy shared by all numerical modules.

NumericalError signals that a computation could not be carried out to the promised accuracy
(the suite runner maps it to exit code 3). ContractError signals a violated precondition and
also derives from ValueError so plain `except ValueError` callers keep working.
"""


class DsqftError(Exception):
    """Base class for all lab errors."""


# ============================================================================
# Numerical failures
# ============================================================================

class NumericalError(DsqftError):
    """A computation failed or left its accuracy budget."""


class GammaPoleError(NumericalError):
    """Gamma evaluated at (or within 1e-14 of) a non-positive integer."""


class NonConvergenceError(NumericalError):
    """A series or quadrature did not meet its tail bound."""


class NonRealResultError(NumericalError):
    """A quantity that must be real carried a significant imaginary part."""


class WindowTooLargeError(NumericalError):
    """Spectral window amplification exceeds the precision budget."""


class NumericalRangeError(NumericalError):
    """Result magnitude outside the floating point range."""


class DisconnectedIntervalError(NumericalError):
    """A domain-of-dependence sample set is not a single arc."""


# ============================================================================
# Contract violations
# ============================================================================

class ContractError(DsqftError, ValueError):
    """A precondition of an operation is violated."""


class DomainError(ContractError):
    """Argument outside the mathematical domain."""


class DimensionMismatchError(ContractError):
    """Operands built for different truncations."""


class MismatchedRadiusError(ContractError):
    """Points on hyperboloids of different radius."""


class CoincidenceError(ContractError):
    """Two-point kernel evaluated at coinciding points."""


class EmptyIntervalError(ContractError):
    """Interval contains no grid point."""


class OverlapError(ContractError):
    """Intervals that must be disjoint intersect."""


class CutoffError(ContractError):
    """Vector carries modes above the Fock mode cutoff."""


class DegreeCapError(ContractError):
    """Normal-ordered power above the supported degree."""


class NotBoundedBelowError(ContractError):
    """Interaction polynomial is not bounded from below."""


class FockDimensionError(ContractError):
    """Truncated Fock space exceeds the configured size guard."""
