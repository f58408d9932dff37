"""Library-wide numerical settings and error types."""

from __future__ import annotations

from dataclasses import dataclass

TOL = 1e-9


@dataclass(frozen=True)
class Limits:
    """Enumeration caps and Monte Carlo budgets shared across modules."""

    boolean_dim: int = 24  # max n for dense 2^n tables
    code_message_bits: int = 16  # max k for hadamard_code / build_code
    exhaustive_patterns: int = 200_000  # corruption patterns per adversary call
    average_pairs: int = 1 << 20  # 2^k * k above which averages go Monte Carlo
    field_points: int = 1 << 16  # max p^n for finite-field enumeration
    line_cells: int = 1 << 24  # max origin x direction x lambda cells per line scan
    subset_bits: int = 24  # max (t-1)|V| for exhaustive hypergraph deviation
    slack_sigmas: float = 2.0  # standard errors subtracted in conservative checks


LIMITS = Limits()


class CapacityError(ValueError):
    """Input is larger than an enumeration cap."""


class BudgetExceeded(RuntimeError):
    """An exhaustive search would exceed its work budget."""


class VerificationError(RuntimeError):
    """A constructed object failed its exhaustive re-check."""


class DegradedError(RuntimeError):
    """A pipeline stage could not produce a usable object."""
