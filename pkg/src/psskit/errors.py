"""Exception types shared across the toolkit."""

from __future__ import annotations


class PsskitError(Exception):
    """Base class for all toolkit-specific errors."""


class FamilyFormatError(PsskitError):
    """A family file could not be parsed or failed validation."""


class SubspaceMembershipError(PsskitError):
    """A vector expected to lie in a subspace does not."""

    def __init__(self, index: int, residual: float):
        self.index = index
        self.residual = residual
        super().__init__(
            f"vector {index} lies outside the subspace (projection residual {residual:.3e})"
        )


class SingularBasisError(PsskitError):
    """Vectors expected to form a linear basis are linearly dependent."""


class NotPositiveSpanningError(PsskitError):
    """An operation that requires a positive spanning set received something else.

    Carries the failed check so callers can surface the certificate.
    """

    def __init__(self, check):
        self.check = check
        if check.rank_deficit is not None:
            detail = f"span is rank-deficient by {check.rank_deficit}"
        elif check.failing_index is not None:
            detail = f"-d is not a nonnegative combination for element {check.failing_index}"
        else:
            detail = "family does not positively span the target subspace"
        super().__init__(f"not a positive spanning set: {detail}")


class InvalidDecompositionError(PsskitError):
    """A block decomposition does not match the family it is applied to."""


class EnumerationLimitError(PsskitError):
    """A subset enumeration would exceed the configured cap."""

    def __init__(self, required: int, limit: int):
        self.required = required
        self.limit = limit
        super().__init__(
            f"enumeration needs {required} subsets but the cap is {limit}; "
            "raise --max-subsets to run it"
        )


class ConstructionError(PsskitError):
    """A constructive routine could not produce (or verify) its output."""
