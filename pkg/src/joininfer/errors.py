"""Exception types shared across the package."""


class JoinInferError(Exception):
    """Base class for all package errors."""


class ManifestError(JoinInferError):
    """Schema manifest is missing, malformed, or internally inconsistent."""


class ConfigError(JoinInferError):
    """Run configuration violates its invariants."""


class DataAccessError(JoinInferError):
    """A table's data file cannot be read."""


class UnresolvedBindingError(JoinInferError):
    """A column reference in a mined query cannot be bound to any table."""


class AdjudicationError(JoinInferError):
    """The remote adjudicator failed for a whole batch."""


class FeedbackLogError(JoinInferError):
    """The feedback log contains a record that cannot be replayed."""
