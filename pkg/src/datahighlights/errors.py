"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
QueryError -> 4, anything else -> 5.
"""


class DataHighlightsError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(DataHighlightsError):
    """Invalid or unreadable configuration."""


class DerivationError(ConfigError):
    """A derived-measure expression is malformed or references unknown measures."""


class DataError(DataHighlightsError):
    """Problems with the data being ingested."""


class MalformedCsvError(DataError):
    """A CSV row or cell could not be parsed; carries row/column context."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class JoinMissError(DataError):
    """A fact references a dimension id absent from the lookup table."""


class UnknownCharacterError(DataError):
    """Character id not registered for its character type."""


class UnknownCharacterTypeError(DataError):
    """Character type name not registered."""


class QueryError(DataHighlightsError):
    """Invalid group-by specification or result-set access."""


class UnknownFeatureError(QueryError):
    """A query references a feature the schema does not declare."""


class NonNumericMeasureError(QueryError):
    """The query measure is not a Numeric feature."""


class GrouperArityError(QueryError):
    """Unsupported number of groupers (only 1 or 2 are allowed)."""


class MarginalsUndefinedError(QueryError):
    """Marginals requested for an aggregate that does not define them."""


class CharacterNotOnAxisError(QueryError):
    """slice requested for a character that is not on the fixed axis."""


class KernelError(DataHighlightsError, ValueError):
    """Base class for statistical-kernel precondition failures."""


class LengthMismatchError(KernelError):
    pass


class InsufficientDataError(KernelError):
    pass


class ConstantInputError(KernelError):
    pass


class AllTiedError(KernelError):
    pass


class NOutOfRangeError(KernelError):
    pass


class ZeroRangeError(KernelError):
    pass


class SparseSeriesError(KernelError):
    """A detector needed a dense series but points were missing."""


class InvalidHighlightError(DataHighlightsError):
    """Serialization was asked to emit a highlight that fails validation."""

    def __init__(self, violations):
        super().__init__("invalid highlight: " + "; ".join(violations))
        self.violations = list(violations)


class UnbindablePlaceholderError(DataHighlightsError):
    """A narrative template placeholder has no binding."""
