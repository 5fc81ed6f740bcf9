"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all structured toolkit errors."""


class SchemaError(ToolkitError):
    """Malformed input: bad JSON document, arity mismatch, unknown element."""


class SimilarityError(ToolkitError):
    """Two structures were expected to share a signature but do not."""


class SizeGuardError(ToolkitError):
    """A construction would materialize more elements than its guard allows."""


class BudgetError(ToolkitError):
    """An exhaustive search or enumeration exceeded its configured budget."""


class UnknownFixtureError(ToolkitError):
    """Requested fixture name is not in the catalog."""
