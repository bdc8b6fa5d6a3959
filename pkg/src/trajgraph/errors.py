"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes, so library code should raise the most
specific class that applies instead of bare ValueError/RuntimeError.
"""


class TrajgraphError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(TrajgraphError, ValueError):
    """A config value violates a documented constraint (CLI exit code 2)."""


class InputError(TrajgraphError, ValueError):
    """Runtime input (data, shapes, labels) violates a precondition."""


class ShapeError(InputError):
    """Operands passed to a numeric operation have incompatible shapes."""


class MissingInputError(TrajgraphError, FileNotFoundError):
    """A required input file or record does not exist (CLI exit code 3)."""


class UsageError(TrajgraphError, RuntimeError):
    """An API was called in a mode that does not support the request."""
