"""Exception types raised by the library."""


class OpenXXXError(Exception):
    """Base class for all library errors."""


class DomainError(OpenXXXError, ValueError):
    """An argument sits on (or too close to) a pole or a singular point."""


class DimensionError(OpenXXXError, ValueError):
    """A tensor product or space bookkeeping request is inconsistent or too large."""


class BoundaryConditionError(OpenXXXError, ValueError):
    """Boundary parameters violate a required compatibility condition."""


class ConfigError(OpenXXXError, ValueError):
    """A run configuration is malformed or incomplete."""
