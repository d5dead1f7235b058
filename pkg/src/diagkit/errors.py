"""Exception types shared across the package."""


class DiagkitError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(DiagkitError):
    """A graph is structurally invalid or unusable for the requested operation."""


class SyndromeError(DiagkitError):
    """A syndrome does not match the edge set it is supposed to cover."""


class SizeCapError(DiagkitError):
    """An exhaustive routine was asked to run beyond its configured size cap."""
