"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A run configuration or column mapping is invalid or incomplete."""


class IsolatedNodeError(ValueError):
    """A node has no edge weight where the operation requires positive degree."""


class DisconnectedGraphError(ValueError):
    """The graph (or country border graph) is not connected where it must be."""


class SolverError(RuntimeError):
    """The eigensolver failed to converge or returned pairs above tolerance."""
