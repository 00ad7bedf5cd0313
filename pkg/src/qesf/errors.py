"""Exception types shared across the package.

The CLI maps these onto stable exit codes, so keep the hierarchy small:
invalid model/config input vs. numerical failure are the only distinctions
that matter to callers.
"""


class ModelError(ValueError):
    """Invalid model definition, config, or parameter set."""


class DomainError(ValueError):
    """Coordinate evaluated outside its domain or branch image."""


class CollisionError(ValueError):
    """Root vector with coincident entries or a root sitting on a singularity."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge."""


class GridError(ValueError):
    """No valid certification grid could be constructed."""
