"""Exception hierarchy.

Every error carries a short machine-readable ``code`` used by the CLI
diagnostics and the JSON reports.
"""


class GeometryError(Exception):
    code = "geometry_error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class DimensionMismatch(GeometryError):
    code = "dimension_mismatch"


class InvariantViolation(GeometryError):
    """A value does not satisfy the invariants of its type."""
    code = "invariant_violation"


class DegenerateInput(GeometryError):
    code = "degenerate_input"


class DualSingular(GeometryError):
    """E + B is singular: some principal curvature equals -1."""
    code = "dual_singular"


class DimensionTooSmall(GeometryError):
    code = "n_too_small"


class EmptyInput(GeometryError):
    code = "empty_input"


class NotAdmissible(GeometryError):
    code = "not_admissible"


class ConvexityLost(GeometryError):
    code = "convexity_lost"


class RouteMismatch(GeometryError):
    """Two independent computations of the same quantity disagree."""
    code = "route_mismatch"


class StepUnderflow(GeometryError):
    code = "step_underflow"


class ConfigError(Exception):
    code = "invalid_config"
