"""Exception hierarchy shared across curvtrack."""


class CurvtrackError(Exception):
    pass


class InvalidState(CurvtrackError, ValueError):
    """A pure state or density matrix violates its invariants."""


class PhysicsError(CurvtrackError):
    """Base for failures that come from the physics rather than the input format."""


class DegeneratePoint(PhysicsError):
    """The two levels are (numerically) degenerate where a gap is required."""


class UndefinedChern(DegeneratePoint):
    """Sphere Chern number requested at |delta1| == |delta2|."""


class GeometricSingularity(PhysicsError):
    """Gaussian curvature evaluated on the pinch circle of a horn/spindle torus."""


class GaugeDiscontinuity(PhysicsError):
    pass


class StepTooLarge(PhysicsError):
    pass


class IncompleteSweep(PhysicsError):
    pass


class ConfigError(CurvtrackError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ConfigError):
    def __init__(self, field, message=""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)
