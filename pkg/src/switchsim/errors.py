"""Exception hierarchy shared across the package."""


class SwitchSimError(Exception):
    """Base class for all mechanism and simulation errors."""


class NoEngagement(SwitchSimError):
    """The switch gear can never reach pitch tangency with a driven gear."""


class TrackDegenerate(SwitchSimError):
    """The switch gear already meshes a driven gear at the midline (no track)."""


class InvalidState(SwitchSimError):
    """A switch state violates its mode/position invariants."""


class SubKinematicRatio(SwitchSimError):
    """Measured motor/revolution ratio below the kinematic carry ratio."""


class OutOfRange(SwitchSimError):
    """Requested cable length outside the path's attainable range."""


class RangeExceeded(SwitchSimError):
    """Joint angle driven outside the modeled range of motion."""


class SlackDetected(SwitchSimError):
    """A cable tension dropped to zero (spool spring range exhausted)."""


class NeverEngaged(SwitchSimError):
    """A commanded move completed without the switch reaching an endpoint."""


class BelowKinematicFloor(SwitchSimError):
    """A measured duration is at or below the constant-speed minimum."""


class InvalidDesign(SwitchSimError):
    """A candidate layout failed geometric validation."""

    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


class SpaceTooLarge(SwitchSimError):
    """Design-space enumeration would exceed the configured cap."""


class EmptyFeasibleSet(SwitchSimError):
    """No design in the space passed validation and constraints."""


class ConfigError(SwitchSimError):
    """One or more configuration errors, each tagged with a line number."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"line {n}: {msg}" if n else msg for n, msg in self.errors)
        super().__init__(lines)
