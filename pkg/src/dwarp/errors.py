"""Exception types raised across the toolkit."""


class DwarpError(Exception):
    """Base class for all toolkit errors."""


class GridError(DwarpError, ValueError):
    """A grid is too small or otherwise unusable for the requested operation."""


class NonCompactBase(DwarpError, ValueError):
    """An operation that needs a compact base (or a decaying field) got neither."""


class DomainError(DwarpError, ValueError):
    """A point or parameter lies outside the admissible domain."""


class SpacelikeViolation(DwarpError):
    """The induced metric of a graph failed to be positive definite.

    Attributes
    ----------
    worst_margin : float
        Smallest eigenvalue of the induced metric over the grid.
    worst_node : tuple
        Grid index of the node where it occurs.
    """

    def __init__(self, worst_margin, worst_node):
        self.worst_margin = float(worst_margin)
        self.worst_node = tuple(int(i) for i in worst_node)
        super().__init__(
            f"graph is not spacelike: margin {self.worst_margin:.3e} at node {self.worst_node}"
        )


class StabilityViolation(DwarpError):
    """An explicit flow step increased the oscillation of the height function."""


class ConfigError(DwarpError, ValueError):
    """A run configuration failed validation.

    ``field`` names the offending key so the CLI can report it.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
