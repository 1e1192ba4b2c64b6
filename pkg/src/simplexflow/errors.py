"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Operands or parameters have incompatible shapes."""


class DomainError(ValueError):
    """Input contains non-finite or otherwise inadmissible values."""


class ConfigError(ValueError):
    """Invalid configuration value or unknown configuration key."""


class DivergenceError(RuntimeError):
    """Integration or training produced a non-finite or exploding state.

    ``time`` carries the first grid time at which the state went bad, when
    the failure happened inside an integration loop.
    """

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class NotInvertibleError(ValueError):
    """Readout matrix is not square or is numerically singular."""


class InteriorViolationError(RuntimeError):
    """A simplex state reached the boundary where an interior point is required."""


class FormatError(ValueError):
    """Malformed dataset or model file.

    ``location`` is a line number for text formats and a byte offset for
    binary formats.
    """

    def __init__(self, message: str, location: int | None = None):
        super().__init__(message)
        self.location = location
