"""Exception types raised across the package."""


class LatticeError(ValueError):
    """Base class for invalid lattice input or failed lattice computations."""


class NonSquare(LatticeError):
    pass


class SingularGenerator(LatticeError):
    pass


class SingularRelation(LatticeError):
    pass


class DimensionMismatch(LatticeError):
    pass


class NotOrthogonal(LatticeError):
    pass


class NotASkewing(LatticeError):
    pass


class DomainError(LatticeError):
    pass


class RadiusOverflow(LatticeError):
    """The enumeration radius needed for the requested tolerance is too large."""


class PointCountCap(LatticeError):
    """Enumeration produced more points than the configured cap."""


class InputFileError(LatticeError):
    """Malformed lattice, relation, or skew file. Message carries file and line."""

    def __init__(self, path, lineno, reason):
        self.path = str(path)
        self.lineno = lineno
        self.reason = reason
        where = f"{self.path}:{lineno}" if lineno else self.path
        super().__init__(f"{where}: {reason}")
