"""Exception hierarchy used across the package."""


class PedfuseError(Exception):
    """Base class for all errors raised by pedfuse."""


class SchemaError(PedfuseError, ValueError):
    """An input file or record does not follow the documented schema."""


class CalibrationError(PedfuseError, ValueError):
    """A camera calibration violates its invariants."""


class SingularCalibration(CalibrationError):
    """K[r1 r2 t] is numerically singular, so no ground homography exists."""


class PointAtInfinity(PedfuseError, ArithmeticError):
    """An image point maps to (or near) the ground plane's line at infinity."""


class ZeroVector(PedfuseError, ValueError):
    pass


class LengthMismatch(PedfuseError, ValueError):
    pass


class MissingDescriptor(PedfuseError, ValueError):
    """Descriptor distance was requested but a point carries no descriptor."""


class EmptyGrid(PedfuseError, ValueError):
    pass


class ZeroGroundTruth(PedfuseError, ZeroDivisionError):
    """MODA/recall are undefined when there are no annotations at all."""


class PlacementFailure(PedfuseError, RuntimeError):
    """Rejection sampling could not place pedestrians with the requested spacing."""
