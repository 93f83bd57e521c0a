"""Exception hierarchy shared by all lyapspec modules."""


class LyapspecError(Exception):
    """Base class for every error raised by the library."""


class ValidationError(LyapspecError, ValueError):
    """Bad user input: parameters out of range, malformed config."""


class ComputationError(LyapspecError, RuntimeError):
    """A computation hit a resource cap or failed to converge."""


class OutOfDomain(ValidationError):
    def __init__(self, x):
        super().__init__(f"point {x!r} lies outside every domain interval")
        self.x = x


class OrbitEscaped(LyapspecError):
    def __init__(self, k, x=None):
        super().__init__(f"orbit left the domain at iterate {k}")
        self.k = k
        self.x = x


class CriticalOrbit(LyapspecError):
    def __init__(self, k):
        super().__init__(f"orbit hits a critical point at iterate {k}")
        self.k = k


class NotMarkov(ValidationError):
    pass


class NotExpanding(ValidationError):
    pass


class InvalidSigma(ValidationError):
    pass


class InvalidBand(ValidationError):
    pass


class InvalidArgs(ValidationError):
    pass


class TooSparse(ValidationError):
    pass


class NotPlissTime(ValidationError):
    pass


class HorizonTooShort(ValidationError):
    pass


class DepthTooLarge(ValidationError):
    pass


class NoOverlap(ValidationError):
    pass


class BranchNotDiffeomorphic(ValidationError):
    pass


class TreeExplosion(ComputationError):
    pass


class GridTooCoarse(ComputationError):
    pass


class ConvergenceError(ComputationError):
    pass
