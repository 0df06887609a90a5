"""Exception types raised across the package."""


class OpboError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(OpboError, ValueError):
    pass


class OutOfBounds(OpboError, ValueError):
    def __init__(self, index: int, value: float, lower: float, upper: float):
        self.index = index
        self.value = value
        super().__init__(
            f"coordinate {index} = {value!r} outside [{lower}, {upper}]"
        )


class UnknownFunction(OpboError, KeyError):
    pass


class EmptyDims(OpboError, ValueError):
    pass


class InvalidSize(OpboError, ValueError):
    pass


class GridTooLarge(OpboError, ValueError):
    pass


class InvalidSideLength(OpboError, ValueError):
    pass


class NonFiniteLoss(OpboError, FloatingPointError):
    def __init__(self, epoch: int, learning_rate: float, detail: str = ""):
        self.epoch = epoch
        self.learning_rate = learning_rate
        msg = f"training diverged at epoch {epoch} (learning_rate={learning_rate})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class SingularKernel(OpboError, ArithmeticError):
    pass


class TooManyPoints(OpboError, ValueError):
    pass


class SampleCovarianceSingular(OpboError, ArithmeticError):
    pass


class IncompatibleSurrogateAcquisition(OpboError, TypeError):
    pass


class InvalidG(OpboError, ValueError):
    pass


class LengthMismatch(OpboError, ValueError):
    pass


class TooShort(OpboError, ValueError):
    pass


class ZeroVariance(OpboError, ValueError):
    pass


class TooFewPoints(OpboError, ValueError):
    pass


class MissingCell(OpboError, KeyError):
    def __init__(self, problem: str, algorithm: str):
        self.problem = problem
        self.algorithm = algorithm
        super().__init__(f"no result for problem={problem!r} algorithm={algorithm!r}")


class ConfigInvalid(OpboError, ValueError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"{path}: {reason}")


class TrialFailed(OpboError, RuntimeError):
    pass
