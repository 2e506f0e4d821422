"""Exception hierarchy shared by every zkai module."""


class ZkaiError(Exception):
    """Base class for all errors raised by zkai."""


# field / polynomial / group layer

class DivisionByZero(ZkaiError, ZeroDivisionError):
    pass


class DuplicateEvaluationPoint(ZkaiError, ValueError):
    pass


class EngineMismatch(ZkaiError, TypeError):
    pass


# data pipeline

class SchemaError(ZkaiError, ValueError):
    pass


class ParseError(ZkaiError, ValueError):
    def __init__(self, row: int, col: str, cell: str):
        super().__init__(f"cannot parse {cell!r} at row={row}, col={col}")
        self.row = row
        self.col = col
        self.cell = cell


class InsufficientData(ZkaiError, ValueError):
    pass


class ZeroVariance(ZkaiError, ValueError):
    pass


class ZeroRange(ZkaiError, ValueError):
    pass


# model / circuit

class SingularDesign(ZkaiError, ValueError):
    pass


class DimensionError(ZkaiError, ValueError):
    pass


class QuantizationOverflow(ZkaiError, OverflowError):
    pass


# proving system

class InvalidAccumulator(ZkaiError, ValueError):
    pass


class DegreeOverflow(ZkaiError, ValueError):
    pass


class UnsatisfiedWitness(ZkaiError, ValueError):
    pass


class MalformedEncoding(ZkaiError, ValueError):
    pass


class MalformedProof(MalformedEncoding):
    pass


class TrapdoorUnavailable(ZkaiError, RuntimeError):
    pass


# oracle network / ledger

class InsufficientLink(ZkaiError):
    pass


class InsufficientFunds(ZkaiError):
    pass


class UnknownVerifier(ZkaiError, KeyError):
    pass


class UnknownSubscription(ZkaiError, KeyError):
    pass


class FetchError(ZkaiError):
    pass


class QuorumFailure(ZkaiError):
    pass


# orchestration

class NothingToReport(ZkaiError):
    pass


class StageError(ZkaiError):
    """A pipeline stage failed; carries the stage name and the original cause."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
