"""Exception types shared across the package."""


class StatArbError(ValueError):
    """Base class for every error raised by this package."""


# --- data ingestion ----------------------------------------------------------

class MalformedRow(StatArbError):
    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason or 'unparsable row'}")


class InvariantViolation(StatArbError):
    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason or 'candle invariant violated'}")


class DuplicateTimestamp(StatArbError):
    pass


class BadFactor(StatArbError):
    pass


class UnsortedInput(StatArbError):
    pass


class EmptyIntersection(StatArbError):
    pass


# --- statistics --------------------------------------------------------------

class LengthMismatch(StatArbError):
    pass


class ZeroVariance(StatArbError):
    pass


class SingularDesign(StatArbError):
    pass


class InsufficientData(StatArbError):
    pass


class DegenerateResiduals(StatArbError):
    pass


class SeriesTooShort(StatArbError):
    pass


# --- spread engine -----------------------------------------------------------

class WindowTooShort(StatArbError):
    pass


class DegenerateSpread(StatArbError):
    pass


class NotWarm(StatArbError):
    pass


# --- portfolio ledger --------------------------------------------------------

class BankruptPortfolio(StatArbError):
    pass


class TargetOutOfRange(StatArbError):
    pass


# --- environment / agent -----------------------------------------------------

class EpisodeFinished(StatArbError):
    pass


class ProtocolError(StatArbError):
    pass


class NonFiniteParams(StatArbError):
    pass


class DivergedTraining(StatArbError):
    pass


# --- grid search / metrics ---------------------------------------------------

class EmptyGrid(StatArbError):
    pass


class NoSuccessfulPoint(StatArbError):
    pass


class NonPositiveStart(StatArbError):
    pass


class DegenerateSpan(StatArbError):
    pass


class ZeroVolatility(StatArbError):
    pass
