"""Exception hierarchy shared by all acrkit modules."""


class AcrkitError(Exception):
    """Base class for every error raised by acrkit."""


# -- network construction -----------------------------------------------------

class NetworkError(AcrkitError, ValueError):
    pass


class DuplicateComplex(NetworkError):
    pass


class SelfLoopReaction(NetworkError):
    pass


class IsolatedComplex(NetworkError):
    pass


class UnknownSpecies(NetworkError):
    pass


# -- kinetics -----------------------------------------------------------------

class KineticsError(AcrkitError, ValueError):
    pass


class DimensionMismatch(KineticsError):
    pass


class NonpositiveRate(KineticsError):
    pass


class NonpositiveKappa(KineticsError):
    pass


class NonpositiveConcentration(KineticsError):
    pass


class NotPlRdk(KineticsError):
    pass


# -- numerics -----------------------------------------------------------------

class IntegrationError(AcrkitError, RuntimeError):
    pass


class StepSizeUnderflow(IntegrationError):
    pass


class BlowUp(IntegrationError):
    pass


class NewtonDiverged(AcrkitError, RuntimeError):
    pass


class EmptySet(AcrkitError, ValueError):
    pass


# -- approximation ------------------------------------------------------------

class ApproximationError(AcrkitError, ValueError):
    pass


class ZeroRateAtOperatingPoint(ApproximationError):
    pass


class NonpositivePoint(ApproximationError):
    pass


class MissingParameter(ApproximationError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# -- file formats -------------------------------------------------------------

class CrnSyntaxError(AcrkitError, ValueError):
    """Malformed input text; carries the 1-based line/column of the fault."""

    def __init__(self, message, line=None, col=None, expected=None):
        self.line = line
        self.col = col
        self.expected = expected
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        tail = f" (expected {expected})" if expected else ""
        super().__init__(f"{where}{message}{tail}")


class CrnSemanticError(AcrkitError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
