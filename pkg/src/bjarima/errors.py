"""Exception hierarchy shared by every bjarima module."""


class ArimaError(Exception):
    """Base class for all errors raised by bjarima."""


class InsufficientData(ArimaError):
    pass


class DimensionMismatch(ArimaError):
    pass


class ImputationImpossible(ArimaError):
    def __init__(self, month):
        self.month = month
        super().__init__(f"no observed values in month {month}; cannot impute")


class DegenerateSeries(ArimaError):
    pass


class NumericalDegeneracy(ArimaError):
    pass


class InvalidDof(ArimaError):
    pass


class DomainError(ArimaError, ValueError):
    pass


class ConvergenceFailure(ArimaError):
    """Optimizer ran out of evaluations; ``model`` holds the best state found."""

    def __init__(self, message, model=None):
        super().__init__(message)
        self.model = model


class SchemaError(ArimaError):
    pass


class UnknownCountry(ArimaError):
    def __init__(self, country):
        self.country = country
        super().__init__(f"country not found in input: {country!r}")


class EmptyRange(ArimaError):
    pass


class ReportIOError(ArimaError, OSError):
    def __init__(self, path, reason):
        self.path = path
        super().__init__(f"cannot write {path}: {reason}")
