class RelativisticHeatException(Exception):
    pass


class InvalidStateError(RelativisticHeatException):
    pass


class TransformDomainError(RelativisticHeatException):
    pass


class NegativeDensityError(RelativisticHeatException):
    pass


class BlowUpError(RelativisticHeatException):
    pass


class CFLViolationError(RelativisticHeatException):
    pass


class DomainError(RelativisticHeatException):
    pass


class DomainTooSmallError(DomainError):
    pass


class GridMismatchError(RelativisticHeatException):
    pass


class ConvergenceError(RelativisticHeatException):
    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = list(history or [])


class BracketError(RelativisticHeatException):
    def __init__(self, message, slope_bounds=None):
        super().__init__(message)
        self.slope_bounds = slope_bounds


class ConfigurationError(RelativisticHeatException):
    def __init__(self, message, field=None):
        if field is not None and field not in message:
            message = "{}: {}".format(field, message)
        super().__init__(message)
        self.field = field


class InvalidParameterError(ConfigurationError):
    pass
