"""Exception types raised across the package."""


class QSPPolyError(Exception):
    """Base class for all package errors."""


class DegreeTooLow(QSPPolyError):
    pass


class EvenDegree(QSPPolyError):
    pass


class ConstantPolynomial(QSPPolyError):
    pass


class InfeasibleAtMaxDegree(QSPPolyError):
    pass


class PreconditionFailed(QSPPolyError):
    pass


class BetaOverflow(QSPPolyError):
    """Proof-faithful correction exponents exceeded the configured cap.

    ``params`` holds the partially assembled values so callers can inspect
    them or fall back to the lattice search.
    """

    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = params or {}


class CorrectionFailed(QSPPolyError):
    pass


class TargetNotInClass(QSPPolyError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConvergenceBudgetExceeded(QSPPolyError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class IllConditioned(QSPPolyError):
    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class StructureViolation(QSPPolyError):
    pass


class NotConverged(QSPPolyError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class GapInsideRippleRegion(QSPPolyError):
    pass
