class TunedQuantError(Exception):
    """Base class for every error raised by the engine."""


class ContextMismatchError(TunedQuantError):
    pass


class ExpressionSyntaxError(TunedQuantError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifierError(TunedQuantError):
    def __init__(self, token: str, position: int) -> None:
        super().__init__(f"Unknown identifier {token!r} at position {position}")
        self.token = token
        self.position = position


class DivisionByZeroError(TunedQuantError):
    pass


class UnknownVariableError(TunedQuantError):
    pass


class ParameterDifferentiationError(TunedQuantError):
    pass


class PoleError(TunedQuantError):
    pass


class SubstitutionPoleError(TunedQuantError):
    def __init__(self, message: str, bindings: list[str]) -> None:
        super().__init__(f"{message} (offending bindings: {', '.join(bindings) or '-'})")
        self.bindings = bindings


class SingularMetricError(TunedQuantError):
    pass


class QuantizationConfigError(TunedQuantError):
    pass


class NotPolynomialInMomentaError(TunedQuantError):
    pass


class SingularJacobianError(TunedQuantError):
    pass


class InverseMismatchError(TunedQuantError):
    pass


class PolarizationError(TunedQuantError):
    pass


class OrderTooHighError(TunedQuantError):
    pass


class DimensionError(TunedQuantError):
    pass


class NonSymmetricOperatorError(TunedQuantError):
    pass


class SpectrumConvergenceError(TunedQuantError):
    pass
