class ExpressionSyntaxError(ValueError):
    """
    Raised by the expression parser. 'position' is the 0-based offset of
    the offending character in the input text.
    """

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DivisionByZeroError(ZeroDivisionError):
    pass


class DegenerateMetricError(ValueError):
    pass


class InputFormatError(ValueError):
    pass


class ArityError(ValueError):
    pass


class InconsistentSystemError(RuntimeError):
    pass


class RankDeviationError(RuntimeError):
    pass


class NotKillingError(ValueError):
    pass


class CalibrationError(RuntimeError):
    pass


class AssetCheckError(RuntimeError):
    pass
