"""Exception types shared across the library."""


class LislamError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(LislamError):
    """Operands have incompatible shapes or landmark counts."""


class NotAntisymmetric(LislamError):
    """Matrix handed to unskew is not antisymmetric."""


class NotPositiveDefinite(LislamError):
    """Weight matrix is not symmetric positive definite."""


class NotIsotropy(LislamError):
    """Frame transform rotation does not fix the vertical axis."""


class InvalidDimension(LislamError):
    """Landmark count outside the supported range."""


class GainConditionViolated(LislamError):
    """Observer gains violate the stability conditions."""


class NotHurwitz(LislamError):
    """Matrix has an eigenvalue with nonnegative real part."""


class NotUnitVector(LislamError):
    """Vector expected on the unit sphere is not normalized."""


class YawDegenerate(LislamError):
    """Rotation error has no well-defined yaw angle."""


class NonFiniteState(LislamError):
    """Simulation produced a NaN or infinity."""

    def __init__(self, step_index: int):
        super().__init__(f"state became non-finite at step {step_index}")
        self.step_index = step_index


class ParseError(LislamError):
    """Config file is not syntactically valid."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ValidationError(LislamError):
    """Config value violates a constraint."""

    def __init__(self, field: str, constraint: str):
        super().__init__(f"{field}: {constraint}")
        self.field = field
        self.constraint = constraint
