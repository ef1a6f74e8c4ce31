"""Exception types shared across the package."""


class WorkbenchError(Exception):
    """Base class for every error raised by curvedhh."""


class LaurentVariablePresent(WorkbenchError):
    pass


class MixedAmbient(WorkbenchError):
    pass


class ZeroDivisorInput(WorkbenchError):
    pass


class UnknownVariable(WorkbenchError):
    pass


class InfiniteSlice(WorkbenchError):
    pass


class NotChainMap(WorkbenchError):
    pass


class AmbientMismatch(WorkbenchError):
    pass


class NotACycle(WorkbenchError):
    pass


class CurvatureMismatch(WorkbenchError):
    pass


class OddnessViolation(WorkbenchError):
    pass


class CurvatureDecompositionInvalid(WorkbenchError):
    pass


class GroundRingMismatch(WorkbenchError):
    pass


class CharacteristicMismatch(WorkbenchError):
    pass


class NotRegularSequence(WorkbenchError):
    pass


class ImperfectGroundField(WorkbenchError):
    pass


class ZeroCurvature(WorkbenchError):
    pass


class NonzeroWeightInput(WorkbenchError):
    pass


class NonCyclicPresentation(WorkbenchError):
    pass


class UnitInput(WorkbenchError):
    pass


class UnboundedWeights(WorkbenchError):
    pass


class PositiveCharacteristic(WorkbenchError):
    pass


class WeightError(WorkbenchError):
    """A map or element is not homogeneous for the declared weights."""


class ParseError(WorkbenchError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class ValidationError(WorkbenchError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
