"""
Exception hierarchy for the FR logic checker
"""


class FRLogicError(Exception):
    """Base class for all domain errors"""


class FieldError(FRLogicError):
    """Invalid operation in the scalar field Q(sqrt2, sqrt3)"""


class RosterError(FRLogicError):
    """Subsystem rosters are incompatible or a basis label is malformed"""


class NormalizationError(FRLogicError):
    """A state that must be normalized is not"""


class FormulaSyntaxError(FRLogicError):
    """Formula text could not be parsed"""

    def __init__(self, message: str, position: int = None):
        self.position = position
        self.message = message
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class EvaluationError(FRLogicError):
    """Kripke evaluation hit a missing relation or atom"""


class ContextError(FRLogicError):
    """Context tags are missing or inconsistent for the trust mode"""


class SearchAborted(FRLogicError):
    """Proof search exceeded its resource cap"""

    def __init__(self, message: str, formulas: int = 0, rounds: int = 0):
        self.formulas = formulas
        self.rounds = rounds
        super().__init__(message)


class PhysicsVerificationError(FRLogicError):
    """A premise's quantum content does not hold in the exact model"""


class DerivationError(FRLogicError):
    """An expected derivation outcome did not occur"""


class TraceError(FRLogicError):
    """A derivation trace step fails to replay"""

    def __init__(self, message: str, step: int = None):
        self.step = step
        super().__init__(message)
