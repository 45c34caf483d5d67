class SCLAError(Exception):
    """Base class for all SCLA exceptions."""
    pass

class ValidationError(SCLAError):
    """Base class for input validation errors."""
    pass

class ParameterError(ValidationError):
    """Raised when safety parameters are invalid or missing.

    `symbols` lists the offending parameter symbols (LA, LT, v, ...).
    """

    def __init__(self, message: str, symbols=None):
        super().__init__(message)
        self.symbols = list(symbols or [])

class DomainError(ValidationError):
    """Raised when a value lies outside its mathematical domain."""
    pass

class PolynomialParseError(ValidationError):
    """Raised when a polynomial string cannot be parsed."""

    def __init__(self, message: str, text: str = "", line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.text = text
        self.line = line
        self.column = column

class ScenarioError(ValidationError):
    """Raised when a scenario file violates its schema.

    `path` is the dotted/indexed field path, e.g. ``hops[1].bep``.
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path

class UnauditableInputError(ValidationError):
    """Raised when RP_I is supplied without a provenance tag."""
    pass

class FrameTooLargeError(ValidationError):
    """Raised when a payload exceeds the configured PDU payload size."""
    pass

class SimulationOverflowError(ValidationError):
    """Raised when a scenario would schedule more than 2^63 events."""
    pass

class CapabilityError(SCLAError):
    """Base class for requests beyond an exact-analysis capability."""
    pass

class DegreeTooLargeError(CapabilityError):
    """Raised when exact residual-error analysis is asked for r > 20."""
    pass

class LengthTooLargeError(CapabilityError):
    """Raised when brute-force enumeration is asked for n > 24."""
    pass

class RoamingError(SCLAError):
    """Base class for roaming topology errors."""
    pass

class UnknownCellError(RoamingError):
    """Raised when a cell ID is not part of the roaming configuration."""
    pass

class TransitionNotAllowedError(RoamingError):
    """Raised when a handover target is not adjacent to the current cell."""
    pass

class AccountingError(SCLAError):
    """Raised when the simulator meets a frame without ground-truth labels."""
    pass

class ProtocolStateError(SCLAError):
    """Raised when a producer is asked to build a PDU while in safe state."""
    pass
