"""Exception hierarchy shared across the package."""

from __future__ import annotations


class ScopeRefineError(Exception):
    """Base class for all errors raised by this package."""


# --- minic ---------------------------------------------------------------


class LexError(ScopeRefineError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message


class ParseError(ScopeRefineError):
    def __init__(self, line: int, col: int, message: str, expected: frozenset[str] = frozenset()):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.message = message
        self.expected = expected


class SemanticError(ScopeRefineError):
    """Scope-resolution failure; subclasses identify the rule broken."""


class UnboundVarError(SemanticError):
    pass


class DuplicateDeclError(SemanticError):
    pass


class CallToUnknownFunctionError(SemanticError):
    pass


class ArityMismatchError(SemanticError):
    pass


class InterpreterUsageError(ScopeRefineError):
    """Bad interpret() call: unknown entry point or malformed argument list."""


# --- model ---------------------------------------------------------------


class EmptyCorpusError(ScopeRefineError):
    pass


class LabelOutOfRangeError(ScopeRefineError):
    pass


class EmptyTokenListError(ScopeRefineError):
    pass


class KTooSmallError(ScopeRefineError):
    pass


class NonpositiveTemperatureError(ScopeRefineError):
    pass


class ModelFormatError(ScopeRefineError):
    """Corrupt, truncated, or wrong-version model container."""


# --- validate ------------------------------------------------------------


class TooFewSamplesError(ScopeRefineError):
    pass


class ShapeMismatchError(ScopeRefineError):
    pass


class WrongEvidenceKindError(ScopeRefineError):
    pass


class DegenerateCalibrationSetError(ScopeRefineError):
    pass


# --- search --------------------------------------------------------------


class BudgetTooSmallError(ScopeRefineError):
    pass


# --- harness -------------------------------------------------------------


class CorpusError(ScopeRefineError):
    pass


class MalformedLineError(CorpusError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnparseableSourceError(CorpusError):
    def __init__(self, record_id: str, message: str):
        super().__init__(f"record {record_id!r}: {message}")
        self.record_id = record_id


class GenerationExhaustedError(ScopeRefineError):
    pass


class SingleClassError(ScopeRefineError):
    pass


class EmptyDenominatorError(ScopeRefineError):
    pass


class ReportVersionError(ScopeRefineError):
    pass


# --- protocol ------------------------------------------------------------


class ConnectionFailedError(ScopeRefineError):
    pass


class ProtocolError(ScopeRefineError):
    """Remote model sent a response that violates the wire contract."""
