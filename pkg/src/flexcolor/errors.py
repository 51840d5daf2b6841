"""Exception hierarchy shared by all flexcolor modules."""


class FlexError(Exception):
    """Base class for every error raised by flexcolor."""


class ParseError(FlexError):
    """A text file in one of the flex* formats is malformed."""


class EmbeddingIncompleteError(FlexError):
    pass


class DisconnectedGraphError(FlexError):
    pass


class NotColorableError(FlexError):
    pass


class UndefinedRatioError(FlexError, ZeroDivisionError):
    pass


class DomainError(FlexError, ValueError):
    pass


class InfeasibleConfigurationError(FlexError):
    """Some core vertex would be left with no available color (f(v) <= 0)."""


class FamilyViolationError(FlexError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class FacePredicateError(FlexError):
    """A template uses face predicates but no embedding was supplied."""


class CertificateError(FlexError):
    """A resolution certificate is corrupt or cannot drive the sampler."""


class BudgetExceededError(FlexError):
    pass


class SizeGuardError(FlexError):
    pass
