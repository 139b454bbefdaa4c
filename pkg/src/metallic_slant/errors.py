"""Exception hierarchy shared by every module."""


class MetallicError(Exception):
    """Base class for all toolkit errors."""


class DomainError(MetallicError, ValueError):
    """Input outside the mathematical domain (non-positive p or q, log of a negative, ...)."""


class StructureError(MetallicError, ValueError):
    """An operator fails the metallic / almost-product / compatibility checks."""


class InputError(MetallicError, ValueError):
    """Malformed input: wrong shapes, non-SPD metric, bad configuration."""


class ParseError(MetallicError, ValueError):
    """Syntax or name error in an expression, carrying the byte offset."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset
        self.reason = message


class EvaluationError(MetallicError, ValueError):
    """Domain failure while evaluating an expression."""

    def __init__(self, message, subexpression):
        super().__init__(f"{message} in '{subexpression}'")
        self.subexpression = subexpression


class DegeneratePointError(MetallicError, ValueError):
    """The immersion Jacobian is rank deficient at the requested point."""


class ConfigError(MetallicError, ValueError):
    """A scenario or a distribution specification is inconsistent."""
