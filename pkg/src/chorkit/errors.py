"""Exception types shared across the package."""


class ChorError(Exception):
    """Base class for all errors raised by chorkit."""


class ParseError(ChorError):
    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class BindError(ChorError):
    """A recursion variable is used outside the scope of its definition."""


class DupTagError(ChorError):
    """A message tag occurs in more than one send or more than one receive."""


class DupProcessError(ChorError):
    """A network defines the same process name twice."""


class UnknownProcess(ChorError):
    """A state lookup or update names a process outside the state's domain."""


class GuardNotBoolean(ChorError):
    """A conditional guard evaluated to a non-boolean value."""


class NotEnabled(ChorError):
    """A step was requested at a redex that is not enabled."""


class NotACom(ChorError):
    """Runtime expansion was requested at a node that is not a communication."""


class NotProjectable(ChorError):
    """Projection is undefined: a conditional's branches disagree at some
    process that is not the decider."""

    def __init__(self, message, path=None, left=None, right=None):
        super().__init__(message)
        self.path = path
        self.left = left
        self.right = right


class IllFormed(ChorError):
    """A runtime choreography cannot be rewritten to the canonical
    receives-then-program shape."""


class NonEmptyQueue(ChorError):
    """A synchronous-only operation was applied to a network with queued
    messages."""
