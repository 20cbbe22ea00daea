"""Exception hierarchy shared by all modules."""


class MorseTWError(Exception):
    """Base class for every error raised by this package."""


class InputError(MorseTWError, ValueError):
    """Malformed or unsupported input (file syntax, bad parameters)."""


class SelfLoopError(InputError):
    """A digraph arc whose tail equals its head."""


class ContractViolation(MorseTWError, ValueError):
    """An operation was called with arguments outside its precondition."""


class NotFeedbackMorseMatching(ContractViolation):
    """The arc set is not a matching, or reversing it leaves a cycle."""


class DecompositionError(MorseTWError, ValueError):
    """A tree decomposition violates an axiom or the edge discipline."""

    def __init__(self, message, rule=None):
        super().__init__(message)
        self.rule = rule


class CapExceeded(MorseTWError):
    """A configured size cap (bag size, oracle size) was exceeded."""

    def __init__(self, message, size=None, cap=None):
        super().__init__(message)
        self.size = size
        self.cap = cap
