class CogsegError(Exception):
    """Base class for exceptions in this package."""


class ContractError(CogsegError):
    """An operation was called in a state that violates its precondition."""


class ModelIntegrityError(CogsegError):
    """Cached model statistics disagree with a from-scratch recount."""


class FormatError(CogsegError):
    """A model or data file could not be parsed or failed validation.

    Carries the offending path and 1-based line number when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = str(path)
            if line is not None:
                prefix += ":%d" % line
            prefix += ": "
        super().__init__(prefix + message)
