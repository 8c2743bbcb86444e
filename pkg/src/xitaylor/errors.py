"""Exception hierarchy shared by every module."""


class XiTaylorError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 2


class PoleError(XiTaylorError, ValueError):
    pass


class DomainError(XiTaylorError, ValueError):
    pass


class ConvergenceError(XiTaylorError):
    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = list(indices)


class BracketError(XiTaylorError):
    pass


class ConsistencyError(XiTaylorError):
    pass


class BranchError(XiTaylorError):
    pass


class NeighborhoodError(XiTaylorError, ValueError):
    pass


class TruncationError(XiTaylorError):
    pass


class CoverageError(XiTaylorError):
    pass


class PrecisionError(XiTaylorError):
    exit_code = 3


class StallError(XiTaylorError):
    pass
