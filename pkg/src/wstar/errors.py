"""Exception hierarchy shared by the whole package."""


class WstarError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(WstarError):
    """Operands do not fit together (shape, algebra or owner mismatch)."""


class ValidationError(WstarError):
    """An input fails its defining identity beyond tolerance."""


class PreconditionError(WstarError):
    """An operation's mathematical precondition does not hold."""

    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class ConvergenceError(WstarError):
    """An iterative scheme did not converge within its budget."""


class InternalConsistencyError(WstarError):
    """A quantity that is an integer or an identity by theory came out broken.

    Signals numerically corrupted input rather than a user mistake.
    """


class InstanceError(WstarError):
    """An instance file is syntactically or semantically invalid."""

    def __init__(self, message, defects=()):
        super().__init__(message)
        self.defects = list(defects)
