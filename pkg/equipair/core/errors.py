class EquipairError(Exception):
    """Base class of every error raised on purpose by equipair."""


class ContractViolation(EquipairError, ValueError):
    """A precondition on shapes, ranges or geometry was not met."""


class NumericFault(EquipairError, ArithmeticError):
    """A computation produced NaN or Inf."""

    def __init__(self, message: str, op: str = "", param: str = ""):
        super().__init__(message)
        self.op = op
        self.param = param


class LoadError(EquipairError, ValueError):
    """A file could not be parsed."""

    def __init__(self, message: str, path="", line=None):
        self.path = str(path)
        self.line = line
        where = self.path
        if line is not None:
            where = f"{where}:{line}"
        super().__init__(f"{where}: {message}" if where else message)


class DivergenceError(EquipairError, RuntimeError):
    """Training loss stopped being finite."""

    def __init__(self, epoch: int, cause=None):
        super().__init__(f"Training diverged at epoch {epoch}: {cause}")
        self.epoch = epoch
        self.cause = cause
