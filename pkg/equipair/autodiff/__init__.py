from .variable import Variable, backward, zero_grad
from . import ops
from .ops import as_variable

__all__ = ["Variable", "backward", "zero_grad", "ops", "as_variable"]
