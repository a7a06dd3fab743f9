import itertools

import numpy as np

from ..core.errors import ContractViolation

# Creation order doubles as a topological order: a node is always created
# after its parents.
_node_ids = itertools.count()


class Variable:
    """A float64 array recorded on the tape.

    ``parents`` and ``backward_fn`` are only set when at least one parent
    requires a gradient; constants never keep their inputs alive.
    """

    __slots__ = (
        "value",
        "grad",
        "node_id",
        "parents",
        "backward_fn",
        "op",
        "requires_grad",
        "name",
    )
    __array_priority__ = 100

    def __init__(self, value, requires_grad=True, name=None, copy=True):
        if copy:
            self.value = np.array(value, dtype=np.float64)
        else:
            self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self.node_id = next(_node_ids)
        self.parents = ()
        self.backward_fn = None
        self.op = "leaf"
        self.requires_grad = requires_grad
        self.name = name

    @classmethod
    def constant(cls, value, name=None):
        return cls(value, requires_grad=False, name=name)

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self):
        return self.value.ndim

    @property
    def size(self):
        return self.value.size

    @property
    def T(self):
        return ops.transpose(self)

    def item(self):
        return float(self.value.reshape(-1)[0])

    def zero_grad(self):
        self.grad = None

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"Variable{label}(op={self.op}, shape={self.shape})"

    def __add__(self, other):
        return ops.add(self, other)

    def __radd__(self, other):
        return ops.add(other, self)

    def __sub__(self, other):
        return ops.sub(self, other)

    def __rsub__(self, other):
        return ops.sub(other, self)

    def __mul__(self, other):
        return ops.mul(self, other)

    def __rmul__(self, other):
        return ops.mul(other, self)

    def __truediv__(self, other):
        return ops.div(self, other)

    def __rtruediv__(self, other):
        return ops.div(other, self)

    def __neg__(self):
        return ops.neg(self)

    def __matmul__(self, other):
        return ops.matmul(self, other)

    def __getitem__(self, key):
        return ops.index(self, key)


def _reachable(root):
    seen = {id(root): root}
    stack = [root]
    while stack:
        node = stack.pop()
        for parent in node.parents:
            if parent.requires_grad and id(parent) not in seen:
                seen[id(parent)] = parent
                stack.append(parent)
    return list(seen.values())


def backward(root: Variable):
    """Accumulate d(root)/d(node) into ``.grad`` of every reachable node."""
    if root.size != 1:
        raise ContractViolation(
            f"backward needs a scalar root, got shape {root.shape}"
        )
    if not root.requires_grad:
        return
    pending = {id(root): np.ones_like(root.value)}
    for node in sorted(_reachable(root), key=lambda v: v.node_id, reverse=True):
        g = pending.pop(id(node), None)
        if g is None:
            continue
        node.grad = g.copy() if node.grad is None else node.grad + g
        if node.backward_fn is None:
            continue
        for parent, pg in zip(node.parents, node.backward_fn(g)):
            if pg is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in pending:
                pending[key] = pending[key] + pg
            else:
                pending[key] = pg


def zero_grad(variables):
    if isinstance(variables, dict):
        variables = variables.values()
    for v in variables:
        v.grad = None


from . import ops  # noqa: E402
