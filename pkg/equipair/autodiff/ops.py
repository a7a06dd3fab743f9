"""Differentiable operations on :class:`Variable`.

Every op checks its output for NaN/Inf and raises :class:`NumericFault`
naming itself. Plain arrays and scalars are accepted anywhere a Variable is
and are treated as constants.
"""

from logging import getLogger

import numpy as np

from ..core.errors import ContractViolation, NumericFault
from .variable import Variable

logger = getLogger(__name__)


def as_variable(x) -> Variable:
    if isinstance(x, Variable):
        return x
    return Variable.constant(x)


def _result(value, op, parents, backward_fn) -> Variable:
    value = np.asarray(value, dtype=np.float64)
    if not np.all(np.isfinite(value)):
        raise NumericFault(f"'{op}' produced a non-finite value", op=op)
    out = Variable(value, requires_grad=False, copy=False)
    out.op = op
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out.parents = tuple(parents)
        out.backward_fn = backward_fn
    return out


def _unbroadcast(g, shape):
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def _binary(a, b, op):
    a, b = as_variable(a), as_variable(b)
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ContractViolation(
            f"'{op}' shape mismatch: {a.shape} vs {b.shape}"
        ) from None
    return a, b


def _axis(axis, ndim, op):
    if not -ndim <= axis < ndim:
        raise ContractViolation(f"'{op}' axis {axis} out of range for ndim {ndim}")
    return axis % ndim


# elementwise


def add(a, b):
    a, b = _binary(a, b, "add")
    return _result(
        a.value + b.value,
        "add",
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a, b):
    a, b = _binary(a, b, "sub")
    return _result(
        a.value - b.value,
        "sub",
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a, b):
    a, b = _binary(a, b, "mul")
    return _result(
        a.value * b.value,
        "mul",
        (a, b),
        lambda g: (
            _unbroadcast(g * b.value, a.shape),
            _unbroadcast(g * a.value, b.shape),
        ),
    )


def div(a, b):
    a, b = _binary(a, b, "div")
    if np.any(b.value == 0):
        raise ContractViolation("'div' denominator has zero entries")
    return _result(
        a.value / b.value,
        "div",
        (a, b),
        lambda g: (
            _unbroadcast(g / b.value, a.shape),
            _unbroadcast(-g * a.value / (b.value * b.value), b.shape),
        ),
    )


def maximum(a, b):
    """Elementwise max; ties route the gradient to ``a``."""
    a, b = _binary(a, b, "max")
    mask = a.value >= b.value
    return _result(
        np.where(mask, a.value, b.value),
        "max",
        (a, b),
        lambda g: (
            _unbroadcast(np.where(mask, g, 0.0), a.shape),
            _unbroadcast(np.where(mask, 0.0, g), b.shape),
        ),
    )


def minimum(a, b):
    """Elementwise min; ties route the gradient to ``a``."""
    a, b = _binary(a, b, "min")
    mask = a.value <= b.value
    return _result(
        np.where(mask, a.value, b.value),
        "min",
        (a, b),
        lambda g: (
            _unbroadcast(np.where(mask, g, 0.0), a.shape),
            _unbroadcast(np.where(mask, 0.0, g), b.shape),
        ),
    )


def relu(x):
    return maximum(x, 0.0)


def neg(x):
    x = as_variable(x)
    return _result(-x.value, "neg", (x,), lambda g: (-g,))


def abs(x):
    x = as_variable(x)
    sign = np.sign(x.value)
    return _result(np.abs(x.value), "abs", (x,), lambda g: (g * sign,))


def sqrt(x):
    """Square root; the derivative at 0 is taken as 0."""
    x = as_variable(x)
    if np.any(x.value < 0):
        raise ContractViolation("'sqrt' of a negative value")
    s = np.sqrt(x.value)

    def backward_fn(g):
        out = np.zeros_like(s)
        np.divide(0.5 * g, s, out=out, where=s > 0)
        return (out,)

    return _result(s, "sqrt", (x,), backward_fn)


def acos(x, eps=1e-7):
    """arccos of an input already clamped to [-1, 1].

    The value is exact; the derivative is evaluated at the input clamped to
    [-1+eps, 1-eps] so it stays finite at aligned rotations.
    """
    x = as_variable(x)
    if np.any(np.abs(x.value) > 1.0):
        raise ContractViolation("'acos' input outside [-1, 1]; clamp it first")
    xc = np.clip(x.value, -1.0 + eps, 1.0 - eps)
    d = -1.0 / np.sqrt(1.0 - xc * xc)
    return _result(np.arccos(x.value), "acos", (x,), lambda g: (g * d,))


def atan2(y, x):
    y, x = _binary(y, x, "atan2")
    r2 = x.value * x.value + y.value * y.value

    def backward_fn(g):
        dy = np.zeros(np.broadcast(r2, g).shape)
        dx = np.zeros_like(dy)
        np.divide(g * x.value, r2, out=dy, where=r2 > 0)
        np.divide(-g * y.value, r2, out=dx, where=r2 > 0)
        return _unbroadcast(dy, y.shape), _unbroadcast(dx, x.shape)

    return _result(np.arctan2(y.value, x.value), "atan2", (y, x), backward_fn)


def clamp(x, lo, hi):
    """Clip to [lo, hi]; the gradient passes where lo <= x <= hi."""
    x = as_variable(x)
    inside = (x.value >= lo) & (x.value <= hi)
    return _result(
        np.clip(x.value, lo, hi), "clamp", (x,), lambda g: (np.where(inside, g, 0.0),)
    )


def where(mask, a, b):
    """Select ``a`` where the constant ``mask`` holds, else ``b``."""
    mask = np.asarray(mask, dtype=bool)
    a, b = _binary(a, b, "where")
    return _result(
        np.where(mask, a.value, b.value),
        "where",
        (a, b),
        lambda g: (
            _unbroadcast(np.where(mask, g, 0.0), a.shape),
            _unbroadcast(np.where(mask, 0.0, g), b.shape),
        ),
    )


# linear algebra


def matmul(a, b):
    a, b = as_variable(a), as_variable(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ContractViolation(
            f"'matmul' needs 2-D operands, got {a.shape} and {b.shape}"
        )
    if a.shape[1] != b.shape[0]:
        raise ContractViolation(
            f"'matmul' inner extents differ: {a.shape} @ {b.shape}"
        )
    return _result(
        a.value @ b.value,
        "matmul",
        (a, b),
        lambda g: (g @ b.value.T, a.value.T @ g),
    )


def cross(a, b):
    a, b = as_variable(a), as_variable(b)
    if a.shape != b.shape or a.shape[-1] != 3:
        raise ContractViolation(f"'cross' needs equal (..., 3) shapes: {a.shape}, {b.shape}")
    return _result(
        np.cross(a.value, b.value),
        "cross",
        (a, b),
        lambda g: (np.cross(b.value, g), np.cross(g, a.value)),
    )


# reductions


def _expand_reduced(g, shape, axis, keepdims):
    if axis is None:
        return np.broadcast_to(g, shape)
    if not keepdims:
        g = np.expand_dims(g, axis)
    return np.broadcast_to(g, shape)


def sum(x, axis=None, keepdims=False):
    x = as_variable(x)
    if axis is not None:
        axis = _axis(axis, x.ndim, "sum")
    return _result(
        np.sum(x.value, axis=axis, keepdims=keepdims),
        "sum",
        (x,),
        lambda g: (_expand_reduced(g, x.shape, axis, keepdims),),
    )


def mean(x, axis=None, keepdims=False):
    x = as_variable(x)
    n = x.size if axis is None else x.shape[_axis(axis, x.ndim, "mean")]
    return div(sum(x, axis=axis, keepdims=keepdims), float(n))


def max(x, axis=None, keepdims=False):
    """Max reduction; the gradient goes to the first maximal element."""
    x = as_variable(x)
    if axis is None:
        i = int(np.argmax(x.value))
        value = x.value.reshape(-1)[i]
        if keepdims:
            value = np.reshape(value, (1,) * x.ndim)

        def backward_fn(g):
            gx = np.zeros(x.size)
            gx[i] = np.reshape(g, -1)[0]
            return (gx.reshape(x.shape),)

        return _result(value, "reduce_max", (x,), backward_fn)

    axis = _axis(axis, x.ndim, "reduce_max")
    idx = np.expand_dims(np.argmax(x.value, axis=axis), axis)
    value = np.take_along_axis(x.value, idx, axis)
    if not keepdims:
        value = np.squeeze(value, axis)

    def backward_fn(g):
        gx = np.zeros(x.shape)
        if not keepdims:
            g = np.expand_dims(g, axis)
        np.put_along_axis(gx, idx, g, axis)
        return (gx,)

    return _result(value, "reduce_max", (x,), backward_fn)


def norm(x, axis=None, keepdims=False):
    return sqrt(sum(mul(x, x), axis=axis, keepdims=keepdims))


# structural


def concat(xs, axis=0):
    xs = [as_variable(x) for x in xs]
    if not xs:
        raise ContractViolation("'concat' of nothing")
    axis = _axis(axis, xs[0].ndim, "concat")
    try:
        value = np.concatenate([x.value for x in xs], axis=axis)
    except ValueError as e:
        raise ContractViolation(f"'concat' shape mismatch: {e}") from None
    bounds = np.cumsum([x.shape[axis] for x in xs])[:-1]
    return _result(
        value, "concat", xs, lambda g: tuple(np.split(g, bounds, axis=axis))
    )


def reshape(x, shape):
    x = as_variable(x)
    try:
        value = x.value.reshape(shape)
    except ValueError as e:
        raise ContractViolation(f"'reshape' {x.shape} -> {shape}: {e}") from None
    return _result(value, "reshape", (x,), lambda g: (g.reshape(x.shape),))


def stack(xs, axis=0):
    xs = [as_variable(x) for x in xs]
    if not xs:
        raise ContractViolation("'stack' of nothing")
    axis = axis % (xs[0].ndim + 1)
    expanded = [reshape(x, x.shape[:axis] + (1,) + x.shape[axis:]) for x in xs]
    return concat(expanded, axis=axis)


def transpose(x, axes=None):
    x = as_variable(x)
    if axes is None:
        axes = tuple(reversed(range(x.ndim)))
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    return _result(
        np.transpose(x.value, axes), "transpose", (x,), lambda g: (np.transpose(g, inverse),)
    )


def broadcast_to(x, shape):
    x = as_variable(x)
    try:
        value = np.broadcast_to(x.value, shape)
    except ValueError:
        raise ContractViolation(f"'broadcast_to' {x.shape} -> {shape}") from None
    return _result(value, "broadcast_to", (x,), lambda g: (_unbroadcast(g, x.shape),))


def _check_indices(idx, extent, op):
    if idx.size and (idx.min() < 0 or idx.max() >= extent):
        raise ContractViolation(
            f"'{op}' index out of range [0, {extent}): min {idx.min()}, max {idx.max()}"
        )


def take(x, indices, axis=0):
    """Gather slices along ``axis``; repeated indices accumulate gradient."""
    x = as_variable(x)
    axis = _axis(axis, x.ndim, "take")
    idx = np.asarray(indices, dtype=np.intp)
    _check_indices(idx, x.shape[axis], "take")

    def backward_fn(g):
        gx = np.zeros(x.shape)
        np.add.at(gx, (slice(None),) * axis + (idx,), g)
        return (gx,)

    return _result(np.take(x.value, idx, axis=axis), "take", (x,), backward_fn)


def take_along_axis(x, indices, axis):
    x = as_variable(x)
    axis = _axis(axis, x.ndim, "take_along_axis")
    idx = np.asarray(indices, dtype=np.intp)
    if idx.ndim != x.ndim:
        raise ContractViolation(
            f"'take_along_axis' index ndim {idx.ndim} != value ndim {x.ndim}"
        )
    _check_indices(idx, x.shape[axis], "take_along_axis")

    def backward_fn(g):
        gx = np.zeros(x.shape)
        full = list(np.ix_(*[np.arange(s) for s in idx.shape]))
        full[axis] = idx
        np.add.at(gx, tuple(full), g)
        return (gx,)

    return _result(
        np.take_along_axis(x.value, idx, axis), "take_along_axis", (x,), backward_fn
    )


def index(x, key):
    x = as_variable(x)
    try:
        value = np.array(x.value[key])
    except IndexError as e:
        raise ContractViolation(f"'index' {e}") from None

    def backward_fn(g):
        gx = np.zeros(x.shape)
        np.add.at(gx, key, g)
        return (gx,)

    return _result(value, "index", (x,), backward_fn)
