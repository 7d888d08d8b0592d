# All Rights Reserved.
#
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

"""Reverse-mode automatic differentiation over float64 numpy arrays.

Operations executed while a :class:`Tape` is active are recorded in
execution order together with a closure producing the input adjoints;
:func:`backward` walks the record in reverse. Leading (batch) axes
broadcast the usual numpy way and their adjoints are summed back to the
input shape.
"""

import threading

import numpy as np

from rally_doa import exceptions

_state = threading.local()

GELU_C = np.sqrt(2.0 / np.pi)
GELU_A = 0.044715


class Tensor(object):
    """Dense float64 array with an optional gradient slot."""

    __array_priority__ = 100

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    def numpy(self):
        return self.data

    def item(self):
        return float(self.data.reshape(-1)[0])

    def detach(self):
        return Tensor(self.data)

    def __repr__(self):
        label = " %s" % self.name if self.name else ""
        return "<Tensor%s shape=%s grad=%s>" % (label, self.shape,
                                                self.requires_grad)

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    __div__ = __truediv__

    def __neg__(self):
        return scale(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return getitem(self, index)


class Node(object):
    __slots__ = ("out", "inputs", "backward", "op")

    def __init__(self, out, inputs, backward, op):
        self.out = out
        self.inputs = inputs
        self.backward = backward
        self.op = op


class Tape(object):
    """Record of primitive operations; use as a context manager.

    A tape belongs to the thread that entered it.
    """

    def __init__(self):
        self.nodes = []

    def __enter__(self):
        _stack().append(self)
        return self

    def __exit__(self, *exc):
        _stack().pop()

    def __len__(self):
        return len(self.nodes)

    def record(self, node):
        self.nodes.append(node)


def _stack():
    if not hasattr(_state, "tapes"):
        _state.tapes = []
    return _state.tapes


def active_tape():
    stack = _stack()
    return stack[-1] if stack else None


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def parameter(data, name=None):
    return Tensor(data, requires_grad=True, name=name)


def unbroadcast(grad, shape):
    """Sum `grad` down to `shape` undoing numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _emit(op, data, inputs, backward):
    if not np.all(np.isfinite(data)):
        raise exceptions.NumericFailure(operation=op)
    requires_grad = any(t.requires_grad for t in inputs)
    out = Tensor(data, requires_grad=requires_grad)
    tape = active_tape()
    if tape is not None and requires_grad:
        tape.record(Node(out, inputs, backward, op))
    return out


def _check_shapes(op, *shapes):
    try:
        np.broadcast_shapes(*shapes)
    except ValueError:
        raise exceptions.DimensionMismatch(
            "%s cannot combine shapes %s" % (op, ", ".join(map(str,
                                                                 shapes))))


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_shapes("add", a.shape, b.shape)
    return _emit("add", a.data + b.data, (a, b), lambda g: (g, g))


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_shapes("sub", a.shape, b.shape)
    return _emit("sub", a.data - b.data, (a, b), lambda g: (g, -g))


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_shapes("mul", a.shape, b.shape)
    return _emit("mul", a.data * b.data, (a, b),
                 lambda g: (g * b.data, g * a.data))


def div(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _check_shapes("div", a.shape, b.shape)
    out = a.data / b.data
    return _emit("div", out, (a, b),
                 lambda g: (g / b.data, -g * out / b.data))


def scale(a, c):
    a = as_tensor(a)
    c = float(c)
    return _emit("scale", a.data * c, (a,), lambda g: (g * c,))


def square(a):
    a = as_tensor(a)
    return _emit("square", a.data ** 2, (a,), lambda g: (2.0 * g * a.data,))


def sqrt(a):
    """Square root; the adjoint at exactly zero is taken as zero."""
    a = as_tensor(a)
    out = np.sqrt(a.data)

    def backward(g):
        safe = np.where(out > 0, out, 1.0)
        return (np.where(out > 0, 0.5 * g / safe, 0.0),)
    return _emit("sqrt", out, (a,), backward)


def matmul(a, b):
    """Batched matrix product over the last two axes."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise exceptions.DimensionMismatch(
            "matmul cannot multiply %s by %s" % (a.shape, b.shape))

    def backward(g):
        return (np.matmul(g, np.swapaxes(b.data, -1, -2)),
                np.matmul(np.swapaxes(a.data, -1, -2), g))
    return _emit("matmul", np.matmul(a.data, b.data), (a, b), backward)


def linear(x, w, b=None):
    """x W^T + b with W of shape (out, in), applied over the last axis."""
    x, w = as_tensor(x), as_tensor(w)
    if x.shape[-1] != w.shape[1]:
        raise exceptions.DimensionMismatch(
            "linear layer expects %d inputs, got %d" % (w.shape[1],
                                                        x.shape[-1]))
    out = np.matmul(x.data, w.data.T)
    inputs = (x, w)
    if b is not None:
        b = as_tensor(b)
        out = out + b.data
        inputs = (x, w, b)

    def backward(g):
        g2 = g.reshape(-1, g.shape[-1])
        x2 = x.data.reshape(-1, x.shape[-1])
        grads = (np.matmul(g, w.data), g2.T.dot(x2))
        if b is not None:
            grads += (g2.sum(axis=0),)
        return grads
    return _emit("linear", out, inputs, backward)


def layernorm(x, gain, bias, eps=1e-5):
    """Normalize over the last axis, then apply gain and bias."""
    x, gain, bias = as_tensor(x), as_tensor(gain), as_tensor(bias)
    if gain.shape != (x.shape[-1],) or bias.shape != (x.shape[-1],):
        raise exceptions.DimensionMismatch(
            "layernorm over %d features got gain %s and bias %s"
            % (x.shape[-1], gain.shape, bias.shape))
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    inv_std = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True)
                            + eps)
    xhat = centered * inv_std

    def backward(g):
        gxhat = g * gain.data
        gx = inv_std * (gxhat - gxhat.mean(axis=-1, keepdims=True)
                        - xhat * (gxhat * xhat).mean(axis=-1,
                                                     keepdims=True))
        flat = g.reshape(-1, g.shape[-1])
        return (gx,
                (flat * xhat.reshape(flat.shape)).sum(axis=0),
                flat.sum(axis=0))
    return _emit("layernorm", xhat * gain.data + bias.data, (x, gain, bias),
                 backward)


def softmax_rows(x):
    """Softmax over the last axis."""
    x = as_tensor(x)
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=-1, keepdims=True)

    def backward(g):
        return (out * (g - (g * out).sum(axis=-1, keepdims=True)),)
    return _emit("softmax", out, (x,), backward)


def gelu(x):
    """GELU, tanh approximation."""
    x = as_tensor(x)
    inner = GELU_C * (x.data + GELU_A * x.data ** 3)
    t = np.tanh(inner)

    def backward(g):
        d_inner = GELU_C * (1.0 + 3.0 * GELU_A * x.data ** 2)
        return (g * (0.5 * (1.0 + t) + 0.5 * x.data * (1.0 - t ** 2)
                     * d_inner),)
    return _emit("gelu", 0.5 * x.data * (1.0 + t), (x,), backward)


def sum(x, axis=None, keepdims=False):
    x = as_tensor(x)
    out = np.sum(x.data, axis=axis, keepdims=keepdims)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape).copy(),)
    return _emit("sum", out, (x,), backward)


def mean(x, axis=None, keepdims=False):
    x = as_tensor(x)
    count = x.data.size if axis is None else np.prod(
        [x.shape[a] for a in np.atleast_1d(axis)])
    return scale(sum(x, axis=axis, keepdims=keepdims), 1.0 / count)


def reshape(x, shape):
    x = as_tensor(x)
    return _emit("reshape", x.data.reshape(shape), (x,),
                 lambda g: (g.reshape(x.shape),))


def transpose(x, axes=None):
    """Permute axes; swaps the last two when `axes` is omitted."""
    x = as_tensor(x)
    if axes is None:
        axes = list(range(x.ndim))
        axes[-2], axes[-1] = axes[-1], axes[-2]
    inverse = np.argsort(axes)
    return _emit("transpose", np.transpose(x.data, axes), (x,),
                 lambda g: (np.transpose(g, inverse),))


def concat(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as e:
        raise exceptions.DimensionMismatch("concat: %s" % e)

    def backward(g):
        return tuple(np.split(g, np.cumsum(sizes)[:-1], axis=axis))
    return _emit("concat", out, tuple(tensors), backward)


def concat_rows(tensors):
    """Stack sequences along the row (second to last) axis."""
    return concat(tensors, axis=-2)


def _is_advanced(index):
    parts = index if isinstance(index, tuple) else (index,)
    return any(isinstance(p, (list, np.ndarray)) for p in parts)


def getitem(x, index):
    x = as_tensor(x)
    advanced = _is_advanced(index)

    def backward(g):
        full = np.zeros_like(x.data)
        if advanced:
            np.add.at(full, index, g)
        else:
            full[index] = g
        return (full,)
    return _emit("getitem", x.data[index], (x,), backward)


def slice_row(x, row):
    """Row `row` of the last two axes, keeping leading axes."""
    return getitem(x, (Ellipsis, row, slice(None)))


def broadcast_to(x, shape):
    x = as_tensor(x)
    return _emit("broadcast", np.broadcast_to(x.data, shape).copy(), (x,),
                 lambda g: (unbroadcast(g, x.shape),))


def backward(tape, loss, leaves=None):
    """Propagate d(loss) through `tape`.

    :param tape: Tape the loss was computed under
    :param loss: scalar Tensor
    :param leaves: tensors whose gradients are wanted; every recorded
        trainable input that no recorded operation produced if omitted
    :returns: list of gradients aligned with `leaves`; leaves the loss
        does not depend on get zeros. Each leaf's ``grad`` is set too.
    """
    if loss.data.size != 1:
        raise exceptions.ContractError(
            message="backward needs a scalar loss, got shape %s"
                    % (loss.shape,))
    if leaves is None:
        produced = set(id(node.out) for node in tape.nodes)
        seen = set()
        leaves = []
        for node in tape.nodes:
            for t in node.inputs:
                if (t.requires_grad and id(t) not in produced
                        and id(t) not in seen):
                    seen.add(id(t))
                    leaves.append(t)

    grads = {id(loss): np.ones_like(loss.data)}
    for node in reversed(tape.nodes):
        g = grads.pop(id(node.out), None)
        if g is None:
            continue
        for t, tg in zip(node.inputs, node.backward(g)):
            if tg is None or not t.requires_grad:
                continue
            tg = unbroadcast(np.asarray(tg, dtype=np.float64), t.shape)
            if id(t) in grads:
                grads[id(t)] = grads[id(t)] + tg
            else:
                grads[id(t)] = tg

    result = []
    for leaf in leaves:
        g = grads.get(id(leaf))
        leaf.grad = np.zeros_like(leaf.data) if g is None else g
        result.append(leaf.grad)
    return result
