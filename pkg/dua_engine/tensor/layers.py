# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import numpy as np

from . import functional as F
from .core import Mode
from .exceptions import DimensionException

LAYERS = {}


def register(cls):
    """Declare a layer class under its checkpoint tag"""
    LAYERS[cls.tag] = cls
    return cls


class Layer:
    """Base of every layer

    A layer owns its learned parameters and, in train mode only, the cache
    its backward pass needs. ``header`` gives the integers written to the
    checkpoint header, ``arrays`` the float arrays of the payload in
    declaration order.
    """

    tag = None
    header_size = 0

    def __init__(self):
        self._cache = None

    def output_shape(self, input_shape):
        return input_shape

    def forward(self, x, mode=Mode.EVAL, **kwargs):
        raise NotImplementedError

    def backward(self, out_grad):
        raise NotImplementedError

    def _keep(self, mode, *cache):
        self._cache = cache if mode == Mode.TRAIN else None

    def _cached(self):
        if self._cache is None:
            raise DimensionException(
                "%s.backward called without a train mode forward"
                % self.__class__.__name__
            )

        return self._cache

    def parameters(self):
        """Learned parameters, keyed by name, as the live arrays"""
        return {}

    def header(self):
        return ()

    def arrays(self):
        return list(self.parameters().values())

    def array_shapes(self):
        return [array.shape for array in self.arrays()]

    def load_arrays(self, arrays):
        for target, value in zip(self.arrays(), arrays):
            target[...] = value.reshape(target.shape)

    @classmethod
    def from_header(cls, values):
        return cls(*values)

    def __repr__(self):
        return "%s%r" % (self.__class__.__name__, self.header())


@register
class Conv2d(Layer):
    tag = 1
    header_size = 6

    def __init__(self, c_out, c_in, kh, kw, stride=1, pad=0, rng=None):
        super(Conv2d, self).__init__()
        self.stride = stride
        self.pad = pad
        self.weight = np.zeros((c_out, c_in, kh, kw))
        self.bias = np.zeros(c_out)
        if rng is not None:
            fan_in = c_in * kh * kw
            self.weight[...] = rng.normal(
                0.0, np.sqrt(2.0 / fan_in), self.weight.shape
            )

    def output_shape(self, input_shape):
        c_out, c_in, kh, kw = self.weight.shape
        c, h, w = input_shape
        if c != c_in:
            raise DimensionException(
                "Conv2d expects %d input channels (axis c), got %d"
                % (c_in, c)
            )

        return (
            c_out,
            (h + 2 * self.pad - kh) // self.stride + 1,
            (w + 2 * self.pad - kw) // self.stride + 1,
        )

    def forward(self, x, mode=Mode.EVAL, **kwargs):
        self._keep(mode, x)
        return F.conv2d_forward(
            x, self.weight, self.bias, stride=self.stride, pad=self.pad
        )

    def backward(self, out_grad):
        (x,) = self._cached()
        return F.conv2d_backward(
            x, self.weight, out_grad, stride=self.stride, pad=self.pad
        )

    def parameters(self):
        return {"weight": self.weight, "bias": self.bias}

    def header(self):
        return self.weight.shape + (self.stride, self.pad)


@register
class ReLU(Layer):
    tag = 3

    def forward(self, x, mode=Mode.EVAL, **kwargs):
        self._keep(mode, x)
        return F.relu_forward(x)

    def backward(self, out_grad):
        (x,) = self._cached()
        return F.relu_backward(x, out_grad)


@register
class MaxPool2x2(Layer):
    tag = 4

    def output_shape(self, input_shape):
        c, h, w = input_shape
        if h % 2 or w % 2:
            raise DimensionException(
                "MaxPool2x2 needs even axes ('h', 'w'), got %r" % ((h, w),)
            )

        return (c, h // 2, w // 2)

    def forward(self, x, mode=Mode.EVAL, **kwargs):
        out, argmax = F.maxpool2x2_forward(x)
        self._keep(mode, x, argmax)
        return out

    def backward(self, out_grad):
        x, argmax = self._cached()
        return F.maxpool2x2_backward(x, argmax, out_grad)


@register
class Flatten(Layer):
    tag = 5

    def output_shape(self, input_shape):
        c, h, w = input_shape
        return (c * h * w, 1, 1)

    def forward(self, x, mode=Mode.EVAL, **kwargs):
        self._keep(mode, x)
        return F.flatten(x)

    def backward(self, out_grad):
        (x,) = self._cached()
        return F.flatten_backward(x, out_grad)


@register
class Linear(Layer):
    tag = 6
    header_size = 2

    def __init__(self, d_out, d_in, rng=None):
        super(Linear, self).__init__()
        self.weight = np.zeros((d_out, d_in))
        self.bias = np.zeros(d_out)
        if rng is not None:
            self.weight[...] = rng.normal(
                0.0, np.sqrt(2.0 / d_in), self.weight.shape
            )

    def output_shape(self, input_shape):
        d_out, d_in = self.weight.shape
        features = int(np.prod(input_shape))
        if features != d_in:
            raise DimensionException(
                "Linear expects %d features (axes c*h*w), got %d"
                % (d_in, features)
            )

        return (d_out, 1, 1)

    def forward(self, x, mode=Mode.EVAL, **kwargs):
        self._keep(mode, x)
        return F.linear_forward(x, self.weight, self.bias)

    def backward(self, out_grad):
        (x,) = self._cached()
        return F.linear_backward(x, self.weight, out_grad)

    def parameters(self):
        return {"weight": self.weight, "bias": self.bias}

    def header(self):
        return self.weight.shape
