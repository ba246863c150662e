# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from collections import OrderedDict
from copy import deepcopy
from hashlib import sha256

import numpy as np

from ..bn.exceptions import LayerMaskException
from ..bn.layer import BatchNorm
from .core import Mode, as_tensor
from .exceptions import DimensionException, ParameterException
from .layers import Conv2d, Flatten, Linear, MaxPool2x2, ReLU


class Model:
    """Ordered list of layers with named batch normalization layers

    :param layers: layer instances, applied in order
    :param bn_names: one unique name per BatchNorm layer, in layer order
        (``bn1``, ``bn2``, ... by default)
    :param input_shape: ``(c, h, w)``; when given the layer chain is
        checked for compatible shapes
    """

    def __init__(self, layers, bn_names=None, input_shape=None):
        self.layers = list(layers)
        bn_count = sum(isinstance(layer, BatchNorm) for layer in self.layers)
        if bn_names is None:
            bn_names = ["bn%d" % (index + 1) for index in range(bn_count)]

        bn_names = list(bn_names)
        if len(bn_names) != bn_count:
            raise ParameterException(
                "%d bn names given for %d BatchNorm layers"
                % (len(bn_names), bn_count)
            )
        if len(set(bn_names)) != len(bn_names):
            raise ParameterException("bn names must be unique: %r" % bn_names)

        self.bn_names = bn_names
        self.input_shape = tuple(input_shape) if input_shape else None
        if self.input_shape:
            self.output_shapes()

    def output_shapes(self):
        """Shape after every layer, raising on the first incompatibility"""
        shapes = []
        shape = self.input_shape
        for index, layer in enumerate(self.layers):
            try:
                shape = layer.output_shape(shape)
            except DimensionException as e:
                raise DimensionException(
                    "layer %d (%r): %s" % (index, layer, e)
                )

            shapes.append(shape)

        return shapes

    @property
    def bn_layers(self):
        layers = [
            layer for layer in self.layers if isinstance(layer, BatchNorm)
        ]
        return OrderedDict(zip(self.bn_names, layers))

    def bn(self, name):
        layers = self.bn_layers
        if name not in layers:
            raise ParameterException(
                "Unknown bn layer %r, known: %r" % (name, self.bn_names)
            )

        return layers[name]

    def check_mask(self, mask):
        """Validate a layer mask, ``None`` meaning every bn layer"""
        if mask is None:
            return tuple(self.bn_names)

        unknown = [name for name in mask if name not in self.bn_names]
        if unknown:
            raise LayerMaskException(
                "layer mask %r is not a subset of %r" % (unknown, self.bn_names)
            )

        return tuple(name for name in self.bn_names if name in mask)

    def forward(
        self, x, mode=Mode.EVAL, weight=None, mask=None, post_update=True
    ):
        """Run every layer

        :param mode: train, eval or adapt; only BatchNorm layers look at it
        :param weight: adaptation weight shared by the masked bn layers
        :param mask: bn layers adapted in adapt mode (all by default), the
            others run in eval mode
        """
        mode = Mode.get(mode)
        if mode == Mode.ADAPT:
            if weight is None:
                raise ParameterException("adapt mode needs a weight")

            mask = set(self.check_mask(mask))

        x = as_tensor(x, name="input")
        names = iter(self.bn_names)
        for layer in self.layers:
            if isinstance(layer, BatchNorm):
                name = next(names)
                if mode == Mode.ADAPT and name not in mask:
                    x = layer.forward(x, Mode.EVAL)
                else:
                    x = layer.forward(
                        x, mode, weight=weight, post_update=post_update
                    )
            else:
                x = layer.forward(x, mode)

        return x

    def backward(self, out_grad):
        """Gradients of every layer, in layer order, after a train forward"""
        grads = []
        for layer in reversed(self.layers):
            grad = layer.backward(out_grad)
            grads.append(grad)
            out_grad = grad.input_grad

        grads.reverse()
        return grads

    def predict(self, x, batch_size=256):
        """Eval mode logits ``(n, K)`` computed chunk by chunk"""
        x = as_tensor(x, name="input", check_finite=False)
        chunks = [
            self.forward(x[start:start + batch_size], Mode.EVAL)
            for start in range(0, x.shape[0], batch_size)
        ]
        if not chunks:
            return np.zeros((0, 0))

        logits = np.concatenate(chunks)
        return logits.reshape(logits.shape[0], -1)

    def parameters(self):
        """``(layer index, name, live array)`` of every learned parameter"""
        return [
            (index, name, array)
            for index, layer in enumerate(self.layers)
            for name, array in layer.parameters().items()
        ]

    def running_stats(self):
        stats = OrderedDict()
        for name, layer in self.bn_layers.items():
            mean, var = layer.running_stats()
            stats[name] = (mean.copy(), var.copy())

        return stats

    def stats_digest(self):
        """Short hash of every running statistic, in layer order"""
        digest = sha256()
        for mean, var in self.running_stats().values():
            digest.update(mean.astype("<f8").tobytes())
            digest.update(var.astype("<f8").tobytes())

        return digest.hexdigest()[:16]

    def learned_bytes(self):
        """Bytes of every learned parameter, running statistics excluded"""
        return b"".join(
            array.astype("<f8").tobytes() for _, _, array in self.parameters()
        )

    def copy(self):
        return deepcopy(self)


def model_forward(model, x, mode=Mode.EVAL, **kwargs):
    return model.forward(x, mode, **kwargs)


def build_desk_model(
    rng=None,
    in_channels=1,
    size=28,
    widths=(16, 32),
    hidden=64,
    n_classes=10,
):
    """Conv-BN-ReLU-Pool twice, then Linear-BN-ReLU-Linear

    The defaults give the 28x28 desk architecture with bn layers
    ``bn1``, ``bn2``, ``bn3``; smaller widths and sizes are used by tests.
    """
    if size % 4:
        raise DimensionException(
            "input size (axes 'h', 'w') must be a multiple of 4, got %r" % size
        )

    if rng is None:
        rng = np.random.default_rng(0)

    w1, w2 = widths
    features = w2 * (size // 4) ** 2
    layers = [
        Conv2d(w1, in_channels, 3, 3, stride=1, pad=1, rng=rng),
        BatchNorm(w1),
        ReLU(),
        MaxPool2x2(),
        Conv2d(w2, w1, 3, 3, stride=1, pad=1, rng=rng),
        BatchNorm(w2),
        ReLU(),
        MaxPool2x2(),
        Flatten(),
        Linear(hidden, features, rng=rng),
        BatchNorm(hidden),
        ReLU(),
        Linear(n_classes, hidden, rng=rng),
    ]
    return Model(layers, input_shape=(in_channels, size, size))
