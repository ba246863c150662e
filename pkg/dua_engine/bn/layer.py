# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import numpy as np

from ..tensor.core import Mode
from ..tensor.exceptions import DimensionException
from ..tensor.layers import Layer, register
from .functional import (
    bn_backward_train,
    bn_forward_adapt,
    bn_forward_eval,
    bn_forward_train,
)
from .state import DEFAULT_EPS, DEFAULT_TRAIN_MOMENTUM, BatchNormState


@register
class BatchNorm(Layer):
    """Batch normalization over ``(n, h, w)`` for each channel

    The execution mode picks the statistics path: train updates the
    running statistics with the training momentum, eval freezes them and
    adapt moves them with the weight handed over by the adaptation step.
    """

    tag = 2
    header_size = 1

    def __init__(
        self, channels, eps=DEFAULT_EPS, train_momentum=DEFAULT_TRAIN_MOMENTUM
    ):
        super(BatchNorm, self).__init__()
        self.state = BatchNormState.create(
            channels, eps=eps, train_momentum=train_momentum
        )

    @property
    def channels(self):
        return self.state.channels

    def output_shape(self, input_shape):
        if input_shape[0] != self.channels:
            raise DimensionException(
                "BatchNorm expects %d channels (axis c), got %d"
                % (self.channels, input_shape[0])
            )

        return input_shape

    def forward(self, x, mode=Mode.EVAL, weight=None, post_update=True):
        mode = Mode.get(mode)
        if mode == Mode.TRAIN:
            self._keep(mode, x)
            return bn_forward_train(x, self.state)

        self._keep(mode)
        if mode == Mode.ADAPT:
            return bn_forward_adapt(
                x, self.state, weight, post_update=post_update
            )

        return bn_forward_eval(x, self.state)

    def backward(self, out_grad):
        (x,) = self._cached()
        return bn_backward_train(x, self.state, out_grad)

    def parameters(self):
        return {"gamma": self.state.gamma, "beta": self.state.beta}

    def running_stats(self):
        return self.state.running_mean, self.state.running_var

    def header(self):
        return (self.channels,)

    def arrays(self):
        state = self.state
        return [
            state.gamma,
            state.beta,
            state.running_mean,
            state.running_var,
            np.array([state.eps, state.train_momentum]),
        ]

    def load_arrays(self, arrays):
        gamma, beta, mean, var, scalars = arrays
        self.state = BatchNormState(
            running_mean=mean,
            running_var=var,
            gamma=gamma,
            beta=beta,
            eps=float(scalars[0]),
            train_momentum=float(scalars[1]),
        )
