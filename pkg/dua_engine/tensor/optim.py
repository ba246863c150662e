# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import numpy as np

from .exceptions import DimensionException, ParameterException


def sgd_step(model, grads, lr, momentum=0.0, velocity=None):
    """One SGD step with heavy ball momentum

    ``v <- momentum * v + g`` then ``p <- p - lr * v`` for every learned
    parameter, in place. Running statistics are not parameters and are
    left alone.

    :param grads: one LayerGrad per layer, as returned by Model.backward
    :param velocity: dict keyed by ``(layer index, name)``, created when
        None
    :rtype: the velocity dict
    """
    if not lr > 0:
        raise ParameterException("lr must be > 0, got %r" % lr)
    if not 0 <= momentum < 1:
        raise ParameterException(
            "momentum must lie in [0, 1), got %r" % momentum
        )
    if len(grads) != len(model.layers):
        raise DimensionException(
            "%d gradients for %d layers" % (len(grads), len(model.layers))
        )

    velocity = {} if velocity is None else velocity
    for index, name, param in model.parameters():
        grad = np.asarray(grads[index].param_grads[name], dtype=np.float64)
        if grad.shape != param.shape:
            raise DimensionException(
                "gradient of %r in layer %d has shape %r, parameter %r"
                % (name, index, grad.shape, param.shape)
            )

        key = (index, name)
        if key not in velocity:
            velocity[key] = np.zeros_like(param)

        velocity[key] = momentum * velocity[key] + grad
        param -= lr * velocity[key]

    return velocity


class SGD:
    def __init__(self, model, lr, momentum=0.0):
        self.model = model
        self.lr = lr
        self.momentum = momentum
        self.velocity = {}

    def step(self, grads):
        self.velocity = sgd_step(
            self.model, grads, self.lr, self.momentum, self.velocity
        )
