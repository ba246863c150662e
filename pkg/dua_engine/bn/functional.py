# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Batch normalization kernels.

Three ways to move the running statistics live here: the training EMA
(:func:`bn_forward_train`), the adaptation EMA with an externally supplied
weight (:func:`bn_forward_adapt`) and none at all (:func:`bn_forward_eval`).
"""
import numpy as np

from ..tensor.core import as_tensor, as_vector
from ..tensor.exceptions import DimensionException, NumericException
from ..tensor.functional import LayerGrad
from .exceptions import MomentumException

REDUCE_AXES = (0, 2, 3)


def _broadcast(vector):
    return vector[None, :, None, None]


def batch_stats(x):
    """Per channel mean and biased variance over the n, h, w axes

    The mean is accumulated around the first element of each channel so
    that a constant channel yields its value and a variance of exactly 0.
    """
    x = as_tensor(x, name="input")
    n, c, h, w = x.shape
    if n * h * w < 1 or c < 1:
        raise DimensionException(
            "batch_stats needs n*h*w >= 1, got shape %r" % (x.shape,)
        )

    shift = x[0, :, 0, 0]
    mean = shift + (x - _broadcast(shift)).mean(axis=REDUCE_AXES)
    var = np.square(x - _broadcast(mean)).mean(axis=REDUCE_AXES)
    return mean, var


def bn_normalize(x, mu, var, state, eps=None):
    """``(x - mu) / sqrt(var + eps) * gamma + beta`` per channel

    :param eps: overrides ``state.eps`` when given (may be 0)
    :exception: NumericException on a negative variance
    """
    x = as_tensor(x, name="input")
    channels = x.shape[1]
    mu = as_vector(mu, channels, name="mu")
    var = as_vector(var, channels, name="var")
    if (var < 0).any():
        raise NumericException("variance must be >= 0, got %r" % var.min())

    eps = state.eps if eps is None else eps
    denominator = np.sqrt(var + eps)
    if (denominator == 0).any():
        raise NumericException("var + eps is 0 on some channel")

    scale = as_vector(state.gamma, channels, name="gamma") / denominator
    return (x - _broadcast(mu)) * _broadcast(scale) + _broadcast(
        as_vector(state.beta, channels, name="beta")
    )


def ema_update(stat_prev, batch_stat, weight):
    """``(1 - w) * stat_prev + w * batch_stat``

    :exception: MomentumException when ``w`` is outside of (0, 1]
    """
    if not 0 < weight <= 1:
        raise MomentumException(
            "EMA weight must lie in (0, 1], got %r" % weight
        )

    stat_prev = np.asarray(stat_prev, dtype=np.float64)
    return (1.0 - weight) * stat_prev + weight * np.asarray(
        batch_stat, dtype=np.float64
    )


def bn_forward_train(x, state, rho=None):
    """Normalize with the batch statistics, then fold them into the
    running statistics with weight ``rho`` (``state.train_momentum`` by
    default)
    """
    mu, var = batch_stats(x)
    out = bn_normalize(x, mu, var, state)
    rho = state.train_momentum if rho is None else rho
    state.running_mean = ema_update(state.running_mean, mu, rho)
    state.running_var = ema_update(state.running_var, var, rho)
    return out


def bn_backward_train(x, state, out_grad):
    """Gradient of the batch-statistics normalization

    :rtype: LayerGrad with ``gamma`` and ``beta`` gradients
    """
    x = as_tensor(x, name="input")
    out_grad = as_tensor(out_grad, name="out_grad")
    if out_grad.shape != x.shape:
        raise DimensionException(
            "out_grad shape %r does not match input %r"
            % (out_grad.shape, x.shape)
        )

    mu, var = batch_stats(x)
    inv_std = 1.0 / np.sqrt(var + state.eps)
    x_hat = (x - _broadcast(mu)) * _broadcast(inv_std)
    count = x.shape[0] * x.shape[2] * x.shape[3]
    beta_grad = out_grad.sum(axis=REDUCE_AXES)
    gamma_grad = (out_grad * x_hat).sum(axis=REDUCE_AXES)
    input_grad = _broadcast(state.gamma * inv_std / count) * (
        count * out_grad
        - _broadcast(beta_grad)
        - x_hat * _broadcast(gamma_grad)
    )
    return LayerGrad(
        input_grad=input_grad,
        param_grads={"gamma": gamma_grad, "beta": beta_grad},
    )


def bn_forward_eval(x, state):
    """Normalize with the frozen running statistics, mutates nothing"""
    return bn_normalize(x, state.running_mean, state.running_var, state)


def bn_forward_adapt(x, state, weight, post_update=True):
    """Move the running statistics towards the batch statistics

    Mean and variance are updated one after the other with the same
    ``weight``. A weight of 0 leaves the state untouched.

    :param post_update: normalize with the updated statistics (default) or
        with the statistics held before this call
    """
    if not 0 <= weight <= 1:
        raise MomentumException(
            "adaptation weight must lie in [0, 1], got %r" % weight
        )

    previous = (state.running_mean, state.running_var)
    if weight > 0:
        mu, var = batch_stats(x)
        state.running_mean = ema_update(state.running_mean, mu, weight)
        state.running_var = ema_update(state.running_var, var, weight)

    if post_update:
        return bn_forward_eval(x, state)

    return bn_normalize(x, previous[0], previous[1], state)
