# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Forward and backward kernels of the layers used by the desk model.

Every function takes and returns 4-D float64 tensors. Backward functions
return a :class:`LayerGrad`.
"""
from dataclasses import dataclass, field
from typing import Dict

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import Tensor, as_tensor, as_vector, check_axis, flat_features
from .exceptions import (
    DimensionException,
    LabelIndexException,
    ParameterException,
)


@dataclass
class LayerGrad:
    input_grad: Tensor
    param_grads: Dict[str, np.ndarray] = field(default_factory=dict)


def _conv_geometry(x, weight, stride, pad):
    if stride < 1:
        raise ParameterException("stride must be >= 1, got %r" % stride)
    if pad < 0:
        raise ParameterException("pad must be >= 0, got %r" % pad)

    weight = np.asarray(weight, dtype=np.float64)
    if weight.ndim != 4:
        raise DimensionException(
            "weight must be (c_out, c_in, kh, kw), got shape %r"
            % (weight.shape,)
        )

    check_axis(x, "c", weight.shape[1], name="input")
    n, _, h, w = x.shape
    kh, kw = weight.shape[2:]
    oh = (h + 2 * pad - kh) // stride + 1
    ow = (w + 2 * pad - kw) // stride + 1
    if oh < 1 or ow < 1:
        raise DimensionException(
            "kernel %r larger than padded input on axes ('h', 'w') %r"
            % ((kh, kw), (h + 2 * pad, w + 2 * pad))
        )

    return weight, oh, ow


def _pad(x, pad):
    if not pad:
        return x

    return np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))


def _windows(xp, kh, kw, stride):
    # (n, c, oh, ow, kh, kw)
    view = sliding_window_view(xp, (kh, kw), axis=(2, 3))
    return view[:, :, ::stride, ::stride]


def conv2d_forward(x, weight, bias, stride=1, pad=0, ordered=False):
    """Cross-correlation with zero padding

    :param ordered: accumulate input channels and kernel taps one after
        the other, left to right, instead of a single BLAS contraction.
        The ordered path is bit-identical to a naive nested loop that
        starts from zero and adds the bias last.
    :rtype: tensor ``(n, c_out, oh, ow)``
    """
    x = as_tensor(x, name="input")
    weight, oh, ow = _conv_geometry(x, weight, stride, pad)
    c_out, c_in, kh, kw = weight.shape
    bias = as_vector(bias, c_out, name="bias")
    xp = _pad(x, pad)
    if ordered:
        out = np.zeros((x.shape[0], c_out, oh, ow))
        span_h = stride * (oh - 1) + 1
        span_w = stride * (ow - 1) + 1
        for ci in range(c_in):
            for ki in range(kh):
                for kj in range(kw):
                    patch = xp[
                        :, ci, ki:ki + span_h:stride, kj:kj + span_w:stride
                    ]
                    out += (
                        weight[None, :, ci, ki, kj, None, None]
                        * patch[:, None]
                    )
    else:
        windows = _windows(xp, kh, kw, stride)
        out = np.tensordot(windows, weight, axes=([1, 4, 5], [1, 2, 3]))
        out = out.transpose(0, 3, 1, 2)

    out = out + bias[None, :, None, None]
    return np.ascontiguousarray(out)


def conv2d_backward(x, weight, out_grad, stride=1, pad=0):
    """Exact adjoint of :func:`conv2d_forward`

    :rtype: LayerGrad with ``weight`` and ``bias`` gradients
    """
    x = as_tensor(x, name="input")
    weight, oh, ow = _conv_geometry(x, weight, stride, pad)
    c_out, c_in, kh, kw = weight.shape
    out_grad = as_tensor(out_grad, name="out_grad")
    expected = (x.shape[0], c_out, oh, ow)
    if out_grad.shape != expected:
        raise DimensionException(
            "out_grad shape %r does not match conv output %r"
            % (out_grad.shape, expected)
        )

    xp = _pad(x, pad)
    windows = _windows(xp, kh, kw, stride)
    weight_grad = np.tensordot(
        out_grad, windows, axes=([0, 2, 3], [0, 2, 3])
    )
    bias_grad = out_grad.sum(axis=(0, 2, 3))

    dxp = np.zeros_like(xp)
    span_h = stride * (oh - 1) + 1
    span_w = stride * (ow - 1) + 1
    for ki in range(kh):
        for kj in range(kw):
            contrib = np.tensordot(out_grad, weight[:, :, ki, kj], axes=(1, 0))
            dxp[
                :, :, ki:ki + span_h:stride, kj:kj + span_w:stride
            ] += contrib.transpose(0, 3, 1, 2)

    h, w = x.shape[2:]
    input_grad = np.ascontiguousarray(dxp[:, :, pad:pad + h, pad:pad + w])
    return LayerGrad(
        input_grad=input_grad,
        param_grads={"weight": weight_grad, "bias": bias_grad},
    )


def _linear_weight(x, weight):
    weight = np.asarray(weight, dtype=np.float64)
    if weight.ndim != 2:
        raise DimensionException(
            "weight must be (d_out, d), got shape %r" % (weight.shape,)
        )

    features = flat_features(x)
    if features.shape[1] != weight.shape[1]:
        raise DimensionException(
            "input has %d features (axes c*h*w), weight expects %d"
            % (features.shape[1], weight.shape[1])
        )

    return weight, features


def linear_forward(x, weight, bias):
    """Affine map of the flattened input, returned as ``(n, d_out, 1, 1)``"""
    x = as_tensor(x, name="input")
    weight, features = _linear_weight(x, weight)
    bias = as_vector(bias, weight.shape[0], name="bias")
    out = features @ weight.T + bias
    return out.reshape(out.shape + (1, 1))


def linear_backward(x, weight, out_grad):
    x = as_tensor(x, name="input")
    weight, features = _linear_weight(x, weight)
    grad = flat_features(as_tensor(out_grad, name="out_grad"))
    if grad.shape != (features.shape[0], weight.shape[0]):
        raise DimensionException(
            "out_grad shape %r does not match linear output %r"
            % (grad.shape, (features.shape[0], weight.shape[0]))
        )

    return LayerGrad(
        input_grad=(grad @ weight).reshape(x.shape),
        param_grads={"weight": grad.T @ features, "bias": grad.sum(axis=0)},
    )


def relu_forward(x):
    return np.maximum(as_tensor(x, name="input"), 0.0)


def relu_backward(x, out_grad):
    x = as_tensor(x, name="input")
    return LayerGrad(input_grad=np.where(x > 0, out_grad, 0.0))


def _pool_windows(x):
    n, c, h, w = x.shape
    if h % 2 or w % 2:
        raise DimensionException(
            "maxpool2x2 needs even axes ('h', 'w'), got %r" % ((h, w),)
        )

    windows = x.reshape(n, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5)
    # row major order inside each window: (0,0) (0,1) (1,0) (1,1)
    return windows.reshape(n, c, h // 2, w // 2, 4)


def maxpool2x2_forward(x):
    """2x2 non overlapping max pooling

    :rtype: (output, argmax) where argmax is the row-major position of the
        first maximal element of every window
    """
    windows = _pool_windows(as_tensor(x, name="input"))
    argmax = windows.argmax(axis=-1)
    out = np.take_along_axis(windows, argmax[..., None], axis=-1)[..., 0]
    return np.ascontiguousarray(out), argmax


def maxpool2x2_backward(x, argmax, out_grad):
    x = as_tensor(x, name="input")
    n, c, h, w = x.shape
    out_grad = as_tensor(out_grad, name="out_grad")
    if out_grad.shape != (n, c, h // 2, w // 2):
        raise DimensionException(
            "out_grad shape %r does not match pooled output %r"
            % (out_grad.shape, (n, c, h // 2, w // 2))
        )

    routed = np.zeros((n, c, h // 2, w // 2, 4))
    np.put_along_axis(routed, argmax[..., None], out_grad[..., None], axis=-1)
    routed = routed.reshape(n, c, h // 2, w // 2, 2, 2).transpose(
        0, 1, 2, 4, 3, 5
    )
    return LayerGrad(input_grad=np.ascontiguousarray(routed.reshape(x.shape)))


def flatten(x):
    x = as_tensor(x, name="input")
    return flat_features(x).reshape(x.shape[0], -1, 1, 1).copy()


def flatten_backward(x, out_grad):
    return LayerGrad(input_grad=np.reshape(out_grad, np.shape(x)).copy())


def softmax_cross_entropy(logits, labels):
    """Mean cross entropy and its gradient w.r.t. the logits

    :param logits: ``(n, K)`` or ``(n, K, 1, 1)``
    :param labels: ``n`` integer labels in ``[0, K)``
    :rtype: (loss, logit_grad) with ``logit_grad`` shaped like ``logits``
    :exception: LabelIndexException
    """
    logits = np.asarray(logits, dtype=np.float64)
    scores = logits.reshape(logits.shape[0], -1)
    n, k = scores.shape
    labels = np.asarray(labels).reshape(-1)
    if labels.shape[0] != n:
        raise DimensionException(
            "%d labels for %d logits rows (axis n)" % (labels.shape[0], n)
        )

    if n and (labels.min() < 0 or labels.max() >= k):
        raise LabelIndexException(
            "labels must lie in [0, %d), got range [%r, %r]"
            % (k, labels.min(), labels.max())
        )

    labels = labels.astype(np.intp)
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    total = exp.sum(axis=1, keepdims=True)
    rows = np.arange(n)
    loss = float(np.mean(np.log(total[:, 0]) - shifted[rows, labels]))
    grad = exp / total
    grad[rows, labels] -= 1.0
    grad /= n
    return loss, grad.reshape(logits.shape)
