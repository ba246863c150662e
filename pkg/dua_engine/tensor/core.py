# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Tensor helpers.

A tensor is a 4-D ``float64`` numpy array laid out ``(n, c, h, w)``. Flat
features are carried as ``(n, d, 1, 1)``.
"""
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from .exceptions import DimensionException, NumericException, ParameterException

Tensor = NDArray[np.float64]
AXES = ("n", "c", "h", "w")


class Mode(str, Enum):
    """Execution mode of a forward pass, only batch normalization cares"""

    TRAIN = "train"
    EVAL = "eval"
    ADAPT = "adapt"

    @classmethod
    def get(cls, value):
        try:
            return cls(value)
        except ValueError:
            raise ParameterException(
                "Unknown mode %r, expected one of %r"
                % (value, [mode.value for mode in cls])
            )


def as_tensor(value, name="tensor", check_finite=True):
    """Return ``value`` as a C-contiguous float64 4-D array

    :param value: array like
    :param name: used in the error messages
    :param check_finite: raise if any element is NaN or Inf
    :exception: DimensionException, NumericException
    """
    array = np.ascontiguousarray(value, dtype=np.float64)
    if array.ndim == 2:
        array = array.reshape(array.shape + (1, 1))

    if array.ndim != 4:
        raise DimensionException(
            "%r must have 4 axes %r, got shape %r" % (name, AXES, array.shape)
        )

    if check_finite and not np.isfinite(array).all():
        raise NumericException("%r holds non finite values" % name)

    return array


def as_vector(value, length, name="vector"):
    """Return ``value`` as a float64 vector of ``length`` entries"""
    array = np.ascontiguousarray(value, dtype=np.float64).reshape(-1)
    if array.shape[0] != length:
        raise DimensionException(
            "%r must hold %d entries (axis c), got %d"
            % (name, length, array.shape[0])
        )

    return array


def check_axis(tensor, axis, expected, name="tensor"):
    size = tensor.shape[AXES.index(axis)]
    if size != expected:
        raise DimensionException(
            "%r axis %r has size %d, expected %d"
            % (name, axis, size, expected)
        )


def check_same_shape(left, right, left_name="left", right_name="right"):
    if left.shape != right.shape:
        diff = [
            axis
            for axis, a, b in zip(AXES, left.shape, right.shape)
            if a != b
        ]
        raise DimensionException(
            "%r %r and %r %r differ on axes %r"
            % (left_name, left.shape, right_name, right.shape, diff)
        )


def flat_features(tensor):
    """View of a tensor as ``(n, c*h*w)``"""
    return tensor.reshape(tensor.shape[0], -1)
