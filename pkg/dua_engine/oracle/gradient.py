# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import numpy as np

from .exceptions import OracleDimensionException, OracleParameterException


def fd_gradient(f, point, step=1e-6):
    """Central difference gradient of the scalar function ``f``

    :param point: scalar or array, left untouched
    :rtype: array shaped like ``point``
    """
    if not step > 0:
        raise OracleParameterException("step must be > 0, got %r" % step)

    point = np.array(point, dtype=np.float64)
    grad = np.zeros_like(point)
    flat = point.reshape(-1)
    out = grad.reshape(-1)
    for index in range(flat.size):
        saved = flat[index]
        flat[index] = saved + step
        upper = float(f(point))
        flat[index] = saved - step
        lower = float(f(point))
        flat[index] = saved
        out[index] = (upper - lower) / (2 * step)

    return grad


def relative_error(actual, expected, floor=1e-4):
    """Largest per component ``|a - e| / max(|a|, |e|, floor)``

    Components whose magnitude stays below ``floor`` are held to an
    absolute error of ``floor`` times the returned value.
    """
    if not floor > 0:
        raise OracleParameterException("floor must be > 0, got %r" % floor)

    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    if actual.shape != expected.shape:
        raise OracleDimensionException(
            "shapes %r and %r differ" % (actual.shape, expected.shape)
        )

    if actual.size == 0:
        return 0.0

    scale = np.maximum(np.maximum(np.abs(actual), np.abs(expected)), floor)
    return float((np.abs(actual - expected) / scale).max())
