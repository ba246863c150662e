# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Two pass per channel statistics, plain Python loops."""
from math import fsum

import numpy as np

from .exceptions import OracleDimensionException


def two_pass_stats(x):
    """Per channel ``(mean, biased variance)`` of a ``(n, c, h, w)`` array

    Values are taken relative to the first value of the channel, so a
    constant channel has a variance of exactly 0.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4 or x.shape[0] * x.shape[2] * x.shape[3] == 0:
        raise OracleDimensionException(
            "two_pass_stats needs a non empty (n, c, h, w) array, got %r"
            % (x.shape,)
        )

    means, variances = [], []
    for channel in range(x.shape[1]):
        values = x[:, channel].ravel().tolist()
        first = values[0]
        deltas = [value - first for value in values]
        shift = fsum(deltas) / len(deltas)
        squares = [(delta - shift) * (delta - shift) for delta in deltas]
        means.append(first + shift)
        variances.append(fsum(squares) / len(squares))

    return np.array(means), np.array(variances)
