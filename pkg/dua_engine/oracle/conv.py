# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import numpy as np

from .exceptions import OracleDimensionException


def naive_conv(x, weight, bias=None, stride=1, pad=0):
    """Cross-correlation as nested loops over plain floats

    Each output starts at 0.0, adds ``weight * value`` over input channels
    then kernel rows then kernel columns (padding reads 0.0), and adds the
    bias last.
    """
    x = np.asarray(x, dtype=np.float64)
    weight = np.asarray(weight, dtype=np.float64)
    n, c_in, h, w = x.shape
    c_out, wc_in, kh, kw = weight.shape
    if wc_in != c_in:
        raise OracleDimensionException(
            "input has %d channels, kernel expects %d" % (c_in, wc_in)
        )

    oh = (h + 2 * pad - kh) // stride + 1
    ow = (w + 2 * pad - kw) // stride + 1
    if oh < 1 or ow < 1:
        raise OracleDimensionException("kernel larger than padded input")

    bias = [0.0] * c_out if bias is None else [float(b) for b in bias]
    xs = x.tolist()
    ws = weight.tolist()
    out = np.zeros((n, c_out, oh, ow))
    for b in range(n):
        for co in range(c_out):
            for i in range(oh):
                for j in range(ow):
                    acc = 0.0
                    for ci in range(c_in):
                        for ki in range(kh):
                            for kj in range(kw):
                                row = i * stride + ki - pad
                                col = j * stride + kj - pad
                                if 0 <= row < h and 0 <= col < w:
                                    value = xs[b][ci][row][col]
                                else:
                                    value = 0.0

                                acc += ws[co][ci][ki][kj] * value

                    out[b, co, i, j] = acc + bias[co]

    return out
