# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""NORM baseline: source statistics are dropped and recomputed on a test
batch.
"""
from ..tensor.core import Mode, as_tensor
from ..tensor.exceptions import ParameterException
from .functional import batch_stats
from .layer import BatchNorm


def norm_recompute(model, test_batch):
    """Replace every running statistic by the statistics of ``test_batch``

    A single front-to-back pass: each BatchNorm layer takes the statistics
    of its input, which already went through the replaced upstream layers.

    :exception: ParameterException with fewer than 2 samples
    """
    x = as_tensor(test_batch, name="test_batch")
    if x.shape[0] < 2:
        raise ParameterException(
            "NORM needs at least 2 samples, got %d" % x.shape[0]
        )

    for layer in model.layers:
        if isinstance(layer, BatchNorm):
            mean, var = batch_stats(x)
            layer.state.running_mean = mean
            layer.state.running_var = var

        x = layer.forward(x, Mode.EVAL)

    return model


def norm_predict(model, test_batch):
    """Logits of ``test_batch`` from a copy of ``model`` renormalized on
    that very batch; ``model`` itself is left untouched
    """
    renormalized = norm_recompute(model.copy(), test_batch)
    return renormalized.predict(test_batch, batch_size=len(test_batch))
