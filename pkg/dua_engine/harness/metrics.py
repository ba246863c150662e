# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from logging import getLogger

import numpy as np
from scipy.stats import wasserstein_distance

from ..bn.norm import norm_predict
from ..tensor.core import Mode, as_tensor
from ..tensor.exceptions import DimensionException

logger = getLogger(__name__)


def top1_error(logits, labels):
    """Top-1 classification error in percent"""
    labels = np.asarray(labels).reshape(-1)
    if not labels.size:
        raise DimensionException("top1_error of an empty set")

    logits = np.asarray(logits).reshape(labels.size, -1)
    wrong = np.count_nonzero(logits.argmax(axis=1) != labels)
    return 100.0 * wrong / labels.size


def evaluate(model, dataset, batch_size=256):
    """Eval mode top-1 error of ``model`` on ``dataset`` in percent"""
    return top1_error(
        model.predict(dataset.images, batch_size=batch_size), dataset.labels
    )


def norm_error(model, dataset, batch_size):
    """Error of the NORM baseline recomputing statistics per chunk

    The dataset is cut in consecutive chunks of ``batch_size`` images and
    every chunk is predicted with the statistics of the chunk itself. A
    trailing chunk of a single image has no variance and is skipped.
    """
    wrong = total = 0
    for start in range(0, len(dataset), batch_size):
        images = dataset.images[start:start + batch_size]
        labels = dataset.labels[start:start + batch_size]
        if images.shape[0] < 2:
            logger.warning(
                "NORM chunk of %d image at %d skipped",
                images.shape[0],
                start,
            )
            continue

        logits = norm_predict(model, images)
        wrong += np.count_nonzero(logits.argmax(axis=1) != labels)
        total += labels.size

    if not total:
        raise DimensionException(
            "NORM needs at least 2 images, dataset holds %d" % len(dataset)
        )

    return 100.0 * wrong / total


def mean_std(values):
    """Mean and sample standard deviation, std 0 for a single value"""
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return float(values.mean()), 0.0

    return float(values.mean()), float(values.std(ddof=1))


def bn_io(model, x, name, batch_size=256):
    """Eval mode input and output of the bn layer ``name``

    :rtype: (input, output) tensors of the layer
    """
    target = model.bn(name)
    x = as_tensor(x, name="input")
    inputs, outputs = [], []
    for start in range(0, x.shape[0], batch_size):
        out = x[start:start + batch_size]
        for layer in model.layers:
            if layer is target:
                inputs.append(out)
                outputs.append(layer.forward(out, Mode.EVAL))
                break

            out = layer.forward(out, Mode.EVAL)

    return np.concatenate(inputs), np.concatenate(outputs)


def last_bn_name(model):
    return model.bn_names[-1]


def stat_shift_norm(model, x, name):
    """Norm between the running mean of ``name`` and the mean of its
    input on ``x``
    """
    inputs, _ = bn_io(model, x, name)
    batch_mean = inputs.mean(axis=(0, 2, 3))
    running_mean = model.bn(name).state.running_mean
    return float(np.linalg.norm(batch_mean - running_mean))


def channel_values(tensor, channel):
    return tensor[:, channel].ravel()


def wasserstein1(left, right):
    """1-Wasserstein distance between two 1-D samples"""
    return float(wasserstein_distance(left, right))


def shared_histograms(samples, bins):
    """Histogram every sample on one shared range

    :param samples: 1-D arrays
    :rtype: (edges, [counts])
    """
    low = min(float(sample.min()) for sample in samples)
    high = max(float(sample.max()) for sample in samples)
    if low == high:
        low, high = low - 0.5, high + 0.5

    edges = np.linspace(low, high, bins + 1)
    counts = [np.histogram(sample, bins=edges)[0] for sample in samples]
    return edges, counts