# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Source model training: plain SGD with momentum on the clean train set."""
import os
import time
from dataclasses import dataclass, field
from logging import getLogger
from typing import List

import numpy as np

from ..shiftlab.rng import Xoshiro256pp
from ..tensor.checkpoint import save_checkpoint
from ..tensor.core import Mode
from ..tensor.functional import softmax_cross_entropy
from ..tensor.model import build_desk_model
from ..tensor.optim import SGD
from .data import load_split
from .metrics import evaluate

logger = getLogger(__name__)


@dataclass
class TrainResult:
    checkpoint: str
    test_error_pct: float
    epochs: List[tuple] = field(default_factory=list)
    wall_time: float = 0.0


def fit(model, dataset, epochs, lr, momentum, batch_size, seed):
    """Train ``model`` in place

    Every epoch visits the dataset in the order of a permutation drawn from
    the stream ``shuffle/<epoch>`` of ``seed``.

    :rtype: list of ``(epoch, mean loss, train error %)``
    """
    optimizer = SGD(model, lr, momentum=momentum)
    history = []
    for epoch in range(1, epochs + 1):
        order = Xoshiro256pp(seed).spawn("shuffle/%d" % epoch).permutation(
            len(dataset)
        )
        losses, wrong = [], 0
        for start in range(0, len(dataset), batch_size):
            picks = order[start:start + batch_size]
            logits = model.forward(dataset.images[picks], Mode.TRAIN)
            labels = dataset.labels[picks]
            loss, grad = softmax_cross_entropy(logits, labels)
            optimizer.step(model.backward(grad))
            losses.append(loss * len(picks))
            wrong += np.count_nonzero(
                logits.reshape(len(picks), -1).argmax(axis=1) != labels
            )

        mean_loss = float(np.sum(losses) / len(dataset))
        train_error = 100.0 * wrong / len(dataset)
        history.append((epoch, mean_loss, train_error))
        logger.info(
            "epoch %d/%d: loss %.4f, train error %.2f%%",
            epoch,
            epochs,
            mean_loss,
            train_error,
        )

    return history


def train_model(cfg):
    """Train the desk model on the clean train set and write its checkpoint

    :rtype: TrainResult with the clean test error
    """
    start = time.time()
    train = load_split(cfg, "train")
    test = load_split(cfg, "test")
    _, c, h, _ = train.images.shape
    model = build_desk_model(
        rng=Xoshiro256pp(cfg.seed).spawn("init").numpy(),
        in_channels=c,
        size=h,
    )
    history = fit(
        model,
        train,
        cfg.train_epochs,
        cfg.train_lr,
        cfg.train_momentum,
        cfg.train_batch_size,
        cfg.seed,
    )
    path = cfg.checkpoint_path
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    save_checkpoint(model, path)
    error = evaluate(model, test)
    logger.info("clean test error of %r: %.2f%%", path, error)
    return TrainResult(
        checkpoint=path,
        test_error_pct=error,
        epochs=history,
        wall_time=time.time() - start,
    )
