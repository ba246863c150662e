# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Online, per sample adaptation of the running statistics.

Each incoming sample is expanded into an augmented batch, the momentum
schedule advances once, and every masked BatchNorm layer folds the batch
statistics of its input into its running statistics with that single
weight. Learned parameters never change.
"""
from dataclasses import dataclass, field
from logging import getLogger
from typing import FrozenSet, Optional, Tuple

import numpy as np

from ..shiftlab.augment import (
    AUGMENTATIONS,
    AugmentedBatch,
    augment_batch,
    check_augmentations,
)
from ..shiftlab.rng import Xoshiro256pp
from ..tensor.core import Mode, as_tensor
from ..tensor.exceptions import DimensionException, ParameterException
from .schedule import MomentumSchedule, dua_momentum_step

logger = getLogger(__name__)


@dataclass
class AdaptConfig:
    """How a single sample is turned into an adaptation step

    :param layer_mask: bn layer names to adapt, ``None`` for all of them
    :param post_update: normalize the adapted batch with the statistics
        after (default) or before the update
    """

    batch_size: int = 64
    augmentations: FrozenSet[str] = frozenset(AUGMENTATIONS)
    layer_mask: Optional[Tuple[str, ...]] = None
    schedule: MomentumSchedule = field(default_factory=MomentumSchedule)
    seed: int = 0
    post_update: bool = True

    def __post_init__(self):
        if int(self.batch_size) != self.batch_size or self.batch_size < 1:
            raise ParameterException(
                "batch_size must be an integer >= 1, got %r" % self.batch_size
            )

        self.augmentations = check_augmentations(self.augmentations)
        if self.layer_mask is not None:
            self.layer_mask = tuple(self.layer_mask)


@dataclass
class AdaptStep:
    logits: np.ndarray
    weight: float
    schedule: MomentumSchedule
    batch: AugmentedBatch
    model: object


def dua_adapt_step(model, sample, cfg, rng, schedule=None):
    """Adapt ``model`` in place on one sample

    :param sample: tensor ``(1, c, h, w)``
    :param rng: Xoshiro256pp stream drawing the augmentations
    :param schedule: schedule state to advance. When None, ``cfg.schedule``
        is advanced and stored back on ``cfg``, so repeated calls with
        the same config walk down the schedule
    :rtype: AdaptStep, its ``schedule`` is the advanced state
    """
    sample = as_tensor(sample, name="sample")
    if sample.shape[0] != 1:
        raise DimensionException(
            "adaptation takes a single sample (axis n = 1), got %d"
            % sample.shape[0]
        )

    mask = model.check_mask(cfg.layer_mask)
    batch = augment_batch(sample, cfg.batch_size, cfg.augmentations, rng)
    held_by_cfg = schedule is None
    weight, schedule = dua_momentum_step(
        cfg.schedule if held_by_cfg else schedule
    )
    logits = model.forward(
        batch.tensor,
        Mode.ADAPT,
        weight=weight,
        mask=mask,
        post_update=cfg.post_update,
    )
    if held_by_cfg:
        cfg.schedule = schedule

    logger.debug("adapt step k=%d w_k=%r mask=%r", schedule.k, weight, mask)
    return AdaptStep(
        logits=logits,
        weight=weight,
        schedule=schedule,
        batch=batch,
        model=model,
    )


def fixed_momentum_adapt_step(model, sample, cfg, rng, schedule=None):
    """Same pipeline as :func:`dua_adapt_step` with a constant weight
    ``cfg.schedule.rho0``
    """
    if schedule is None:
        schedule = MomentumSchedule.fixed(cfg.schedule.rho0)

    return dua_adapt_step(model, sample, cfg, rng, schedule=schedule)


class DUAAdapter:
    """Keeps the schedule and augmentation stream of one adaptation run

    ::

        adapter = DUAAdapter(model, AdaptConfig(seed=3))
        for sample in stream:
            adapter.step(sample)

    :param fixed: use the constant ``rho0`` baseline instead of the
        decaying schedule
    """

    def __init__(self, model, cfg, rng=None, fixed=False):
        self.model = model
        self.cfg = cfg
        if rng is None:
            rng = Xoshiro256pp(cfg.seed).spawn("augment")

        self.rng = rng
        if fixed:
            self.schedule = MomentumSchedule.fixed(cfg.schedule.rho0)
        else:
            self.schedule = cfg.schedule.reset()

        self.weights = []

    @property
    def k(self):
        return self.schedule.k

    def step(self, sample):
        result = dua_adapt_step(
            self.model, sample, self.cfg, self.rng, schedule=self.schedule
        )
        self.schedule = result.schedule
        self.weights.append(result.weight)
        return result

    def run(self, samples):
        for sample in samples:
            yield self.step(sample[None] if np.ndim(sample) == 3 else sample)
