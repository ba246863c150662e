# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from dataclasses import dataclass

import numpy as np

from ..tensor.exceptions import (
    DimensionException,
    NumericException,
    ParameterException,
)

DEFAULT_EPS = 1e-5
DEFAULT_TRAIN_MOMENTUM = 0.1


@dataclass(eq=False)
class BatchNormState:
    """Per channel running statistics and affine parameters

    ``running_mean`` and ``running_var`` are the only arrays adaptation is
    allowed to change; ``gamma`` and ``beta`` are learned by training.
    """

    running_mean: np.ndarray
    running_var: np.ndarray
    gamma: np.ndarray
    beta: np.ndarray
    eps: float = DEFAULT_EPS
    train_momentum: float = DEFAULT_TRAIN_MOMENTUM

    def __post_init__(self):
        for name in ("running_mean", "running_var", "gamma", "beta"):
            value = np.array(getattr(self, name), dtype=np.float64).reshape(-1)
            setattr(self, name, value)

        self.validate()

    @classmethod
    def create(
        cls, channels, eps=DEFAULT_EPS, train_momentum=DEFAULT_TRAIN_MOMENTUM
    ):
        return cls(
            running_mean=np.zeros(channels),
            running_var=np.ones(channels),
            gamma=np.ones(channels),
            beta=np.zeros(channels),
            eps=eps,
            train_momentum=train_momentum,
        )

    @property
    def channels(self):
        return self.gamma.shape[0]

    def validate(self):
        channels = self.gamma.shape[0]
        for name in ("running_mean", "running_var", "beta"):
            if getattr(self, name).shape[0] != channels:
                raise DimensionException(
                    "%r holds %d channels (axis c), gamma holds %d"
                    % (name, getattr(self, name).shape[0], channels)
                )

        if (self.running_var < 0).any():
            raise NumericException("running_var must be >= 0")

        if not self.eps > 0:
            raise ParameterException("eps must be > 0, got %r" % self.eps)

        if not 0 < self.train_momentum <= 1:
            raise ParameterException(
                "train_momentum must lie in (0, 1], got %r"
                % self.train_momentum
            )

    def copy(self):
        return BatchNormState(
            running_mean=self.running_mean.copy(),
            running_var=self.running_var.copy(),
            gamma=self.gamma.copy(),
            beta=self.beta.copy(),
            eps=self.eps,
            train_momentum=self.train_momentum,
        )
