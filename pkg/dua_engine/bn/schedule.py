# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Decaying momentum schedule of the online adaptation.

Step ``k`` uses ``w_k = rho_k + zeta`` with ``rho_k = rho_{k-1} * omega``.
The decay is applied before the first use, so the first adaptation step
already runs with ``rho0 * omega + zeta``.
"""
from dataclasses import dataclass, replace
from typing import Optional

from .exceptions import MomentumException

DEFAULT_RHO0 = 0.1
DEFAULT_OMEGA = 0.94
DEFAULT_ZETA = 0.005


@dataclass(frozen=True)
class MomentumSchedule:
    rho0: float = DEFAULT_RHO0
    omega: float = DEFAULT_OMEGA
    zeta: float = DEFAULT_ZETA
    rho_k: Optional[float] = None
    k: int = 0

    def __post_init__(self):
        if self.rho_k is None:
            object.__setattr__(self, "rho_k", self.rho0)

        self.validate()

    @classmethod
    def fixed(cls, rho):
        """Constant weight ``rho``: the plain EMA with a fixed momentum"""
        return cls(rho0=rho, omega=1.0, zeta=0.0)

    def validate(self):
        if not 0 <= self.rho0 <= 1:
            raise MomentumException(
                "rho0 must lie in [0, 1], got %r" % self.rho0
            )
        if not 0 < self.omega <= 1:
            raise MomentumException(
                "omega must lie in (0, 1], got %r" % self.omega
            )
        if self.rho0 == 0:
            # frozen schedule, no weight at all
            if self.zeta != 0:
                raise MomentumException("zeta must be 0 when rho0 is 0")
        elif not 0 <= self.zeta < self.rho0:
            raise MomentumException(
                "zeta must lie in [0, rho0=%r), got %r"
                % (self.rho0, self.zeta)
            )
        if self.rho0 + self.zeta > 1:
            raise MomentumException(
                "rho0 + zeta must not exceed 1, got %r"
                % (self.rho0 + self.zeta)
            )
        if self.k < 0:
            raise MomentumException("k must be >= 0, got %r" % self.k)

    @property
    def weight(self):
        """Weight of the last step taken (``rho0 + zeta`` before any)"""
        return self.rho_k + self.zeta

    def reset(self):
        return replace(self, rho_k=self.rho0, k=0)


def dua_momentum_step(schedule):
    """Advance the schedule by one sample

    :rtype: (w_k, updated schedule)
    """
    updated = replace(
        schedule, rho_k=schedule.rho_k * schedule.omega, k=schedule.k + 1
    )
    return updated.weight, updated
