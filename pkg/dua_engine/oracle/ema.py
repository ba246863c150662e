# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from dataclasses import dataclass, field
from math import fsum
from typing import List

from .exceptions import OracleDimensionException, OracleParameterException


@dataclass
class EmaTrace:
    """Initial estimate, then one ``(weight, input)`` pair per update"""

    initial: float
    weights: List[float] = field(default_factory=list)
    inputs: List[float] = field(default_factory=list)

    def __post_init__(self):
        self.weights = [float(weight) for weight in self.weights]
        self.inputs = [float(value) for value in self.inputs]
        if len(self.weights) != len(self.inputs):
            raise OracleDimensionException(
                "%d weights for %d inputs"
                % (len(self.weights), len(self.inputs))
            )

        bad = [w for w in self.weights if not 0 < w <= 1]
        if bad:
            raise OracleParameterException(
                "weights must lie in (0, 1], got %r" % bad[:5]
            )

    def append(self, weight, value):
        if not 0 < weight <= 1:
            raise OracleParameterException(
                "weight must lie in (0, 1], got %r" % weight
            )

        self.weights.append(float(weight))
        self.inputs.append(float(value))

    def __len__(self):
        return len(self.weights)


def ema_closed_form(trace):
    """Unrolled value of the running estimate after the whole trace

    ``prod(1 - w_i) * initial + sum_i w_i * prod_{j > i}(1 - w_j) * x_i``;
    an empty trace leaves the initial value.
    """
    terms = []
    keep = 1.0
    for weight, value in zip(reversed(trace.weights), reversed(trace.inputs)):
        terms.append(weight * keep * value)
        keep *= 1.0 - weight

    terms.append(keep * trace.initial)
    return fsum(terms)
