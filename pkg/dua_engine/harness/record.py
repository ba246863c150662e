# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .exceptions import ExperimentException


@dataclass(frozen=True)
class StepRow:
    k: int
    w_k: Optional[float]
    error_pct: float
    stats_hash: str = ""


@dataclass
class ExperimentRecord:
    """Error curve of one arm: a row per evaluated step and a summary"""

    arm: str
    rows: List[StepRow] = field(default_factory=list)
    summary: Dict[str, object] = field(default_factory=dict)

    def add(self, k, w_k, error_pct, stats_hash=""):
        if self.rows and k <= self.rows[-1].k:
            raise ExperimentException(
                "%r: step %d recorded after step %d"
                % (self.arm, k, self.rows[-1].k)
            )
        if not 0 <= error_pct <= 100:
            raise ExperimentException(
                "%r: error %r out of [0, 100]" % (self.arm, error_pct)
            )

        row = StepRow(k, w_k, float(error_pct), stats_hash)
        self.rows.append(row)
        return row

    @property
    def final_error(self):
        if not self.rows:
            return None

        return self.rows[-1].error_pct

    def error_at(self, k):
        for row in self.rows:
            if row.k == k:
                return row.error_pct

        raise ExperimentException("%r: step %d not recorded" % (self.arm, k))

    def table(self, with_arm=False):
        prefix = (self.arm,) if with_arm else ()
        return [
            prefix + (row.k, row.w_k, row.error_pct, row.stats_hash)
            for row in self.rows
        ]
