# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import numpy as np
import pytest

from dua_engine.harness.exceptions import ExperimentException
from dua_engine.harness.metrics import (
    mean_std,
    shared_histograms,
    top1_error,
    wasserstein1,
)
from dua_engine.harness.record import ExperimentRecord
from dua_engine.tensor.exceptions import DimensionException


class TestExperimentRecord:
    @pytest.fixture(autouse=True)
    def init_record(self):
        self.record = ExperimentRecord("dua")
        self.record.add(0, None, 40.0)
        self.record.add(5, 0.07, 31.25, "cafe")

    def test_rows(self):
        assert self.record.final_error == 31.25
        assert self.record.error_at(0) == 40.0
        assert self.record.table() == [
            (0, None, 40.0, ""),
            (5, 0.07, 31.25, "cafe"),
        ]
        assert self.record.table(True)[1][0] == "dua"

    def test_steps_increase(self):
        with pytest.raises(ExperimentException):
            self.record.add(5, 0.05, 30.0)

    @pytest.mark.parametrize("error", [-0.5, 100.5])
    def test_error_range(self, error):
        with pytest.raises(ExperimentException):
            self.record.add(6, 0.05, error)

    def test_missing_step(self):
        with pytest.raises(ExperimentException):
            self.record.error_at(3)

    def test_empty(self):
        assert ExperimentRecord("source").final_error is None


class TestMetrics:
    def test_top1_error(self):
        logits = np.array([[2.0, 1.0], [0.0, 3.0], [1.0, 0.0], [0.2, 0.1]])
        assert top1_error(logits, [0, 1, 1, 1]) == 50.0
        assert top1_error(logits, [0, 1, 0, 0]) == 0.0

    def test_top1_error_empty(self):
        with pytest.raises(DimensionException):
            top1_error(np.zeros((0, 10)), [])

    def test_mean_std(self):
        assert mean_std([4.0]) == (4.0, 0.0)
        mean, std = mean_std([1.0, 3.0])
        assert mean == 2.0
        assert std == pytest.approx(np.sqrt(2.0))

    def test_wasserstein(self):
        left = np.array([0.0, 1.0, 3.0])
        assert wasserstein1(left, left) == 0.0
        assert wasserstein1(left, left + 2.0) == pytest.approx(2.0)

    def test_shared_histograms(self):
        edges, counts = shared_histograms(
            [np.array([0.0, 1.0]), np.array([2.0, 4.0])], 4
        )
        assert edges[0] == 0.0
        assert edges[-1] == 4.0
        assert [int(count.sum()) for count in counts] == [2, 2]

    def test_shared_histograms_constant(self):
        edges, counts = shared_histograms([np.ones(3)], 2)
        assert edges[0] == 0.5
        assert edges[-1] == 1.5
        assert counts[0].tolist() == [0, 3]
