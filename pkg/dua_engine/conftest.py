# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import numpy as np
import pytest

from dua_engine.shiftlab.synthetic import gen_synthetic
from dua_engine.tensor.model import build_desk_model


@pytest.fixture
def np_rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_model():
    """Desk architecture on 8x8 single channel images"""
    return build_desk_model(
        rng=np.random.default_rng(0), size=8, widths=(4, 4), hidden=8
    )


@pytest.fixture
def tiny_dataset():
    return gen_synthetic(40, seed=1, size=8)


@pytest.fixture
def warm_model(tiny_model, tiny_dataset):
    """Tiny model whose running statistics moved off their defaults"""
    for start in range(0, len(tiny_dataset), 10):
        tiny_model.forward(tiny_dataset.images[start:start + 10], "train")

    return tiny_model
