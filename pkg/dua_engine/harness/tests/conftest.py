# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import pytest

from dua_engine.harness.training import train_model

from .tiny import tiny_config


@pytest.fixture(scope="session")
def source_checkpoint(tmp_path_factory):
    """Desk model trained one epoch on 60 synthetic glyphs"""
    directory = tmp_path_factory.mktemp("source")
    return train_model(tiny_config(directory, command="train")).checkpoint


@pytest.fixture
def make_config(tmp_path, source_checkpoint):
    def make(**values):
        values.setdefault("checkpoint", source_checkpoint)
        output_dir = values.pop("output_dir", tmp_path / "run")
        return tiny_config(output_dir, **values)

    return make
