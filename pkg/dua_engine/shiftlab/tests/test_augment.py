# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import logging

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from dua_engine.shiftlab.augment import (
    AUGMENTATIONS,
    CROP_PAD,
    AugmentRecord,
    apply_record,
    augment_batch,
    crop,
    rotate,
)
from dua_engine.shiftlab.exceptions import AugmentationException
from dua_engine.shiftlab.rng import Xoshiro256pp
from dua_engine.tensor.exceptions import DimensionException, ParameterException


class TestTransforms:
    @pytest.fixture(autouse=True)
    def init_image(self, np_rng):
        self.image = np_rng.uniform(size=(1, 6, 6))

    def test_rot180_twice(self):
        assert_array_equal(rotate(rotate(self.image, 2), 2), self.image)

    def test_four_quarter_turns(self):
        out = self.image
        for _ in range(4):
            out = rotate(out, 1)

        assert_array_equal(out, self.image)

    def test_crop_without_shift(self):
        assert_array_equal(crop(self.image, CROP_PAD, CROP_PAD), self.image)

    def test_crop_shift(self):
        out = crop(self.image, CROP_PAD + 1, CROP_PAD)
        assert_array_equal(out[:, :-1], self.image[:, 1:])
        assert not out[:, -1].any()

    def test_apply_record_order(self):
        record = AugmentRecord(hflip=True, crop=(0, 4), quarter_turns=1)
        expected = rotate(crop(self.image[:, :, ::-1], 0, 4), 1)
        assert_array_equal(apply_record(self.image, record), expected)

    def test_identity_record(self):
        assert AugmentRecord().identity
        out = apply_record(self.image, AugmentRecord())
        assert_array_equal(out, self.image)


class TestAugmentBatch:
    @pytest.fixture(autouse=True)
    def init_sample(self, tiny_dataset):
        self.sample = tiny_dataset.images[:1]

    def test_single_item_without_augmentation(self):
        batch = augment_batch(self.sample, 1, set(), Xoshiro256pp(0))
        assert_array_equal(batch.tensor, self.sample)
        assert not batch.degenerate
        assert batch.provenance == (AugmentRecord(),)

    def test_degenerate(self, caplog):
        with caplog.at_level(logging.WARNING):
            batch = augment_batch(self.sample, 4, (), Xoshiro256pp(0))

        assert batch.degenerate
        assert "identical" in caplog.text
        for item in batch.tensor:
            assert_array_equal(item, self.sample[0])

    def test_replay(self):
        first = augment_batch(self.sample, 16, AUGMENTATIONS, Xoshiro256pp(2))
        second = augment_batch(self.sample, 16, AUGMENTATIONS, Xoshiro256pp(2))
        assert first.tensor.tobytes() == second.tensor.tobytes()
        assert first.provenance == second.provenance

    def test_provenance_replays_items(self):
        batch = augment_batch(self.sample, 8, AUGMENTATIONS, Xoshiro256pp(4))
        assert batch.tensor.shape == (8,) + self.sample.shape[1:]
        for item, record in zip(batch.tensor, batch.provenance):
            assert_array_equal(item, apply_record(self.sample[0], record))

    def test_draws_only_configured_augmentations(self):
        batch = augment_batch(self.sample, 32, {"hflip"}, Xoshiro256pp(1))
        assert {record.crop for record in batch.provenance} == {(4, 4)}
        assert {record.quarter_turns for record in batch.provenance} == {0}
        assert {record.hflip for record in batch.provenance} == {True, False}

    def test_crop_offsets_in_range(self):
        batch = augment_batch(self.sample, 64, {"crop"}, Xoshiro256pp(1))
        offsets = {value for r in batch.provenance for value in r.crop}
        assert offsets <= set(range(2 * CROP_PAD + 1))

    def test_corruption_rejected(self):
        with pytest.raises(AugmentationException):
            augment_batch(self.sample, 4, {"defocus_blur"}, Xoshiro256pp(0))

    def test_unknown_augmentation(self):
        with pytest.raises(AugmentationException):
            augment_batch(self.sample, 4, {"mixup"}, Xoshiro256pp(0))

    def test_rotation_needs_square_images(self):
        sample = np.zeros((1, 1, 4, 6))
        with pytest.raises(AugmentationException):
            augment_batch(sample, 2, {"rot90s"}, Xoshiro256pp(0))

    def test_single_sample_only(self, tiny_dataset):
        with pytest.raises(DimensionException):
            augment_batch(tiny_dataset.images[:2], 2, (), Xoshiro256pp(0))

    def test_batch_size(self):
        with pytest.raises(ParameterException):
            augment_batch(self.sample, 0, (), Xoshiro256pp(0))
