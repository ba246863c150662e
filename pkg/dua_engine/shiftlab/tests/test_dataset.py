# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import gzip
import struct
from collections import Counter

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from dua_engine.shiftlab.dataset import Dataset
from dua_engine.shiftlab.exceptions import DatasetException, IDXFormatException
from dua_engine.shiftlab.idx import (
    IMAGES_MAGIC,
    images_to_bytes,
    labels_to_bytes,
    load_idx,
    parse_idx,
    write_idx,
)
from dua_engine.shiftlab.synthetic import gen_synthetic


class TestDataset:
    def test_pixel_range(self):
        with pytest.raises(DatasetException):
            Dataset(np.full((1, 1, 2, 2), 1.5), [0])

    def test_label_range(self):
        with pytest.raises(DatasetException):
            Dataset(np.zeros((1, 1, 2, 2)), [10])

    def test_count_mismatch(self):
        with pytest.raises(DatasetException):
            Dataset(np.zeros((2, 1, 2, 2)), [0])

    def test_split(self, tiny_dataset):
        head, tail = tiny_dataset.split(15)
        assert len(head) == 15
        assert len(tail) == 25
        assert_array_equal(tail.images[0], tiny_dataset.images[15])

    def test_with_images_keeps_labels(self, tiny_dataset):
        other = tiny_dataset.with_images(
            tiny_dataset.images * 0.5, name="half"
        )
        assert_array_equal(other.labels, tiny_dataset.labels)
        assert other.name == "half"


class TestIDX:
    @pytest.fixture(autouse=True)
    def init_dataset(self, tmp_path):
        # u8 exact pixels so the round trip is lossless
        pixels = np.arange(3 * 28 * 28).reshape(3, 1, 28, 28) % 256
        self.dataset = Dataset(pixels / 255.0, [3, 1, 4])
        self.tmp_path = tmp_path

    def paths(self, suffix=""):
        return (
            str(self.tmp_path / ("images-idx3-ubyte" + suffix)),
            str(self.tmp_path / ("labels-idx1-ubyte" + suffix)),
        )

    def test_round_trip(self):
        write_idx(self.dataset, *self.paths())
        loaded = load_idx(*self.paths())
        assert loaded.images.shape == (3, 1, 28, 28)
        assert_array_equal(loaded.images, self.dataset.images)
        assert_array_equal(loaded.labels, [3, 1, 4])

    def test_gzip_round_trip(self):
        write_idx(self.dataset, *self.paths(".gz"))
        with gzip.open(self.paths(".gz")[0], "rb") as fp:
            assert struct.unpack(">I", fp.read(4))[0] == IMAGES_MAGIC

        assert_array_equal(
            load_idx(*self.paths(".gz")).images, self.dataset.images
        )

    def test_truncated_payload(self):
        payload = images_to_bytes(self.dataset.images)[:-10]
        with pytest.raises(IDXFormatException) as e:
            parse_idx(payload, IMAGES_MAGIC, name="cut")

        assert "'cut'" in str(e.value)
        assert "offset 16" in str(e.value)

    def test_truncated_header(self):
        with pytest.raises(IDXFormatException):
            parse_idx(struct.pack(">II", IMAGES_MAGIC, 3), IMAGES_MAGIC)

    def test_bad_magic(self):
        with pytest.raises(IDXFormatException) as e:
            parse_idx(labels_to_bytes([1, 2]), IMAGES_MAGIC)

        assert "magic" in str(e.value)

    def test_count_mismatch(self):
        images, labels = self.paths()
        write_idx(self.dataset, images, labels)
        with open(labels, "wb") as fp:
            fp.write(labels_to_bytes([1, 2]))

        with pytest.raises(IDXFormatException):
            load_idx(images, labels)


class TestSynthetic:
    def test_deterministic(self):
        left = gen_synthetic(30, seed=5, size=12)
        right = gen_synthetic(30, seed=5, size=12)
        assert left.images.tobytes() == right.images.tobytes()
        assert_array_equal(left.labels, right.labels)

    def test_seed_changes_images(self):
        left = gen_synthetic(10, seed=5, size=12)
        right = gen_synthetic(10, seed=6, size=12)
        assert not np.array_equal(left.images, right.images)

    def test_balanced_classes(self):
        counts = Counter(gen_synthetic(1003, seed=0, size=8).labels.tolist())
        assert sorted(counts) == list(range(10))
        assert set(counts.values()) <= {100, 101}

    def test_pixels(self):
        dataset = gen_synthetic(20, seed=1)
        assert dataset.images.shape == (20, 1, 28, 28)
        assert dataset.images.min() >= 0.0
        assert dataset.images.max() <= 1.0
        # every glyph leaves ink
        assert (dataset.images.reshape(20, -1).max(axis=1) > 0.5).all()

    def test_bad_count(self):
        from dua_engine.tensor.exceptions import ParameterException

        with pytest.raises(ParameterException):
            gen_synthetic(0)
