# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from dataclasses import dataclass

import numpy as np

from ..tensor.core import as_tensor
from .exceptions import DatasetException

N_CLASSES = 10


@dataclass(eq=False)
class Dataset:
    """Images ``(N, C, H, W)`` in [0, 1] with one class index per image"""

    images: np.ndarray
    labels: np.ndarray
    name: str = "dataset"
    n_classes: int = N_CLASSES

    def __post_init__(self):
        self.images = as_tensor(self.images, name=self.name)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if self.images.shape[0] != self.labels.shape[0]:
            raise DatasetException(
                "%r: %d images for %d labels"
                % (self.name, self.images.shape[0], self.labels.shape[0])
            )
        if self.images.size and (
            self.images.min() < 0 or self.images.max() > 1
        ):
            raise DatasetException(
                "%r: pixel values must lie in [0, 1]" % self.name
            )
        if self.labels.size and (
            self.labels.min() < 0 or self.labels.max() >= self.n_classes
        ):
            raise DatasetException(
                "%r: labels must lie in [0, %d)" % (self.name, self.n_classes)
            )

    def __len__(self):
        return self.images.shape[0]

    @property
    def image_shape(self):
        return self.images.shape[1:]

    def subset(self, indices, name=None):
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.images[indices],
            self.labels[indices],
            name=name or self.name,
            n_classes=self.n_classes,
        )

    def split(self, size):
        """First ``size`` items and the rest, in order"""
        return (
            self.subset(np.arange(size), name="%s[:%d]" % (self.name, size)),
            self.subset(
                np.arange(size, len(self)),
                name="%s[%d:]" % (self.name, size),
            ),
        )

    def with_images(self, images, name):
        """Same labels, new pixels; labels are never transformed"""
        return Dataset(
            images, self.labels.copy(), name=name, n_classes=self.n_classes
        )
