# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Augmented batches built from one sample.

Each item of the batch independently draws, for every augmentation of the
configured set, a horizontal flip (p = 0.5), a crop offset in the image
zero padded by ``CROP_PAD`` pixels, and a number of quarter turns in
``{0, 1, 2, 3}``. The identity is a possible draw, so the original sample
may appear in the batch.
"""
from dataclasses import dataclass
from logging import getLogger
from typing import Tuple

import numpy as np

from ..tensor.core import as_tensor
from ..tensor.exceptions import DimensionException, ParameterException
from .corruption import SEVERITY_TABLE
from .exceptions import AugmentationException

logger = getLogger(__name__)

AUGMENTATIONS = ("hflip", "crop", "rot90s")
CROP_PAD = 4


@dataclass(frozen=True)
class AugmentRecord:
    """Transforms applied to one item; ``crop`` is the top left corner
    in the padded image, ``(CROP_PAD, CROP_PAD)`` being no shift
    """

    hflip: bool = False
    crop: Tuple[int, int] = (CROP_PAD, CROP_PAD)
    quarter_turns: int = 0

    @property
    def identity(self):
        return (
            not self.hflip
            and self.crop == (CROP_PAD, CROP_PAD)
            and self.quarter_turns == 0
        )


@dataclass
class AugmentedBatch:
    tensor: np.ndarray
    provenance: Tuple[AugmentRecord, ...]
    degenerate: bool = False

    def __len__(self):
        return self.tensor.shape[0]


def check_augmentations(augmentations):
    """Validate an augmentation set

    :exception: AugmentationException for unknown names and for any
        corruption kind, augmentations must not resemble the shift
    """
    augmentations = frozenset(augmentations)
    shifts = sorted(augmentations & set(SEVERITY_TABLE))
    if shifts:
        raise AugmentationException(
            "corruptions %r can not be used as augmentations" % shifts
        )

    unknown = sorted(augmentations - set(AUGMENTATIONS))
    if unknown:
        raise AugmentationException(
            "Unknown augmentations %r, expected a subset of %r"
            % (unknown, AUGMENTATIONS)
        )

    return augmentations


def rotate(image, quarter_turns):
    """Rotate a ``(c, h, w)`` image by quarter turns, counter clockwise"""
    return np.ascontiguousarray(np.rot90(image, quarter_turns, axes=(1, 2)))


def crop(image, top, left, pad=CROP_PAD):
    h, w = image.shape[1:]
    padded = np.pad(image, ((0, 0), (pad, pad), (pad, pad)))
    return padded[:, top:top + h, left:left + w]


def apply_record(image, record):
    """Apply flip, then crop, then rotation to a ``(c, h, w)`` image"""
    out = image
    if record.hflip:
        out = out[:, :, ::-1]
    if record.crop != (CROP_PAD, CROP_PAD):
        out = crop(out, *record.crop)
    if record.quarter_turns:
        out = rotate(out, record.quarter_turns)

    return np.ascontiguousarray(out, dtype=np.float64)


def draw_record(augmentations, rng):
    """Draw one AugmentRecord; draws happen in the order flip, crop,
    rotation and only for the augmentations of the set
    """
    hflip = "hflip" in augmentations and rng.bernoulli(0.5)
    offset = (CROP_PAD, CROP_PAD)
    if "crop" in augmentations:
        offset = (
            rng.integers(2 * CROP_PAD + 1),
            rng.integers(2 * CROP_PAD + 1),
        )

    turns = rng.integers(4) if "rot90s" in augmentations else 0
    return AugmentRecord(hflip=bool(hflip), crop=offset, quarter_turns=turns)


def augment_batch(sample, batch_size, augmentations, rng):
    """Build ``batch_size`` augmented copies of a ``(1, c, h, w)`` sample

    :param rng: Xoshiro256pp stream
    :rtype: AugmentedBatch; with an empty set and more than one item every
        copy is identical and ``degenerate`` is set
    """
    sample = as_tensor(sample, name="sample")
    if sample.shape[0] != 1:
        raise DimensionException(
            "augment_batch takes a single sample (axis n = 1), got %d"
            % sample.shape[0]
        )
    if int(batch_size) != batch_size or batch_size < 1:
        raise ParameterException(
            "batch size must be an integer >= 1, got %r" % batch_size
        )

    augmentations = check_augmentations(augmentations)
    h, w = sample.shape[2:]
    if "rot90s" in augmentations and h != w:
        raise AugmentationException(
            "rot90s needs square images (axes 'h', 'w'), got %dx%d" % (h, w)
        )

    degenerate = not augmentations and batch_size > 1
    if degenerate:
        logger.warning(
            "empty augmentation set: the %d items of the batch are "
            "identical copies",
            batch_size,
        )

    records = tuple(
        draw_record(augmentations, rng) for _ in range(int(batch_size))
    )
    tensor = np.stack([apply_record(sample[0], record) for record in records])
    return AugmentedBatch(
        tensor=tensor, provenance=records, degenerate=degenerate
    )
