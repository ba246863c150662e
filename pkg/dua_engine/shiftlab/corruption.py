# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Parametric corruptions at five severity levels.

=================  =========  ===================================
kind               parameter  severity 1 to 5
=================  =========  ===================================
gaussian_noise     sigma      0.04, 0.08, 0.12, 0.18, 0.26
shot_noise         rate       60, 25, 12, 5, 3
impulse_noise      p          0.01, 0.03, 0.06, 0.10, 0.17
defocus_blur       radius     1, 2, 3, 4, 6 (pixels)
contrast           factor     0.75, 0.5, 0.4, 0.3, 0.15
brightness         offset     0.05, 0.10, 0.15, 0.22, 0.30
=================  =========  ===================================

Severity 0 is the identity. Every output is clamped to [0, 1] and keeps
the input shape.
"""
import json
from dataclasses import dataclass
from logging import getLogger

import numpy as np

from ..tensor.core import as_tensor
from .dataset import Dataset
from .exceptions import CorruptionException
from .rng import Xoshiro256pp

logger = getLogger(__name__)

MAX_SEVERITY = 5
SEVERITY_TABLE = {
    "gaussian_noise": ("sigma", (0.04, 0.08, 0.12, 0.18, 0.26)),
    "shot_noise": ("rate", (60, 25, 12, 5, 3)),
    "impulse_noise": ("p", (0.01, 0.03, 0.06, 0.10, 0.17)),
    "defocus_blur": ("radius", (1, 2, 3, 4, 6)),
    "contrast": ("factor", (0.75, 0.5, 0.4, 0.3, 0.15)),
    "brightness": ("offset", (0.05, 0.10, 0.15, 0.22, 0.30)),
}
CORRUPTIONS = {}


def register(kind):
    def wrapper(function):
        if kind not in SEVERITY_TABLE:
            raise CorruptionException(  # pragma: no cover
                "No severity table for corruption %r" % kind
            )

        CORRUPTIONS[kind] = function
        return function

    return wrapper


def get_corruption_kinds():
    return tuple(SEVERITY_TABLE)


@dataclass(frozen=True)
class CorruptionSpec:
    kind: str = "gaussian_noise"
    severity: int = MAX_SEVERITY

    def __post_init__(self):
        if self.kind not in SEVERITY_TABLE:
            raise CorruptionException(
                "Unknown corruption %r, expected one of %r"
                % (self.kind, get_corruption_kinds())
            )
        if (
            isinstance(self.severity, bool)
            or int(self.severity) != self.severity
            or not 0 <= self.severity <= MAX_SEVERITY
        ):
            raise CorruptionException(
                "severity must be an integer in [0, %d], got %r"
                % (MAX_SEVERITY, self.severity)
            )

    @property
    def parameter(self):
        """Table value of this severity, None for the identity"""
        if not self.severity:
            return None

        return SEVERITY_TABLE[self.kind][1][int(self.severity) - 1]

    @property
    def label(self):
        return "%s-%d" % (self.kind, self.severity)


@register("gaussian_noise")
def gaussian_noise(images, sigma, gen):
    return images + gen.normal(0.0, sigma, images.shape)


@register("shot_noise")
def shot_noise(images, rate, gen):
    return gen.poisson(images * rate) / rate


@register("impulse_noise")
def impulse_noise(images, p, gen):
    draw = gen.random(images.shape)
    out = images.copy()
    out[draw < p / 2] = 0.0
    out[(draw >= p / 2) & (draw < p)] = 1.0
    return out


def disk_kernel(radius):
    """Normalized disk of ``radius`` pixels, ``(2r + 1, 2r + 1)``"""
    offsets = np.arange(-radius, radius + 1)
    ys, xs = np.meshgrid(offsets, offsets, indexing="ij")
    kernel = (xs ** 2 + ys ** 2 <= radius ** 2).astype(np.float64)
    return kernel / kernel.sum()


@register("defocus_blur")
def defocus_blur(images, radius, gen):
    kernel = disk_kernel(int(radius))
    r = int(radius)
    h, w = images.shape[2:]
    padded = np.pad(images, ((0, 0), (0, 0), (r, r), (r, r)), mode="reflect")
    out = np.zeros_like(images)
    for i, j in zip(*np.nonzero(kernel)):
        out += kernel[i, j] * padded[:, :, i:i + h, j:j + w]

    return out


@register("contrast")
def contrast(images, factor, gen):
    mean = images.mean(axis=(1, 2, 3), keepdims=True)
    return (images - mean) * factor + mean


@register("brightness")
def brightness(images, offset, gen):
    return images + offset


def corrupt(value, spec, seed=0):
    """Corrupt an image tensor or every image of a Dataset

    Random corruptions draw from the stream ``corrupt/<kind>-<severity>``
    of ``seed``, so the same arguments give the same output bit for bit.

    :rtype: same type and shape as ``value``
    """
    if not isinstance(spec, CorruptionSpec):
        spec = CorruptionSpec(*spec)

    if isinstance(value, Dataset):
        return value.with_images(
            corrupt(value.images, spec, seed=seed),
            name="%s/%s" % (value.name, spec.label),
        )

    images = as_tensor(value, name="images")
    if not spec.severity:
        return images.copy()

    gen = Xoshiro256pp(seed).spawn("corrupt/%s" % spec.label).numpy()
    out = CORRUPTIONS[spec.kind](images, spec.parameter, gen)
    return np.clip(out, 0.0, 1.0)


def severity_manifest():
    return {
        kind: {
            "parameter": name,
            "severities": {
                str(index + 1): value for index, value in enumerate(values)
            },
        }
        for kind, (name, values) in SEVERITY_TABLE.items()
    }


def write_severity_manifest(path):
    with open(path, "w") as fp:
        json.dump(severity_manifest(), fp, indent=2, sort_keys=True)
        fp.write("\n")

    logger.info("write severity manifest %r", str(path))
    return path
