# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Procedural glyph dataset, a stand-in for MNIST when it is absent.

Each of the ten classes is a set of strokes (polylines in a ``[-1, 1]``
box). Every image draws its own scale, rotation, shift, stroke thickness
and intensity, then the strokes are rendered from their distance field
with a one pixel soft edge.
"""
from logging import getLogger

import numpy as np

from ..tensor.exceptions import ParameterException
from .dataset import N_CLASSES, Dataset
from .rng import Xoshiro256pp

logger = getLogger(__name__)

SIZE = 28


def _circle(radius=0.6, points=24):
    angles = np.linspace(0, 2 * np.pi, points + 1)
    return [np.stack([radius * np.cos(angles), radius * np.sin(angles)], 1)]


def _line(*points):
    return np.array(points, dtype=np.float64)


GLYPHS = (
    _circle(),
    [_line((0, -0.7), (0, 0.7))],
    [_line((-0.7, 0), (0.7, 0))],
    [_line((0, -0.7), (0, 0.7)), _line((-0.7, 0), (0.7, 0))],
    [_line((-0.6, -0.6), (0.6, 0.6)), _line((-0.6, 0.6), (0.6, -0.6))],
    [_line((0, -0.65), (0.65, 0.55), (-0.65, 0.55), (0, -0.65))],
    [
        _line(
            (-0.55, -0.55), (0.55, -0.55), (0.55, 0.55), (-0.55, 0.55),
            (-0.55, -0.55),
        )
    ],
    [_line((-0.45, -0.7), (-0.45, 0.7), (0.5, 0.7))],
    [_line((-0.65, 0.45), (0, -0.45), (0.65, 0.45))],
    [_line((-0.65, -0.3), (0.65, -0.3)), _line((-0.65, 0.3), (0.65, 0.3))],
)


def _segments(strokes):
    starts = np.concatenate([stroke[:-1] for stroke in strokes])
    ends = np.concatenate([stroke[1:] for stroke in strokes])
    return starts, ends


def _grid(size):
    centers = (np.arange(size) + 0.5) / size * 2 - 1
    ys, xs = np.meshgrid(centers, centers, indexing="ij")
    return np.stack([xs.ravel(), ys.ravel()], 1)


def distance_field(starts, ends, pixels):
    """Distance of every pixel to the closest segment ``(P,)``"""
    direction = ends - starts
    length2 = np.maximum((direction ** 2).sum(1), 1e-12)
    rel = pixels[:, None, :] - starts[None]
    t = np.clip((rel * direction[None]).sum(2) / length2, 0, 1)
    closest = starts[None] + t[..., None] * direction[None]
    dist = np.sqrt(((pixels[:, None, :] - closest) ** 2).sum(2))
    return dist.min(1)


def render_glyph(label, scale, angle, shift, thickness, intensity, size=SIZE):
    """Render one glyph as a ``(size, size)`` array in [0, 1]"""
    starts, ends = _segments(GLYPHS[label])
    cos, sin = np.cos(angle), np.sin(angle)
    rotation = np.array([[cos, -sin], [sin, cos]])
    starts = scale * starts @ rotation.T + shift
    ends = scale * ends @ rotation.T + shift
    dist = distance_field(starts, ends, _grid(size))
    edge = 2.0 / size
    ink = np.clip((thickness - dist) / edge + 0.5, 0, 1)
    return (intensity * ink).reshape(size, size)


def gen_synthetic(n, seed=0, size=SIZE, name=None):
    """``n`` glyph images ``(n, 1, size, size)``, deterministic in ``seed``

    Labels cycle through the ten classes then are shuffled, so every class
    holds ``n // 10`` or ``n // 10 + 1`` images.
    """
    if int(n) != n or n < 1:
        raise ParameterException("n must be an integer >= 1, got %r" % n)

    gen = Xoshiro256pp(seed).spawn("synthetic").numpy()
    labels = gen.permutation(np.arange(n) % N_CLASSES)
    scales = gen.uniform(0.75, 1.1, n)
    angles = gen.uniform(-0.25, 0.25, n)
    shifts = gen.uniform(-0.15, 0.15, (n, 2))
    thickness = gen.uniform(0.08, 0.16, n)
    intensity = gen.uniform(0.7, 1.0, n)

    images = np.empty((n, 1, size, size))
    for index in range(n):
        images[index, 0] = render_glyph(
            labels[index],
            scales[index],
            angles[index],
            shifts[index],
            thickness[index],
            intensity[index],
            size=size,
        )

    logger.debug("generate %d synthetic glyphs (seed %r)", n, seed)
    return Dataset(
        images, labels, name=name or "synthetic(%d, seed=%d)" % (n, seed)
    )
