# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""DUA1 checkpoint format.

::

    b"DUA1"
    u32 layer count
    per layer: u8 type tag, then the layer header as u32 (count fixed by tag)
    per layer, in order: every array of the layer as f64

All integers and floats are little-endian. BatchNorm layers store gamma,
beta, running mean, running variance, then ``[eps, train_momentum]``.
"""
import struct
from logging import getLogger

import numpy as np

from .exceptions import CheckpointException
from .layers import LAYERS
from .model import Model

logger = getLogger(__name__)
MAGIC = b"DUA1"


def model_to_bytes(model):
    chunks = [MAGIC, struct.pack("<I", len(model.layers))]
    for layer in model.layers:
        header = layer.header()
        chunks.append(struct.pack("<B", layer.tag))
        chunks.append(struct.pack("<%dI" % len(header), *header))

    for layer in model.layers:
        for array in layer.arrays():
            chunks.append(np.asarray(array, dtype="<f8").tobytes())

    return b"".join(chunks)


class _Reader:
    def __init__(self, payload, name):
        self.payload = payload
        self.name = name
        self.offset = 0

    def take(self, size):
        end = self.offset + size
        if end > len(self.payload):
            left = len(self.payload) - self.offset
            raise CheckpointException(
                "truncated checkpoint %r: need %d bytes at offset %d, %d left"
                % (self.name, size, self.offset, left)
            )

        chunk = self.payload[self.offset:end]
        self.offset = end
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def model_from_bytes(payload, name="<bytes>"):
    reader = _Reader(payload, name)
    magic = reader.take(len(MAGIC))
    if magic != MAGIC:
        raise CheckpointException(
            "%r is not a DUA1 checkpoint (magic %r)" % (name, magic)
        )

    (count,) = reader.unpack("<I")
    layers = []
    for index in range(count):
        (tag,) = reader.unpack("<B")
        if tag not in LAYERS:
            raise CheckpointException(
                "%r: unknown layer tag %r at offset %d"
                % (name, tag, reader.offset - 1)
            )

        cls = LAYERS[tag]
        header = reader.unpack("<%dI" % cls.header_size)
        layers.append(cls.from_header(header))

    for layer in layers:
        arrays = []
        for shape in layer.array_shapes():
            size = int(np.prod(shape))
            arrays.append(
                np.frombuffer(reader.take(8 * size), dtype="<f8")
                .astype(np.float64)
                .reshape(shape)
            )

        layer.load_arrays(arrays)

    if reader.offset != len(payload):
        raise CheckpointException(
            "%r: %d trailing bytes after offset %d"
            % (name, len(payload) - reader.offset, reader.offset)
        )

    return Model(layers)


def save_checkpoint(model, path):
    payload = model_to_bytes(model)
    with open(path, "wb") as fp:
        fp.write(payload)

    logger.info("write checkpoint %r (%d bytes)", str(path), len(payload))
    return path


def load_checkpoint(path):
    with open(path, "rb") as fp:
        payload = fp.read()

    return model_from_bytes(payload, name=str(path))
