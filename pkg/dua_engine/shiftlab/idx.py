# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""IDX files: big-endian u32 magic and dimensions, then an u8 payload.

==========  ===========  =========================
file        magic        dimensions
==========  ===========  =========================
images      0x00000803   count, rows, columns
labels      0x00000801   count
==========  ===========  =========================

Files ending with ``.gz`` are read and written through gzip.
"""
import gzip
import struct
from logging import getLogger

import numpy as np

from .dataset import Dataset
from .exceptions import IDXFormatException

logger = getLogger(__name__)

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
DIMENSIONS = {IMAGES_MAGIC: 3, LABELS_MAGIC: 1}


def _open(path, mode):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode)

    return open(path, mode)


def _read(path):
    with _open(path, "rb") as fp:
        return fp.read()


def parse_idx(payload, magic, name="<bytes>"):
    """Return the u8 payload of an IDX blob shaped by its header"""
    if len(payload) < 4:
        raise IDXFormatException(
            "%r: truncated magic at offset 0 (%d bytes)" % (name, len(payload))
        )

    (found,) = struct.unpack(">I", payload[:4])
    if found != magic:
        raise IDXFormatException(
            "%r: bad magic 0x%08x at offset 0, expected 0x%08x"
            % (name, found, magic)
        )

    ndim = DIMENSIONS[magic]
    end = 4 + 4 * ndim
    if len(payload) < end:
        raise IDXFormatException(
            "%r: truncated header at offset 4, need %d bytes, %d left"
            % (name, 4 * ndim, len(payload) - 4)
        )

    dims = struct.unpack(">%dI" % ndim, payload[4:end])
    size = int(np.prod(dims))
    if len(payload) - end != size:
        raise IDXFormatException(
            "%r: header announces %d payload bytes at offset %d, found %d"
            % (name, size, end, len(payload) - end)
        )

    data = np.frombuffer(payload, dtype=np.uint8, offset=end)
    return data.reshape(dims)


def read_idx_images(path):
    pixels = parse_idx(_read(path), IMAGES_MAGIC, name=str(path))
    return (pixels.astype(np.float64) / 255.0)[:, None, :, :]


def read_idx_labels(path):
    return parse_idx(_read(path), LABELS_MAGIC, name=str(path)).astype(
        np.int64
    )


def load_idx(images_path, labels_path, name=None):
    """Load an IDX image file and its label file as a Dataset

    :exception: IDXFormatException naming the file and the byte offset
    """
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise IDXFormatException(
            "%r holds %d images but %r holds %d labels (offset 4)"
            % (
                str(images_path),
                images.shape[0],
                str(labels_path),
                labels.shape[0],
            )
        )

    logger.info(
        "load idx %r: %d images of shape %r",
        str(images_path),
        images.shape[0],
        images.shape[1:],
    )
    return Dataset(images, labels, name=name or str(images_path))


def images_to_bytes(images):
    """IDX blob of ``(n, 1, h, w)`` or ``(n, h, w)`` images in [0, 1]"""
    images = np.asarray(images)
    if images.ndim == 4:
        images = images[:, 0]

    if images.dtype != np.uint8:
        images = np.rint(np.clip(images, 0, 1) * 255).astype(np.uint8)

    header = struct.pack(">I3I", IMAGES_MAGIC, *images.shape)
    return header + images.tobytes()


def labels_to_bytes(labels):
    labels = np.asarray(labels, dtype=np.uint8).reshape(-1)
    return struct.pack(">II", LABELS_MAGIC, labels.shape[0]) + labels.tobytes()


def write_idx(dataset, images_path, labels_path):
    """Write ``dataset`` as an IDX pair, pixels quantized to u8"""
    for path, payload in (
        (images_path, images_to_bytes(dataset.images)),
        (labels_path, labels_to_bytes(dataset.labels)),
    ):
        with _open(path, "wb") as fp:
            fp.write(payload)

    logger.info("write idx %r: %d images", str(images_path), len(dataset))
    return images_path, labels_path
