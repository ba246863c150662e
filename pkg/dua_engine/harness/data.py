# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Datasets of an experiment and the split of the test set.

The test set is permuted once with the ``data_seed``: the first
``eval_size`` images form the evaluation slice, the others the pool the
adaptation streams are drawn from, so the two never overlap. The
corrupted test set is the clean one with every image corrupted, the
indices are shared.
"""
import os
from dataclasses import dataclass
from logging import getLogger

from ..shiftlab.corruption import corrupt
from ..shiftlab.dataset import Dataset
from ..shiftlab.idx import load_idx
from ..shiftlab.rng import Xoshiro256pp, name_hash
from ..shiftlab.synthetic import gen_synthetic
from .exceptions import ConfigException

logger = getLogger(__name__)

MNIST_FILES = {
    "train": ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    "test": ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
}


def find_file(data_dir, filename):
    for candidate in (filename, filename + ".gz"):
        path = os.path.join(data_dir, candidate)
        if os.path.exists(path):
            return path

    raise FileNotFoundError(
        "MNIST file %r (or %r) not found in %r"
        % (filename, filename + ".gz", data_dir)
    )


def load_split(cfg, split):
    """Train or test Dataset of the configured dataset

    :exception: OSError, IDXFormatException for an unreadable MNIST copy
    """
    if cfg.dataset == "mnist":
        images, labels = MNIST_FILES[split]
        return load_idx(
            find_file(cfg.data_dir, images),
            find_file(cfg.data_dir, labels),
            name="mnist-%s" % split,
        )

    size = cfg.n_train if split == "train" else cfg.n_test
    return gen_synthetic(
        size,
        seed=cfg.data_seed ^ name_hash(split),
        name="synthetic-%s" % split,
    )


@dataclass
class TestSplit:
    clean: Dataset
    shifted: Dataset
    eval_indices: object
    pool_indices: object

    def eval_slice(self, domain="corrupt"):
        dataset = self.shifted if domain == "corrupt" else self.clean
        return dataset.subset(
            self.eval_indices, name="%s-eval" % dataset.name
        )

    def pool(self, domain="corrupt"):
        return self.shifted if domain == "corrupt" else self.clean

    def stream(self, n, seed, key, domain="corrupt", offset=0):
        """``n`` images of the adaptation pool ``(n, c, h, w)``

        The order is a permutation of the pool drawn from the stream
        ``stream/<key>`` of ``seed``; ``offset`` skips the first images
        of that order, wrapping around the pool.
        """
        if n > len(self.pool_indices):
            raise ConfigException(
                "n_adapt_samples=%d exceeds the %d images left out of the "
                "evaluation slice" % (n, len(self.pool_indices))
            )

        rng = Xoshiro256pp(seed).spawn("stream/%s" % key)
        order = rng.permutation(len(self.pool_indices))
        picks = [
            self.pool_indices[order[(offset + i) % len(order)]]
            for i in range(n)
        ]
        return self.pool(domain).images[picks]


def make_test_split(test, spec, eval_size, data_seed):
    if eval_size >= len(test):
        raise ConfigException(
            "eval_size=%d leaves no adaptation images out of %d"
            % (eval_size, len(test))
        )

    gen = Xoshiro256pp(data_seed).spawn("split").numpy()
    order = gen.permutation(len(test))
    shifted = corrupt(test, spec, seed=data_seed)
    logger.info(
        "split %r: %d evaluation, %d adaptation images, shift %r",
        test.name,
        eval_size,
        len(test) - eval_size,
        spec.label,
    )
    return TestSplit(
        clean=test,
        shifted=shifted,
        eval_indices=order[:eval_size],
        pool_indices=order[eval_size:],
    )
