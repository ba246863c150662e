# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Seedable xoshiro256++ generator with named sub-streams.

Every component draws from its own stream, derived from the run seed and
the component name, so adding draws to one component never moves the
draws of another::

    rng = Xoshiro256pp(seed)
    augment_rng = rng.spawn("augment")
    stream_rng = rng.spawn("stream/3")

Scalar draws come from the generator itself; bulk draws (noise fields)
go through ``numpy()``, a numpy Generator seeded from the next 64 bits.
"""
from hashlib import blake2b

import numpy as np

from ..tensor.exceptions import ParameterException

MASK64 = (1 << 64) - 1


def _rotl(value, shift):
    return ((value << shift) | (value >> (64 - shift))) & MASK64


def splitmix64(seed):
    """Yield the splitmix64 sequence of ``seed``"""
    state = seed & MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        yield z ^ (z >> 31)


def name_hash(name):
    digest = blake2b(str(name).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class Xoshiro256pp:
    """xoshiro256++ seeded through splitmix64

    :param seed: any integer, reduced modulo 2**64
    """

    def __init__(self, seed=0):
        if int(seed) != seed:
            raise ParameterException("seed must be an integer, got %r" % seed)

        self.seed = int(seed) & MASK64
        expand = splitmix64(self.seed)
        self.state = [next(expand) for _ in range(4)]

    def next_u64(self):
        s0, s1, s2, s3 = self.state
        result = (_rotl((s0 + s3) & MASK64, 23) + s0) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.state = [s0, s1, s2, s3]
        return result

    def random(self):
        """Uniform float in [0, 1) with 53 random bits"""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def integers(self, low, high=None):
        """Uniform integer in ``[low, high)``, or ``[0, low)``

        Rejection sampling on the smallest covering bit mask keeps the
        draw unbiased.
        """
        if high is None:
            low, high = 0, low

        span = int(high) - int(low)
        if span < 1:
            raise ParameterException(
                "empty integer range [%r, %r)" % (low, high)
            )

        mask = (1 << (span - 1).bit_length()) - 1
        while True:
            value = self.next_u64() & mask
            if value < span:
                return int(low) + value

    def bernoulli(self, p=0.5):
        return self.random() < p

    def choice(self, values):
        values = list(values)
        return values[self.integers(len(values))]

    def permutation(self, n):
        """Fisher-Yates shuffle of ``range(n)``"""
        order = list(range(n))
        for index in range(n - 1, 0, -1):
            other = self.integers(index + 1)
            order[index], order[other] = order[other], order[index]

        return np.array(order, dtype=np.int64)

    def spawn(self, name):
        """Independent stream for the component ``name``

        Depends on the seed and the name only, never on the draws
        already made.
        """
        return Xoshiro256pp(self.seed ^ name_hash(name))

    def numpy(self):
        return np.random.Generator(np.random.PCG64(self.next_u64()))

    def copy(self):
        other = Xoshiro256pp.__new__(Xoshiro256pp)
        other.seed = self.seed
        other.state = list(self.state)
        return other

    def __repr__(self):
        return "Xoshiro256pp(seed=%d)" % self.seed
