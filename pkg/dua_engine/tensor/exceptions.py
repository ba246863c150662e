# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.


class DUAException(Exception):
    """Root exception of the engine"""


class DimensionException(DUAException):
    """Shape mismatch between tensors or layers"""


class NumericException(DUAException):
    """Non finite value or negative variance"""


class ParameterException(DUAException):
    """Scalar parameter out of its domain"""


class LabelIndexException(ParameterException, IndexError):
    """Class label outside of [0, K)"""


class CheckpointException(DUAException):
    """Malformed or truncated checkpoint file"""
