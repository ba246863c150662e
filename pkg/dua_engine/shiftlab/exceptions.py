# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from ..tensor.exceptions import DUAException, ParameterException


class ShiftLabException(DUAException):
    """Dataset or shift generation failure"""


class IDXFormatException(ShiftLabException):
    """Malformed IDX file, the message names the file and the offset"""


class DatasetException(ShiftLabException, ParameterException):
    """Inconsistent images and labels"""


class CorruptionException(ShiftLabException, ParameterException):
    """Unknown corruption kind or severity out of range"""


class AugmentationException(ShiftLabException, ParameterException):
    """Unknown augmentation or augmentation set overlapping a corruption"""
