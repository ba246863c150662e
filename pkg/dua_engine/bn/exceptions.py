# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from ..tensor.exceptions import DUAException, ParameterException


class AdaptationException(DUAException):
    """Simple exception for the adaptation step"""


class MomentumException(ParameterException):
    """Momentum schedule or EMA weight out of range"""


class LayerMaskException(AdaptationException, ParameterException):
    """Layer mask names a batch normalization layer the model lacks"""
