# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from ..tensor.exceptions import (
    DimensionException,
    DUAException,
    ParameterException,
)


class OracleException(DUAException):
    """Reference computation refused its input"""


class OracleDimensionException(OracleException, DimensionException):
    """Empty or badly shaped reference input"""


class OracleParameterException(OracleException, ParameterException):
    """Reference parameter out of its domain"""
