# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from ..tensor.exceptions import DUAException


class HarnessException(DUAException):
    """Experiment harness exception"""


class ConfigException(HarnessException):
    """Invalid configuration file, key or value"""


class ExperimentException(HarnessException):
    """One or more experiment arms failed"""


class ExporterException(HarnessException):
    """Simple exception for exporter"""


class FormaterException(HarnessException):
    """Value can not be converted from or to its text form"""
