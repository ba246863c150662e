# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Text form of configuration values and table cells.

get_formater(ctype) returns the formater registered for a column
type, or the base :class:`Formater` which passes values through
str.
"""
from json import dumps, loads

from .exceptions import FormaterException

FORMATERS = {}


def register(cls):
    FORMATERS[cls.__name__] = cls
    return cls


def get_formater(ctype):
    if ctype in FORMATERS:
        return FORMATERS[ctype]()

    return Formater()


def ctype_of(value):
    """Column type of a python value"""
    if isinstance(value, bool):
        return "Boolean"
    if isinstance(value, int):
        return "Integer"
    if isinstance(value, float):
        return "Float"
    if isinstance(value, (list, tuple, dict)):
        return "Json"

    return "String"


def value2str(value):
    return get_formater(ctype_of(value)).value2str(value)


class Formater:
    def str2value(self, value):
        return value

    def value2str(self, value):
        if value is None:
            return ""

        return str(value)


@register
class String(Formater):
    pass


@register
class Float(Formater):
    fmt = "%.10g"

    def str2value(self, value):
        try:
            return float(value)
        except (TypeError, ValueError):
            raise FormaterException("Value %r is not a float" % value)

    def value2str(self, value):
        if value is None:
            return ""

        return self.fmt % float(value)


@register
class Integer(Formater):
    def str2value(self, value):
        try:
            return int(value)
        except (TypeError, ValueError):
            raise FormaterException("Value %r is not an integer" % value)


@register
class Boolean(Formater):
    def str2value(self, value):
        if value in ("1", "true", "True", 1, True):
            return True
        elif value in ("0", "false", "False", "", 0, False):
            return False

        raise FormaterException("Value %r is not a boolean" % value)

    def value2str(self, value):
        return "1" if value else "0"


@register
class Json(Formater):
    def str2value(self, value):
        try:
            return loads(value)
        except ValueError as e:
            raise FormaterException("Value %r is not json: %s" % (value, e))

    def value2str(self, value):
        return dumps(value, sort_keys=True)


class _List(Formater):
    item = Formater

    def str2value(self, value):
        if isinstance(value, (list, tuple)):
            return list(value)

        value = value.strip()
        if value.startswith("["):
            return Json().str2value(value)
        if not value:
            return []

        return [self.item().str2value(v.strip()) for v in value.split(",")]

    def value2str(self, value):
        return ",".join(self.item().value2str(v) for v in value)


@register
class StringList(_List):
    item = String


@register
class FloatList(_List):
    item = Float


@register
class IntegerList(_List):
    item = Integer
