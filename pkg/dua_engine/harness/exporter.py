# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Table exporters.

Every table is written as CSV; JSON and XML mirrors are optional. Cells go
through the formaters so a rerun writes the same bytes.
"""
import json
import os
from csv import DictWriter
from dataclasses import dataclass, field
from io import StringIO
from logging import getLogger
from typing import List, Sequence

from lxml import etree

from .exceptions import ExporterException
from .formater import value2str

logger = getLogger(__name__)

EXPORTERS = {}


def register(mode, extension):
    def wrapper(cls):
        cls.mode = mode
        cls.extension = extension
        EXPORTERS[mode] = cls
        return cls

    return wrapper


def get_mode_choices():
    return {mode: cls.__name__ for mode, cls in EXPORTERS.items()}


def get_exporter(mode):
    if mode not in EXPORTERS:
        raise ExporterException(
            "Unknown export mode %r, expected one of %r"
            % (mode, sorted(EXPORTERS))
        )

    return EXPORTERS[mode]()


@dataclass
class Table:
    name: str
    header: Sequence[str]
    rows: List[Sequence] = field(default_factory=list)
    config_hash: str = ""

    def __post_init__(self):
        for row in self.rows:
            self.check_row(row)

    def check_row(self, row):
        if len(row) != len(self.header):
            raise ExporterException(
                "%r: row %r does not match header %r"
                % (self.name, row, self.header)
            )

    def append(self, row):
        self.check_row(row)
        self.rows.append(row)

    def text_rows(self):
        return [
            {name: value2str(value) for name, value in zip(self.header, row)}
            for row in self.rows
        ]


class Exporter:
    mode = None
    extension = None

    def run(self, table):
        raise NotImplementedError

    def write(self, table, directory):
        path = os.path.join(directory, "%s.%s" % (table.name, self.extension))
        payload = self.run(table)
        with open(path, "w", newline="") as fp:
            fp.write(payload)

        logger.info(
            "export %r: %d rows to %r", table.name, len(table.rows), path
        )
        return path


@register("csv", "csv")
class CSV(Exporter):
    def run(self, table):
        csvfile = StringIO()
        csvfile.write("# config_hash=%s\n" % table.config_hash)
        writer = DictWriter(
            csvfile, fieldnames=list(table.header), lineterminator="\n"
        )
        writer.writeheader()
        for row in table.text_rows():
            writer.writerow(row)

        return csvfile.getvalue()


@register("json", "json")
class JSON(Exporter):
    def run(self, table):
        payload = {
            "config_hash": table.config_hash,
            "header": list(table.header),
            "rows": table.text_rows(),
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


@register("xml", "xml")
class XML(Exporter):
    def run(self, table):
        root = etree.Element(
            "table", name=table.name, config_hash=table.config_hash
        )
        for row in table.text_rows():
            node = etree.SubElement(root, "row")
            for name in table.header:
                cell = etree.SubElement(node, "cell", name=name)
                cell.text = row[name]

        return etree.tostring(
            root, pretty_print=True, xml_declaration=True, encoding="UTF-8"
        ).decode("utf-8")


def export_table(table, directory, modes=("csv",)):
    """Write ``table`` as CSV plus the requested mirrors

    :rtype: list of written paths
    """
    modes = ["csv"] + [mode for mode in modes if mode != "csv"]
    return [get_exporter(mode).write(table, directory) for mode in modes]
