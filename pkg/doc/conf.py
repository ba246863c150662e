# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import os
import sys

sys.path.insert(0, os.path.abspath(".."))

from dua_engine.release import version  # noqa: E402

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
]
templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"
project = "dua_engine"
copyright = "2026, dua_engine contributors"
release = version
exclude_patterns = ["_build"]
pygments_style = "sphinx"
html_theme = "classic"
htmlhelp_basename = "dua_enginedoc"
latex_documents = [
    (
        "index",
        "dua_engine.tex",
        "dua_engine Documentation",
        "dua_engine contributors",
        "manual",
    ),
]
man_pages = [
    ("index", "dua", "dua_engine Documentation", ["dua_engine contributors"], 1)
]
