# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import os

from setuptools import find_packages, setup

version = "0.1.0"

requires = [
    "numpy>=1.20",
    "scipy",
    "lxml",
]

here = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(here, "README.rst"), "r", encoding="utf-8") as readme:
    README = readme.read()

with open(
    os.path.join(here, "doc", "CHANGES.rst"), "r", encoding="utf-8"
) as change:
    CHANGE = change.read()

with open(
    os.path.join(here, "doc", "FRONT.rst"), "r", encoding="utf-8"
) as front:
    FRONT = front.read()

setup(
    name="dua_engine",
    version=version,
    author="dua_engine contributors",
    description=(
        "Online test-time adaptation of batch normalization statistics"
    ),
    license="MPL2",
    long_description=README + "\n" + FRONT + "\n" + CHANGE,
    packages=find_packages(exclude=["examples", "examples.*"]),
    zip_safe=False,
    include_package_data=True,
    python_requires=">=3.8",
    install_requires=requires,
    tests_require=requires + ["pytest", "pytest-cov"],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3 :: Only",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "License :: OSI Approved :: Mozilla Public License 2.0 (MPL 2.0)",
    ],
    entry_points={
        "console_scripts": [
            "dua=dua_engine.harness.cli:main",
        ],
    },
    extras_require={"test": ["pytest", "pytest-cov"]},
)
