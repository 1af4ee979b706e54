#!/usr/bin/env python
# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

from __future__ import print_function

import sys

from setuptools import setup

if sys.version_info[0:2] < (3, 12):
    print("Python 3.12+ is required", file=sys.stderr)
    sys.exit(1)

version = None

with open("qlio/__init__.py", "r") as fh:
    for line in fh:
        if not line.startswith("__version__"):
            continue

        version = line.split("=")[1].strip().strip('"')
        break

if not version:
    raise Exception(
        "could not resolve package version; this should never happen"
    )

setup(
    name="qlio",
    version=version,
    packages=["qlio"],
    package_data={"qlio": ["py.typed"]},
    test_suite="tests",
    tests_require=["hypothesis"],
)
