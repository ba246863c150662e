# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""``dua`` command line.

::

    dua train --config desk.json
    dua adapt-curve --config desk.json --n-adapt-samples 80 --seed 3

Exit codes: 0 on success, 1 when the experiment itself fails (a failing arm
under any error policy), 2 on a configuration error, 3 on an I/O error
(missing checkpoint or dataset, malformed IDX or checkpoint file).
"""
import argparse
import logging
import os
import sys
import time

from ..shiftlab.exceptions import IDXFormatException
from ..tensor.exceptions import (
    CheckpointException,
    DUAException,
    ParameterException,
)
from .config import COMMANDS, ExperimentConfig, load_config
from .exceptions import ConfigException
from .manifest import write_manifest
from .runners import run_command

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
EXIT_OK = 0
EXIT_EXPERIMENT = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def get_parser():
    parser = argparse.ArgumentParser(
        prog="dua", description="Test-time adaptation of bn statistics"
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument(
        "--log-level",
        help="logging level (env DUA_LOG_LEVEL, default INFO)",
    )
    for name in ExperimentConfig.get_ctypes():
        if name == "command":
            continue

        parser.add_argument(
            "--" + name.replace("_", "-"),
            dest=name,
            default=None,
            help="override the %r configuration key" % name,
        )

    return parser


def configure_logging(level=None):
    level = level or os.environ.get("DUA_LOG_LEVEL") or "INFO"
    logging.basicConfig(
        level=level.upper(), format=LOG_FORMAT, stream=sys.stderr
    )


def main(argv=None):
    """Run one command, return the process exit code"""
    parser = get_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG

    try:
        configure_logging(args.log_level)
    except ValueError as e:
        print("dua: bad log level: %s" % e, file=sys.stderr)
        return EXIT_CONFIG

    overrides = {
        name: value
        for name, value in vars(args).items()
        if value is not None and name not in ("config", "log_level")
    }
    start = time.time()
    try:
        cfg = load_config(args.config, overrides=overrides)
        ctx, _ = run_command(cfg)
        ctx.artifacts.append(
            write_manifest(cfg, ctx.artifacts, time.time() - start)
        )
    except (ConfigException, ParameterException) as e:
        logger.error("configuration error: %s", e)
        print("dua: configuration error: %s" % e, file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, IDXFormatException, CheckpointException) as e:
        logger.error("I/O error: %s", e)
        print("dua: I/O error: %s" % e, file=sys.stderr)
        return EXIT_IO
    except DUAException as e:
        logger.error("experiment failed: %s", e)
        print("dua: experiment failed: %s" % e, file=sys.stderr)
        return EXIT_EXPERIMENT

    for path in ctx.artifacts:
        print(path)

    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
