# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import json
import os
from logging import getLogger

from ..release import version
from .config import config_hash

logger = getLogger(__name__)

MANIFEST = "manifest.json"


def build_manifest(cfg, artifacts, wall_time):
    return {
        "command": cfg.command,
        "config": cfg.to_dict(),
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "version": version,
        "artifacts": sorted(set(artifacts)),
        "wall_time": wall_time,
    }


def write_manifest(cfg, artifacts, wall_time):
    path = os.path.join(cfg.output_dir, MANIFEST)
    manifest = build_manifest(cfg, artifacts, wall_time)
    with open(path, "w") as fp:
        json.dump(manifest, fp, indent=2, sort_keys=True)
        fp.write("\n")

    logger.info(
        "write manifest %r: %d artifacts, %.1fs",
        path,
        len(manifest["artifacts"]),
        wall_time,
    )
    return path
