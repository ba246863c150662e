# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import json
import os
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from threading import Lock

from ..shiftlab.corruption import write_severity_manifest
from ..tensor.checkpoint import load_checkpoint
from .config import config_hash
from .data import load_split, make_test_split
from .exceptions import ExperimentException
from .exporter import Table, export_table

logger = getLogger(__name__)


class RunContext:
    """Everything a runner shares: configuration, source checkpoint, test
    split and the artifacts written so far

    The checkpoint is read once and never written; every arm works on its
    own copy from :meth:`source_model`.
    """

    def __init__(self, cfg):
        self.cfg = cfg
        self.config_hash = config_hash(cfg)
        self.output_dir = cfg.output_dir
        self.artifacts = []
        self._source = None
        self._split = None
        self._lock = Lock()
        os.makedirs(self.output_dir, exist_ok=True)

    def source_model(self):
        with self._lock:
            return self._load_source().copy()

    def _load_source(self):
        if self._source is None:
            self._source = load_checkpoint(self.cfg.checkpoint_path)
            logger.info(
                "source checkpoint %r, stats %s",
                self.cfg.checkpoint_path,
                self._source.stats_digest(),
            )

        return self._source

    def test_split(self, spec=None, cache=True):
        """Evaluation slice and adaptation pool for ``spec`` (the
        configured corruption by default)

        :param cache: keep the split for the next calls
        """
        spec = spec or self.cfg.corruption_spec
        with self._lock:
            return self._load_split(spec, cache)

    def _load_split(self, spec, cache):
        if self._split is None:
            self._split = {"test": load_split(self.cfg, "test")}

        if spec in self._split:
            return self._split[spec]

        split = make_test_split(
            self._split["test"], spec, self.cfg.eval_size, self.cfg.data_seed
        )
        if spec.severity:
            self.write_severity_manifest()
        if cache:
            self._split[spec] = split

        return split

    def write_table(self, name, header, rows):
        table = Table(name, header, list(rows), config_hash=self.config_hash)
        paths = export_table(table, self.output_dir, self.cfg.export_format)
        self.artifacts.extend(paths)
        return paths[0]

    def write_json(self, name, payload):
        path = os.path.join(self.output_dir, name)
        with open(path, "w") as fp:
            json.dump(payload, fp, indent=2, sort_keys=True)
            fp.write("\n")

        if path not in self.artifacts:
            self.artifacts.append(path)

        return path

    def write_severity_manifest(self):
        path = os.path.join(self.output_dir, "severity_manifest.json")
        if path not in self.artifacts:
            write_severity_manifest(path)
            self.artifacts.append(path)

    def run_arms(self, arms, function):
        """Run ``function(arm)`` for every arm and key the results by arm

        Arms run on a thread pool when ``workers > 1``. Errors follow
        ``on_error``: ``raise_now`` stops at the first one,
        ``raise_at_the_end`` runs every arm then raises them all,
        ``ignore`` logs them and drops the arm.
        """
        arms = list(arms)
        on_error = self.cfg.on_error
        error_found = []
        results = {}

        def guarded(arm):
            try:
                return function(arm)
            except Exception as e:
                msg = "arm %r: %r: %r" % (arm, e.__class__.__name__, e)
                logger.error("%s", msg)
                error_found.append(msg)
                if on_error == "raise_now":
                    raise

                return None

        if self.cfg.workers > 1 and len(arms) > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
                futures = [(arm, pool.submit(guarded, arm)) for arm in arms]
                for arm, future in futures:
                    results[arm] = future.result()
        else:
            for arm in arms:
                results[arm] = guarded(arm)

        if error_found and on_error == "raise_at_the_end":
            raise ExperimentException(
                "Exception found : \n %s" % "\n".join(error_found)
            )

        return {
            arm: result
            for arm, result in results.items()
            if result is not None
        }
