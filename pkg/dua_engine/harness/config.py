# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Experiment configuration.

The file format is a flat JSON object, every key being optional. Values
are resolved from, in increasing priority: the defaults below, the JSON
file, the environment (``DUA_OUTPUT_DIR``, ``DUA_DATA_DIR``,
``DUA_SEED``) and the command line flags.
"""
import json
import os
from dataclasses import asdict, dataclass, field, fields
from hashlib import sha256
from logging import getLogger
from typing import List, Optional

from ..bn.adapt import AdaptConfig
from ..bn.exceptions import MomentumException
from ..bn.schedule import MomentumSchedule
from ..shiftlab.augment import AUGMENTATIONS
from ..shiftlab.corruption import (
    MAX_SEVERITY,
    CorruptionSpec,
    get_corruption_kinds,
)
from .exceptions import ConfigException, FormaterException
from .formater import get_formater

logger = getLogger(__name__)

COMMANDS = (
    "train",
    "eval",
    "adapt-curve",
    "shuffle-stability",
    "omega-sweep",
    "layer-ablation",
    "cycle",
    "density",
    "norm-baseline",
    "batch-ablation",
    "corruption-table",
)
DATASETS = ("mnist", "synthetic")
ARMS = ("source", "dua", "fixed-momentum", "norm")
DOMAINS = ("clean", "corrupt")
ON_ERROR = ("raise_now", "raise_at_the_end", "ignore")
ENVIRONMENT = {
    "DUA_OUTPUT_DIR": "output_dir",
    "DUA_DATA_DIR": "data_dir",
    "DUA_SEED": "seed",
}


def _key(ctype, default=None, factory=None):
    metadata = {"ctype": ctype}
    if factory is not None:
        return field(default_factory=factory, metadata=metadata)

    return field(default=default, metadata=metadata)


@dataclass
class ExperimentConfig:
    command: str = _key("String", "adapt-curve")
    dataset: str = _key("String", "synthetic")
    data_dir: str = _key("String", "data")
    checkpoint: Optional[str] = _key("String", None)
    output_dir: str = _key("String", "runs/latest")
    corruption: str = _key("String", "gaussian_noise")
    severity: int = _key("Integer", MAX_SEVERITY)
    batch_size: int = _key("Integer", 64)
    augmentations: List[str] = _key(
        "StringList", factory=lambda: list(AUGMENTATIONS)
    )
    layer_mask: Optional[List[str]] = _key("StringList", None)
    rho0: float = _key("Float", 0.1)
    omega: float = _key("Float", 0.94)
    zeta: float = _key("Float", 0.005)
    normalize_after_update: bool = _key("Boolean", True)
    n_adapt_samples: int = _key("Integer", 100)
    n_runs: int = _key("Integer", 30)
    eval_size: int = _key("Integer", 2000)
    eval_every: int = _key("Integer", 1)
    seed: int = _key("Integer", 0)
    data_seed: int = _key("Integer", 0)
    omegas: List[float] = _key(
        "FloatList", factory=lambda: [0.5, 0.8, 0.94, 1.0]
    )
    norm_batch_sizes: List[int] = _key(
        "IntegerList", factory=lambda: [16, 64, 512]
    )
    arms: List[str] = _key("StringList", factory=lambda: list(ARMS))
    cycle_segments: List[list] = _key(
        "Json",
        factory=lambda: [
            ["clean", 50],
            ["corrupt", 100],
            ["clean", 50],
            ["corrupt", 100],
            ["clean", 50],
        ],
    )
    density_layer: Optional[str] = _key("String", None)
    density_bins: int = _key("Integer", 64)
    ablation_batch_sizes: List[int] = _key(
        "IntegerList", factory=lambda: [1, 8, 16, 32, 64]
    )
    severities: List[int] = _key(
        "IntegerList", factory=lambda: [1, 2, 3, 4, 5]
    )
    n_train: int = _key("Integer", 10000)
    n_test: int = _key("Integer", 10000)
    train_epochs: int = _key("Integer", 5)
    train_lr: float = _key("Float", 0.05)
    train_momentum: float = _key("Float", 0.9)
    train_batch_size: int = _key("Integer", 64)
    workers: int = _key("Integer", 1)
    on_error: str = _key("String", "raise_now")
    export_format: List[str] = _key("StringList", factory=lambda: ["csv"])

    def __post_init__(self):
        self.validate()

    @classmethod
    def get_ctypes(cls):
        return {f.name: f.metadata["ctype"] for f in fields(cls)}

    @property
    def checkpoint_path(self):
        if self.checkpoint:
            return self.checkpoint

        return os.path.join(self.output_dir, "source.dua")

    @property
    def corruption_spec(self):
        return CorruptionSpec(self.corruption, self.severity)

    @property
    def schedule(self):
        return MomentumSchedule(self.rho0, self.omega, self.zeta)

    @property
    def adapt(self):
        return self.adapt_config()

    def adapt_config(self, **overrides):
        values = dict(
            batch_size=self.batch_size,
            augmentations=frozenset(self.augmentations),
            layer_mask=self.layer_mask,
            schedule=self.schedule,
            seed=self.seed,
            post_update=self.normalize_after_update,
        )
        values.update(overrides)
        return AdaptConfig(**values)

    def to_dict(self):
        return asdict(self)

    def validate(self):
        self._check_types()
        self._check_choice("command", [self.command], COMMANDS)
        self._check_choice("dataset", [self.dataset], DATASETS)
        self._check_choice(
            "corruption", [self.corruption], get_corruption_kinds()
        )
        self._check_choice("augmentations", self.augmentations, AUGMENTATIONS)
        self._check_choice("arms", self.arms, ARMS)
        self._check_choice("on_error", [self.on_error], ON_ERROR)
        self._check_choice(
            "export_format", self.export_format, ("csv", "json", "xml")
        )
        self._check_range("severity", [self.severity], 0, MAX_SEVERITY)
        self._check_range("severities", self.severities, 0, MAX_SEVERITY)
        for name in (
            "batch_size",
            "n_runs",
            "eval_size",
            "eval_every",
            "density_bins",
            "n_train",
            "n_test",
            "train_epochs",
            "train_batch_size",
            "workers",
        ):
            self._check_range(name, [getattr(self, name)], 1)

        self._check_range("n_adapt_samples", [self.n_adapt_samples], 0)
        self._check_range("norm_batch_sizes", self.norm_batch_sizes, 2)
        self._check_range("ablation_batch_sizes", self.ablation_batch_sizes, 1)
        bad = [omega for omega in self.omegas if not 0 < omega <= 1]
        if bad:
            raise ConfigException("omegas must lie in (0, 1], got %r" % bad)
        if not self.train_lr > 0 or not 0 <= self.train_momentum < 1:
            raise ConfigException(
                "train_lr must be > 0 and train_momentum in [0, 1), got "
                "%r and %r" % (self.train_lr, self.train_momentum)
            )

        try:
            self.schedule.validate()
        except MomentumException as e:
            raise ConfigException(str(e))

        for segment in self.cycle_segments:
            if (
                not isinstance(segment, (list, tuple))
                or len(segment) != 2
                or segment[0] not in DOMAINS
                or not isinstance(segment[1], int)
                or segment[1] < 0
            ):
                raise ConfigException(
                    "cycle segments are [domain, n] pairs with domain in %r "
                    "and n >= 0, got %r" % (DOMAINS, segment)
                )

    def _check_types(self):
        checks = {
            "String": (str,),
            "Integer": (int,),
            "Float": (int, float),
            "Boolean": (bool,),
        }
        for name, ctype in self.get_ctypes().items():
            value = getattr(self, name)
            if value is None and name in (
                "checkpoint",
                "layer_mask",
                "density_layer",
            ):
                continue

            if ctype.endswith("List"):
                item = ctype[:-4]
                if not isinstance(value, (list, tuple)):
                    raise ConfigException(
                        "%r must be a list, got %r" % (name, value)
                    )
                values = list(value)
            elif ctype == "Json":
                continue
            else:
                item = ctype
                values = [value]

            for v in values:
                wrong = not isinstance(v, checks[item]) or (
                    item != "Boolean" and isinstance(v, bool)
                )
                if wrong:
                    raise ConfigException(
                        "%r expects %s values, got %r" % (name, item, value)
                    )

            if ctype == "Float":
                setattr(self, name, float(value))
            elif ctype == "FloatList":
                setattr(self, name, [float(v) for v in value])
            elif ctype.endswith("List"):
                setattr(self, name, list(value))

    def _check_choice(self, name, values, choices):
        unknown = [value for value in values if value not in choices]
        if unknown:
            raise ConfigException(
                "Unknown %s %r, expected one of %r" % (name, unknown, choices)
            )

    def _check_range(self, name, values, low, high=None):
        bad = [
            value
            for value in values
            if value < low or (high is not None and value > high)
        ]
        if bad:
            bounds = ">= %d" % low
            if high is not None:
                bounds = "in [%d, %d]" % (low, high)

            raise ConfigException(
                "%s must be %s, got %r" % (name, bounds, bad)
            )


def config_hash(cfg):
    """SHA-256 of the canonical JSON of the resolved configuration"""
    canonical = json.dumps(
        cfg.to_dict(), sort_keys=True, separators=(",", ":")
    )
    return sha256(canonical.encode("utf-8")).hexdigest()


def parse_values(values, source):
    """Convert text values (environment, flags) with the field formaters"""
    ctypes = ExperimentConfig.get_ctypes()
    parsed = {}
    for name, value in values.items():
        if name not in ctypes:
            raise ConfigException("Unknown key %r in %s" % (name, source))

        if isinstance(value, str):
            try:
                value = get_formater(ctypes[name]).str2value(value)
            except FormaterException as e:
                raise ConfigException("%s: %r: %s" % (source, name, e))

        parsed[name] = value

    return parsed


def read_config_file(path):
    if not os.path.exists(path):
        raise ConfigException("Config file %r does not exist" % path)

    try:
        with open(path) as fp:
            values = json.load(fp)
    except ValueError as e:
        raise ConfigException("Config file %r is not json: %s" % (path, e))

    if not isinstance(values, dict):
        raise ConfigException(
            "Config file %r must hold a json object" % path
        )

    unknown = sorted(set(values) - set(ExperimentConfig.get_ctypes()))
    if unknown:
        raise ConfigException(
            "Unknown keys %r in config file %r" % (unknown, path)
        )

    return values


def environment_values(environ=None):
    environ = os.environ if environ is None else environ
    values = {
        key: environ[variable]
        for variable, key in ENVIRONMENT.items()
        if environ.get(variable)
    }
    return parse_values(values, "environment")


def load_config(path=None, overrides=None, environ=None):
    """Resolve a configuration

    :param path: JSON config file, optional
    :param overrides: values from the command line, text or typed
    :param environ: mapping used instead of ``os.environ``
    :exception: ConfigException
    """
    values = {}
    if path:
        values.update(read_config_file(path))

    values.update(environment_values(environ))
    values.update(parse_values(overrides or {}, "command line"))
    try:
        cfg = ExperimentConfig(**values)
    except TypeError as e:
        raise ConfigException(str(e))

    logger.debug("resolved config %r", cfg)
    return cfg
