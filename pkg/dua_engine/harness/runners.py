# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
"""Experiment runners, one per command.

Every runner starts from copies of the source checkpoint, draws its
adaptation streams from the pool left out of the evaluation slice and
writes its tables through the run context. Streams and augmentation draws
of an arm depend on ``(seed, arm key)`` only.
"""
import time
from dataclasses import dataclass, field
from logging import getLogger
from typing import List

import numpy as np

from ..bn.adapt import DUAAdapter
from ..bn.schedule import MomentumSchedule
from ..shiftlab.augment import AUGMENTATIONS
from ..shiftlab.corruption import CorruptionSpec, get_corruption_kinds
from ..shiftlab.rng import Xoshiro256pp
from .context import RunContext
from .exceptions import ConfigException, ExperimentException
from .metrics import (
    bn_io,
    evaluate,
    last_bn_name,
    mean_std,
    norm_error,
    shared_histograms,
    stat_shift_norm,
    wasserstein1,
)
from .record import ExperimentRecord
from .training import train_model

logger = getLogger(__name__)

RUNNERS = {}
STABILITY_CHECKPOINTS = (5, 25, 100)
SETTLE_AFTER = 50
SETTLE_FRACTION = 0.05
AUGMENTATION_SETS = {
    "none": (),
    "hflip": ("hflip",),
    "crop": ("crop",),
    "rot90s": ("rot90s",),
    "all": AUGMENTATIONS,
}


def register(command):
    def wrapper(function):
        RUNNERS[command] = function
        return function

    return wrapper


def get_runner(command):
    if command not in RUNNERS:
        raise ConfigException(
            "Unknown command %r, expected one of %r"
            % (command, sorted(RUNNERS))
        )

    return RUNNERS[command]


@dataclass
class ArmRun:
    """Outcome of one adaptation arm"""

    record: ExperimentRecord
    model: object
    trace: List[tuple] = field(default_factory=list)
    deltas: List[float] = field(default_factory=list)
    wall_time: float = 0.0
    summary: dict = field(default_factory=dict)


def eval_steps(n, every):
    """Steps evaluated by a run of ``n`` samples: every ``every`` and
    the last one
    """
    steps = set(range(every, n + 1, every))
    if n:
        steps.add(n)

    return steps


def augment_rng(cfg, key):
    return Xoshiro256pp(cfg.seed).spawn("augment/%s" % key)


def run_adaptation(
    model,
    stream,
    adapt_cfg,
    rng,
    eval_set=None,
    steps=(),
    fixed=False,
    arm="dua",
    track=None,
):
    """Adapt ``model`` in place over ``stream``

    :param eval_set: Dataset evaluated before the first step and at every
        step of ``steps``, nothing is evaluated when None
    :param track: bn layer name whose running statistics are recorded
        after every step
    :rtype: ArmRun
    """
    start = time.time()
    adapter = DUAAdapter(model, adapt_cfg, rng=rng, fixed=fixed)
    record = ExperimentRecord(arm)
    trace, deltas = [], []
    if eval_set is not None:
        record.add(0, None, evaluate(model, eval_set), model.stats_digest())
    if track is not None:
        mean, var = model.bn(track).running_stats()
        previous = mean.copy()
        trace.append((0, track, 0, mean[0], var[0]))

    for k, sample in enumerate(stream, 1):
        result = adapter.step(sample[None])
        if track is not None:
            mean, var = model.bn(track).running_stats()
            deltas.append(float(np.linalg.norm(mean - previous)))
            previous = mean.copy()
            trace.append((k, track, 0, mean[0], var[0]))
        if eval_set is not None and k in steps:
            record.add(
                k,
                result.weight,
                evaluate(model, eval_set),
                model.stats_digest(),
            )
            logger.debug(
                "%s k=%d w_k=%r error=%.2f%%",
                arm,
                k,
                result.weight,
                record.final_error,
            )

    return ArmRun(
        record=record,
        model=model,
        trace=trace,
        deltas=deltas,
        wall_time=time.time() - start,
    )


def stability(deltas, after=SETTLE_AFTER):
    """Largest per step running mean change after step ``after``"""
    tail = deltas[after:]
    if not tail:
        return None

    return max(tail)


def settle_step(deltas, threshold):
    """First step from which every running mean change stays below
    ``threshold``, None when the last change is still above it
    """
    settled = None
    for k in range(len(deltas), 0, -1):
        if deltas[k - 1] >= threshold:
            break

        settled = k

    return settled


def expand_arms(cfg):
    arms = []
    for arm in cfg.arms:
        if arm == "norm":
            arms.extend("norm-%d" % size for size in cfg.norm_batch_sizes)
        else:
            arms.append(arm)

    return arms


def _log_arm(run):
    logger.info(
        "arm %r: final error %.2f%% (%.1fs)",
        run.record.arm,
        run.record.final_error,
        run.wall_time,
    )


@register("train")
def run_train(cfg, ctx=None):
    ctx = ctx or RunContext(cfg)
    result = train_model(cfg)
    ctx.artifacts.append(result.checkpoint)
    ctx.write_table(
        "train", ("epoch", "loss", "train_error_pct"), result.epochs
    )
    summary = {
        "checkpoint": result.checkpoint,
        "test_error_pct": result.test_error_pct,
    }
    ctx.write_json("summary.json", summary)
    return summary


@register("eval")
def run_eval(cfg, ctx=None):
    ctx = ctx or RunContext(cfg)
    model = ctx.source_model()
    split = ctx.test_split()
    spec = cfg.corruption_spec
    rows = [
        ("clean", "none", 0, evaluate(model, split.clean)),
        ("corrupted", spec.kind, spec.severity, evaluate(model, split.shifted)),
    ]
    ctx.write_table(
        "eval", ("split", "corruption", "severity", "error_pct"), rows
    )
    return {row[0]: row[3] for row in rows}


@register("adapt-curve")
def run_adapt_curve(cfg, ctx=None):
    """Error against the number of adaptation samples, for every arm

    :rtype: dict arm -> ExperimentRecord
    """
    ctx = ctx or RunContext(cfg)
    split = ctx.test_split()
    eval_set = split.eval_slice()
    n = cfg.n_adapt_samples
    stream = split.stream(n, cfg.seed, "0")
    steps = eval_steps(n, cfg.eval_every)
    source = ctx.source_model()
    track = last_bn_name(source)
    source_error = evaluate(source, eval_set)

    def constant_arm(arm, error):
        record = ExperimentRecord(arm)
        for k in [0] + sorted(steps):
            record.add(k, None, error)

        return ArmRun(record=record, model=None)

    def adapt_arm(arm):
        model = ctx.source_model()
        if arm == "source":
            run = constant_arm(arm, source_error)
            run.summary = {"full_error_pct": evaluate(model, split.shifted)}
        elif arm.startswith("norm-"):
            size = int(arm.split("-")[1])
            run = constant_arm(arm, norm_error(model, eval_set, size))
            run.summary = {
                "full_error_pct": norm_error(model, split.shifted, size)
            }
        else:
            run = run_adaptation(
                model,
                stream,
                cfg.adapt,
                augment_rng(cfg, "0"),
                eval_set=eval_set,
                steps=steps,
                fixed=arm == "fixed-momentum",
                arm=arm,
                track=track,
            )
            run.summary = {"full_error_pct": evaluate(model, split.shifted)}

        _log_arm(run)
        return run

    runs = ctx.run_arms(expand_arms(cfg), adapt_arm)
    main = runs.get("dua") or next(iter(runs.values()), None)
    if main is not None:
        ctx.write_table(
            "adapt_curve",
            ("k", "w_k", "error_pct"),
            [row[:3] for row in main.record.table()],
        )

    ctx.write_table(
        "arms",
        ("arm", "k", "w_k", "error_pct", "stats_hash"),
        [row for run in runs.values() for row in run.record.table(True)],
    )
    ctx.write_table(
        "trace",
        ("arm", "k", "layer", "channel", "running_mean", "running_var"),
        [
            (arm,) + row
            for arm, run in runs.items()
            for row in run.trace
        ],
    )
    ctx.write_json(
        "summary.json",
        {
            "source_error_pct": source_error,
            "samples_used": n,
            "arms": {
                arm: dict(
                    final_error_pct=run.record.final_error,
                    wall_time=run.wall_time,
                    **run.summary,
                )
                for arm, run in runs.items()
            },
        },
    )
    return {arm: run.record for arm, run in runs.items()}


def shuffle_runs(ctx, keys):
    """One adaptation per stream key from a fresh source copy

    :rtype: dict run id -> ExperimentRecord
    """
    cfg = ctx.cfg
    split = ctx.test_split()
    eval_set = split.eval_slice()
    n = cfg.n_adapt_samples
    steps = {k for k in STABILITY_CHECKPOINTS if k <= n}
    if n:
        steps.add(n)

    def shuffle_arm(arm):
        run_id, key = arm
        run = run_adaptation(
            ctx.source_model(),
            split.stream(n, cfg.seed, key),
            cfg.adapt,
            augment_rng(cfg, key),
            eval_set=eval_set,
            steps=steps,
            arm="run-%d" % run_id,
        )
        _log_arm(run)
        return run.record

    runs = ctx.run_arms(list(enumerate(keys)), shuffle_arm)
    return {run_id: record for (run_id, _), record in runs.items()}


@register("shuffle-stability")
def run_shuffle_stability(cfg, ctx=None, keys=None):
    """Mean and std of the error over independently shuffled streams

    :param keys: stream keys, one per run (``0 .. n_runs - 1`` by default)
    :rtype: dict k -> (mean, std)
    """
    ctx = ctx or RunContext(cfg)
    if keys is None:
        if cfg.n_runs < 2:
            raise ConfigException(
                "shuffle-stability needs n_runs >= 2, got %d" % cfg.n_runs
            )

        keys = [str(run_id) for run_id in range(cfg.n_runs)]

    records = shuffle_runs(ctx, keys)
    rows = [
        (run_id, row.k, row.error_pct)
        for run_id, record in sorted(records.items())
        for row in record.rows
    ]
    ctx.write_table("stability", ("run_id", "k", "error_pct"), rows)
    summary = {}
    for k in sorted({row[1] for row in rows}):
        summary[k] = mean_std([row[2] for row in rows if row[1] == k])

    ctx.write_table(
        "stability_summary",
        ("k", "mean_error_pct", "std_error_pct"),
        [(k,) + values for k, values in summary.items()],
    )
    return summary


def omega_schedule(cfg, omega):
    """Decaying schedule for ``omega``; ``omega = 1`` is the fixed
    momentum baseline, without floor
    """
    if omega == 1:
        return MomentumSchedule.fixed(cfg.rho0)

    return MomentumSchedule(cfg.rho0, omega, cfg.zeta)


@register("omega-sweep")
def run_omega_sweep(cfg, ctx=None):
    """Adaptation curve and trajectory stability for every omega

    :rtype: dict omega -> summary dict
    """
    ctx = ctx or RunContext(cfg)
    split = ctx.test_split()
    eval_set = split.eval_slice()
    n = cfg.n_adapt_samples
    stream = split.stream(n, cfg.seed, "0")
    steps = eval_steps(n, cfg.eval_every)
    source = ctx.source_model()
    track = last_bn_name(source)
    threshold = SETTLE_FRACTION * stat_shift_norm(
        source, eval_set.images, track
    )

    def omega_arm(omega):
        run = run_adaptation(
            ctx.source_model(),
            stream,
            cfg.adapt_config(schedule=omega_schedule(cfg, omega)),
            augment_rng(cfg, "0"),
            eval_set=eval_set,
            steps=steps,
            fixed=omega == 1,
            arm="omega=%g" % omega,
            track=track,
        )
        _log_arm(run)
        return run

    runs = ctx.run_arms(sorted(set(cfg.omegas)), omega_arm)
    ctx.write_table(
        "omega_curves",
        ("omega", "k", "w_k", "error_pct"),
        [
            (omega,) + row[:3]
            for omega, run in runs.items()
            for row in run.record.table()
        ],
    )
    ctx.write_table(
        "trace",
        ("arm", "k", "layer", "channel", "running_mean", "running_var"),
        [
            (run.record.arm,) + row
            for run in runs.values()
            for row in run.trace
        ],
    )
    summary = {
        omega: {
            "final_error_pct": run.record.final_error,
            "stability": stability(run.deltas),
            "threshold": threshold,
            "settle_k": settle_step(run.deltas, threshold),
        }
        for omega, run in runs.items()
    }
    ctx.write_table(
        "omega_sweep",
        ("omega", "final_error_pct", "stability", "threshold", "settle_k"),
        [
            (
                omega,
                values["final_error_pct"],
                values["stability"],
                values["threshold"],
                values["settle_k"],
            )
            for omega, values in summary.items()
        ],
    )
    return summary


def layer_masks(model):
    masks = [("none", ())]
    masks.extend((name, (name,)) for name in model.bn_names)
    masks.append(("all", None))
    return masks


@register("layer-ablation")
def run_layer_ablation(cfg, ctx=None):
    """Final error for every bn layer mask, one stream for all masks

    :rtype: dict mask name -> error %
    """
    ctx = ctx or RunContext(cfg)
    split = ctx.test_split()
    eval_set = split.eval_slice()
    n = cfg.n_adapt_samples
    stream = split.stream(n, cfg.seed, "0")
    masks = dict(layer_masks(ctx.source_model()))

    def mask_arm(name):
        run = run_adaptation(
            ctx.source_model(),
            stream,
            cfg.adapt_config(layer_mask=masks[name]),
            augment_rng(cfg, "0"),
            eval_set=eval_set,
            steps=eval_steps(n, max(n, 1)),
            arm="mask=%s" % name,
        )
        _log_arm(run)
        return run.record.final_error

    errors = ctx.run_arms(list(masks), mask_arm)
    ctx.write_table("layer_ablation", ("mask", "error_pct"), errors.items())
    return errors


@register("cycle")
def run_cycle(cfg, ctx=None):
    """Continuous adaptation over a schedule of clean and corrupted
    segments, the running statistics are never reset

    :rtype: list of ``(segment, domain, k, w_k, error %)``
    """
    ctx = ctx or RunContext(cfg)
    split = ctx.test_split()
    eval_sets = {
        "clean": split.eval_slice("clean"),
        "corrupt": split.eval_slice("corrupt"),
    }
    model = ctx.source_model()
    source_errors = {
        domain: evaluate(model, eval_set)
        for domain, eval_set in eval_sets.items()
    }
    adapter = DUAAdapter(model, cfg.adapt, rng=augment_rng(cfg, "cycle"))
    rows = []
    if cfg.cycle_segments:
        domain = cfg.cycle_segments[0][0]
        rows.append((0, domain, 0, None, source_errors[domain]))

    k = offset = 0
    for index, (domain, size) in enumerate(cfg.cycle_segments, 1):
        stream = split.stream(size, cfg.seed, "cycle", domain, offset)
        offset += size
        for position, sample in enumerate(stream, 1):
            k += 1
            result = adapter.step(sample[None])
            if position == size or not k % cfg.eval_every:
                error = evaluate(model, eval_sets[domain])
                rows.append((index, domain, k, result.weight, error))

        if size:
            logger.info(
                "segment %d (%s, %d samples): error %.2f%%",
                index,
                domain,
                size,
                rows[-1][4],
            )

    ctx.write_table(
        "cycle", ("segment", "domain", "k", "w_k", "error_pct"), rows
    )
    ctx.write_json(
        "summary.json",
        {
            "source_error_pct": source_errors,
            "segment_end_error_pct": [
                [index, domain, error]
                for index, domain, _, _, error in segment_ends(rows)
            ],
        },
    )
    return rows


def segment_ends(rows):
    """Last row of every segment"""
    ends = {}
    for row in rows[1:]:
        ends[row[0]] = row

    return [ends[index] for index in sorted(ends)]


@register("density")
def run_density(cfg, ctx=None):
    """Per channel histograms of the outputs of one bn layer

    Three distributions share the bins of each channel: clean data with
    the source statistics, shifted data with the source statistics and
    shifted data after adaptation.
    """
    ctx = ctx or RunContext(cfg)
    source = ctx.source_model()
    layer = cfg.density_layer or last_bn_name(source)
    source.bn(layer)
    split = ctx.test_split()
    clean = split.eval_slice("clean").images
    shifted = split.eval_slice("corrupt").images
    adapted = run_adaptation(
        ctx.source_model(),
        split.stream(cfg.n_adapt_samples, cfg.seed, "0"),
        cfg.adapt,
        augment_rng(cfg, "0"),
    ).model
    outputs = [
        bn_io(source, clean, layer)[1],
        bn_io(source, shifted, layer)[1],
        bn_io(adapted, shifted, layer)[1],
    ]
    rows, moments = [], []
    shift, residual, w1_shift, w1_residual = [], [], [], []
    for channel in range(outputs[0].shape[1]):
        values = [out[:, channel].ravel() for out in outputs]
        edges, counts = shared_histograms(values, cfg.density_bins)
        for index in range(cfg.density_bins):
            rows.append(
                (layer, channel, edges[index], edges[index + 1])
                + tuple(int(count[index]) for count in counts)
            )

        means = [float(v.mean()) for v in values]
        variances = [float(v.var()) for v in values]
        moments.append(
            (layer, channel)
            + tuple(x for pair in zip(means, variances) for x in pair)
        )
        shift.append(abs(means[1] - means[0]))
        residual.append(abs(means[2] - means[0]))
        w1_shift.append(wasserstein1(values[1], values[0]))
        w1_residual.append(wasserstein1(values[2], values[0]))

    ctx.write_table(
        "density",
        (
            "layer",
            "channel",
            "bin_lo",
            "bin_hi",
            "count_clean",
            "count_shift",
            "count_adapted",
        ),
        rows,
    )
    ctx.write_table(
        "density_moments",
        (
            "layer",
            "channel",
            "mean_clean",
            "var_clean",
            "mean_shift",
            "var_shift",
            "mean_adapted",
            "var_adapted",
        ),
        moments,
    )
    summary = {
        "layer": layer,
        "mean_abs_mean_shift": float(np.mean(shift)),
        "mean_abs_mean_shift_adapted": float(np.mean(residual)),
        "mean_w1_shift": float(np.mean(w1_shift)),
        "mean_w1_adapted": float(np.mean(w1_residual)),
    }
    ctx.write_json("summary.json", summary)
    return summary


@register("norm-baseline")
def run_norm_baseline(cfg, ctx=None):
    """NORM error for every recompute batch size and the whole slice"""
    ctx = ctx or RunContext(cfg)
    eval_set = ctx.test_split().eval_slice()
    sizes = sorted(set(cfg.norm_batch_sizes) | {len(eval_set)})

    def norm_arm(size):
        return norm_error(ctx.source_model(), eval_set, size)

    errors = ctx.run_arms(sizes, norm_arm)
    ctx.write_table(
        "norm_baseline", ("batch_size", "error_pct"), errors.items()
    )
    return errors


@register("batch-ablation")
def run_batch_ablation(cfg, ctx=None):
    """Final error for every batch size and augmentation set

    :rtype: dict (batch size, set name) -> error %
    """
    ctx = ctx or RunContext(cfg)
    split = ctx.test_split()
    eval_set = split.eval_slice()
    n = cfg.n_adapt_samples
    stream = split.stream(n, cfg.seed, "0")

    def cell(arm):
        size, name = arm
        run = run_adaptation(
            ctx.source_model(),
            stream,
            cfg.adapt_config(
                batch_size=size,
                augmentations=frozenset(AUGMENTATION_SETS[name]),
            ),
            augment_rng(cfg, "0"),
            eval_set=eval_set,
            steps=eval_steps(n, max(n, 1)),
            arm="B=%d/%s" % (size, name),
        )
        _log_arm(run)
        return run.record.final_error

    arms = [
        (size, name)
        for size in cfg.ablation_batch_sizes
        for name in AUGMENTATION_SETS
    ]
    errors = ctx.run_arms(arms, cell)
    ctx.write_table(
        "batch_ablation",
        ("batch_size", "augmentations", "error_pct"),
        [(size, name, error) for (size, name), error in errors.items()],
    )
    return errors


@register("corruption-table")
def run_corruption_table(cfg, ctx=None):
    """Source, NORM and DUA error for every corruption and severity

    :rtype: list of ``(corruption, severity, arm, error %)`` with a
        ``mean`` row per severity and arm
    """
    ctx = ctx or RunContext(cfg)
    n = cfg.n_adapt_samples

    def table_arm(arm):
        kind, severity = arm
        split = ctx.test_split(CorruptionSpec(kind, severity), cache=False)
        eval_set = split.eval_slice()
        model = ctx.source_model()
        errors = [("source", evaluate(model, eval_set))]
        errors.extend(
            ("norm-%d" % size, norm_error(model, eval_set, size))
            for size in cfg.norm_batch_sizes
        )
        run = run_adaptation(
            model,
            split.stream(n, cfg.seed, "0"),
            cfg.adapt,
            augment_rng(cfg, "0"),
            eval_set=eval_set,
            steps=eval_steps(n, max(n, 1)),
            arm="dua %s-%d" % arm,
        )
        errors.append(("dua", run.record.final_error))
        return errors

    arms = [
        (kind, severity)
        for severity in cfg.severities
        for kind in get_corruption_kinds()
    ]
    results = ctx.run_arms(arms, table_arm)
    rows = [
        (kind, severity, name, error)
        for (kind, severity), errors in results.items()
        for name, error in errors
    ]
    for severity in cfg.severities:
        names = [name for _, sev, name, _ in rows if sev == severity]
        for name in dict.fromkeys(names):
            values = [
                row[3] for row in rows if row[1] == severity and row[2] == name
            ]
            rows.append(("mean", severity, name, float(np.mean(values))))

    ctx.write_table(
        "corruption_table", ("corruption", "severity", "arm", "error_pct"), rows
    )
    return rows


def run_command(cfg):
    """Run ``cfg.command`` and return ``(context, result)``"""
    runner = get_runner(cfg.command)
    ctx = RunContext(cfg)
    logger.info("run %r into %r", cfg.command, cfg.output_dir)
    result = runner(cfg, ctx=ctx)
    if result is None:
        raise ExperimentException("%r produced nothing" % cfg.command)

    return ctx, result
