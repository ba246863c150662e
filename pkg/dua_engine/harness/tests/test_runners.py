# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
import json
import os
from csv import DictReader

import pytest

from dua_engine.harness.context import RunContext
from dua_engine.harness.exceptions import ConfigException
from dua_engine.harness.metrics import evaluate
from dua_engine.harness.runners import (
    RUNNERS,
    eval_steps,
    expand_arms,
    get_runner,
    run_adapt_curve,
    run_batch_ablation,
    run_command,
    run_corruption_table,
    run_cycle,
    run_density,
    run_eval,
    run_layer_ablation,
    run_norm_baseline,
    run_omega_sweep,
    run_shuffle_stability,
    run_train,
    settle_step,
    stability,
)
from dua_engine.harness.config import COMMANDS
from dua_engine.tensor.exceptions import ParameterException


def read_table(output_dir, name):
    path = os.path.join(output_dir, name + ".csv")
    with open(path, newline="") as fp:
        first = fp.readline()
        assert first.startswith("# config_hash=")
        return list(DictReader(fp))


def read_bytes(path):
    with open(path, "rb") as fp:
        return fp.read()


class TestHelpers:
    def test_every_command_has_a_runner(self):
        assert set(RUNNERS) == set(COMMANDS)

    def test_get_runner(self):
        assert get_runner("cycle") is run_cycle
        with pytest.raises(ConfigException):
            get_runner("fit")

    def test_eval_steps(self):
        assert eval_steps(5, 2) == {2, 4, 5}
        assert eval_steps(4, 4) == {4}
        assert eval_steps(0, 1) == set()

    def test_stability(self):
        assert stability([1.0] * 50) is None
        assert stability([5.0] * 50 + [0.2, 0.4, 0.1]) == 0.4

    def test_settle_step(self):
        assert settle_step([3.0, 2.0, 0.5, 0.2], 1.0) == 3
        assert settle_step([3.0, 2.0], 1.0) is None
        assert settle_step([0.5, 0.2], 1.0) == 1

    def test_expand_arms(self, make_config):
        cfg = make_config(arms=["source", "norm"], norm_batch_sizes=[16, 64])
        assert expand_arms(cfg) == ["source", "norm-16", "norm-64"]


class TestTrain:
    def test_train(self, make_config, source_checkpoint):
        cfg = make_config(command="train", checkpoint=None)
        summary = run_train(cfg)
        assert summary["checkpoint"] == os.path.join(
            cfg.output_dir, "source.dua"
        )
        assert 0 <= summary["test_error_pct"] <= 100
        assert read_bytes(summary["checkpoint"]) == read_bytes(
            source_checkpoint
        )
        rows = read_table(cfg.output_dir, "train")
        assert [row["epoch"] for row in rows] == ["1"]


class TestEval:
    def test_eval(self, make_config):
        cfg = make_config(command="eval")
        errors = run_eval(cfg)
        assert set(errors) == {"clean", "corrupted"}
        rows = read_table(cfg.output_dir, "eval")
        assert rows[1]["corruption"] == "gaussian_noise"
        assert rows[1]["severity"] == "5"


class TestAdaptCurve:
    @pytest.fixture(autouse=True)
    def init_run(self, make_config, source_checkpoint):
        self.checkpoint = read_bytes(source_checkpoint)
        self.cfg = make_config()
        self.records = run_adapt_curve(self.cfg)

    def test_arms(self):
        assert list(self.records) == [
            "source",
            "dua",
            "fixed-momentum",
            "norm-4",
            "norm-8",
        ]
        for record in self.records.values():
            assert [row.k for row in record.rows] == [0, 1, 2, 3, 4, 5]

    def test_weights(self):
        dua = self.records["dua"]
        assert dua.rows[0].w_k is None
        assert dua.rows[1].w_k == pytest.approx(0.099)
        weights = [row.w_k for row in dua.rows[1:]]
        assert weights == sorted(weights, reverse=True)
        fixed = self.records["fixed-momentum"]
        assert {row.w_k for row in fixed.rows[1:]} == {0.1}

    def test_constant_arms(self):
        for arm in ("source", "norm-4", "norm-8"):
            errors = {row.error_pct for row in self.records[arm].rows}
            assert len(errors) == 1

    def test_statistics_move(self):
        dua = self.records["dua"]
        assert dua.rows[0].stats_hash != dua.rows[-1].stats_hash
        assert dua.rows[0].error_pct == self.records["source"].final_error

    def test_checkpoint_untouched(self, source_checkpoint):
        assert read_bytes(source_checkpoint) == self.checkpoint

    def test_tables(self):
        rows = read_table(self.cfg.output_dir, "adapt_curve")
        assert list(rows[0]) == ["k", "w_k", "error_pct"]
        assert [row["k"] for row in rows] == ["0", "1", "2", "3", "4", "5"]
        assert rows[0]["w_k"] == ""
        trace = read_table(self.cfg.output_dir, "trace")
        assert {row["arm"] for row in trace} == {"dua", "fixed-momentum"}
        assert {row["layer"] for row in trace} == {"bn3"}

    def test_summary(self):
        path = os.path.join(self.cfg.output_dir, "summary.json")
        with open(path) as fp:
            summary = json.load(fp)

        assert summary["samples_used"] == 5
        assert set(summary["arms"]["dua"]) == {
            "final_error_pct",
            "wall_time",
            "full_error_pct",
        }

    def test_rerun_same_bytes(self):
        tables = ("adapt_curve", "arms", "trace")
        before = {
            name: read_bytes(os.path.join(self.cfg.output_dir, name + ".csv"))
            for name in tables
        }
        run_adapt_curve(self.cfg)
        for name in tables:
            path = os.path.join(self.cfg.output_dir, name + ".csv")
            assert read_bytes(path) == before[name]

    def test_workers_same_rows(self, make_config, tmp_path):
        cfg = make_config(workers=4, output_dir=str(tmp_path / "threads"))
        run_adapt_curve(cfg)
        for name in ("arms", "trace"):
            assert read_table(cfg.output_dir, name) == read_table(
                self.cfg.output_dir, name
            )

    def test_no_sample(self, make_config, tmp_path):
        cfg = make_config(n_adapt_samples=0, output_dir=str(tmp_path / "n0"))
        records = run_adapt_curve(cfg)
        source = records["source"].final_error
        assert [row.k for row in records["dua"].rows] == [0]
        assert records["dua"].final_error == source


class TestShuffleStability:
    def test_summary(self, make_config):
        cfg = make_config(command="shuffle-stability")
        summary = run_shuffle_stability(cfg)
        assert sorted(summary) == [0, 5]
        mean, std = summary[0]
        assert std == 0.0
        rows = read_table(cfg.output_dir, "stability")
        assert {row["run_id"] for row in rows} == {"0", "1"}
        assert list(rows[0]) == ["run_id", "k", "error_pct"]

    def test_identical_streams(self, make_config):
        summary = run_shuffle_stability(make_config(), keys=["a", "a"])
        for _, std in summary.values():
            assert std == 0.0

    def test_single_run(self, make_config):
        with pytest.raises(ConfigException):
            run_shuffle_stability(make_config(n_runs=1))


class TestOmegaSweep:
    def test_sweep(self, make_config):
        cfg = make_config(command="omega-sweep")
        summary = run_omega_sweep(cfg)
        assert sorted(summary) == [0.5, 1.0]
        assert summary[1.0]["threshold"] > 0
        assert summary[0.5]["stability"] is None
        rows = read_table(cfg.output_dir, "omega_curves")
        fixed = [row["w_k"] for row in rows if row["omega"] == "1"]
        assert fixed == ["", "0.1", "0.1", "0.1", "0.1", "0.1"]
        assert len(read_table(cfg.output_dir, "omega_sweep")) == 2


class TestLayerAblation:
    def test_masks(self, make_config):
        cfg = make_config(command="layer-ablation")
        ctx = RunContext(cfg)
        errors = run_layer_ablation(cfg, ctx=ctx)
        assert list(errors) == ["none", "bn1", "bn2", "bn3", "all"]
        source = evaluate(ctx.source_model(), ctx.test_split().eval_slice())
        assert errors["none"] == source
        assert len(read_table(cfg.output_dir, "layer_ablation")) == 5


class TestCycle:
    def test_cycle(self, make_config):
        cfg = make_config(command="cycle")
        rows = run_cycle(cfg)
        assert rows[0][:4] == (0, "clean", 0, None)
        assert [row[2] for row in rows] == list(range(10))
        assert [row[1] for row in rows[1:]] == (
            ["clean"] * 3 + ["corrupt"] * 4 + ["clean"] * 2
        )
        with open(os.path.join(cfg.output_dir, "summary.json")) as fp:
            ends = json.load(fp)["segment_end_error_pct"]

        assert [end[:2] for end in ends] == [
            [1, "clean"],
            [2, "corrupt"],
            [3, "clean"],
        ]

    def test_eval_every(self, make_config):
        rows = run_cycle(make_config(eval_every=3))
        assert [row[2] for row in rows] == [0, 3, 6, 7, 9]

    def test_empty_schedule(self, make_config):
        assert run_cycle(make_config(cycle_segments=[])) == []


class TestDensity:
    def test_density(self, make_config):
        cfg = make_config(command="density")
        summary = run_density(cfg)
        assert summary["layer"] == "bn3"
        rows = read_table(cfg.output_dir, "density")
        moments = read_table(cfg.output_dir, "density_moments")
        assert len(rows) == len(moments) * cfg.density_bins
        assert list(rows[0]) == [
            "layer",
            "channel",
            "bin_lo",
            "bin_hi",
            "count_clean",
            "count_shift",
            "count_adapted",
        ]
        totals = {}
        for row in rows:
            counts = totals.setdefault(row["channel"], [0, 0, 0])
            for index, name in enumerate(
                ("count_clean", "count_shift", "count_adapted")
            ):
                counts[index] += int(row[name])

        for counts in totals.values():
            assert counts[0] == counts[1] == counts[2] > 0

    def test_named_layer(self, make_config):
        summary = run_density(make_config(density_layer="bn1"))
        assert summary["layer"] == "bn1"

    def test_unknown_layer(self, make_config):
        with pytest.raises(ParameterException):
            run_density(make_config(density_layer="bn9"))


class TestNormBaseline:
    def test_sizes(self, make_config):
        errors = run_norm_baseline(make_config(command="norm-baseline"))
        assert sorted(errors) == [4, 8, 20]
        for error in errors.values():
            assert 0 <= error <= 100


class TestBatchAblation:
    def test_grid(self, make_config):
        cfg = make_config(command="batch-ablation")
        errors = run_batch_ablation(cfg)
        assert len(errors) == 10
        assert (1, "none") in errors
        assert (4, "all") in errors
        rows = read_table(cfg.output_dir, "batch_ablation")
        assert {row["augmentations"] for row in rows} == {
            "none",
            "hflip",
            "crop",
            "rot90s",
            "all",
        }


class TestCorruptionTable:
    def test_table(self, make_config):
        cfg = make_config(command="corruption-table", n_adapt_samples=2)
        rows = run_corruption_table(cfg)
        assert len(rows) == 6 * 4 + 4
        means = [row for row in rows if row[0] == "mean"]
        assert [row[2] for row in means] == [
            "source",
            "norm-4",
            "norm-8",
            "dua",
        ]
        source = [row[3] for row in rows[:-4] if row[2] == "source"]
        assert means[0][3] == pytest.approx(sum(source) / 6)


class TestRunCommand:
    def test_run_command(self, make_config):
        cfg = make_config(command="norm-baseline", export_format=["json"])
        ctx, errors = run_command(cfg)
        names = sorted(os.path.basename(path) for path in ctx.artifacts)
        assert names == [
            "norm_baseline.csv",
            "norm_baseline.json",
            "severity_manifest.json",
        ]
        assert sorted(errors) == [4, 8, 20]
