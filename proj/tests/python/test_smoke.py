# Copyright 2026 The amfkit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import os
import random
import subprocess

import pytest

import amfkit


def test_scalar_losses():
    loss, grad = amfkit.focal_loss([0.0], [1.0], gamma=2.0, pos_weight=1.0)
    assert abs(loss - 0.25 * math.log(2.0)) < 1e-12
    assert len(grad) == 1 and grad[0] < 0.0
    assert amfkit.dynamic_pos_weight([1.0, 0.0, 0.0, 0.0]) == 3.0


def test_metrics_against_pair_counting():
    assert abs(amfkit.balanced_accuracy(0.929, 0.880) - 0.9045) < 1e-12
    assert amfkit.auc([0.8, 0.4, 0.6, 0.2], [1, 1, 0, 0]) == 0.75
    assert amfkit.auc([0.1, 0.2], [1, 1]) is None

    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(2, 60)
        s = [rng.randint(0, 4) / 4 for _ in range(n)]
        y = [rng.randint(0, 1) for _ in range(n)]
        y[0], y[1] = 1, 0
        pos = [a for a, c in zip(s, y) if c == 1]
        neg = [b for b, c in zip(s, y) if c == 0]
        wins = sum(1.0 if a > b else 0.5 if a == b else 0.0 for a in pos for b in neg)
        assert amfkit.auc(s, y) == wins / (len(pos) * len(neg))

    report = amfkit.compute_report([0.9, 0.2, 0.6], [1, 1, 1])
    assert report["ba"] is None
    assert report["amf_recall"] == pytest.approx(2.0 / 3.0)


def test_synthetic_census_and_split():
    table = amfkit.generate_synthetic(seed=7)
    assert len(table) == 12000
    assert "all,12000,1776,10224,0.1480" in table.census()
    train_ids, monitor_ids = amfkit.stratified_split(table, 0.05, seed=1)
    assert len(train_ids) + len(monitor_ids) == 12000
    assert not set(train_ids) & set(monitor_ids)
    folds = amfkit.lodo_folds(table)
    assert [f[0] for f in folds] == sorted(table.domains)


def test_mining_and_validation_errors():
    e = [[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]
    pos, neg = amfkit.ms_mine(e, [1, 1, 0], 0.1)
    assert pos[0] == [1] and neg[0] == [2]
    with pytest.raises(amfkit.ValidationError):
        amfkit.ms_mine([[2.0, 0.0]], [1], 0.1)
    with pytest.raises(ValueError):
        amfkit.focal_loss([0.0], [1.5])


def test_gradcheck_and_training():
    assert all(c["passed"] and c["configurations"] == 2 for c in amfkit.gradcheck(seed=2, trials=2))

    table = amfkit.generate_synthetic(seed=3, domain_sizes=[200, 160], prevalence=[0.2, 0.25], feature_dim=6)
    overrides = {"train.epochs_max": "4", "train.hidden_dims": "16", "train.monitor_fraction": "0.1"}
    a = amfkit.train(table, "[run]\nseed = 5\n", overrides)
    b = amfkit.train(table, "[run]\nseed = 5\n", overrides)
    assert a["checkpoint"] == b["checkpoint"]
    assert a["epochs_csv"] == b["epochs_csv"]
    assert 1 <= a["best_epoch"] <= a["epochs_run"] <= 4
    assert a["monitor"]["ba"] == a["best_monitor_ba"]
    with pytest.raises(amfkit.ValidationError, match="focal.gamma"):
        amfkit.train(table, "", {"focal.gamma": "-1"})


def test_cli_exit_codes(tmp_path):
    cli = os.environ.get("AMFKIT_CLI")
    if not cli:
        pytest.skip("AMFKIT_CLI not set")
    ok = subprocess.run([cli, "gradcheck", "--trials", "1"], capture_output=True, text=True)
    assert ok.returncode == 0 and ok.stdout.count("PASS ") == 4
    bad = subprocess.run([cli, "gradcheck", "--trials", "1", "--corrupt"], capture_output=True, text=True)
    assert bad.returncode == 2
    invalid = subprocess.run([cli, "train", "-o", str(tmp_path), "--focal.gamma=-1"], capture_output=True, text=True)
    assert invalid.returncode == 1 and "focal.gamma" in invalid.stderr
