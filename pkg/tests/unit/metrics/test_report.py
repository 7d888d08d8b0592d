# All Rights Reserved.
#
#    Licensed under the Apache License, Version 2.0 (the "License"); you may
#    not use this file except in compliance with the License. You may obtain
#    a copy of the License at
#
#         http://www.apache.org/licenses/LICENSE-2.0
#
#    Unless required by applicable law or agreed to in writing, software
#    distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#    WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#    License for the specific language governing permissions and limitations
#    under the License.

import json

import numpy as np
import pytest

from rally_doa.metrics import report as doa_report
from rally_doa import exceptions


def test_perfect_estimator():
    truth = [[0.0, 10.0], [-5.0, 40.0]]
    report = doa_report.compute_report(truth, truth)
    for name in doa_report.METRIC_FIELDS:
        if name.startswith("acc_"):
            assert getattr(report, name) == 1.0
        else:
            assert getattr(report, name) == 0.0
    assert report.trial_count == 2


def test_single_trial_example():
    report = doa_report.compute_report([[0.0, 10.0]], [[11.0, -1.0]])
    assert report.rmse_matched == pytest.approx(1.0)
    assert report.mae_matched == pytest.approx(1.0)
    assert report.acc_matched == 1.0
    assert report.miss_prob == 0.0


def test_misses_and_tolerance():
    truth = [[0.0, 10.0], [0.0, 10.0]]
    est = [[0.0], [12.0, -15.0]]
    report = doa_report.compute_report(truth, est, tolerance=5.0)
    assert report.miss_prob == 0.5
    # matched errors pooled: 0, 30, 2, 15
    assert report.mae_matched == pytest.approx(47.0 / 4)
    assert report.acc_matched == 0.5
    assert report.ecdf_q90_matched == 30.0


def test_explicit_miss_flags():
    report = doa_report.compute_report([[1.0]], [[1.0]], miss_flags=[True])
    assert report.miss_prob == 1.0
    with pytest.raises(exceptions.DimensionMismatch):
        doa_report.compute_report([[1.0]], [[1.0]], miss_flags=[])


def test_report_invariants():
    rng = np.random.default_rng(0)
    truth = rng.uniform(-60, 60, (50, 3))
    est = truth + rng.normal(0, 8, (50, 3))
    report = doa_report.compute_report(list(truth), list(est))
    assert report.mae_raw <= report.rmse_raw
    assert report.mae_matched <= report.rmse_matched
    assert report.ecdf_q10_raw <= report.ecdf_q90_raw
    for name in doa_report.METRIC_FIELDS:
        assert getattr(report, name) <= 30.0


def test_empty_and_misaligned_batches():
    with pytest.raises(exceptions.EmptyInput):
        doa_report.compute_report([], [])
    with pytest.raises(exceptions.DimensionMismatch):
        doa_report.compute_report([[1.0]], [])


def test_document_carries_run_identity():
    report = doa_report.compute_report([[0.0]], [[1.0]])
    doc = doa_report.report_document(report, "music", "scen1", 3,
                                     {"seed": 3})
    assert set(doc) == set(doa_report.REPORT_SCHEMA["required"])
    assert doc["method"] == "music" and doc["seed"] == 3
    assert len(doc["config_hash"]) == 64


def test_document_rejects_unknown_method():
    report = doa_report.compute_report([[0.0]], [[1.0]])
    with pytest.raises(exceptions.ContractError):
        doa_report.report_document(report, "esprit", "scen1", 0, {})


def test_written_files(tmp_path):
    trials = doa_report.score_trials([[0.0, 10.0]], [[1.0]])
    doc = doa_report.report_document(doa_report.summarize(trials),
                                     "transdoa", "scen1", 0, {"a": 1})
    path = str(tmp_path / "out" / "report.json")
    doa_report.write_report(path, doc, {"a": 1})
    with open(path) as f:
        assert json.load(f) == doc
    with open(doa_report.sidecar_path(path)) as f:
        assert json.load(f) == {"a": 1}

    csv_path = str(tmp_path / "trials.csv")
    doa_report.write_trials_csv(csv_path, trials)
    with open(csv_path) as f:
        lines = f.read().splitlines()
    assert lines == ["trial,truth,estimate,matched_errors,miss",
                     "0,0.000000 10.000000,1.000000,1.000000 30.000000,1"]
