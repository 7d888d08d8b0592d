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

import collections
import csv
import json

import jsonschema
import numpy as np

from rally.common import cfg
from rally.common import logging

from rally_doa.common import opts  # noqa: F401
from rally_doa.common import utils
from rally_doa.metrics import errors as doa_errors
from rally_doa import exceptions

CONF = cfg.CONF
LOG = logging.getLogger(__name__)

METRIC_FIELDS = ("miss_prob", "ospa_linear", "ospa_square",
                 "rmse_raw", "rmse_matched", "mae_raw", "mae_matched",
                 "acc_raw", "acc_matched",
                 "ecdf_q10_raw", "ecdf_q90_raw",
                 "ecdf_q10_matched", "ecdf_q90_matched")

_number = {"type": "number", "minimum": 0}
_fraction = {"type": "number", "minimum": 0, "maximum": 1}

REPORT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": list(METRIC_FIELDS) + ["trial_count", "method", "scenario",
                                       "seed", "config_hash"],
    "properties": dict(
        [(name, _fraction if name.startswith(("acc_", "miss_"))
          else _number) for name in METRIC_FIELDS]
        + [("trial_count", {"type": "integer", "minimum": 1}),
           ("method", {"enum": ["transdoa", "music"]}),
           ("scenario", {"type": "string"}),
           ("seed", {"type": "integer", "minimum": 0}),
           ("config_hash", {"type": "string",
                            "pattern": "^[0-9a-f]{64}$"})])
}


class MetricsReport(collections.namedtuple("MetricsReport",
                                           METRIC_FIELDS + ("trial_count",))):
    """Pooled evaluation metrics of one estimator over many trials."""

    def to_dict(self):
        data = dict((name, float(getattr(self, name)))
                    for name in METRIC_FIELDS)
        data["trial_count"] = int(self.trial_count)
        return data


class TrialResult(object):
    """Truth, estimates and per-source errors of one trial."""

    def __init__(self, truth, est, miss, cap):
        self.truth = doa_errors.as_angle_set(truth)
        self.est = doa_errors.as_angle_set(est, dims=self.truth.shape[0])
        self.miss = bool(miss)
        self.matched = doa_errors.match_errors(self.truth, self.est, cap)
        self.raw = doa_errors.raw_errors(self.truth, self.est, cap)
        self.ospa_linear = doa_errors.ospa(self.truth, self.est, cap, p=1)
        self.ospa_square = doa_errors.ospa(self.truth, self.est, cap, p=2)


def score_trials(truth_batch, est_batch, miss_flags=None, cap=None):
    if len(truth_batch) == 0:
        raise exceptions.EmptyInput(message="no trials to evaluate")
    if len(truth_batch) != len(est_batch):
        raise exceptions.DimensionMismatch(
            "%d truth sets for %d estimate sets" % (len(truth_batch),
                                                    len(est_batch)))
    if miss_flags is None:
        miss_flags = [doa_errors.as_angle_set(e).shape[-1]
                      < doa_errors.as_angle_set(t).shape[-1]
                      for t, e in zip(truth_batch, est_batch)]
    elif len(miss_flags) != len(truth_batch):
        raise exceptions.DimensionMismatch(
            "%d miss flags for %d trials" % (len(miss_flags),
                                             len(truth_batch)))
    return [TrialResult(t, e, m, cap)
            for t, e, m in zip(truth_batch, est_batch, miss_flags)]


def summarize(trials, tolerance=None):
    tolerance = CONF.doa.tolerance if tolerance is None else tolerance
    raw = np.concatenate([t.raw for t in trials])
    matched = np.concatenate([t.matched for t in trials])

    def rmse(e):
        return float(np.sqrt(np.mean(e ** 2)))

    return MetricsReport(
        miss_prob=float(np.mean([t.miss for t in trials])),
        ospa_linear=float(np.mean([t.ospa_linear for t in trials])),
        ospa_square=float(np.mean([t.ospa_square for t in trials])),
        rmse_raw=rmse(raw),
        rmse_matched=rmse(matched),
        mae_raw=float(np.mean(raw)),
        mae_matched=float(np.mean(matched)),
        acc_raw=float(np.mean(raw <= tolerance)),
        acc_matched=float(np.mean(matched <= tolerance)),
        ecdf_q10_raw=doa_errors.ecdf_quantile(raw, 0.1),
        ecdf_q90_raw=doa_errors.ecdf_quantile(raw, 0.9),
        ecdf_q10_matched=doa_errors.ecdf_quantile(matched, 0.1),
        ecdf_q90_matched=doa_errors.ecdf_quantile(matched, 0.9),
        trial_count=len(trials))


def compute_report(truth_batch, est_batch, miss_flags=None, cap=None,
                   tolerance=None):
    """Pool per-source errors over trials into a MetricsReport.

    :param truth_batch: per trial, true angles (K,) or (dims, K)
    :param est_batch: per trial, estimates with at most K entries
    :param miss_flags: per-trial miss flags; derived from the estimate
        count when omitted
    :param cap: error cap and OSPA cutoff, degrees
    :param tolerance: accuracy tolerance, degrees
    """
    return summarize(score_trials(truth_batch, est_batch, miss_flags, cap),
                     tolerance)


def report_document(report, method, scenario, seed, config):
    doc = report.to_dict()
    doc.update(method=method, scenario=scenario, seed=int(seed),
               config_hash=utils.config_hash(config))
    validate_report(doc)
    return doc


def validate_report(doc):
    try:
        jsonschema.validate(doc, REPORT_SCHEMA)
    except jsonschema.ValidationError as e:
        raise exceptions.ContractError(
            message="report does not match its schema: %s" % e.message)


def sidecar_path(path):
    return path + ".config.json"


def write_report(path, doc, config):
    """Write the report and its resolved configuration next to it."""
    with utils.open_output(path) as f:
        f.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    with utils.open_output(sidecar_path(path)) as f:
        f.write(json.dumps(config, sort_keys=True, indent=2) + "\n")
    LOG.info("Report written to %s" % path)


def write_trials_csv(path, trials):
    """One row per trial: truth angles, estimates, matched errors."""
    with utils.open_output(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["trial", "truth", "estimate", "matched_errors",
                         "miss"])
        for i, t in enumerate(trials):
            writer.writerow([
                i,
                " ".join("%.6f" % v for v in t.truth.reshape(-1)),
                " ".join("%.6f" % v for v in t.est.reshape(-1)),
                " ".join("%.6f" % v for v in t.matched),
                int(t.miss)])
