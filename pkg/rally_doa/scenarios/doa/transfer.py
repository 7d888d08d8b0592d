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

"""Scenarios for calibrating an ideal-array model to an imperfect array."""

import numpy as np

from rally.task import scenario
from rally.task import validation

from rally_doa.common import utils
from rally_doa.model import checkpoint as doa_checkpoint
from rally_doa.scenarios.doa import common as common_scenario
from rally_doa.services.doa import doa as doa_service
from rally_doa.transfer import calibration
from rally_doa import validators


class BaseTransferScenario(common_scenario.BaseDoaScenario):
    """The context train set is the ideal source domain; val and test are
    the imperfect target domain.
    """

    def source_model(self, rc, source_checkpoint=None):
        if source_checkpoint:
            return doa_checkpoint.load_checkpoint(source_checkpoint)
        ideal = self.dataset("train")
        held_out = max(1, len(ideal) // 10)
        order = np.arange(len(ideal))
        source, _ = self.service.train(
            config=rc.model_config(), train_set=ideal.take(order[held_out:]),
            val_set=ideal.take(order[:held_out]),
            train_config=rc.train_config(), seed=rc.seed,
            meta={"preset": rc.preset, "domain": "ideal"})
        return source


@validation.add("doa_map_keys", **validators.FLAG_KEYS)
@validation.add("required_doa_datasets", roles=["train", "val", "test"])
@validation.add("doa_ideal_source")
@scenario.configure(name="DOA.calibrate_with_transfer")
class CalibrateWithTransfer(BaseTransferScenario):

    def run(self, samples, source_checkpoint=None, alpha=None, beta=None,
            epochs=None, head_policy=None, tolerance=None):
        """Align the feature extractor with N imperfect samples and score.

        :param samples: number of labelled imperfect samples used
        :param source_checkpoint: DOAW file of a model trained on ideal
               data; trained on the context train set when omitted
        :param alpha: weight of the cosine alignment term
        :param beta: weight of the MSE alignment term
        :param epochs: alignment epoch budget
        :param head_policy: ReuseSourceHead or FineTuneHead
        :param tolerance: accuracy tolerance, degrees
        """
        rc = self.run_config(transfer={"alpha": alpha, "beta": beta,
                                       "epochs": epochs,
                                       "head_policy": head_policy})
        source = self.source_model(rc, source_checkpoint)
        target = self.dataset("val")
        paired = self.service.make_pairs(
            target=calibration.select_samples(target, samples),
            scenario=rc.scenario(), seed=utils.role_seed(rc.seed, "pairs"))
        calibrated, history = self.service.transfer(
            source=source, paired=paired,
            transfer_config=rc.transfer_config(), seed=rc.seed)
        test = self.dataset("test")
        before, _ = self.service.evaluate(method=doa_service.TRANSDOA,
                                          dataset=test,
                                          checkpoint=source,
                                          tolerance=tolerance)
        after, _ = self.service.evaluate(method=doa_service.TRANSDOA,
                                         dataset=test,
                                         checkpoint=calibrated,
                                         tolerance=tolerance)
        self.add_curve_output("Alignment loss", history)
        self.add_metrics_output("Source model", before)
        self.add_metrics_output("Calibrated model", after)


@validation.add("doa_map_keys", **validators.FLAG_KEYS)
@validation.add("required_doa_datasets", roles=["train", "val", "test"])
@validation.add("doa_ideal_source")
@scenario.configure(name="DOA.compare_transfer_arms")
class CompareTransferArms(BaseTransferScenario):

    def run(self, sample_counts=None, source_checkpoint=None):
        """Matched RMSE of every calibration arm over a grid of N.

        :param sample_counts: grid of labelled imperfect sample counts;
               values above the size of the val set are dropped
        :param source_checkpoint: DOAW file of a model trained on ideal data
        """
        rc = self.run_config()
        source = self.source_model(rc, source_checkpoint)
        pool = self.dataset("val")
        counts = [n for n in (sample_counts
                              or calibration.DEFAULT_SAMPLE_GRID)
                  if n <= len(pool)]
        rows = self.service.compare(source, pool, rc.scenario(),
                                    self.dataset("test"), counts,
                                    rc.transfer_config(), rc.train_config(),
                                    rc.seed)
        self.add_output(
            complete={"title": "Matched RMSE by labelled sample count",
                      "chart_plugin": "Lines",
                      "data": [[arm, [[row.samples, getattr(row, arm)]
                                      for row in rows]]
                               for arm in ("source", "direct", "finetune",
                                           "transfer")],
                      "label": "Matched RMSE, deg",
                      "axis_label": "Labelled samples"})
