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

from rally.task import scenario
from rally.task import validation

from rally_doa.scenarios.doa import common as common_scenario
from rally_doa.services.doa import doa as doa_service
from rally_doa import validators


@validation.add("doa_map_keys", **validators.FLAG_KEYS)
@validation.add("required_doa_datasets", roles=["train", "val", "test"])
@scenario.configure(name="DOA.train_and_evaluate")
class TrainAndEvaluate(common_scenario.BaseDoaScenario):

    def run(self, epochs=None, batch_size=None, learning_rate=None,
            tolerance=None):
        """Train a TransDOA model on the context datasets and score it.

        :param epochs: override of the preset epoch budget
        :param batch_size: override of the preset mini-batch size
        :param learning_rate: override of the preset Adam step size
        :param tolerance: accuracy tolerance, degrees
        """
        rc = self.run_config(training={"epochs": epochs,
                                        "batch_size": batch_size,
                                        "learning_rate": learning_rate})
        checkpoint, history = self.service.train(
            config=rc.model_config(), train_set=self.dataset("train"),
            val_set=self.dataset("val"), train_config=rc.train_config(),
            seed=rc.seed, meta={"preset": rc.preset})
        report, _ = self.service.evaluate(method=doa_service.TRANSDOA,
                                          dataset=self.dataset("test"),
                                          checkpoint=checkpoint,
                                          tolerance=tolerance)
        self.add_curve_output("Validation loss", history)
        self.add_metrics_output("TransDOA", report)


@validation.add("doa_map_keys", **validators.FLAG_KEYS)
@validation.add("required_doa_datasets", roles=["test"])
@scenario.configure(name="DOA.evaluate_music")
class EvaluateMusic(common_scenario.BaseDoaScenario):

    def run(self, grid_step=None, grid_step_theta=None, grid_step_phi=None,
            tolerance=None):
        """Score the MUSIC baseline on the context test set.

        :param grid_step: 1D search grid step, degrees
        :param grid_step_theta: 2D azimuth grid step, degrees
        :param grid_step_phi: 2D elevation grid step, degrees
        :param tolerance: accuracy tolerance, degrees
        """
        steps = dict((k, v) for k, v in (("grid_step", grid_step),
                                         ("grid_step_theta", grid_step_theta),
                                         ("grid_step_phi", grid_step_phi))
                     if v is not None)
        report, _ = self.service.evaluate(
            method=doa_service.MUSIC, dataset=self.dataset("test"),
            scenario=self.run_config().scenario(), grid_steps=steps,
            tolerance=tolerance)
        self.add_metrics_output("MUSIC", report)
