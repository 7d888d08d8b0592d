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

from rally.common import logging
from rally.task import atomic
from rally.task import service

from rally_doa.array import dataset as doa_dataset
from rally_doa.array import imperfections
from rally_doa.metrics import report as doa_report
from rally_doa.model import checkpoint as doa_checkpoint
from rally_doa.model import trainer
from rally_doa.model import transdoa
from rally_doa.music import music
from rally_doa.transfer import calibration
from rally_doa.transfer import pairs
from rally_doa import exceptions

LOG = logging.getLogger(__name__)

TRANSDOA = "transdoa"
MUSIC = "music"
METHODS = (TRANSDOA, MUSIC)


class DoaService(service.Service):
    """Pipeline steps of the DOA toolkit, each under an atomic timer."""

    def __init__(self, name_generator=None, atomic_inst=None):
        super(DoaService, self).__init__(None,
                                         name_generator=name_generator,
                                         atomic_inst=atomic_inst)

    @atomic.action_timer("doa.generate_dataset")
    def generate_dataset(self, scenario, imp, count, seed, output_path=None):
        """Simulate a labelled SCM dataset.

        :param scenario: SignalScenario
        :param imp: ImperfectionSpec or None for the ideal array
        :param count: number of records
        :param seed: run seed
        :param output_path: DOA1 file to write
        """
        LOG.info("Generating %d records of %s (rho=%s, seed=%s)"
                 % (count, scenario.name, 0.0 if imp is None else imp.rho,
                    seed))
        return doa_dataset.generate_dataset(scenario, imp, count, seed,
                                            output_path)

    @atomic.action_timer("doa.make_pairs")
    def make_pairs(self, target, scenario, seed, output_path=None):
        paired = pairs.make_pairs(target, scenario, seed)
        if output_path:
            paired.save(output_path)
        return paired

    @atomic.action_timer("doa.train")
    def train(self, config, train_set, val_set, train_config, seed,
              on_epoch=None, meta=None):
        """Train a fresh model; returns (Checkpoint, history)."""
        params = transdoa.init_params(config, seed)
        params, history = trainer.train(config, params, train_set, val_set,
                                        train_config, seed,
                                        on_epoch=on_epoch)
        blob = dict(meta or {})
        blob.update(training=train_config.to_dict(), seed=int(seed))
        return doa_checkpoint.Checkpoint(config, params, blob), history

    @atomic.action_timer("doa.transfer")
    def transfer(self, source, paired, transfer_config, seed,
                 on_epoch=None):
        return calibration.transfer_train(source, paired, transfer_config,
                                          seed, on_epoch=on_epoch)

    @atomic.action_timer("doa.finetune")
    def finetune(self, source, dataset, train_config, seed, on_epoch=None):
        return calibration.finetune_baseline(source, dataset, train_config,
                                             seed, on_epoch=on_epoch)

    @atomic.action_timer("doa.direct_train")
    def direct_train(self, config, dataset, train_config, seed,
                     on_epoch=None):
        return calibration.direct_train_baseline(config, dataset,
                                                 train_config, seed,
                                                 on_epoch=on_epoch)

    @atomic.action_timer("doa.estimate")
    def estimate(self, method, dataset, checkpoint=None, scenario=None,
                 grid_steps=None):
        """Run an estimator over every record.

        :returns: (list of (dims, k) estimates, list of miss flags)
        """
        if method == TRANSDOA:
            if checkpoint is None:
                raise exceptions.InvalidArgument(
                    "transdoa evaluation needs a checkpoint")
            config = checkpoint.config
            dataset.check_model(config.element_count, config.source_count,
                                config.label_dims)
            est = checkpoint.model.predict(dataset.scms)
            return list(est), [False] * len(dataset)
        if method == MUSIC:
            if scenario is None:
                raise exceptions.InvalidArgument(
                    "MUSIC evaluation needs the scenario geometry")
            if scenario.geometry.kind != dataset.kind or \
                    scenario.geometry.element_count != dataset.element_count:
                raise exceptions.InvalidGeometry(
                    operation="music", expected=scenario.geometry.kind,
                    actual="%s(M=%d)" % (dataset.kind,
                                         dataset.element_count))
            estimator = music.MusicEstimator(
                scenario.geometry,
                music.MusicConfig(dataset.source_count, scenario.fov,
                                  **(grid_steps or {})))
            results = [estimator.estimate(scm) for scm in dataset.scms]
            return [r[0] for r in results], [r[1] for r in results]
        raise exceptions.InvalidArgument(
            "method must be one of %s, got %r" % (", ".join(METHODS),
                                                  method))

    @atomic.action_timer("doa.evaluate")
    def evaluate(self, method, dataset, checkpoint=None, scenario=None,
                 grid_steps=None, cap=None, tolerance=None):
        """Score an estimator; returns (MetricsReport, trial results)."""
        est, misses = self.estimate(method=method, dataset=dataset,
                                    checkpoint=checkpoint,
                                    scenario=scenario,
                                    grid_steps=grid_steps)
        trials = doa_report.score_trials(list(dataset.labels), est, misses,
                                         cap)
        report = doa_report.summarize(trials, tolerance)
        LOG.info("%s on %d trials: matched RMSE %.3f deg, miss prob %.3f"
                 % (method, report.trial_count, report.rmse_matched,
                    report.miss_prob))
        return report, trials

    @atomic.action_timer("doa.sweep")
    def sweep(self, method, scenario, imp, count, seed, checkpoint=None,
              snr_values=None, snapshot_values=None, rho_values=None,
              flags=None, gamma=None, mc_zero_diag=False):
        """Evaluate on freshly generated data over one swept quantity.

        Exactly one of `snr_values`, `snapshot_values` and `rho_values`
        must be given.

        :returns: list of (value, MetricsReport)
        """
        sweeps = [(name, values) for name, values in
                  (("snr_db", snr_values), ("snapshots", snapshot_values),
                   ("rho", rho_values)) if values is not None]
        if len(sweeps) != 1:
            raise exceptions.InvalidArgument(
                "exactly one sweep (SNR, snapshots or rho) must be given")
        name, values = sweeps[0]
        rows = []
        for value in values:
            point_scenario, point_imp = scenario, imp
            if name == "rho":
                point_imp = imperfections.build_imperfections(
                    value, flags, scenario.geometry.element_count,
                    gamma=gamma, geometry=scenario.geometry,
                    mc_zero_diag=mc_zero_diag)
            elif name == "snapshots":
                point_scenario = scenario.replace(snapshots=int(value))
            else:
                point_scenario = scenario.replace(snr_db=value)
            data = doa_dataset.generate_dataset(point_scenario, point_imp,
                                                count, seed)
            report, _ = self.evaluate(method=method, dataset=data,
                                      checkpoint=checkpoint,
                                      scenario=point_scenario)
            rows.append((value, report))
        return rows

    @atomic.action_timer("doa.compare")
    def compare(self, source, pool, scenario, test_set, sample_counts,
                transfer_config, train_config, seed):
        return calibration.compare_arms(source, pool, scenario, test_set,
                                        sample_counts, transfer_config,
                                        train_config, seed)
