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

"""Feature-alignment calibration of a pretrained estimator.

A frozen copy of the source network extracts features from ideal-array
SCMs; a trainable copy is driven to produce the same features from the
paired imperfect-array SCMs. The source head is then reattached to the
aligned backbone.
"""

import collections

import numpy as np

from rally.common import cfg
from rally.common import logging

from rally_doa.common import opts  # noqa: F401
from rally_doa.metrics import report as doa_report
from rally_doa.model import checkpoint as doa_checkpoint
from rally_doa.model import config as model_config
from rally_doa.model import trainer
from rally_doa.model import transdoa
from rally_doa.nn import optim
from rally_doa.nn import tensor as tn
from rally_doa.transfer import losses
from rally_doa.transfer import pairs
from rally_doa import exceptions

CONF = cfg.CONF
LOG = logging.getLogger(__name__)

REUSE_SOURCE_HEAD = "ReuseSourceHead"
FINE_TUNE_HEAD = "FineTuneHead"
HEAD_POLICIES = (REUSE_SOURCE_HEAD, FINE_TUNE_HEAD)
HEAD_PARAMS = ("head.weight", "head.bias")

DEFAULT_SAMPLE_GRID = (20, 50, 100, 200, 300, 500, 800, 1000)


class TransferConfig(object):
    """Alignment loss weights and schedule; defaults from ``[transfer]``."""

    def __init__(self, alpha=None, beta=None, learning_rate=None,
                 batches=None, epochs=None, head_policy=None,
                 head_epochs=None):
        c = CONF.transfer
        self.alpha = float(c.alpha if alpha is None else alpha)
        self.beta = float(c.beta if beta is None else beta)
        self.learning_rate = float(c.learning_rate if learning_rate is None
                                   else learning_rate)
        self.batches = int(c.batches if batches is None else batches)
        self.epochs = int(c.epochs if epochs is None else epochs)
        self.head_policy = c.head_policy if head_policy is None \
            else head_policy
        self.head_epochs = int(c.head_epochs if head_epochs is None
                               else head_epochs)
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta <= 0:
            raise exceptions.InvalidArgument(
                "alignment weights need alpha, beta >= 0 and alpha + beta "
                "> 0, got alpha=%s beta=%s" % (self.alpha, self.beta))
        if self.batches < 1 or self.epochs < 0 or self.head_epochs < 0:
            raise exceptions.InvalidArgument(
                "transfer needs batches >= 1, epochs >= 0 and "
                "head_epochs >= 0")
        if self.head_policy not in HEAD_POLICIES:
            raise exceptions.InvalidArgument(
                "head policy must be one of %s, got %r"
                % (", ".join(HEAD_POLICIES), self.head_policy))

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta,
                "learning_rate": self.learning_rate,
                "batches": self.batches, "epochs": self.epochs,
                "head_policy": self.head_policy,
                "head_epochs": self.head_epochs}

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def _check_pairs(config, paired):
    if len(paired) == 0:
        raise exceptions.EmptyInput(message="paired dataset is empty")
    if (paired.element_count, paired.source_count,
            paired.label_dims) != (config.element_count, config.source_count,
                                   config.label_dims):
        raise exceptions.DimensionMismatch(
            "paired data is M=%d K=%d dims=%d, source model M=%d K=%d "
            "dims=%d" % (paired.element_count, paired.source_count,
                         paired.label_dims, config.element_count,
                         config.source_count, config.label_dims))


def alignment_value(config, params, target_scms, source_features, tc):
    features = transdoa.extract_features(config, params, target_scms)
    return losses.loss_total(source_features, features, tc.alpha, tc.beta)


def transfer_train(source, paired, transfer_config, seed, on_epoch=None):
    """Align a copy of the source backbone to the paired target data.

    :param source: Checkpoint of the source (ideal-data) model; never
        modified
    :param paired: PairedDataset
    :param transfer_config: TransferConfig
    :param seed: seed of the batch shuffling
    :param on_epoch: callback receiving (epoch, alignment loss)
    :returns: (Checkpoint of the calibrated model, history)
    """
    config = source.config
    tc = transfer_config
    _check_pairs(config, paired)
    frozen = transdoa.copy_params(source.params, trainable=False)
    source_features = transdoa.extract_features(config, frozen,
                                                paired.ideal_scms)
    params = transdoa.copy_params(source.params, trainable=True)
    backbone_names = [n for n in params if n not in HEAD_PARAMS]
    state = optim.AdamState(params, tc.learning_rate)
    rng = np.random.default_rng(seed)
    history = []

    def emit(epoch, value):
        history.append((epoch, value))
        if on_epoch:
            on_epoch(epoch, value)

    best_loss = alignment_value(config, params, paired.target_scms,
                                source_features, tc)
    best_params, best_epoch = trainer.snapshot(params), 0
    emit(0, best_loss)
    for epoch in range(1, tc.epochs + 1):
        order = rng.permutation(len(paired))
        try:
            for idx in np.array_split(order, min(tc.batches, len(order))):
                with tn.Tape() as tape:
                    z_t = transdoa.backbone(config, params,
                                            paired.target_scms[idx])
                    loss = losses.alignment_loss(z_t, source_features[idx],
                                                 tc.alpha, tc.beta)
                grads = tn.backward(tape, loss,
                                    [params[n] for n in backbone_names])
                optim.adam_step(params, dict(zip(backbone_names, grads)),
                                state)
            value = alignment_value(config, params, paired.target_scms,
                                    source_features, tc)
        except exceptions.NumericFailure as e:
            raise exceptions.TrainingAborted(
                params=trainer.restore(params, best_params),
                history=history, epoch=epoch, reason=e.format_message())
        emit(epoch, value)
        LOG.info("Transfer epoch %d: alignment loss %.6f" % (epoch, value))
        if value < best_loss:
            best_loss, best_epoch = value, epoch
            best_params = trainer.snapshot(params)
    trainer.restore(params, best_params)
    LOG.info("Best alignment loss %.6f at epoch %d" % (best_loss,
                                                       best_epoch))

    if tc.head_policy == FINE_TUNE_HEAD and tc.head_epochs > 0:
        target = paired.target_dataset()
        head_config = model_config.TrainConfig(
            learning_rate=tc.learning_rate, epochs=tc.head_epochs,
            batch_size=max(1, int(np.ceil(len(target) / float(tc.batches)))))
        params, _ = trainer.train(config, params, target, target,
                                  head_config, seed,
                                  trainable=list(HEAD_PARAMS))

    meta = dict(source.meta)
    meta.update(transfer=tc.to_dict(), seed=int(seed),
                pairs=len(paired))
    return doa_checkpoint.Checkpoint(config, params, meta), history


def finetune_baseline(source, dataset, train_config, seed, val_set=None,
                      on_epoch=None):
    """Supervised PIT training on labelled target data from the source
    weights.
    """
    params = transdoa.copy_params(source.params, trainable=True)
    params, history = trainer.train(source.config, params, dataset,
                                    val_set or dataset, train_config, seed,
                                    on_epoch=on_epoch)
    meta = dict(source.meta)
    meta.update(training=train_config.to_dict(), seed=int(seed),
                mode="finetune")
    return doa_checkpoint.Checkpoint(source.config, params, meta), history


def direct_train_baseline(config, dataset, train_config, seed, val_set=None,
                          on_epoch=None):
    """Supervised PIT training from a fresh initialization."""
    params = transdoa.init_params(config, seed)
    params, history = trainer.train(config, params, dataset,
                                    val_set or dataset, train_config, seed,
                                    on_epoch=on_epoch)
    meta = {"training": train_config.to_dict(), "seed": int(seed),
            "mode": "direct"}
    return doa_checkpoint.Checkpoint(config, params, meta), history


def select_samples(dataset, count):
    """First `count` records of an imperfect target dataset."""
    if count < 1 or count > len(dataset):
        raise exceptions.InvalidArgument(
            "sample count %d must be within 1..%d available target records"
            % (count, len(dataset)))
    return dataset.subset(count)


def matched_rmse(checkpoint, dataset):
    est = checkpoint.model.predict(dataset.scms)
    return doa_report.compute_report(list(dataset.labels),
                                     list(est)).rmse_matched


ArmsRow = collections.namedtuple("ArmsRow", ["samples", "source", "direct",
                                             "finetune", "transfer"])


def compare_arms(source, pool, scenario, test_set, sample_counts,
                 transfer_config, train_config, seed):
    """Matched RMSE of direct training, fine-tuning and transfer for
    growing numbers of labelled imperfect samples.

    :param source: Checkpoint trained on ideal data
    :param pool: imperfect DoaDataset the first N records are taken from
    :param scenario: SignalScenario of the pool, used to build pairs
    :param test_set: imperfect held-out DoaDataset
    :param sample_counts: grid of N values
    :returns: list of ArmsRow
    """
    counts = sorted(set(int(n) for n in sample_counts))
    if not counts:
        raise exceptions.InvalidArgument("empty sample count grid")
    select_samples(pool, counts[-1])
    baseline = matched_rmse(source, test_set)
    rows = []
    for n in counts:
        subset = select_samples(pool, n)
        direct, _ = direct_train_baseline(source.config, subset,
                                          train_config, seed)
        tuned, _ = finetune_baseline(source, subset, train_config, seed)
        paired = pairs.make_pairs(subset, scenario, seed)
        calibrated, _ = transfer_train(source, paired, transfer_config,
                                       seed)
        row = ArmsRow(n, baseline, matched_rmse(direct, test_set),
                      matched_rmse(tuned, test_set),
                      matched_rmse(calibrated, test_set))
        LOG.info("N=%d: source %.3f, direct %.3f, fine-tune %.3f, "
                 "transfer %.3f" % row)
        rows.append(row)
    return rows
