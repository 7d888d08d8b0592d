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

"""Supervised mini-batch training with early stopping."""

import collections

import numpy as np

from rally.common import logging

from rally_doa.model import losses
from rally_doa.model import transdoa
from rally_doa.nn import optim
from rally_doa.nn import tensor as tn
from rally_doa import exceptions

LOG = logging.getLogger(__name__)

CSV_HEADER = "epoch,train_loss,val_loss"


class EpochRecord(collections.namedtuple("EpochRecord",
                                         ["epoch", "train_loss",
                                          "val_loss"])):

    def csv(self):
        return "%d,%.10g,%.10g" % (self.epoch, self.train_loss,
                                   self.val_loss)


class EarlyStopping(object):
    """Track the best validation loss and the weights that achieved it."""

    def __init__(self, patience):
        self.patience = patience
        self.best_loss = np.inf
        self.best_epoch = 0
        self.best_params = None

    def __call__(self, epoch, loss, params):
        """Record an epoch; returns True once patience is exhausted."""
        if loss < self.best_loss:
            self.best_loss = loss
            self.best_epoch = epoch
            self.best_params = snapshot(params)
            return False
        return epoch - self.best_epoch >= self.patience


def snapshot(params):
    return collections.OrderedDict((name, p.data.copy())
                                   for name, p in params.items())


def restore(params, arrays):
    for name, data in arrays.items():
        params[name].data[...] = data
    return params


def evaluate_loss(config, params, dataset, batch_size=256):
    """Mean PIT loss over a dataset, no gradients."""
    if len(dataset) == 0:
        raise exceptions.EmptyInput(message="validation dataset is empty")
    total = 0.0
    for start in range(0, len(dataset), batch_size):
        stop = start + batch_size
        _, outputs = transdoa.forward_batch(config, params,
                                            dataset.scms[start:stop])
        labels = dataset.labels[start:stop]
        total += losses.pit_loss_batch(outputs, labels).item() * len(labels)
    return total / len(dataset)


def train_step(config, params, scms, labels, state, trainable=None):
    """One Adam step on a batch; returns the batch loss.

    :param trainable: names of parameters to update; all if omitted
    """
    names = list(params) if trainable is None else list(trainable)
    with tn.Tape() as tape:
        _, outputs = transdoa.forward_batch(config, params, scms)
        loss = losses.pit_loss_batch(outputs, labels)
    grads = tn.backward(tape, loss, [params[n] for n in names])
    optim.adam_step(params, dict(zip(names, grads)), state)
    return loss.item()


def _check_dataset(config, dataset, role):
    if len(dataset) == 0:
        raise exceptions.EmptyInput(message="%s dataset is empty" % role)
    dataset.check_model(config.element_count, config.source_count,
                        config.label_dims)


def train(config, params, train_set, val_set, train_config, seed,
          on_epoch=None, trainable=None):
    """Train `params` in place and return the best-validation weights.

    :param config: ModelConfig
    :param params: parameter mapping, modified in place
    :param train_set: DoaDataset used for updates
    :param val_set: DoaDataset for validation and early stopping
    :param train_config: TrainConfig
    :param seed: seed of the shuffling order
    :param on_epoch: callback receiving every EpochRecord, epoch 0 first
    :param trainable: subset of parameter names to update
    :returns: (params, history) with `params` holding the best weights
    """
    _check_dataset(config, train_set, "training")
    _check_dataset(config, val_set, "validation")
    rng = np.random.default_rng(seed)
    state = optim.AdamState(params, train_config.learning_rate,
                            train_config.beta1, train_config.beta2,
                            train_config.eps)
    stopper = EarlyStopping(train_config.patience)
    history = []
    batch = train_config.batch_size

    def emit(record):
        history.append(record)
        if on_epoch:
            on_epoch(record)

    try:
        record = EpochRecord(0, evaluate_loss(config, params, train_set,
                                              batch),
                             evaluate_loss(config, params, val_set, batch))
    except exceptions.NumericFailure as e:
        raise exceptions.TrainingAborted(params=params, history=history,
                                         epoch=0, reason=e.format_message())
    emit(record)
    stopper(0, record.val_loss, params)

    for epoch in range(1, train_config.epochs + 1):
        order = rng.permutation(len(train_set))
        total = 0.0
        try:
            for start in range(0, len(order), batch):
                idx = order[start:start + batch]
                loss = train_step(config, params, train_set.scms[idx],
                                  train_set.labels[idx], state, trainable)
                total += loss * len(idx)
                LOG.debug("epoch %d batch %d loss %.6f"
                          % (epoch, start // batch, loss))
            val_loss = evaluate_loss(config, params, val_set, batch)
        except exceptions.NumericFailure as e:
            best = restore(params, stopper.best_params)
            raise exceptions.TrainingAborted(params=best, history=history,
                                             epoch=epoch,
                                             reason=e.format_message())
        emit(EpochRecord(epoch, total / len(order), val_loss))
        LOG.info("Epoch %d: train loss %.4f, validation loss %.4f"
                 % (epoch, total / len(order), val_loss))
        if stopper(epoch, val_loss, params):
            LOG.info("Early stopping at epoch %d, best validation loss "
                     "%.4f at epoch %d" % (epoch, stopper.best_loss,
                                           stopper.best_epoch))
            break

    restore(params, stopper.best_params)
    LOG.info("Training finished, best epoch %d with validation loss %.4f"
             % (stopper.best_epoch, stopper.best_loss))
    return params, history
