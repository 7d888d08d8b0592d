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

"""Permutation-invariant training losses."""

import numpy as np

from rally_doa.metrics import assignment
from rally_doa.nn import tensor as tn
from rally_doa import exceptions


def _as_vectors(*arrays):
    arrays = [np.atleast_1d(np.asarray(a, dtype=np.float64)) for a in arrays]
    size = arrays[0].shape
    for a in arrays[1:]:
        if a.shape != size:
            raise exceptions.DimensionMismatch(
                "PIT loss needs equally long inputs, got %s and %s"
                % (size, a.shape))
    if arrays[0].size == 0:
        raise exceptions.EmptyInput(message="PIT loss of zero sources")
    return arrays


def best_permutation(truth, est):
    """Estimate index matched to each true source.

    :param truth: (dims, K) true angles
    :param est: (dims, K) estimated angles
    :returns: integer array perm with est[:, perm[k]] paired to truth[:, k]
    """
    diff = truth[:, :, None] - est[:, None, :]
    cost = (diff ** 2).sum(axis=0)
    perm, _ = assignment.hungarian(cost)
    return perm


def pit_loss_1d(theta, theta_hat):
    """min_P sqrt(mean((theta - P theta_hat)^2))."""
    theta, theta_hat = _as_vectors(theta, theta_hat)
    perm = best_permutation(theta[None], theta_hat[None])
    return float(np.sqrt(np.mean((theta - theta_hat[perm]) ** 2)))


def pit_loss_2d(theta, phi, theta_hat, phi_hat):
    """Like pit_loss_1d over both angles with one shared permutation."""
    theta, phi, theta_hat, phi_hat = _as_vectors(theta, phi, theta_hat,
                                                 phi_hat)
    truth = np.stack([theta, phi])
    est = np.stack([theta_hat, phi_hat])
    perm = best_permutation(truth, est)
    return float(np.sqrt(np.mean((truth - est[:, perm]) ** 2)))


def pit_loss(truth, est):
    """Loss of one (dims, K) estimate against its (dims, K) label."""
    truth = np.asarray(truth, dtype=np.float64)
    est = np.asarray(est, dtype=np.float64)
    if truth.shape[0] == 1:
        return pit_loss_1d(truth[0], est[0])
    return pit_loss_2d(truth[0], truth[1], est[0], est[1])


def batch_permutations(labels, outputs):
    """Indices into the (B, dims * K) outputs matching each label entry.

    Sub-gradient choice at ties: whatever assignment the solver returns.
    """
    batch, dims, k = labels.shape
    est = outputs.reshape(batch, dims, k)
    index = np.zeros((batch, dims * k), dtype=int)
    for b in range(batch):
        perm = best_permutation(labels[b], est[b])
        index[b] = (np.arange(dims)[:, None] * k + perm[None, :]).reshape(-1)
    return index


def pit_loss_batch(outputs, labels):
    """Mean PIT loss of a batch, differentiable w.r.t. `outputs`.

    :param outputs: Tensor (B, dims * K) of head outputs
    :param labels: array (B, dims, K)
    :returns: scalar Tensor
    """
    labels = np.asarray(labels, dtype=np.float64)
    batch, dims, k = labels.shape
    if outputs.shape != (batch, dims * k):
        raise exceptions.DimensionMismatch(
            "outputs of shape %s do not fit labels of shape %s"
            % (outputs.shape, labels.shape))
    if batch == 0:
        raise exceptions.EmptyInput(message="empty training batch")
    index = batch_permutations(labels, outputs.data)
    rows = np.arange(batch)[:, None]
    matched = tn.getitem(outputs, (rows, index))
    diff = tn.sub(matched, labels.reshape(batch, dims * k))
    per_sample = tn.sqrt(tn.mean(tn.square(diff), axis=1))
    return tn.mean(per_sample)
