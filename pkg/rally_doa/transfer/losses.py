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

"""Feature alignment losses between source and target extractors."""

import numpy as np

from rally.common import logging

from rally_doa.nn import tensor as tn
from rally_doa import exceptions

LOG = logging.getLogger(__name__)


def _pair(z_s, z_t):
    z_s = np.asarray(z_s, dtype=np.float64)
    z_t = np.asarray(z_t, dtype=np.float64)
    if z_s.shape != z_t.shape:
        raise exceptions.DimensionMismatch(
            "feature shapes differ: %s vs %s" % (z_s.shape, z_t.shape))
    return z_s, z_t


def loss_mse(z_s, z_t):
    """Squared Euclidean distance ||z_s - z_t||^2."""
    z_s, z_t = _pair(z_s, z_t)
    return float(np.sum((z_s - z_t) ** 2))


def loss_cos(z_s, z_t, with_flag=False):
    """1 - cos(z_s, z_t); a zero vector gives 1 and sets the flag."""
    z_s, z_t = _pair(z_s, z_t)
    norm = np.linalg.norm(z_s) * np.linalg.norm(z_t)
    if norm == 0.0:
        LOG.warning("Cosine loss of a zero feature vector")
        return (1.0, True) if with_flag else 1.0
    value = float(1.0 - np.dot(z_s, z_t) / norm)
    return (value, False) if with_flag else value


def loss_total(z_s, z_t, alpha, beta):
    """alpha * mean cosine loss + beta * mean squared distance.

    :param z_s: (B, D) source features
    :param z_t: (B, D) target features
    """
    z_s, z_t = _pair(np.atleast_2d(z_s), np.atleast_2d(z_t))
    if z_s.shape[0] == 0:
        raise exceptions.EmptyInput(message="empty feature batch")
    cos = np.mean([loss_cos(a, b) for a, b in zip(z_s, z_t)])
    mse = np.mean(np.sum((z_s - z_t) ** 2, axis=1))
    return float(alpha * cos + beta * mse)


def alignment_loss(z_t, z_s, alpha, beta):
    """Differentiable loss_total with trainable target features.

    :param z_t: Tensor (B, D) from the trainable extractor
    :param z_s: array (B, D) from the frozen extractor
    """
    z_s = np.asarray(z_s, dtype=np.float64)
    if z_t.shape != z_s.shape:
        raise exceptions.DimensionMismatch(
            "feature shapes differ: %s vs %s" % (z_t.shape, z_s.shape))
    if z_s.shape[0] == 0:
        raise exceptions.EmptyInput(message="empty feature batch")
    diff = tn.sub(z_t, z_s)
    mse = tn.mean(tn.sum(tn.square(diff), axis=1))

    norm_s = np.linalg.norm(z_s, axis=1)
    norm_t = tn.sqrt(tn.sum(tn.square(z_t), axis=1))
    valid = ((norm_s > 0) & (norm_t.data > 0)).astype(np.float64)
    dot = tn.sum(tn.mul(z_t, z_s), axis=1)
    denom = tn.add(tn.mul(norm_t, norm_s), 1.0 - valid)
    cos = tn.sub(1.0, tn.mul(tn.div(dot, denom), valid))
    return tn.add(tn.scale(tn.mean(cos), alpha), tn.scale(mse, beta))
