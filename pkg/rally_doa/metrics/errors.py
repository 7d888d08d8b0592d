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

"""Per-source error pairing and set distances, all in degrees.

Angle sets are arrays of shape (K,) for azimuth-only estimates or
(dims, K) with azimuths in row 0 and elevations in row 1. The distance
between two 2D directions is the mean of the per-axis absolute errors.
"""

import numpy as np

from rally.common import cfg

from rally_doa.common import opts  # noqa: F401
from rally_doa.metrics import assignment
from rally_doa import exceptions

CONF = cfg.CONF


def as_angle_set(angles, dims=None):
    angles = np.asarray(angles, dtype=np.float64)
    if angles.ndim == 1:
        angles = angles[None, :]
    if dims is not None and angles.size == 0:
        angles = angles.reshape(dims, 0)
    return angles


def _cap(cap):
    return CONF.doa.error_cap if cap is None else float(cap)


def pairwise_distance(truth, est):
    """|truth_i - est_j| averaged over the angle axes, shape (n, m)."""
    return np.abs(truth[:, :, None] - est[:, None, :]).mean(axis=0)


def _prepare(truth, est):
    truth = as_angle_set(truth)
    est = as_angle_set(est, dims=truth.shape[0])
    if truth.shape[1] == 0:
        raise exceptions.EmptyInput(message="no true sources to score")
    if est.shape[0] != truth.shape[0]:
        raise exceptions.DimensionMismatch(
            "truth has %d angle axes, estimates %d" % (truth.shape[0],
                                                       est.shape[0]))
    return truth, est


def match_errors(truth, est, cap=None):
    """Per-true-source errors after optimal (Hungarian) association.

    Costs are clipped at `cap`; true sources left without an estimate
    score `cap`.
    """
    cap = _cap(cap)
    truth, est = _prepare(truth, est)
    n, m = truth.shape[1], est.shape[1]
    if m == 0:
        return np.full(n, cap)
    cost = np.minimum(pairwise_distance(truth, est), cap)
    perm, _ = assignment.hungarian(cost, pad_value=cap)
    errors = np.full(n, cap)
    matched = perm[:n] < m
    errors[matched] = cost[np.arange(n)[matched], perm[:n][matched]]
    return errors


def raw_errors(truth, est, cap=None):
    """Per-source errors pairing both sets in ascending azimuth order."""
    cap = _cap(cap)
    truth, est = _prepare(truth, est)
    truth = truth[:, np.argsort(truth[0], kind="stable")]
    est = est[:, np.argsort(est[0], kind="stable")]
    n = truth.shape[1]
    k = min(n, est.shape[1])
    errors = np.full(n, cap)
    errors[:k] = np.minimum(np.abs(truth[:, :k] - est[:, :k]).mean(axis=0),
                            cap)
    return errors


def ospa(truth, est, c=None, p=1):
    """OSPA distance with cutoff `c` and order `p`."""
    c = _cap(c)
    if p <= 0:
        raise exceptions.InvalidArgument("OSPA order must be positive")
    truth = as_angle_set(truth)
    est = as_angle_set(est, dims=truth.shape[0])
    n, m = truth.shape[1], est.shape[1]
    if n == 0 and m == 0:
        return 0.0
    if n == 0 or m == 0:
        return c
    cost = np.minimum(pairwise_distance(truth, est), c) ** p
    _, total = assignment.hungarian(cost, pad_value=c ** p)
    return float((total / max(n, m)) ** (1.0 / p))


def ecdf_quantile(errors, q):
    """Sorted errors at the 1-based index ceil(q * n)."""
    if not 0.0 < q < 1.0:
        raise exceptions.InvalidArgument(
            "quantile level must lie in (0, 1), got %s" % q)
    errors = np.sort(np.asarray(errors, dtype=np.float64).reshape(-1))
    if errors.size == 0:
        raise exceptions.EmptyInput(message="ECDF of an empty error list")
    index = int(np.ceil(q * errors.size - 1e-9))
    return float(errors[min(max(index, 1), errors.size) - 1])
