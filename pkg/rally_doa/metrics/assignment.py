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

"""Minimum-cost assignment (Hungarian method with dual potentials)."""

import numpy as np

from rally_doa import exceptions


def pad_square(cost, pad_value):
    """Pad a rectangular cost matrix to square with `pad_value`."""
    rows, cols = cost.shape
    n = max(rows, cols)
    if rows == cols:
        return cost
    padded = np.full((n, n), float(pad_value))
    padded[:rows, :cols] = cost
    return padded


def hungarian(cost, pad_value=None):
    """Solve min sum_i cost[i, perm[i]] over permutations.

    :param cost: real (n, m) matrix; rectangular input needs `pad_value`
        and is padded to square with it
    :param pad_value: cost of pairing with a padding row/column
    :returns: (perm, total) where perm[i] is the column of row i in the
        padded square problem and total includes padding costs
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise exceptions.DimensionMismatch(
            "cost matrix must be 2D, got shape %s" % (cost.shape,))
    if not np.all(np.isfinite(cost)):
        raise exceptions.InvalidArgument("cost matrix has non-finite entries")
    if cost.shape[0] != cost.shape[1]:
        if pad_value is None:
            raise exceptions.DimensionMismatch(
                "rectangular cost matrix %s needs a padding value"
                % (cost.shape,))
        cost = pad_square(cost, pad_value)
    n = cost.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int), 0.0

    # 1-based potentials; column 0 is the virtual start of each path.
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    owner = np.zeros(n + 1, dtype=int)
    way = np.zeros(n + 1, dtype=int)
    for i in range(1, n + 1):
        owner[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = owner[j0]
            free = ~used[1:]
            reduced = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (reduced < minv[1:])
            minv[1:][better] = reduced[better]
            way[1:][better] = j0
            candidates = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]
            u[owner[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1

    perm = np.zeros(n, dtype=int)
    perm[owner[1:] - 1] = np.arange(n)
    return perm, float(cost[np.arange(n), perm].sum())
