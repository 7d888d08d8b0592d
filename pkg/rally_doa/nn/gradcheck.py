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

"""Finite-difference verification of analytic gradients."""

import numpy as np

from rally.common import logging

from rally_doa.nn import tensor as tn
from rally_doa import exceptions

LOG = logging.getLogger(__name__)

FLOOR = 1e-4


class GradCheckReport(object):

    def __init__(self, max_rel_error, worst, checked, tolerance):
        self.max_rel_error = max_rel_error
        self.worst = worst
        self.checked = checked
        self.tolerance = tolerance

    @property
    def passed(self):
        return self.max_rel_error < self.tolerance

    def __repr__(self):
        return ("GradCheckReport(max_rel_error=%.3g at %s, checked=%d, "
                "passed=%s)" % (self.max_rel_error, self.worst,
                                self.checked, self.passed))


def relative_error(analytic, numeric, floor=FLOOR):
    """|a - n| / max(|a|, |n|, floor); partials smaller than `floor` are
    effectively compared in absolute terms.
    """
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def _evaluate(fn, inputs):
    value = fn(*inputs)
    value = value.item() if isinstance(value, tn.Tensor) else float(value)
    if not np.isfinite(value):
        raise exceptions.GradCheckFailure(
            message="function value is not finite")
    return value


def grad_check(fn, inputs, tolerance=1e-4, max_entries=None, seed=0,
               floor=FLOOR):
    """Compare backward() against central differences.

    :param fn: callable taking Tensors and returning a scalar Tensor
    :param inputs: list of Tensors (or arrays) to differentiate
    :param tolerance: relative error regarded as a pass
    :param max_entries: check only this many randomly chosen entries per
        input; every entry when omitted
    :param floor: denominator floor of the relative error
    :returns: GradCheckReport
    """
    inputs = [t if isinstance(t, tn.Tensor) else tn.parameter(t)
              for t in inputs]
    for t in inputs:
        t.requires_grad = True
    with tn.Tape() as tape:
        loss = fn(*inputs)
    if not np.all(np.isfinite(loss.data)):
        raise exceptions.GradCheckFailure(message="loss is not finite")
    analytic = tn.backward(tape, loss, inputs)

    rng = np.random.default_rng(seed)
    worst, worst_at, checked = 0.0, None, 0
    for i, t in enumerate(inputs):
        flat = t.data.reshape(-1)
        entries = np.arange(flat.size)
        if max_entries is not None and flat.size > max_entries:
            entries = np.sort(rng.choice(flat.size, max_entries,
                                         replace=False))
        for j in entries:
            x = flat[j]
            h = 1e-6 * (1.0 + abs(x))
            flat[j] = x + h
            up = _evaluate(fn, inputs)
            flat[j] = x - h
            down = _evaluate(fn, inputs)
            flat[j] = x
            numeric = (up - down) / (2.0 * h)
            a = analytic[i].reshape(-1)[j]
            if not np.isfinite(a):
                raise exceptions.GradCheckFailure(
                    message="analytic gradient is not finite")
            err = relative_error(a, numeric, floor)
            checked += 1
            if err > worst:
                worst, worst_at = err, (i, int(j))
    report = GradCheckReport(worst, worst_at, checked, tolerance)
    LOG.debug("%r" % report)
    return report
