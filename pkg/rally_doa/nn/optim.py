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

import numpy as np

from rally.common import cfg

from rally_doa.common import opts  # noqa: F401
from rally_doa import exceptions

CONF = cfg.CONF


class AdamState(object):
    """Moment buffers and step counter of an Adam optimizer.

    Hyperparameters default to the ``[transdoa]`` options.
    """

    def __init__(self, params, learning_rate=None, beta1=None, beta2=None,
                 eps=None):
        self.learning_rate = (CONF.transdoa.learning_rate
                              if learning_rate is None else learning_rate)
        self.beta1 = CONF.transdoa.beta1 if beta1 is None else beta1
        self.beta2 = CONF.transdoa.beta2 if beta2 is None else beta2
        self.eps = CONF.transdoa.adam_eps if eps is None else eps
        self.step = 0
        self.m = dict((name, np.zeros_like(p.data))
                      for name, p in params.items())
        self.v = dict((name, np.zeros_like(p.data))
                      for name, p in params.items())

    def to_dict(self):
        return {"learning_rate": self.learning_rate,
                "beta1": self.beta1, "beta2": self.beta2,
                "eps": self.eps}


def adam_step(params, grads, state):
    """One bias-corrected Adam update, in place.

    :param params: mapping name -> Tensor
    :param grads: mapping name -> gradient array; names absent from the
        mapping are left untouched and their moments do not decay
    :param state: AdamState built for `params`
    :returns: (params, state)
    """
    state.step += 1
    t = state.step
    b1, b2 = state.beta1, state.beta2
    for name in sorted(grads):
        g = grads[name]
        p = params[name]
        if g.shape != p.data.shape:
            raise exceptions.DimensionMismatch(
                "gradient of %s has shape %s, parameter %s"
                % (name, g.shape, p.data.shape))
        m = state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        v = state.v[name] = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        p.data -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)
    return params, state
