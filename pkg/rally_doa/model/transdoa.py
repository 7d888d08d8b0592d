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

"""TransDOA: covariance embedding, transformer encoder and DOA head.

Sequences are laid out position-major, (batch, M + 1, D), inside the
network; :func:`embed_scm` and :func:`mhsa` take and return the
feature-major D x (M + 1) layout for single inputs.
"""

import collections

import numpy as np

from rally_doa.model import config as model_config
from rally_doa.nn import tensor as tn
from rally_doa import exceptions


def layer_shapes(config, index):
    d = config.embed_dim
    hidden = config.mlp_ratio * d
    prefix = "layers.%d." % index
    return [(prefix + "ln1.gain", (d,)),
            (prefix + "ln1.bias", (d,)),
            (prefix + "attn.w_q", (d, d)),
            (prefix + "attn.w_k", (d, d)),
            (prefix + "attn.w_v", (d, d)),
            (prefix + "attn.w_o", (d, d)),
            (prefix + "ln2.gain", (d,)),
            (prefix + "ln2.bias", (d,)),
            (prefix + "mlp.w1", (hidden, d)),
            (prefix + "mlp.b1", (hidden,)),
            (prefix + "mlp.w2", (d, hidden)),
            (prefix + "mlp.b2", (d,))]


def param_shapes(config):
    """Ordered (name, shape) of every learnable tensor."""
    d, m = config.embed_dim, config.element_count
    shapes = [("embed", (d, 2 * m)),
              ("doa_token", (d,)),
              ("pos_embed", (d, m + 1))]
    for i in range(config.depth):
        shapes.extend(layer_shapes(config, i))
    shapes.extend([("final_ln.gain", (d,)),
                   ("final_ln.bias", (d,)),
                   ("head.weight", (config.output_count, d)),
                   ("head.bias", (config.output_count,))])
    return shapes


def parameter_count(config):
    return int(sum(np.prod(shape) for _, shape in param_shapes(config)))


def init_params(config, seed):
    """Seeded initialization: layernorm gains 1 and biases 0, every other
    tensor i.i.d. N(0, init_std^2), drawn in param_shapes order.
    """
    rng = np.random.default_rng(seed)
    params = collections.OrderedDict()
    for name, shape in param_shapes(config):
        if name.endswith("ln1.gain") or name.endswith("ln2.gain") or \
                name == "final_ln.gain":
            data = np.ones(shape)
        elif ".ln" in name or name.startswith("final_ln"):
            data = np.zeros(shape)
        else:
            data = rng.normal(0.0, config.init_std, size=shape)
        params[name] = tn.parameter(data, name=name)
    return params


def copy_params(params, trainable=True):
    return collections.OrderedDict(
        (name, tn.Tensor(p.data.copy(), requires_grad=trainable, name=name))
        for name, p in params.items())


def check_params(config, params):
    for name, shape in param_shapes(config):
        if name not in params:
            raise exceptions.DimensionMismatch(
                "parameter %s is missing" % name)
        if params[name].shape != shape:
            raise exceptions.DimensionMismatch(
                "parameter %s has shape %s, config needs %s"
                % (name, params[name].shape, shape))


def normalize_scms(scms):
    """Divide each SCM by trace / M."""
    scms = np.asarray(scms, dtype=np.complex128)
    m = scms.shape[-1]
    trace = np.real(np.trace(scms, axis1=-2, axis2=-1))
    if np.any(trace <= 0) or not np.all(np.isfinite(trace)):
        raise exceptions.NumericFailure(operation="trace normalization")
    return scms / (trace / m)[..., None, None]


def column_features(scms):
    """(B, M, M) complex -> (B, M, 2M): column i as [Re r_i; Im r_i]."""
    cols = np.swapaxes(scms, -1, -2)
    return np.concatenate([cols.real, cols.imag], axis=-1)


def _embed(config, params, scms):
    scms = np.asarray(scms)
    if scms.ndim != 3 or scms.shape[1:] != (config.element_count,
                                            config.element_count):
        raise exceptions.DimensionMismatch(
            "expected SCMs of shape (B, %d, %d), got %s"
            % (config.element_count, config.element_count, scms.shape))
    batch = scms.shape[0]
    x = tn.Tensor(column_features(normalize_scms(scms)))
    tokens = tn.linear(x, params["embed"])
    d = config.embed_dim
    token = tn.broadcast_to(tn.reshape(params["doa_token"], (1, 1, d)),
                            (batch, 1, d))
    seq = tn.concat_rows([token, tokens])
    return tn.add(seq, tn.transpose(params["pos_embed"]))


def _attention(config, z, layer):
    batch, length, d = z.shape
    h, dk = config.heads, config.head_dim

    def split(t):
        return tn.transpose(tn.reshape(t, (batch, length, h, dk)),
                            (0, 2, 1, 3))

    q = split(tn.linear(z, layer["w_q"]))
    k = split(tn.linear(z, layer["w_k"]))
    v = split(tn.linear(z, layer["w_v"]))
    scores = tn.scale(tn.matmul(q, tn.transpose(k)), 1.0 / np.sqrt(dk))
    heads = tn.matmul(tn.softmax_rows(scores), v)
    merged = tn.reshape(tn.transpose(heads, (0, 2, 1, 3)),
                        (batch, length, d))
    return tn.linear(merged, layer["w_o"])


def _layer(params, index):
    prefix = "layers.%d." % index
    return dict((name[len(prefix):], p) for name, p in params.items()
                if name.startswith(prefix))


def _block(config, z, layer):
    eps = config.layernorm_eps
    attn = {"w_q": layer["attn.w_q"], "w_k": layer["attn.w_k"],
            "w_v": layer["attn.w_v"], "w_o": layer["attn.w_o"]}
    z = tn.add(z, _attention(config, tn.layernorm(
        z, layer["ln1.gain"], layer["ln1.bias"], eps), attn))
    hidden = tn.gelu(tn.linear(
        tn.layernorm(z, layer["ln2.gain"], layer["ln2.bias"], eps),
        layer["mlp.w1"], layer["mlp.b1"]))
    return tn.add(z, tn.linear(hidden, layer["mlp.w2"], layer["mlp.b2"]))


def backbone(config, params, scms):
    """Token features after the final layernorm, Tensor (B, D)."""
    z = _embed(config, params, scms)
    for i in range(config.depth):
        z = _block(config, z, _layer(params, i))
    z = tn.layernorm(z, params["final_ln.gain"], params["final_ln.bias"],
                     config.layernorm_eps)
    return tn.slice_row(z, 0)


def head(params, features):
    """Raw head outputs in degrees, Tensor (B, K) or (B, 2K)."""
    return tn.linear(features, params["head.weight"], params["head.bias"])


def forward_batch(config, params, scms):
    """(features (B, D), outputs (B, dims * K)) as Tensors."""
    features = backbone(config, params, scms)
    return features, head(params, features)


def split_outputs(config, outputs):
    """(B, dims * K) outputs -> (B, dims, K) azimuths then elevations."""
    outputs = np.asarray(outputs)
    return outputs.reshape(outputs.shape[0], config.label_dims,
                           config.source_count)


def embed_scm(scm, params, config):
    """Embedded sequence of one SCM, D x (M + 1)."""
    seq = _embed(config, params, np.asarray(scm)[None])
    return seq.data[0].T


def mhsa(z, layer, config):
    """Multi-head self-attention on one D x (M + 1) sequence.

    `layer` maps w_q, w_k, w_v and w_o to D x D arrays or Tensors; rows
    i * d_k .. (i + 1) * d_k - 1 of each projection belong to head i.
    """
    z = np.asarray(z, dtype=np.float64)
    layer = dict((k, tn.as_tensor(v)) for k, v in layer.items())
    out = _attention(config, tn.Tensor(z.T[None]), layer)
    return out.data[0].T


def forward(scm, params, config):
    """Features and estimates of one SCM.

    :returns: (z, thetas) for 1D models, (z, thetas, phis) for 2D
    """
    features, outputs = forward_batch(config, params, np.asarray(scm)[None])
    est = split_outputs(config, outputs.data)[0]
    if config.output_mode == model_config.ONE_D:
        return features.data[0], est[0]
    return features.data[0], est[0], est[1]


def feature_extract(params, scm, config):
    """Backbone features z of one SCM, the head not applied."""
    return backbone(config, params, np.asarray(scm)[None]).data[0]


def predict(config, params, scms, batch_size=256):
    """Estimates for a stack of SCMs, array (N, dims, K)."""
    scms = np.asarray(scms)
    chunks = [forward_batch(config, params, scms[i:i + batch_size])[1].data
              for i in range(0, scms.shape[0], batch_size)]
    if not chunks:
        return np.zeros((0, config.label_dims, config.source_count))
    return split_outputs(config, np.concatenate(chunks))


def extract_features(config, params, scms, batch_size=256):
    scms = np.asarray(scms)
    chunks = [backbone(config, params, scms[i:i + batch_size]).data
              for i in range(0, scms.shape[0], batch_size)]
    if not chunks:
        return np.zeros((0, config.embed_dim))
    return np.concatenate(chunks)


class TransDoa(object):
    """A model config bound to its parameters."""

    def __init__(self, config, params):
        check_params(config, params)
        self.config = config
        self.params = params

    @classmethod
    def initialize(cls, config, seed):
        return cls(config, init_params(config, seed))

    @property
    def parameter_count(self):
        return parameter_count(self.config)

    def predict(self, scms, batch_size=256):
        return predict(self.config, self.params, scms, batch_size)

    def features(self, scms, batch_size=256):
        return extract_features(self.config, self.params, scms, batch_size)

    def copy(self, trainable=True):
        return TransDoa(self.config, copy_params(self.params, trainable))
