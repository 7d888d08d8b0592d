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
import pytest

from rally_doa.model import config as model_config
from rally_doa.model import losses
from rally_doa.model import transdoa
from rally_doa.nn import gradcheck
from rally_doa.nn import tensor as tn
from rally_doa import exceptions


def random_scm(m, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(m, 3 * m)) + 1j * rng.normal(size=(m, 3 * m))
    return x.dot(x.conj().T) / (3 * m)


def test_parameter_count_matches_hand_count(tiny_config):
    # embed 16*8, token 16, positions 16*5
    # layer: 2 layernorms 64, 4 projections 4*256, mlp 1024+64+1024+16
    # final layernorm 32, head 2*16+2
    assert transdoa.parameter_count(tiny_config) == 3506


def test_init_is_seeded(tiny_config):
    a = transdoa.init_params(tiny_config, 3)
    b = transdoa.init_params(tiny_config, 3)
    c = transdoa.init_params(tiny_config, 4)
    for name in a:
        np.testing.assert_array_equal(a[name].data, b[name].data)
    assert not np.array_equal(a["embed"].data, c["embed"].data)
    np.testing.assert_array_equal(a["layers.0.ln1.gain"].data, 1.0)
    np.testing.assert_array_equal(a["final_ln.bias"].data, 0.0)


def test_missing_parameter_is_rejected(tiny_config):
    params = transdoa.init_params(tiny_config, 0)
    del params["head.bias"]
    with pytest.raises(exceptions.DimensionMismatch):
        transdoa.TransDoa(tiny_config, params)


def test_embed_shape_and_scale_invariance(tiny_config):
    params = transdoa.init_params(tiny_config, 0)
    scm = random_scm(4)
    out = transdoa.embed_scm(scm, params, tiny_config)
    assert out.shape == (16, 5)
    np.testing.assert_allclose(transdoa.embed_scm(7.5 * scm, params,
                                                  tiny_config),
                               out, atol=1e-12)


def test_zero_embedding_keeps_only_the_token(tiny_config):
    params = transdoa.init_params(tiny_config, 0)
    params["embed"].data[...] = 0.0
    params["pos_embed"].data[...] = 0.0
    out = transdoa.embed_scm(random_scm(4), params, tiny_config)
    np.testing.assert_array_equal(out[:, 0], params["doa_token"].data)
    np.testing.assert_array_equal(out[:, 1:], 0.0)


def test_embed_rejects_wrong_size(tiny_config):
    params = transdoa.init_params(tiny_config, 0)
    with pytest.raises(exceptions.DimensionMismatch):
        transdoa.embed_scm(random_scm(5), params, tiny_config)


def _layer(seed, d=16):
    rng = np.random.default_rng(seed)
    return dict((name, rng.normal(0.0, 0.3, (d, d)))
                for name in ("w_q", "w_k", "w_v", "w_o"))


def test_zero_queries_and_keys_average_values(tiny_config):
    layer = _layer(1)
    layer["w_q"][...] = 0.0
    layer["w_k"][...] = 0.0
    z = np.random.default_rng(2).normal(size=(16, 5))
    out = transdoa.mhsa(z, layer, tiny_config)
    expected = layer["w_o"].dot(layer["w_v"]).dot(z.mean(axis=1))
    assert out.shape == z.shape
    for column in out.T:
        np.testing.assert_allclose(column, expected, atol=1e-12)


def test_attention_is_permutation_equivariant(tiny_config):
    layer = _layer(3)
    z = np.random.default_rng(4).normal(size=(16, 5))
    order = [0, 3, 1, 4, 2]
    out = transdoa.mhsa(z, layer, tiny_config)
    permuted = transdoa.mhsa(z[:, order], layer, tiny_config)
    np.testing.assert_allclose(permuted, out[:, order], atol=1e-12)


def test_forward_shapes_and_determinism(tiny_config):
    params = transdoa.init_params(tiny_config, 0)
    scm = random_scm(4)
    z, thetas = transdoa.forward(scm, params, tiny_config)
    assert z.shape == (16,) and thetas.shape == (2,)
    _, again = transdoa.forward(scm, params, tiny_config)
    np.testing.assert_array_equal(thetas, again)
    assert np.all(np.abs(thetas) < 1.0)


def test_forward_is_scale_invariant(tiny_config):
    params = transdoa.init_params(tiny_config, 0)
    scm = random_scm(4)
    _, a = transdoa.forward(scm, params, tiny_config)
    _, b = transdoa.forward(1e3 * scm, params, tiny_config)
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_two_dimensional_head_splits_outputs():
    config = model_config.ModelConfig(4, 2, output_mode=model_config.TWO_D,
                                      embed_dim=8, depth=1, heads=2)
    params = transdoa.init_params(config, 0)
    z, thetas, phis = transdoa.forward(random_scm(4), params, config)
    assert thetas.shape == (2,) and phis.shape == (2,)
    params["head.bias"].data[...] = [1.0, 2.0, 3.0, 4.0]
    params["head.weight"].data[...] = 0.0
    _, thetas, phis = transdoa.forward(random_scm(4), params, config)
    np.testing.assert_array_equal(thetas, [1.0, 2.0])
    np.testing.assert_array_equal(phis, [3.0, 4.0])


def test_predict_matches_forward(tiny_config, tiny_data):
    model = transdoa.TransDoa.initialize(tiny_config, 1)
    est = model.predict(tiny_data.scms, batch_size=5)
    assert est.shape == (12, 1, 2)
    _, thetas = transdoa.forward(tiny_data.scms[7], model.params,
                                 tiny_config)
    np.testing.assert_allclose(est[7, 0], thetas, atol=1e-12)
    features = model.features(tiny_data.scms)
    assert features.shape == (12, 16)
    assert model.predict(tiny_data.scms[:0]).shape == (0, 1, 2)


def test_copy_is_independent(tiny_config):
    model = transdoa.TransDoa.initialize(tiny_config, 1)
    clone = model.copy(trainable=False)
    clone.params["embed"].data[...] = 0.0
    assert np.any(model.params["embed"].data != 0.0)
    assert not clone.params["embed"].requires_grad


@pytest.mark.parametrize("seed", range(4))
def test_full_model_gradient(tiny_config, seed):
    rng = np.random.default_rng(seed)
    params = transdoa.init_params(tiny_config, seed)
    for p in params.values():
        p.data += rng.normal(0.0, 0.1, p.shape)
    scms = np.stack([random_scm(4, seed), random_scm(4, seed + 10)])
    labels = rng.uniform(-1.0, 1.0, (2, 1, 2))
    names = list(params)

    def loss(*tensors):
        bound = dict(zip(names, tensors))
        _, outputs = transdoa.forward_batch(tiny_config, bound, scms)
        return losses.pit_loss_batch(outputs, labels)

    report = gradcheck.grad_check(loss, [params[n] for n in names],
                                  max_entries=5, seed=seed)
    assert report.passed, report


def test_non_finite_input_fails(tiny_config):
    params = transdoa.init_params(tiny_config, 0)
    scm = random_scm(4)
    scm[0, 1] = np.nan
    with pytest.raises(exceptions.NumericFailure):
        transdoa.forward(scm, params, tiny_config)


def test_tensor_parameters_accepted_by_mhsa(tiny_config):
    layer = dict((k, tn.Tensor(v)) for k, v in _layer(5).items())
    assert transdoa.mhsa(np.ones((16, 5)), layer, tiny_config).shape == \
        (16, 5)
