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

from rally.common import cfg

CONF = cfg.CONF


DOA_OPTS = [
    cfg.IntOpt("threads",
               default=0,
               min=0,
               help="Worker threads for record generation and evaluation; "
                    "0 runs sequentially. DOA_THREADS env var overrides it"),
    cfg.FloatOpt("error_cap",
                 default=30.0,
                 help="Per-source absolute error cap and OSPA cut-off, deg"),
    cfg.FloatOpt("tolerance",
                 default=10.0,
                 help="Accuracy tolerance, deg"),
    cfg.FloatOpt("min_separation",
                 default=3.0,
                 help="Minimum pairwise separation of uniformly sampled "
                      "DOAs, deg"),
    cfg.IntOpt("max_sampling_attempts",
               default=10000,
               help="Rejection sampling attempts per record"),
    cfg.FloatOpt("music_grid_step",
                 default=0.05,
                 help="MUSIC 1D grid step, deg"),
    cfg.FloatOpt("music_grid_step_theta",
                 default=1.0,
                 help="MUSIC 2D azimuth grid step, deg"),
    cfg.FloatOpt("music_grid_step_phi",
                 default=0.5,
                 help="MUSIC 2D elevation grid step, deg"),
    cfg.FloatOpt("coupling_magnitude",
                 default=0.3,
                 help="Magnitude of the adjacent-element coupling "
                      "coefficient"),
    cfg.FloatOpt("coupling_phase",
                 default=60.0,
                 help="Phase of the adjacent-element coupling coefficient, "
                      "deg")
]

TRANSDOA_OPTS = [
    cfg.IntOpt("embed_dim", default=64, help="Embedding dimension D"),
    cfg.IntOpt("depth", default=2, help="Number of encoder layers L"),
    cfg.IntOpt("heads", default=4, help="Attention heads h"),
    cfg.IntOpt("mlp_ratio", default=4, help="Feed-forward expansion factor"),
    cfg.FloatOpt("init_std",
                 default=0.02,
                 help="Standard deviation of the normal initialization"),
    cfg.FloatOpt("layernorm_eps", default=1e-5, help="Layernorm epsilon"),
    cfg.FloatOpt("learning_rate", default=1e-4, help="Adam learning rate"),
    cfg.FloatOpt("beta1", default=0.9, help="Adam first moment decay"),
    cfg.FloatOpt("beta2", default=0.999, help="Adam second moment decay"),
    cfg.FloatOpt("adam_eps", default=1e-8, help="Adam epsilon"),
    cfg.IntOpt("epochs", default=500, help="Maximum training epochs"),
    cfg.IntOpt("batch_size", default=256, help="Mini-batch size"),
    cfg.IntOpt("patience",
               default=30,
               help="Epochs without validation improvement before "
                    "early stopping")
]

TRANSFER_OPTS = [
    cfg.FloatOpt("alpha", default=1.0, help="Weight of the cosine loss"),
    cfg.FloatOpt("beta", default=1.0, help="Weight of the MSE loss"),
    cfg.FloatOpt("learning_rate",
                 default=1e-4,
                 help="Adam learning rate of the target extractor"),
    cfg.IntOpt("batches", default=4, help="Batches per epoch"),
    cfg.IntOpt("epochs", default=100, help="Maximum alignment epochs"),
    cfg.StrOpt("head_policy",
               default="ReuseSourceHead",
               choices=["ReuseSourceHead", "FineTuneHead"],
               help="What happens to the estimation head after alignment"),
    cfg.IntOpt("head_epochs",
               default=20,
               help="Head fine-tuning epochs for FineTuneHead")
]


def list_opts():
    """Return a list of configuration options.

    This is entry-point which is configured via setup.py
    """

    return {"doa": DOA_OPTS,
            "transdoa": TRANSDOA_OPTS,
            "transfer": TRANSFER_OPTS}


def register_opts():
    """Register all options in the global CONF object.

    Runs when this module is imported. Every module that reads ``CONF.doa``,
    ``CONF.transdoa`` or ``CONF.transfer`` imports it, so the groups exist
    under the ``doa`` command and in library use as well as inside Rally.
    Registering the same option objects again, as Rally does through the
    ``options`` entry point, is a no-op.
    """
    for category, options in list_opts().items():
        group = cfg.OptGroup(name=category, title="%s options" % category)
        CONF.register_group(group)
        CONF.register_opts(options, group=group)


register_opts()
