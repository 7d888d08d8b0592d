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

from rally_doa.common import opts  # noqa: F401
from rally_doa import exceptions

CONF = cfg.CONF

ONE_D = "OneD"
TWO_D = "TwoD"
OUTPUT_MODES = (ONE_D, TWO_D)


class ModelConfig(object):
    """Architecture of a TransDOA network.

    Unset sizes fall back to the ``[transdoa]`` options.
    """

    def __init__(self, element_count, source_count, output_mode=ONE_D,
                 embed_dim=None, depth=None, heads=None, mlp_ratio=None,
                 init_std=None, layernorm_eps=None):
        self.element_count = int(element_count)
        self.source_count = int(source_count)
        self.output_mode = output_mode
        c = CONF.transdoa
        self.embed_dim = int(c.embed_dim if embed_dim is None else embed_dim)
        self.depth = int(c.depth if depth is None else depth)
        self.heads = int(c.heads if heads is None else heads)
        self.mlp_ratio = int(c.mlp_ratio if mlp_ratio is None
                             else mlp_ratio)
        self.init_std = float(c.init_std if init_std is None else init_std)
        self.layernorm_eps = float(c.layernorm_eps if layernorm_eps is None
                                   else layernorm_eps)
        self._validate()

    def _validate(self):
        if self.output_mode not in OUTPUT_MODES:
            raise exceptions.InvalidArgument(
                "output mode must be one of %s, got %r"
                % (", ".join(OUTPUT_MODES), self.output_mode))
        for name in ("element_count", "source_count", "embed_dim", "depth",
                     "heads", "mlp_ratio"):
            if getattr(self, name) < 1:
                raise exceptions.InvalidArgument(
                    "%s must be positive, got %s" % (name,
                                                     getattr(self, name)))
        if self.embed_dim % self.heads:
            raise exceptions.InvalidArgument(
                "embedding dimension %d is not divisible by %d heads"
                % (self.embed_dim, self.heads))

    @property
    def head_dim(self):
        return self.embed_dim // self.heads

    @property
    def label_dims(self):
        return 1 if self.output_mode == ONE_D else 2

    @property
    def output_count(self):
        return self.label_dims * self.source_count

    @property
    def sequence_length(self):
        return self.element_count + 1

    @classmethod
    def for_dataset(cls, dataset, **kwargs):
        mode = ONE_D if dataset.label_dims == 1 else TWO_D
        return cls(dataset.element_count, dataset.source_count,
                   output_mode=mode, **kwargs)

    def to_dict(self):
        return {"element_count": self.element_count,
                "source_count": self.source_count,
                "output_mode": self.output_mode,
                "embed_dim": self.embed_dim,
                "depth": self.depth,
                "heads": self.heads,
                "mlp_ratio": self.mlp_ratio,
                "init_std": self.init_std,
                "layernorm_eps": self.layernorm_eps}

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    def __eq__(self, other):
        return (isinstance(other, ModelConfig)
                and self.to_dict() == other.to_dict())

    def __ne__(self, other):
        return not self.__eq__(other)


class TrainConfig(object):
    """Optimizer and schedule of supervised training."""

    def __init__(self, learning_rate=None, beta1=None, beta2=None, eps=None,
                 epochs=None, batch_size=None, patience=None):
        c = CONF.transdoa
        self.learning_rate = float(c.learning_rate if learning_rate is None
                                   else learning_rate)
        self.beta1 = float(c.beta1 if beta1 is None else beta1)
        self.beta2 = float(c.beta2 if beta2 is None else beta2)
        self.eps = float(c.adam_eps if eps is None else eps)
        self.epochs = int(c.epochs if epochs is None else epochs)
        self.batch_size = int(c.batch_size if batch_size is None
                              else batch_size)
        self.patience = int(c.patience if patience is None else patience)
        if self.epochs < 0 or self.batch_size < 1 or self.patience < 1:
            raise exceptions.InvalidArgument(
                "training needs epochs >= 0, batch_size >= 1 and "
                "patience >= 1")
        if self.learning_rate <= 0:
            raise exceptions.InvalidArgument(
                "learning rate must be positive, got %s"
                % self.learning_rate)

    def to_dict(self):
        return {"learning_rate": self.learning_rate,
                "beta1": self.beta1,
                "beta2": self.beta2,
                "eps": self.eps,
                "epochs": self.epochs,
                "batch_size": self.batch_size,
                "patience": self.patience}

    @classmethod
    def from_dict(cls, data):
        return cls(**data)
