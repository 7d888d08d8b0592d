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

"""Run configuration: preset, imperfection knobs, model, optimizers, seed.

A run configuration file is a JSON object checked against
RUN_CONFIG_SCHEMA; every section is optional and falls back to the preset
and then to the ``[doa]``, ``[transdoa]`` and ``[transfer]`` options.
"""

import copy
import json

import jsonschema
import numpy as np

from rally.common import cfg

from rally_doa.array import imperfections
from rally_doa.array import presets
from rally_doa.common import opts  # noqa: F401
from rally_doa.common import utils
from rally_doa.model import config as model_config
from rally_doa.transfer import calibration
from rally_doa import exceptions

CONF = cfg.CONF

_positive_int = {"type": "integer", "minimum": 1}
_positive = {"type": "number", "exclusiveMinimum": 0}

RUN_CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "scenario": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "preset": {"type": "string"},
                "params": {"type": "string"},
                "snr_db": {"type": "number"},
                "snapshots": _positive_int,
                "min_sep": {"type": "number", "minimum": 0},
                "doa": {
                    "type": "object",
                    "properties": {
                        "kind": {"enum": ["uniform", "equidistant",
                                          "deterministic", "sweep"]},
                        "min_sep": {"type": "number", "minimum": 0},
                        "thetas": {"type": "array",
                                   "items": {"type": "number"}},
                        "phis": {"type": "array",
                                 "items": {"type": "number"}},
                        "interval": _positive,
                        "step": _positive
                    },
                    "required": ["kind"],
                    "additionalProperties": False
                }
            }
        },
        "imperfections": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rho": {"type": "number", "minimum": 0, "maximum": 1},
                "flags": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": dict(
                        (name, {"type": "boolean"})
                        for name in imperfections.FLAG_NAMES)
                },
                "gamma": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "magnitude": {"type": "number", "minimum": 0,
                                      "exclusiveMaximum": 1},
                        "phase_deg": {"type": "number"}
                    }
                },
                "mc_zero_diag": {"type": "boolean"}
            }
        },
        "model": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "embed_dim": _positive_int,
                "depth": _positive_int,
                "heads": _positive_int,
                "mlp_ratio": _positive_int,
                "init_std": _positive,
                "layernorm_eps": _positive
            }
        },
        "training": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "learning_rate": _positive,
                "beta1": {"type": "number", "minimum": 0, "maximum": 1},
                "beta2": {"type": "number", "minimum": 0, "maximum": 1},
                "eps": _positive,
                "epochs": {"type": "integer", "minimum": 0},
                "batch_size": _positive_int,
                "patience": _positive_int
            }
        },
        "transfer": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "alpha": {"type": "number", "minimum": 0},
                "beta": {"type": "number", "minimum": 0},
                "learning_rate": _positive,
                "batches": _positive_int,
                "epochs": {"type": "integer", "minimum": 0},
                "head_policy": {"enum": ["ReuseSourceHead",
                                         "FineTuneHead"]},
                "head_epochs": {"type": "integer", "minimum": 0}
            }
        },
        "counts": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "train": {"type": "integer", "minimum": 0},
                "val": {"type": "integer", "minimum": 0},
                "test": {"type": "integer", "minimum": 0}
            }
        },
        "seed": {"type": "integer", "minimum": 0},
        # written into sidecars by gen and eval, ignored on load
        "count": {"type": "integer", "minimum": 0},
        "eval": {"type": "object"}
    }
}

MODEL_KEYS = tuple(sorted(
    RUN_CONFIG_SCHEMA["properties"]["model"]["properties"]))


def validate(data):
    try:
        jsonschema.validate(data, RUN_CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise exceptions.InvalidArgument(
            "run configuration at %s: %s" % (path, e.message))


def load(path):
    try:
        with open(path) as f:
            data = json.load(f)
    except (IOError, ValueError) as e:
        raise exceptions.InvalidArgument(
            "cannot read run configuration '%s': %s" % (path, e))
    validate(data)
    return data


def merge(base, override):
    """Recursively overlay `override` on a copy of `base`."""
    result = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = merge(result[key], value)
        elif value is not None:
            result[key] = copy.deepcopy(value)
    return result


class RunConfig(object):
    """Resolved settings of one run."""

    def __init__(self, data=None):
        data = copy.deepcopy(data or {})
        validate(data)
        scenario = data.setdefault("scenario", {})
        scenario.setdefault("preset", presets.DEFAULT_PRESET)
        preset = presets.get(scenario["preset"])
        scenario.setdefault("params", preset["default_params"])
        self.data = merge({"model": preset.get("model", {}),
                           "training": preset.get("training", {}),
                           "counts": {"train": preset["train_count"],
                                      "val": preset["val_count"],
                                      "test": preset["test_count"]}},
                          data)
        self.data.setdefault("seed", 0)
        self.data.setdefault("imperfections", {})

    @classmethod
    def from_file(cls, path, overrides=None):
        return cls(merge(load(path), overrides))

    @property
    def seed(self):
        return int(self.data["seed"])

    @property
    def preset(self):
        return self.data["scenario"]["preset"]

    def counts(self, role):
        return int(self.data["counts"][role])

    def scenario(self):
        s = self.data["scenario"]
        return presets.scenario(s["preset"], params=s.get("params"),
                                snr_db=s.get("snr_db"),
                                snapshots=s.get("snapshots"),
                                doa=s.get("doa"), min_sep=s.get("min_sep"))

    def _gamma_parts(self):
        g = self.data["imperfections"].get("gamma", {})
        return (float(g.get("magnitude", CONF.doa.coupling_magnitude)),
                float(g.get("phase_deg", CONF.doa.coupling_phase)))

    def gamma(self):
        magnitude, phase = self._gamma_parts()
        return magnitude * np.exp(1j * np.deg2rad(phase))

    def imperfections(self, geometry=None):
        imp = self.data["imperfections"]
        geometry = geometry or self.scenario().geometry
        return imperfections.build_imperfections(
            imp.get("rho", 0.0), imp.get("flags"), geometry.element_count,
            gamma=self.gamma(), geometry=geometry,
            mc_zero_diag=imp.get("mc_zero_diag", False))

    def model_config(self, scenario=None):
        scenario = scenario or self.scenario()
        mode = (model_config.ONE_D if scenario.geometry.label_dims == 1
                else model_config.TWO_D)
        return model_config.ModelConfig(scenario.geometry.element_count,
                                        scenario.source_count,
                                        output_mode=mode,
                                        **self.data["model"])

    def train_config(self):
        return model_config.TrainConfig(**self.data["training"])

    def transfer_config(self):
        return calibration.TransferConfig(**self.data.get("transfer", {}))

    def resolved(self):
        """Fully resolved configuration in run configuration form.

        Every default is spelled out, so passing the result back as a run
        configuration repeats the run exactly.
        """
        scenario = self.scenario()
        imp = self.data["imperfections"]
        magnitude, phase = self._gamma_parts()
        model = self.model_config(scenario).to_dict()
        return {"scenario": {"preset": self.preset,
                             "params": self.data["scenario"]["params"],
                             "snr_db": scenario.snr_db,
                             "snapshots": scenario.snapshots,
                             "doa": scenario.doa_spec.to_dict()},
                "imperfections": {
                    "rho": float(imp.get("rho", 0.0)),
                    "flags": imperfections.normalize_flags(imp.get("flags")),
                    "gamma": {"magnitude": magnitude, "phase_deg": phase},
                    "mc_zero_diag": bool(imp.get("mc_zero_diag", False))},
                "model": dict((name, model[name]) for name in MODEL_KEYS),
                "training": self.train_config().to_dict(),
                "transfer": self.transfer_config().to_dict(),
                "counts": dict(self.data["counts"]),
                "seed": self.seed}

    def config_hash(self):
        return utils.config_hash(self.resolved())
