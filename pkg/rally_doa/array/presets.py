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

"""Named simulation scenarios and their parameter sets."""

import copy

from rally_doa.array import geometry as geo
from rally_doa.array import simulator
from rally_doa import exceptions

DEFAULT_PRESET = "scen1-desk"

SCEN4_THETAS = [-135.0, -120.0, -60.0, 0.0, 60.0]
SCEN4_PHIS = [35.0, 30.0, 10.0, 30.0, 10.0]

# Every preset: geometry, sources, nominal conditions ("params" key picks
# the parameter set), dataset sizes, and optional model/training overrides.
PRESETS = {
    "scen1": {
        "geometry": {"kind": geo.ULA, "element_count": 8},
        "source_count": 3,
        "params": {
            "params1": {"snr_db": -5.0, "snapshots": 10},
            "params2": {"snr_db": -5.0, "snapshots": 10,
                        "snr_sweep": "-20:5:5"},
            "params3": {"snr_db": -10.0, "snapshots": 10,
                        "snapshots_sweep": "10:100:10"},
        },
        "default_params": "params1",
        "train_count": 50000,
        "val_count": 20000,
        "test_count": 5000,
    },
    "scen2": {
        "geometry": {"kind": geo.ULA, "element_count": 8},
        "source_count": 7,
        "params": {
            "params1": {"snr_db": -5.0, "snapshots": 10,
                        "snr_sweep": "-20:5:5"},
        },
        "default_params": "params1",
        "train_count": 50000,
        "val_count": 20000,
        "test_count": 5000,
    },
    "scen3": {
        "geometry": {"kind": geo.ULA, "element_count": 16},
        "source_count": 3,
        "params": {
            "params1": {"snr_db": -5.0, "snapshots": 10,
                        "snr_sweep": "-20:5:5"},
        },
        "default_params": "params1",
        "train_count": 50000,
        "val_count": 20000,
        "test_count": 5000,
    },
    "scen4": {
        "geometry": {"kind": geo.UCA, "element_count": 12},
        "source_count": 5,
        "params": {
            "params1": {"snr_db": -5.0, "snapshots": 50},
            "params2": {"snr_db": 5.0, "snapshots": 10},
            "fixed": {"snr_db": 5.0, "snapshots": 10,
                      "doa": {"kind": simulator.DETERMINISTIC,
                              "thetas": SCEN4_THETAS,
                              "phis": SCEN4_PHIS}},
        },
        "default_params": "params1",
        "train_count": 50000,
        "val_count": 20000,
        "test_count": 5000,
    },
    "scen1-desk": {
        "geometry": {"kind": geo.ULA, "element_count": 8},
        "source_count": 3,
        "params": {
            "params1": {"snr_db": 0.0, "snapshots": 10},
        },
        "default_params": "params1",
        "train_count": 8000,
        "val_count": 1000,
        "test_count": 1000,
        "model": {"embed_dim": 64, "depth": 2, "heads": 4},
        "training": {"epochs": 50, "learning_rate": 1e-3, "batch_size": 64},
    },
}


def names():
    return sorted(PRESETS)


def get(name):
    """Deep copy of preset `name`."""
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise exceptions.InvalidArgument(
            "unknown scenario preset '%s', choose one of: %s"
            % (name, ", ".join(names())))


def parameter_set(name, params=None):
    preset = get(name)
    params = params or preset["default_params"]
    if params not in preset["params"]:
        raise exceptions.InvalidArgument(
            "preset '%s' has no parameter set '%s' (available: %s)"
            % (name, params, ", ".join(sorted(preset["params"]))))
    return preset["params"][params]


def sweep_range(name, params, quantity):
    """`lo:hi:step` sweep of `quantity` (snr_db or snapshots) stored with
    a parameter set.
    """
    values = parameter_set(name, params)
    key = {"snr_db": "snr_sweep", "snapshots": "snapshots_sweep"}.get(
        quantity)
    if key not in values:
        raise exceptions.InvalidArgument(
            "preset '%s' %s has no %s sweep"
            % (name, params or "default parameters", quantity))
    return values[key]


def scenario(name, params=None, snr_db=None, snapshots=None, doa=None,
             min_sep=None):
    """Build the SignalScenario of a preset, with optional overrides.

    :param name: preset name, e.g. scen1
    :param params: parameter set name; the preset default if omitted
    :param snr_db: override of the nominal SNR
    :param snapshots: override of the nominal snapshot count
    :param doa: DoaSpec or its dict form overriding the preset sampling
    :param min_sep: minimum separation for uniform sampling
    """
    preset = get(name)
    values = parameter_set(name, params)
    geometry = geo.ArrayGeometry.from_dict(preset["geometry"])
    if doa is None:
        doa = values.get("doa")
    if doa is None:
        doa_spec = simulator.DoaSpec.uniform(min_sep)
    elif isinstance(doa, simulator.DoaSpec):
        doa_spec = doa
    else:
        doa_spec = simulator.DoaSpec.from_dict(doa)
    return simulator.SignalScenario(
        geometry, preset["source_count"],
        values["snr_db"] if snr_db is None else snr_db,
        values["snapshots"] if snapshots is None else snapshots,
        doa_spec=doa_spec, name=name)
