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

import pytest

from rally_doa.array import geometry as geo
from rally_doa.array import presets
from rally_doa.array import simulator
from rally_doa import exceptions


@pytest.mark.parametrize("name,kind,m,k", [("scen1", geo.ULA, 8, 3),
                                           ("scen2", geo.ULA, 8, 7),
                                           ("scen3", geo.ULA, 16, 3),
                                           ("scen4", geo.UCA, 12, 5),
                                           ("scen1-desk", geo.ULA, 8, 3)])
def test_preset_geometry(name, kind, m, k):
    scenario = presets.scenario(name)
    assert scenario.geometry.kind == kind
    assert scenario.geometry.element_count == m
    assert scenario.source_count == k
    assert scenario.name == name


def test_scen1_defaults():
    scenario = presets.scenario("scen1")
    assert scenario.fov.theta == (-60.0, 60.0)
    assert (scenario.snr_db, scenario.snapshots) == (-5.0, 10)
    assert scenario.doa_spec.kind == simulator.UNIFORM
    assert scenario.doa_spec.min_sep == 3.0


def test_overrides():
    scenario = presets.scenario("scen1", "params3", snr_db=3.0,
                                doa={"kind": "equidistant"})
    assert scenario.snr_db == 3.0
    assert scenario.snapshots == 10
    assert scenario.doa_spec.kind == simulator.EQUIDISTANT


def test_desk_preset_sizes():
    preset = presets.get("scen1-desk")
    assert preset["train_count"] == 8000
    assert preset["model"] == {"embed_dim": 64, "depth": 2, "heads": 4}
    assert preset["training"]["epochs"] == 50


def test_get_returns_a_copy():
    presets.get("scen1")["source_count"] = 99
    assert presets.get("scen1")["source_count"] == 3


def test_sweep_ranges():
    assert presets.sweep_range("scen1", "params2", "snr_db") == "-20:5:5"
    assert presets.sweep_range("scen1", "params3",
                               "snapshots") == "10:100:10"
    with pytest.raises(exceptions.InvalidArgument):
        presets.sweep_range("scen1", "params1", "snr_db")


def test_unknown_names():
    with pytest.raises(exceptions.InvalidArgument):
        presets.get("scen9")
    with pytest.raises(exceptions.InvalidArgument):
        presets.scenario("scen1", "params9")
