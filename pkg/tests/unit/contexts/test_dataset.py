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

import os

import numpy as np
import pytest

from rally_doa.array import dataset as doa_dataset
from rally_doa.array import presets
from rally_doa.common import utils
from rally_doa.contexts.doa import dataset as dataset_context


def make_context(config):
    return {"task": {"uuid": "task-uuid"},
            "owner_id": "owner-id",
            "config": {"doa_dataset": config}}


@pytest.fixture
def small():
    ctx = dataset_context.DatasetContext(make_context(
        {"train": 4, "val": 0, "test": 3, "seed": 1}))
    yield ctx
    ctx.cleanup()


def test_setup_writes_requested_roles(small):
    small.setup()
    doa = small.context["doa"]
    assert sorted(doa["datasets"]) == ["test", "train"]
    assert os.path.isdir(doa["workdir"])
    test = doa_dataset.DoaDataset.load(doa["datasets"]["test"])
    assert len(test) == 3
    assert doa["run_config"]["scenario"]["preset"] == presets.DEFAULT_PRESET


def test_records_follow_role_seed(small):
    small.setup()
    scenario = presets.scenario(presets.DEFAULT_PRESET)
    expected = doa_dataset.generate_dataset(scenario, None, 3,
                                            utils.role_seed(1, "test"))
    loaded = doa_dataset.DoaDataset.load(
        small.context["doa"]["datasets"]["test"])
    np.testing.assert_array_equal(loaded.labels, expected.labels)
    np.testing.assert_array_equal(loaded.scms, expected.scms)


def test_cleanup_removes_workdir(small):
    small.setup()
    workdir = small.context["doa"]["workdir"]
    small.cleanup()
    assert not os.path.exists(workdir)


def test_ideal_train_set():
    ctx = dataset_context.DatasetContext(make_context(
        {"rho": 1.0, "ideal_train": True, "train": 2, "val": 2, "test": 0}))
    try:
        ctx.setup()
        paths = ctx.context["doa"]["datasets"]
        assert doa_dataset.DoaDataset.load(paths["train"]).rho == 0.0
        assert doa_dataset.DoaDataset.load(paths["val"]).rho == 1.0
    finally:
        ctx.cleanup()


def test_run_config_overrides():
    ctx = dataset_context.DatasetContext(make_context(
        {"snr_db": 20.0, "snapshots": 50, "rho": 0.5,
         "flags": {"gain": True}, "test": 1}))
    rc = ctx.run_config()
    scenario = rc.scenario()
    assert scenario.snr_db == 20.0
    assert scenario.snapshots == 50
    assert rc.data["imperfections"] == {"rho": 0.5, "flags": {"gain": True}}
    assert rc.counts("test") == 1
