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

import pytest

from rally.common import cfg

from rally_doa.array import dataset as doa_dataset
from rally_doa.array import geometry
from rally_doa.array import simulator
from rally_doa.common import opts  # noqa: F401
from rally_doa.model import config as model_config

SLOW_ENV = "DOA_RUN_SLOW"


def pytest_collection_modifyitems(config, items):
    if os.environ.get(SLOW_ENV) == "1":
        return
    skip_slow = pytest.mark.skip(reason="set %s=1 to run" % SLOW_ENV)
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def sequential(monkeypatch):
    monkeypatch.delenv("DOA_THREADS", raising=False)


@pytest.fixture
def conf():
    """CONF with every override made by the test rolled back."""
    yield cfg.CONF
    cfg.CONF.reset()


@pytest.fixture
def tiny_config():
    """M=4, K=2 network small enough for finite differences."""
    return model_config.ModelConfig(4, 2, embed_dim=16, depth=1, heads=2)


@pytest.fixture
def tiny_scenario():
    return simulator.SignalScenario(geometry.ArrayGeometry.ula(4), 2,
                                    snr_db=10.0, snapshots=20, name="tiny")


@pytest.fixture
def tiny_data(tiny_scenario):
    return doa_dataset.generate_dataset(tiny_scenario, None, 12, 5)
