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

import struct

import numpy as np
import pytest

from rally_doa.array import dataset as doa_dataset
from rally_doa.array import imperfections
from rally_doa.array import presets
from rally_doa import exceptions


@pytest.fixture
def scenario():
    return presets.scenario("scen1")


def read(path):
    with open(str(path), "rb") as f:
        return f.read()


def test_empty_dataset_is_a_valid_file(tmp_path, scenario):
    path = str(tmp_path / "empty.doa")
    doa_dataset.generate_dataset(scenario, None, 0, 1, path)
    assert len(read(path)) == doa_dataset.HEADER.size
    loaded = doa_dataset.DoaDataset.load(path)
    assert len(loaded) == 0
    assert loaded.element_count == 8 and loaded.source_count == 3


def test_header_layout(tmp_path, scenario):
    path = str(tmp_path / "d.doa")
    doa_dataset.generate_dataset(scenario, None, 2, 1, path)
    buf = read(path)
    magic, version, m, k, kind, dims, reserved, rho, count = struct.unpack(
        "<4sIIIBBHdQ", buf[:36])
    assert (magic, version, m, k, kind, dims, reserved, rho, count) == (
        b"DOA1", 1, 8, 3, 0, 1, 0, 0.0, 2)
    assert len(buf) == 36 + 2 * (3 * 8 + 64 * 16)


def test_identical_arguments_give_identical_bytes(tmp_path, scenario):
    imp = imperfections.build_imperfections(0.4, None, 8)
    first, second = str(tmp_path / "a.doa"), str(tmp_path / "b.doa")
    doa_dataset.generate_dataset(scenario, imp, 5, 42, first)
    doa_dataset.generate_dataset(scenario, imp, 5, 42, second)
    assert read(first) == read(second)


def test_zero_rho_matches_disabled_imperfections(tmp_path, scenario):
    paths = [str(tmp_path / name) for name in ("none", "rho0", "off")]
    doa_dataset.generate_dataset(scenario, None, 4, 7, paths[0])
    doa_dataset.generate_dataset(
        scenario, imperfections.build_imperfections(0.0, None, 8), 4, 7,
        paths[1])
    doa_dataset.generate_dataset(
        scenario, imperfections.build_imperfections(1.0, {}, 8), 4, 7,
        paths[2])
    assert read(paths[0]) == read(paths[1]) == read(paths[2])


def test_thread_pool_keeps_record_order(tmp_path, scenario, monkeypatch):
    sequential = doa_dataset.generate_dataset(scenario, None, 12, 3)
    monkeypatch.setenv("DOA_THREADS", "4")
    parallel = doa_dataset.generate_dataset(scenario, None, 12, 3)
    np.testing.assert_array_equal(sequential.scms, parallel.scms)
    np.testing.assert_array_equal(sequential.labels, parallel.labels)


def test_save_and_load_are_exact(tmp_path):
    scenario = presets.scenario("scen4")
    imp = imperfections.build_imperfections(0.8, None, 12,
                                            geometry=scenario.geometry)
    data = doa_dataset.generate_dataset(scenario, imp, 3, 11)
    path = str(tmp_path / "uca.doa")
    data.save(path)
    loaded = doa_dataset.DoaDataset.load(path)
    assert loaded.kind == "UCA" and loaded.rho == 0.8
    assert loaded.labels.shape == (3, 2, 5)
    np.testing.assert_array_equal(loaded.scms, data.scms)
    np.testing.assert_array_equal(loaded.labels, data.labels)


def test_records_use_derived_seeds(scenario):
    data = doa_dataset.generate_dataset(scenario, None, 3, 5)
    scm, label = doa_dataset.simulate_record(scenario, None, 5, 2)
    np.testing.assert_array_equal(data.scms[2], scm)
    np.testing.assert_array_equal(data.labels[2], label)


def test_bad_magic(tmp_path, scenario):
    path = str(tmp_path / "d.doa")
    doa_dataset.generate_dataset(scenario, None, 1, 1, path)
    with open(path, "r+b") as f:
        f.write(b"XXXX")
    with pytest.raises(exceptions.DatasetFormatError):
        doa_dataset.DoaDataset.load(path)


def test_truncated_file(tmp_path, scenario):
    path = str(tmp_path / "d.doa")
    doa_dataset.generate_dataset(scenario, None, 2, 1, path)
    buf = read(path)
    with open(path, "wb") as f:
        f.write(buf[:-5])
    with pytest.raises(exceptions.DatasetFormatError):
        doa_dataset.DoaDataset.load(path)


def test_missing_file(tmp_path):
    with pytest.raises(exceptions.DatasetFormatError):
        doa_dataset.DoaDataset.load(str(tmp_path / "nope.doa"))


def test_model_check(scenario):
    data = doa_dataset.generate_dataset(scenario, None, 1, 1)
    data.check_model(8, 3, 1)
    with pytest.raises(exceptions.DimensionMismatch):
        data.check_model(8, 2, 1)


def test_negative_count(scenario):
    with pytest.raises(exceptions.InvalidArgument):
        doa_dataset.generate_dataset(scenario, None, -1, 1)
