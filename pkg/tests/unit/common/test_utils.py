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

from rally_doa.common import utils
from rally_doa import exceptions


def test_mix_seed_is_stable_and_spreads():
    assert utils.mix_seed(1, 0) == utils.mix_seed(1, 0)
    seeds = set(utils.mix_seed(1, i) for i in range(100))
    assert len(seeds) == 100
    assert utils.mix_seed(1, 0) != utils.mix_seed(2, 0)


def test_role_seeds_differ():
    seeds = [utils.role_seed(0, role) for role in utils.ROLE_STREAMS]
    assert len(set(seeds)) == len(seeds)


def test_spawned_generators_are_independent_and_repeatable():
    a1, b1 = utils.spawn_generators(9, 2)
    a2, _ = utils.spawn_generators(9, 2)
    x = a1.standard_normal(4)
    np.testing.assert_array_equal(x, a2.standard_normal(4))
    assert not np.array_equal(x, b1.standard_normal(4))


def test_thread_count_prefers_environment(conf, monkeypatch):
    conf.set_override("threads", 3, "doa")
    assert utils.thread_count() == 3
    monkeypatch.setenv("DOA_THREADS", "0")
    assert utils.thread_count() == 0


def test_ordered_map_keeps_order_with_threads(monkeypatch):
    monkeypatch.setenv("DOA_THREADS", "4")
    squares = utils.ordered_map(np.square, range(50))
    assert squares == [i * i for i in range(50)]


def test_config_hash_ignores_key_order():
    assert utils.config_hash({"a": 1, "b": [1, 2]}) == \
        utils.config_hash({"b": [1, 2], "a": 1})
    assert len(utils.config_hash({})) == 64


def test_parse_range():
    assert utils.parse_range("-20:5:5") == [-20.0, -15.0, -10.0, -5.0, 0.0,
                                            5.0]
    assert utils.parse_range("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]


@pytest.mark.parametrize("value", ["1:2", "a:b:c", "0:1:0", "5:1:1"])
def test_parse_range_rejects(value):
    with pytest.raises(exceptions.InvalidArgument):
        utils.parse_range(value)


def test_file_digest(tmp_path):
    path = tmp_path / "f"
    path.write_bytes(b"abc")
    assert utils.file_digest(str(path)) == (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")


def test_open_output_creates_directories(tmp_path):
    path = tmp_path / "a" / "b" / "out.txt"
    with utils.open_output(str(path)) as f:
        f.write("x")
    assert path.read_text() == "x"


def test_open_output_maps_os_errors(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text(u"")
    with pytest.raises(exceptions.OutputError) as e:
        with utils.open_output(str(blocker / "out.txt")):
            pass
    assert e.value.exit_code == exceptions.EXIT_USAGE
