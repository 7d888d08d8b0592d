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

from rally_doa.model import checkpoint as doa_checkpoint
from rally_doa.model import transdoa
from rally_doa import exceptions


@pytest.fixture
def saved(tmp_path, tiny_config):
    params = transdoa.init_params(tiny_config, 2)
    ckpt = doa_checkpoint.Checkpoint(tiny_config, params,
                                     {"seed": 2, "training": {"epochs": 1}})
    path = str(tmp_path / "model.doaw")
    doa_checkpoint.save_checkpoint(path, ckpt)
    return path, ckpt


def test_checkpoint_is_bit_exact(saved):
    path, ckpt = saved
    loaded = doa_checkpoint.load_checkpoint(path)
    assert loaded.config == ckpt.config
    assert loaded.meta == {"seed": 2, "training": {"epochs": 1}}
    assert list(loaded.params) == list(ckpt.params)
    for name, p in ckpt.params.items():
        assert loaded.params[name].data.tobytes() == p.data.tobytes()
        assert not loaded.params[name].requires_grad


def test_resave_gives_identical_bytes(saved, tmp_path):
    path, _ = saved
    again = str(tmp_path / "again.doaw")
    doa_checkpoint.save_checkpoint(again,
                                   doa_checkpoint.load_checkpoint(path))
    with open(path, "rb") as a, open(again, "rb") as b:
        assert a.read() == b.read()


def test_file_starts_with_magic(saved):
    path, _ = saved
    with open(path, "rb") as f:
        assert f.read(8) == b"DOAW\x01\x00\x00\x00"


def test_loaded_model_predicts_like_original(saved, tiny_data):
    path, ckpt = saved
    loaded = doa_checkpoint.load_checkpoint(path)
    np.testing.assert_array_equal(loaded.model.predict(tiny_data.scms),
                                  ckpt.model.predict(tiny_data.scms))


@pytest.mark.parametrize("mutate", [
    lambda buf: b"XXXX" + buf[4:],
    lambda buf: buf[:-3],
    lambda buf: buf + b"\x00",
    lambda buf: buf[:4] + b"\x02" + buf[5:],
    lambda buf: buf[:12] + b"\xff" + buf[13:],
    lambda buf: buf[:12] + b"x" + buf[13:],
])
def test_corrupt_checkpoints(saved, tmp_path, mutate):
    path, _ = saved
    with open(path, "rb") as f:
        buf = f.read()
    bad = str(tmp_path / "bad.doaw")
    with open(bad, "wb") as f:
        f.write(mutate(buf))
    with pytest.raises(exceptions.DatasetFormatError):
        doa_checkpoint.load_checkpoint(bad)


def test_missing_checkpoint(tmp_path):
    with pytest.raises(exceptions.DatasetFormatError):
        doa_checkpoint.load_checkpoint(str(tmp_path / "none.doaw"))


def test_metadata_without_model_is_rejected(saved, tmp_path):
    path, _ = saved
    with open(path, "rb") as f:
        buf = f.read()
    length = int(np.frombuffer(buf[8:12], dtype="<u4")[0])
    meta = b"[" + b" " * (length - 2) + b"]"
    bad = str(tmp_path / "bad.doaw")
    with open(bad, "wb") as f:
        f.write(buf[:12] + meta + buf[12 + length:])
    with pytest.raises(exceptions.DatasetFormatError):
        doa_checkpoint.load_checkpoint(bad)


def test_save_into_unwritable_location(saved, tmp_path):
    _, ckpt = saved
    blocker = tmp_path / "blocker"
    blocker.write_text(u"")
    with pytest.raises(exceptions.OutputError):
        doa_checkpoint.save_checkpoint(str(blocker / "model.doaw"), ckpt)
