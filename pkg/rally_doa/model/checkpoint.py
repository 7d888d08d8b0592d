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

"""``DOAW`` checkpoint files.

Layout (little-endian)::

    magic "DOAW" | u32 version | u32 blob length | JSON blob |
    u32 tensor count | per tensor: u16 name length, name, u8 rank,
    rank x u32 dims, row-major f64 data
"""

import collections
import json
import struct

import numpy as np

from rally.common import logging

from rally_doa.array import dataset as doa_dataset
from rally_doa.common import utils
from rally_doa.model import config as model_config
from rally_doa.model import transdoa
from rally_doa.nn import tensor as tn
from rally_doa import exceptions

LOG = logging.getLogger(__name__)

MAGIC = b"DOAW"
VERSION = 1


class Checkpoint(object):
    """Model configuration, parameters and the run metadata blob."""

    def __init__(self, config, params, meta=None):
        self.config = config
        self.params = params
        self.meta = meta or {}

    @property
    def model(self):
        return transdoa.TransDoa(self.config, self.params)

    def blob(self):
        data = dict(self.meta)
        data["model"] = self.config.to_dict()
        return data


def save_checkpoint(path, checkpoint):
    blob = utils.canonical_json(checkpoint.blob()).encode("utf-8")
    chunks = [MAGIC, struct.pack("<II", VERSION, len(blob)), blob,
              struct.pack("<I", len(checkpoint.params))]
    for name, tensor in checkpoint.params.items():
        encoded = name.encode("utf-8")
        data = np.ascontiguousarray(tensor.data, dtype="<f8")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<B", data.ndim))
        chunks.append(struct.pack("<%dI" % data.ndim, *data.shape))
        chunks.append(data.tobytes())
    with utils.open_output(path, "wb") as f:
        f.write(b"".join(chunks))
    LOG.info("Saved checkpoint with %d tensors to %s"
             % (len(checkpoint.params), path))


class _Reader(object):

    def __init__(self, buf, path):
        self.buf = buf
        self.path = path
        self.offset = 0

    def take(self, size):
        if self.offset + size > len(self.buf):
            raise exceptions.DatasetFormatError(
                path=self.path, message="truncated checkpoint")
        chunk = self.buf[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt):
        s = struct.Struct("<" + fmt)
        return s.unpack(self.take(s.size))

    def text(self, size):
        try:
            return self.take(size).decode("utf-8")
        except UnicodeDecodeError:
            raise exceptions.DatasetFormatError(
                path=self.path, message="invalid UTF-8 at offset %d"
                                        % (self.offset - size))


def load_checkpoint(path, trainable=False):
    """Read a checkpoint; parameters come back as Tensors."""
    reader = _Reader(doa_dataset.read_blob(path), path)
    if reader.take(4) != MAGIC:
        raise exceptions.DatasetFormatError(
            path=path, message="not a DOAW checkpoint")
    version, length = reader.unpack("II")
    if version != VERSION:
        raise exceptions.DatasetFormatError(
            path=path, message="unsupported version %d" % version)
    try:
        meta = json.loads(reader.text(length))
    except ValueError as e:
        raise exceptions.DatasetFormatError(
            path=path, message="metadata is not valid JSON: %s" % e)
    if not isinstance(meta, dict) or "model" not in meta:
        raise exceptions.DatasetFormatError(
            path=path, message="metadata carries no model configuration")
    count, = reader.unpack("I")
    params = collections.OrderedDict()
    for _ in range(count):
        name_len, = reader.unpack("H")
        name = reader.text(name_len)
        rank, = reader.unpack("B")
        shape = reader.unpack("%dI" % rank) if rank else ()
        size = int(np.prod(shape)) if rank else 1
        data = np.frombuffer(reader.take(8 * size), dtype="<f8")
        params[name] = tn.Tensor(data.reshape(shape).astype(np.float64),
                                 requires_grad=trainable, name=name)
    if reader.offset != len(reader.buf):
        raise exceptions.DatasetFormatError(
            path=path, message="trailing bytes after the last tensor")
    config = model_config.ModelConfig.from_dict(meta.pop("model"))
    transdoa.check_params(config, params)
    return Checkpoint(config, params, meta)
