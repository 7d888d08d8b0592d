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

"""Labelled SCM datasets and their little-endian file format.

Layout of a ``DOA1`` file::

    magic "DOA1" | u32 version | u32 M | u32 K | u8 kind | u8 dims |
    u16 reserved | f64 rho | u64 count | count x (labels, scm)

Labels are K*dims f64 degrees (azimuths, then elevations); the SCM is
row-major M*M complex128 stored as (re, im) pairs.
"""

import struct

import numpy as np

from rally.common import logging

from rally_doa.array import geometry as geo
from rally_doa.array import simulator
from rally_doa.common import utils
from rally_doa import exceptions

LOG = logging.getLogger(__name__)

MAGIC = b"DOA1"
VERSION = 1
HEADER = struct.Struct("<4sIIIBBHdQ")
KIND_CODES = {geo.ULA: 0, geo.UCA: 1}
CODE_KINDS = {v: k for k, v in KIND_CODES.items()}


class Header(object):

    def __init__(self, kind, element_count, source_count, label_dims, rho,
                 count, magic=MAGIC):
        self.kind = kind
        self.element_count = int(element_count)
        self.source_count = int(source_count)
        self.label_dims = int(label_dims)
        self.rho = float(rho)
        self.count = int(count)
        self.magic = magic

    def pack(self):
        return HEADER.pack(self.magic, VERSION, self.element_count,
                           self.source_count, KIND_CODES[self.kind],
                           self.label_dims, 0, self.rho, self.count)

    @classmethod
    def unpack(cls, buf, path, magic=MAGIC):
        if len(buf) < HEADER.size:
            raise exceptions.DatasetFormatError(
                path=path, message="file is shorter than its header")
        (got, version, m, k, kind, dims, _reserved, rho,
         count) = HEADER.unpack_from(buf)
        if got != magic:
            raise exceptions.DatasetFormatError(
                path=path, message="bad magic %r, expected %r" % (got, magic))
        if version != VERSION:
            raise exceptions.DatasetFormatError(
                path=path, message="unsupported version %d" % version)
        if kind not in CODE_KINDS or dims not in (1, 2):
            raise exceptions.DatasetFormatError(
                path=path, message="bad array kind %d or label dims %d"
                                   % (kind, dims))
        return cls(CODE_KINDS[kind], m, k, dims, rho, count, magic=magic)


def record_dtype(label_dims, source_count, element_count, extra=()):
    """numpy dtype of one packed record, optionally with extra fields."""
    fields = [("labels", "<f8", (label_dims * source_count,)),
              ("scm", "<c16", (element_count * element_count,))]
    return np.dtype(fields + list(extra))


def read_blob(path):
    try:
        with open(path, "rb") as f:
            return f.read()
    except IOError as e:
        raise exceptions.DatasetFormatError(path=path, message=str(e))


def unpack_records(buf, header, dtype, path):
    expected = HEADER.size + header.count * dtype.itemsize
    if len(buf) != expected:
        raise exceptions.DatasetFormatError(
            path=path, message="expected %d bytes for %d records, got %d"
                               % (expected, header.count, len(buf)))
    return np.frombuffer(buf, dtype=dtype, count=header.count,
                         offset=HEADER.size)


def write_blob(path, header, records):
    with utils.open_output(path, "wb") as f:
        f.write(header.pack())
        f.write(records.tobytes())


class DoaDataset(object):
    """In-memory labelled SCMs.

    :param kind: array kind the SCMs were simulated for
    :param labels: float array (N, dims, K), degrees
    :param scms: complex array (N, M, M)
    :param rho: imperfection intensity recorded in the file header
    """

    def __init__(self, kind, labels, scms, rho=0.0):
        self.kind = kind
        self.labels = np.asarray(labels, dtype=np.float64)
        self.scms = np.asarray(scms, dtype=np.complex128)
        self.rho = float(rho)
        if self.labels.ndim != 3 or self.scms.ndim != 3:
            raise exceptions.DimensionMismatch(
                "labels must be (N, dims, K) and SCMs (N, M, M), got %s "
                "and %s" % (self.labels.shape, self.scms.shape))
        if self.labels.shape[0] != self.scms.shape[0]:
            raise exceptions.DimensionMismatch(
                "%d labels for %d SCMs" % (self.labels.shape[0],
                                           self.scms.shape[0]))

    @property
    def element_count(self):
        return self.scms.shape[1]

    @property
    def source_count(self):
        return self.labels.shape[2]

    @property
    def label_dims(self):
        return self.labels.shape[1]

    @property
    def thetas(self):
        return self.labels[:, 0, :]

    @property
    def phis(self):
        return self.labels[:, 1, :] if self.label_dims == 2 else None

    def __len__(self):
        return self.labels.shape[0]

    def record(self, index):
        label = simulator.DoaLabel.from_array(self.labels[index])
        return simulator.Scm(self.scms[index], label, {"index": index})

    def subset(self, count):
        """The first `count` records."""
        return DoaDataset(self.kind, self.labels[:count], self.scms[:count],
                          rho=self.rho)

    def take(self, indices):
        return DoaDataset(self.kind, self.labels[indices],
                          self.scms[indices], rho=self.rho)

    def header(self, magic=MAGIC):
        return Header(self.kind, self.element_count, self.source_count,
                      self.label_dims, self.rho, len(self), magic=magic)

    def check_model(self, element_count, source_count, label_dims):
        if (self.element_count, self.source_count,
                self.label_dims) != (element_count, source_count, label_dims):
            raise exceptions.DimensionMismatch(
                "dataset is M=%d K=%d dims=%d but the model expects M=%d "
                "K=%d dims=%d" % (self.element_count, self.source_count,
                                  self.label_dims, element_count,
                                  source_count, label_dims))

    def save(self, path):
        dtype = record_dtype(self.label_dims, self.source_count,
                             self.element_count)
        records = np.zeros(len(self), dtype=dtype)
        records["labels"] = self.labels.reshape(len(self), -1)
        records["scm"] = self.scms.reshape(len(self), -1)
        write_blob(path, self.header(), records)
        LOG.info("Wrote %d records (M=%d, K=%d, rho=%g) to %s"
                 % (len(self), self.element_count, self.source_count,
                    self.rho, path))

    @classmethod
    def load(cls, path):
        buf = read_blob(path)
        header = Header.unpack(buf, path)
        dtype = record_dtype(header.label_dims, header.source_count,
                             header.element_count)
        records = unpack_records(buf, header, dtype, path)
        n, m = header.count, header.element_count
        labels = records["labels"].reshape(n, header.label_dims,
                                           header.source_count)
        scms = records["scm"].reshape(n, m, m)
        return cls(header.kind, labels.copy(), scms.copy(), rho=header.rho)


def simulate_record(scenario, imp, seed, index):
    """SCM and label array of record `index` of a run seeded with `seed`."""
    snapshots, label = simulator.simulate_snapshots(
        scenario, imp, utils.mix_seed(seed, index), index=index)
    return simulator.sample_covariance(snapshots), label.as_array()


def generate_dataset(scenario, imp, count, seed, output_path=None):
    """Simulate `count` records; write them when `output_path` is given.

    Records are independent and may be produced by a thread pool; they
    are always assembled in index order.
    """
    count = int(count)
    if count < 0:
        raise exceptions.InvalidArgument(
            "record count must be non-negative, got %d" % count)
    m = scenario.geometry.element_count
    dims = scenario.geometry.label_dims
    k = scenario.source_count

    results = utils.ordered_map(
        lambda i: simulate_record(scenario, imp, seed, i), range(count))
    labels = np.zeros((count, dims, k))
    scms = np.zeros((count, m, m), dtype=np.complex128)
    for i, (scm, label) in enumerate(results):
        scms[i] = scm
        labels[i] = label

    rho = 0.0 if imp is None else imp.effective_rho
    dataset = DoaDataset(scenario.geometry.kind, labels, scms, rho=rho)
    if output_path:
        dataset.save(output_path)
    return dataset
