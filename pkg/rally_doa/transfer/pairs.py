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

"""Ideal/imperfect SCM pairs built with the ideal-array generator."""

import numpy as np

from rally.common import logging

from rally_doa.array import dataset as doa_dataset
from rally_doa.array import simulator
from rally_doa.common import utils
from rally_doa import exceptions

LOG = logging.getLogger(__name__)

MAGIC = b"DOAP"


def extra_fields(element_count):
    return [("ideal", "<c16", (element_count * element_count,)),
            ("gen_seed", "<u8")]


class PairedSample(object):

    def __init__(self, target_scm, ideal_scm, label, gen_seed):
        self.target_scm = target_scm
        self.ideal_scm = ideal_scm
        self.label = label
        self.gen_seed = int(gen_seed)


class PairedDataset(object):
    """Records of (label, target SCM, ideal SCM, generator seed)."""

    def __init__(self, kind, labels, target_scms, ideal_scms, gen_seeds,
                 rho=0.0):
        self.kind = kind
        self.labels = np.asarray(labels, dtype=np.float64)
        self.target_scms = np.asarray(target_scms, dtype=np.complex128)
        self.ideal_scms = np.asarray(ideal_scms, dtype=np.complex128)
        self.gen_seeds = np.asarray(gen_seeds, dtype=np.uint64)
        self.rho = float(rho)
        n = self.labels.shape[0]
        if not (self.target_scms.shape[0] == self.ideal_scms.shape[0]
                == self.gen_seeds.shape[0] == n):
            raise exceptions.DimensionMismatch(
                "paired dataset fields disagree on the record count")
        if self.target_scms.shape != self.ideal_scms.shape:
            raise exceptions.DimensionMismatch(
                "target SCMs %s and ideal SCMs %s differ in shape"
                % (self.target_scms.shape, self.ideal_scms.shape))

    def __len__(self):
        return self.labels.shape[0]

    @property
    def element_count(self):
        return self.target_scms.shape[1]

    @property
    def source_count(self):
        return self.labels.shape[2]

    @property
    def label_dims(self):
        return self.labels.shape[1]

    def sample(self, index):
        return PairedSample(self.target_scms[index], self.ideal_scms[index],
                            simulator.DoaLabel.from_array(self.labels[index]),
                            self.gen_seeds[index])

    def target_dataset(self):
        """The imperfect half as a labelled dataset."""
        return doa_dataset.DoaDataset(self.kind, self.labels,
                                      self.target_scms, rho=self.rho)

    def save(self, path):
        m, n = self.element_count, len(self)
        dtype = doa_dataset.record_dtype(self.label_dims, self.source_count,
                                         m, extra_fields(m))
        records = np.zeros(n, dtype=dtype)
        records["labels"] = self.labels.reshape(n, -1)
        records["scm"] = self.target_scms.reshape(n, -1)
        records["ideal"] = self.ideal_scms.reshape(n, -1)
        records["gen_seed"] = self.gen_seeds
        header = doa_dataset.Header(self.kind, m, self.source_count,
                                    self.label_dims, self.rho, n,
                                    magic=MAGIC)
        doa_dataset.write_blob(path, header, records)
        LOG.info("Wrote %d paired records to %s" % (n, path))

    @classmethod
    def load(cls, path):
        buf = doa_dataset.read_blob(path)
        header = doa_dataset.Header.unpack(buf, path, magic=MAGIC)
        m, n = header.element_count, header.count
        dtype = doa_dataset.record_dtype(header.label_dims,
                                         header.source_count, m,
                                         extra_fields(m))
        records = doa_dataset.unpack_records(buf, header, dtype, path)
        return cls(header.kind,
                   records["labels"].reshape(n, header.label_dims,
                                             header.source_count).copy(),
                   records["scm"].reshape(n, m, m).copy(),
                   records["ideal"].reshape(n, m, m).copy(),
                   records["gen_seed"].copy(), rho=header.rho)


def make_pairs(target_dataset, scenario, seed):
    """Pair every target record with an ideal-array SCM of its labels.

    Record i is regenerated at the scenario's nominal SNR and snapshot
    count with seed mix_seed(seed, i) and no imperfections.
    """
    if target_dataset.kind != scenario.geometry.kind or \
            target_dataset.element_count != scenario.geometry.element_count:
        raise exceptions.DimensionMismatch(
            "target data (%s, M=%d) does not match scenario geometry %r"
            % (target_dataset.kind, target_dataset.element_count,
               scenario.geometry))
    if target_dataset.source_count != scenario.source_count:
        raise exceptions.DimensionMismatch(
            "target data has K=%d, scenario K=%d"
            % (target_dataset.source_count, scenario.source_count))

    def generate(i):
        gen_seed = utils.mix_seed(seed, i)
        label = simulator.DoaLabel.from_array(target_dataset.labels[i])
        snapshots, _ = simulator.simulate_snapshots(scenario, None, gen_seed,
                                                    label=label)
        return simulator.sample_covariance(snapshots), gen_seed

    results = utils.ordered_map(generate, range(len(target_dataset)))
    m = target_dataset.element_count
    ideal = np.zeros((len(results), m, m), dtype=np.complex128)
    seeds = np.zeros(len(results), dtype=np.uint64)
    for i, (scm, gen_seed) in enumerate(results):
        ideal[i] = scm
        seeds[i] = gen_seed
    return PairedDataset(target_dataset.kind, target_dataset.labels,
                         target_dataset.scms, ideal, seeds,
                         rho=target_dataset.rho)
