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

import contextlib
import hashlib
import json
import os

from concurrent import futures
import numpy as np

from rally.common import cfg

from rally_doa.common import opts  # noqa: F401
from rally_doa import exceptions

CONF = cfg.CONF

THREADS_ENV = "DOA_THREADS"


def mix_seed(seed, index):
    """Derive the 64-bit seed of record `index` from a run seed."""
    state = np.random.SeedSequence([int(seed), int(index)]).generate_state(
        1, dtype=np.uint64)
    return int(state[0])


ROLE_STREAMS = {"train": 1, "val": 2, "test": 3, "pairs": 4}


def role_seed(seed, role):
    """Seed of one dataset role (train, val, test, pairs) of a run."""
    state = np.random.SeedSequence(
        [int(seed), 0, ROLE_STREAMS[role]]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def spawn_generators(seed, count):
    """Independent generators deterministically derived from one seed."""
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.default_rng(child) for child in children]


def thread_count():
    """Worker threads allowed for internal parallelism (0 - sequential)."""
    value = os.environ.get(THREADS_ENV)
    if value not in (None, ""):
        return max(0, int(value))
    return CONF.doa.threads


def ordered_map(func, items):
    """Map `func` over `items`, results always in input order."""
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with futures.ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def canonical_json(data):
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(config):
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


def file_digest(path):
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def parse_range(value):
    """Parse `lo:hi:step` into an inclusive list of floats."""
    try:
        lo, hi, step = (float(p) for p in value.split(":"))
    except ValueError:
        raise exceptions.InvalidArgument(
            "range '%s' must look like lo:hi:step" % value)
    if step <= 0 or hi < lo:
        raise exceptions.InvalidArgument(
            "range '%s' needs step > 0 and hi >= lo" % value)
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


@contextlib.contextmanager
def open_output(path, mode="w"):
    """Open `path` for writing, creating its directory.

    OS errors raised while creating or writing the file surface as
    :class:`OutputError`.
    """
    try:
        directory = os.path.dirname(os.path.abspath(path))
        if not os.path.isdir(directory):
            os.makedirs(directory)
        with open(path, mode) as f:
            yield f
    except EnvironmentError as e:
        raise exceptions.OutputError(path=path,
                                     message=e.strerror or str(e))
