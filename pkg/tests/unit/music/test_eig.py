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

from rally_doa.music import eig
from rally_doa import exceptions


def random_hermitian(rng, m):
    x = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return 0.5 * (x + x.conj().T)


def test_identity():
    values, vectors = eig.hermitian_eig(np.eye(5))
    np.testing.assert_array_equal(values, 1.0)
    np.testing.assert_allclose(vectors.conj().T.dot(vectors), np.eye(5),
                               atol=1e-12)


def test_rank_one():
    a = np.exp(1j * np.arange(6) * 0.7) / np.sqrt(6)
    values, vectors = eig.hermitian_eig(np.outer(a, a.conj()))
    np.testing.assert_allclose(values, [0, 0, 0, 0, 0, 1], atol=1e-12)
    assert abs(abs(vectors[:, -1].conj().dot(a)) - 1.0) < 1e-10


def test_random_matrices_decompose():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        m = int(rng.integers(1, 17))
        r = random_hermitian(rng, m)
        values, vectors = eig.hermitian_eig(r)
        norm = np.linalg.norm(r)
        assert np.all(np.diff(values) >= 0)
        np.testing.assert_allclose(r.dot(vectors), vectors * values,
                                   atol=1e-8 * norm)
        np.testing.assert_allclose(vectors.conj().T.dot(vectors),
                                   np.eye(m), atol=1e-10)
        np.testing.assert_allclose(values, np.linalg.eigvalsh(r),
                                   atol=1e-8 * norm)


def test_reconstruction():
    r = random_hermitian(np.random.default_rng(1), 8)
    values, vectors = eig.hermitian_eig(r)
    np.testing.assert_allclose((vectors * values).dot(vectors.conj().T), r,
                               atol=1e-8)


def test_rejects_non_hermitian():
    r = random_hermitian(np.random.default_rng(2), 4)
    r[0, 1] += 0.1
    with pytest.raises(exceptions.NotHermitian):
        eig.hermitian_eig(r)


def test_rejects_non_square():
    with pytest.raises(exceptions.DimensionMismatch):
        eig.hermitian_eig(np.zeros((2, 3)))


def test_rejects_non_finite():
    r = np.eye(3, dtype=complex)
    r[1, 1] = np.nan
    with pytest.raises(exceptions.NumericFailure):
        eig.hermitian_eig(r)
