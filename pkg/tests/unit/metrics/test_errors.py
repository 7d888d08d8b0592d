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

from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
import numpy as np
import pytest

from rally_doa.metrics import errors
from rally_doa import exceptions

angles = st.lists(st.floats(-90, 90), min_size=1, max_size=5)


def test_match_errors_examples():
    np.testing.assert_array_equal(errors.match_errors([3, 7], [3, 7]), 0)
    np.testing.assert_allclose(errors.match_errors([0, 10], [11, -1]),
                               [1, 1])
    np.testing.assert_allclose(errors.match_errors([0, 10], [0]), [0, 30])
    np.testing.assert_allclose(errors.match_errors([0, 10], []), [30, 30])


def test_match_errors_two_dimensional():
    truth = np.array([[0.0, 50.0], [10.0, 20.0]])
    est = np.array([[52.0, 1.0], [20.0, 13.0]])
    np.testing.assert_allclose(errors.match_errors(truth, est), [2.0, 1.0])


def test_raw_errors_examples():
    np.testing.assert_allclose(errors.raw_errors([0, 10], [11, -1]),
                               [1, 1])
    np.testing.assert_allclose(errors.raw_errors([0, 10], [50, 60]),
                               [30, 30])
    np.testing.assert_allclose(errors.raw_errors([0, 10, 20], [1]),
                               [1, 30, 30])


def test_errors_of_empty_truth():
    with pytest.raises(exceptions.EmptyInput):
        errors.match_errors([], [1.0])
    with pytest.raises(exceptions.EmptyInput):
        errors.raw_errors([], [])


def test_axes_must_agree():
    with pytest.raises(exceptions.DimensionMismatch):
        errors.match_errors([[0.0], [1.0]], [2.0])


def test_ospa_examples():
    assert errors.ospa([1, 2], [1, 2]) == 0.0
    assert errors.ospa([0], [40], p=1) == 30.0
    assert errors.ospa([0, 10], [0], p=1) == pytest.approx(15.0)
    assert errors.ospa([0, 10], [0], p=2) == pytest.approx(np.sqrt(450.0))
    assert errors.ospa([], []) == 0.0
    assert errors.ospa([], [5.0]) == 30.0


def test_cap_follows_config(conf):
    conf.set_override("error_cap", 20.0, "doa")
    assert errors.ospa([0], [40]) == 20.0
    np.testing.assert_allclose(errors.match_errors([0, 10], [0]), [0, 20])


@settings(max_examples=200, deadline=None)
@given(angles, angles, st.sampled_from([1, 2]))
def test_ospa_is_symmetric_and_bounded(a, b, p):
    forward = errors.ospa(a, b, p=p)
    assert forward == pytest.approx(errors.ospa(b, a, p=p), abs=1e-6)
    assert forward <= 30.0 + 1e-9


@settings(max_examples=200, deadline=None)
@given(angles, angles)
def test_matching_beats_sorted_pairing(truth, est):
    assert errors.match_errors(truth, est).sum() <= \
        errors.raw_errors(truth, est).sum() + 1e-9


def test_ecdf_quantile_examples():
    values = np.arange(1.0, 11.0)
    assert errors.ecdf_quantile(values, 0.9) == 9.0
    assert errors.ecdf_quantile(values, 0.1) == 1.0
    assert errors.ecdf_quantile(values, 0.999) == 10.0
    assert errors.ecdf_quantile([4.0] * 7, 0.3) == 4.0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 30), min_size=1, max_size=40),
       st.floats(0.01, 0.49), st.floats(0.5, 0.99))
def test_ecdf_quantile_is_monotone_and_order_free(values, lo, hi):
    assert errors.ecdf_quantile(values, lo) <= errors.ecdf_quantile(values,
                                                                     hi)
    assert errors.ecdf_quantile(values[::-1], lo) == \
        errors.ecdf_quantile(values, lo)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.5])
def test_ecdf_quantile_level_range(q):
    with pytest.raises(exceptions.InvalidArgument):
        errors.ecdf_quantile([1.0], q)


def test_ecdf_of_empty_list():
    with pytest.raises(exceptions.EmptyInput):
        errors.ecdf_quantile([], 0.5)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 30), min_size=1, max_size=40).flatmap(
    lambda v: st.tuples(st.just(v), st.permutations(v))),
    st.floats(0.01, 0.99))
def test_ecdf_quantile_is_a_sample_of_any_ordering(values, q):
    values, shuffled = values
    value = errors.ecdf_quantile(values, q)
    assert value == errors.ecdf_quantile(shuffled, q)
    assert value in values
    assert min(values) <= value <= max(values)


@settings(max_examples=200, deadline=None)
@given(angles.flatmap(lambda a: st.tuples(st.just(a), st.permutations(a))),
       angles, st.sampled_from([1, 2]))
def test_ospa_ignores_source_order(a, b, p):
    a, shuffled = a
    assert errors.ospa(a, a, p=p) == pytest.approx(0.0, abs=1e-6)
    assert errors.ospa(shuffled, b, p=p) == pytest.approx(
        errors.ospa(a, b, p=p), abs=1e-6)
