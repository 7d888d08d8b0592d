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
from hypothesis import given
from hypothesis import strategies as st

from rally_doa.array import geometry as geo
from rally_doa import exceptions


def test_ula_broadside_is_all_ones():
    a = geo.steering_ula(geo.ArrayGeometry.ula(4), 0.0)
    np.testing.assert_allclose(a, np.ones(4), atol=1e-12)


def test_ula_thirty_degrees_steps_quarter_turn():
    g = geo.ArrayGeometry.ula(4)
    np.testing.assert_allclose(geo.steering_ula(g, 30.0),
                               [1, -1j, -1, 1j], atol=1e-12)
    np.testing.assert_allclose(geo.steering_ula(g, -30.0),
                               [1, 1j, -1, -1j], atol=1e-12)


@given(st.floats(min_value=-90, max_value=90))
def test_ula_mirror_angles_are_conjugate(theta):
    g = geo.ArrayGeometry.ula(8)
    np.testing.assert_allclose(geo.steering_ula(g, -theta),
                               np.conj(geo.steering_ula(g, theta)),
                               atol=1e-12)


def test_uca_zero_elevation_is_all_ones():
    g = geo.ArrayGeometry.uca(12, radius=1.0)
    for theta in (-170.0, 0.0, 45.0):
        np.testing.assert_allclose(geo.steering_uca(g, theta, 0.0),
                                   np.ones(12), atol=1e-12)


def test_uca_hand_evaluated_endfire():
    g = geo.ArrayGeometry.uca(4, radius=0.5)
    expected = np.exp(-1j * np.pi * np.array([1.0, 0.0, -1.0, 0.0]))
    np.testing.assert_allclose(geo.steering_uca(g, 0.0, 90.0), expected,
                               atol=1e-12)


def test_uca_rotation_permutes_cyclically():
    g = geo.ArrayGeometry.uca(12)
    a = geo.steering_uca(g, 17.0, 40.0)
    rotated = geo.steering_uca(g, 17.0 + 30.0, 40.0)
    np.testing.assert_allclose(rotated, np.roll(a, 1), atol=1e-12)


def test_steering_rejects_wrong_kind():
    with pytest.raises(exceptions.InvalidGeometry):
        geo.steering_ula(geo.ArrayGeometry.uca(8), 0.0)
    with pytest.raises(exceptions.InvalidGeometry):
        geo.steering_uca(geo.ArrayGeometry.ula(8), 0.0, 10.0)


def test_manifold_columns_match_steering():
    g = geo.ArrayGeometry.uca(12)
    a = geo.manifold(g, [-100.0, 20.0], [10.0, 55.0])
    np.testing.assert_allclose(a[:, 1], geo.steering_uca(g, 20.0, 55.0),
                               atol=1e-12)
    u = geo.ArrayGeometry.ula(8)
    np.testing.assert_allclose(geo.manifold(u, [12.5])[:, 0],
                               geo.steering_ula(u, 12.5), atol=1e-12)


@pytest.mark.parametrize("kwargs", [dict(kind="URA", element_count=4),
                                    dict(kind=geo.ULA, element_count=1),
                                    dict(kind=geo.ULA, element_count=4,
                                         spacing=0.0),
                                    dict(kind=geo.UCA, element_count=4,
                                         radius=-1.0)])
def test_geometry_validation(kwargs):
    with pytest.raises(exceptions.InvalidArgument):
        geo.ArrayGeometry(**kwargs)


def test_default_uca_radius_gives_half_wavelength_chord():
    g = geo.ArrayGeometry.uca(12)
    assert g.min_chord() == pytest.approx(0.5)
    assert geo.ArrayGeometry.from_dict(g.to_dict()) == g
