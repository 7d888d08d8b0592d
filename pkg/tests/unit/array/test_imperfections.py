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

from rally_doa.array import geometry as geo
from rally_doa.array import imperfections
from rally_doa import exceptions

GAMMA = 0.3 * np.exp(1j * np.deg2rad(60.0))


def test_zero_rho_zeroes_everything():
    imp = imperfections.build_imperfections(0.0, None, 8, gamma=GAMMA)
    assert not imp.e_pos.any()
    assert not imp.e_gain.any()
    assert not imp.e_phase.any()
    assert not imp.e_mc.any()
    assert imp.is_ideal


def test_full_rho_block_patterns():
    imp = imperfections.build_imperfections(1.0, None, 8, gamma=GAMMA)
    np.testing.assert_allclose(imp.e_gain,
                               [0, .2, .2, .2, .2, -.2, -.2, -.2])
    np.testing.assert_allclose(imp.e_phase_deg,
                               [0, -30, -30, -30, -30, 30, 30, 30])
    np.testing.assert_allclose(imp.e_pos,
                               [0, -.1, -.1, -.1, -.1, .1, .1, .1])


def test_coupling_matrix_is_toeplitz_in_gamma():
    imp = imperfections.build_imperfections(1.0, None, 8, gamma=GAMMA)
    assert imp.e_mc[0, 1] == pytest.approx(0.15 + 0.2598j, abs=1e-4)
    assert imp.e_mc[3, 2] == pytest.approx(0.15 + 0.2598j, abs=1e-4)
    assert imp.e_mc[0, 0] == pytest.approx(1.0)
    assert imp.e_mc[5, 2] == pytest.approx(GAMMA ** 3)


def test_zero_diagonal_variant():
    imp = imperfections.build_imperfections(0.5, None, 6, gamma=GAMMA,
                                            mc_zero_diag=True)
    assert not np.diag(imp.e_mc).any()
    assert imp.e_mc[1, 2] == pytest.approx(0.5 * GAMMA)


@pytest.mark.parametrize("rho", [-0.1, 1.5])
def test_rho_range(rho):
    with pytest.raises(exceptions.InvalidArgument):
        imperfections.build_imperfections(rho, None, 8)


def test_gamma_must_be_inside_unit_circle():
    with pytest.raises(exceptions.InvalidArgument):
        imperfections.build_imperfections(0.5, None, 8, gamma=1.0)


def test_unknown_flag_rejected():
    with pytest.raises(exceptions.InvalidArgument):
        imperfections.normalize_flags({"gain": True, "drift": True})


def test_partial_flag_mapping_disables_the_rest():
    assert imperfections.normalize_flags({"gain": True}) == {
        "position": False, "gain": True, "phase": False, "coupling": False}


@pytest.mark.parametrize("kind", [geo.ULA, geo.UCA])
def test_zero_rho_steering_is_ideal(kind):
    g = geo.ArrayGeometry(kind, 8)
    imp = imperfections.build_imperfections(0.0, None, 8, geometry=g)
    phi = None if kind == geo.ULA else 35.0
    np.testing.assert_allclose(
        imperfections.perturbed_steering(g, imp, 23.0, phi),
        geo.steering(g, 23.0, phi), atol=1e-12)


def test_gain_only_on_broadside():
    g = geo.ArrayGeometry.ula(8)
    imp = imperfections.build_imperfections(1.0, {"gain": True}, 8)
    np.testing.assert_allclose(
        imperfections.perturbed_steering(g, imp, 0.0),
        [1, 1.2, 1.2, 1.2, 1.2, 0.8, 0.8, 0.8], atol=1e-12)


def test_phase_only_on_broadside():
    g = geo.ArrayGeometry.ula(8)
    imp = imperfections.build_imperfections(1.0, {"phase": True}, 8)
    a = imperfections.perturbed_steering(g, imp, 0.0)
    np.testing.assert_allclose(np.abs(a), np.ones(8), atol=1e-12)
    np.testing.assert_allclose(np.angle(a), imp.e_phase, atol=1e-12)


def test_coupling_only_matches_literal_formula():
    g = geo.ArrayGeometry.ula(8)
    imp = imperfections.build_imperfections(0.7, {"coupling": True}, 8,
                                            gamma=GAMMA)
    a = geo.steering_ula(g, 17.0)
    np.testing.assert_allclose(
        imperfections.perturbed_steering(g, imp, 17.0),
        (np.eye(8) + imp.e_mc).dot(a), atol=1e-12)


@pytest.mark.parametrize("kind", [geo.ULA, geo.UCA])
def test_rho_continuity(kind):
    g = geo.ArrayGeometry(kind, 8)
    phi = None if kind == geo.ULA else 40.0
    eps = 1e-6
    slopes = []
    for rho in (0.2, 0.6):
        lo = imperfections.build_imperfections(rho, None, 8, geometry=g)
        hi = imperfections.build_imperfections(rho + eps, None, 8,
                                               geometry=g)
        diff = (imperfections.perturbed_steering(g, hi, 31.0, phi)
                - imperfections.perturbed_steering(g, lo, 31.0, phi))
        slopes.append(np.max(np.abs(diff)) / eps)
    assert max(slopes) < 50.0


def test_mismatched_dimensions():
    g = geo.ArrayGeometry.ula(8)
    imp = imperfections.build_imperfections(0.5, None, 6)
    with pytest.raises(exceptions.InvalidArgument):
        imperfections.perturbed_steering(g, imp, 0.0)


def test_uca_coupling_follows_chord_order():
    g = geo.ArrayGeometry.uca(12)
    imp = imperfections.build_imperfections(1.0, None, 12, gamma=GAMMA,
                                            geometry=g)
    assert imp.e_pos.shape == (12, 2)
    assert imp.e_mc[0, 1] == pytest.approx(GAMMA)
    assert imp.e_mc[0, 11] == pytest.approx(GAMMA)
    np.testing.assert_allclose(imp.e_mc, imp.e_mc.T, atol=1e-12)
