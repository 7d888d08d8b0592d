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

"""Parameterized hardware imperfections of the array.

A single intensity rho in [0, 1] scales four kinds of deviation from the
ideal array: element position bias, gain and phase inconsistency and
mutual coupling between elements.
"""

import numpy as np
from scipy import linalg

from rally.common import cfg

from rally_doa.array import geometry as geo
from rally_doa.common import opts  # noqa: F401
from rally_doa import exceptions

CONF = cfg.CONF

FLAG_NAMES = ("position", "gain", "phase", "coupling")

POSITION_BIAS = (-0.2, 0.2)
GAIN_BIAS = (0.2, -0.2)
PHASE_BIAS_DEG = (-30.0, 30.0)


def default_gamma():
    """Adjacent-element coupling coefficient from configuration."""
    return CONF.doa.coupling_magnitude * np.exp(
        1j * np.deg2rad(CONF.doa.coupling_phase))


def block_pattern(element_count, first, second):
    """[0, first, ..., first, second, ..., second] of length M.

    Entries 1..ceil((M-1)/2) take `first`, the remainder `second`.
    """
    pattern = np.zeros(element_count, dtype=np.float64)
    split = 1 + int(np.ceil((element_count - 1) / 2.0))
    pattern[1:split] = first
    pattern[split:] = second
    return pattern


def normalize_flags(flags):
    """Turn None, an iterable of names or a mapping into a flag dict."""
    if flags is None:
        return dict((name, True) for name in FLAG_NAMES)
    if isinstance(flags, dict):
        unknown = set(flags) - set(FLAG_NAMES)
        if unknown:
            raise exceptions.InvalidArgument(
                "unknown imperfection flags: %s" % ", ".join(sorted(unknown)))
        return dict((name, bool(flags.get(name, False)))
                    for name in FLAG_NAMES)
    names = set(flags)
    unknown = names - set(FLAG_NAMES)
    if unknown:
        raise exceptions.InvalidArgument(
            "unknown imperfection flags: %s" % ", ".join(sorted(unknown)))
    return dict((name, name in names) for name in FLAG_NAMES)


class ImperfectionSpec(object):
    """Bias vectors and coupling matrix of an imperfect array.

    `e_pos` has shape (M,) for a ULA and (M, 2) for a UCA, in wavelengths.
    `e_phase` is kept in radians; `e_phase_deg` gives degrees.
    """

    def __init__(self, rho, flags, gamma, e_pos, e_gain, e_phase, e_mc,
                 kind=geo.ULA, mc_zero_diag=False):
        self.rho = float(rho)
        self.flags = normalize_flags(flags)
        self.gamma = complex(gamma)
        self.e_pos = e_pos
        self.e_gain = e_gain
        self.e_phase = e_phase
        self.e_mc = e_mc
        self.kind = kind
        self.mc_zero_diag = bool(mc_zero_diag)

    @property
    def element_count(self):
        return self.e_gain.shape[0]

    @property
    def e_phase_deg(self):
        return np.rad2deg(self.e_phase)

    @property
    def is_ideal(self):
        return self.rho == 0.0 or not any(self.flags.values())

    @property
    def effective_rho(self):
        """rho as recorded in dataset headers; 0 when nothing is active."""
        return 0.0 if self.is_ideal else self.rho

    def to_dict(self):
        return {"rho": self.rho,
                "flags": dict(self.flags),
                "gamma": [self.gamma.real, self.gamma.imag],
                "mc_zero_diag": self.mc_zero_diag}


def build_imperfections(rho, flags, element_count, gamma=None,
                        geometry=None, mc_zero_diag=False):
    """Build the rho-scaled imperfection vectors and coupling matrix.

    :param rho: intensity in [0, 1]
    :param flags: active imperfections (names from FLAG_NAMES or mapping)
    :param element_count: number of elements M
    :param gamma: adjacent coupling coefficient, |gamma| < 1
    :param geometry: array geometry; a half-wavelength ULA when omitted
    :param mc_zero_diag: zero the diagonal of the coupling matrix
    """
    if not 0.0 <= rho <= 1.0:
        raise exceptions.InvalidArgument(
            "rho must lie in [0, 1], got %s" % rho)
    if gamma is None:
        gamma = default_gamma()
    if abs(gamma) >= 1.0:
        raise exceptions.InvalidArgument(
            "coupling coefficient must satisfy |gamma| < 1, got %s"
            % abs(gamma))
    if geometry is None:
        geometry = geo.ArrayGeometry.ula(element_count)
    if geometry.element_count != element_count:
        raise exceptions.DimensionMismatch(
            "geometry has %d elements, imperfections asked for %d"
            % (geometry.element_count, element_count))

    m = element_count
    scale = geometry.min_chord()
    pos = rho * block_pattern(m, *POSITION_BIAS) * scale
    if geometry.kind == geo.UCA:
        pos = np.stack([pos, pos], axis=1)
    e_gain = rho * block_pattern(m, *GAIN_BIAS)
    e_phase = rho * np.deg2rad(block_pattern(m, *PHASE_BIAS_DEG))

    if geometry.kind == geo.ULA:
        column = rho * gamma ** np.arange(m)
        e_mc = linalg.toeplitz(column, column)
    else:
        coords = geometry.positions()
        chords = np.linalg.norm(coords[:, None, :] - coords[None, :, :],
                                axis=2)
        order = np.rint(chords / geometry.min_chord())
        e_mc = rho * gamma ** order
    e_mc = np.asarray(e_mc, dtype=np.complex128)
    if mc_zero_diag:
        np.fill_diagonal(e_mc, 0.0)

    return ImperfectionSpec(rho, flags, gamma, pos, e_gain, e_phase, e_mc,
                            kind=geometry.kind, mc_zero_diag=mc_zero_diag)


def ideal(geometry):
    """Imperfection spec with every bias at zero."""
    return build_imperfections(0.0, None, geometry.element_count,
                               geometry=geometry)


def _check(geometry, imp):
    if imp.element_count != geometry.element_count or \
            imp.kind != geometry.kind:
        raise exceptions.InvalidArgument(
            "imperfections built for %s M=%d do not match %r"
            % (imp.kind, imp.element_count, geometry))


def perturbed_manifold(geometry, imp, thetas, phis=None):
    """Steering matrix of the imperfect array, one column per source."""
    if imp is None or imp.is_ideal:
        if imp is not None:
            _check(geometry, imp)
        return geo.manifold(geometry, thetas, phis)
    _check(geometry, imp)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
    flags = imp.flags

    pos_bias = imp.e_pos if flags["position"] else np.zeros_like(imp.e_pos)
    if geometry.kind == geo.ULA:
        m = np.arange(geometry.element_count, dtype=np.float64)
        positions = m * geometry.spacing + pos_bias
        a = np.stack([geo.ula_phase(positions, t) for t in thetas], axis=1)
    else:
        phis = np.atleast_1d(np.asarray(phis, dtype=np.float64))
        coords = geometry.positions() + pos_bias
        a = np.stack([geo.uca_phase(coords, t, p)
                      for t, p in zip(thetas, phis)], axis=1)

    if flags["phase"]:
        a = np.exp(1j * imp.e_phase)[:, None] * a
    if flags["gain"]:
        a = (1.0 + imp.e_gain)[:, None] * a
    if flags["coupling"]:
        a = a + imp.e_mc.dot(a)
    return a


def perturbed_steering(geometry, imp, theta_deg, phi_deg=None):
    """Steering vector with position, gain, phase and coupling errors.

    a(theta, e) = (I + E_mc) (I + Diag(e_gain)) Diag(exp(j e_phase))
    a(theta, p + e_pos), each factor present only when its flag is set.
    """
    if geometry.kind == geo.UCA and phi_deg is None:
        raise exceptions.InvalidArgument("UCA steering needs an elevation")
    if imp is None or imp.is_ideal:
        if imp is not None:
            _check(geometry, imp)
        return geo.steering(geometry, theta_deg, phi_deg)
    phis = None if phi_deg is None else [phi_deg]
    return perturbed_manifold(geometry, imp, [theta_deg], phis)[:, 0]
