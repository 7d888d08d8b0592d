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

"""Array geometries and ideal steering vectors.

Angles are degrees at every public boundary; element spacing and radius
are expressed in wavelengths, so the wavelength divides out of every
phase term.
"""

import numpy as np

from rally_doa import exceptions

ULA = "ULA"
UCA = "UCA"
KINDS = (ULA, UCA)


class ArrayGeometry(object):
    """Element layout of a uniform linear or circular array.

    :param kind: ULA or UCA
    :param element_count: number of elements M, at least 2
    :param spacing: ULA element spacing d in wavelengths
    :param radius: UCA radius R in wavelengths
    """

    def __init__(self, kind, element_count, spacing=0.5, radius=None):
        if kind not in KINDS:
            raise exceptions.InvalidArgument(
                "array kind must be one of %s, got %r" % (", ".join(KINDS),
                                                          kind))
        if int(element_count) < 2:
            raise exceptions.InvalidArgument(
                "array needs at least 2 elements, got %s" % element_count)
        self.kind = kind
        self.element_count = int(element_count)
        if kind == ULA:
            if spacing is None or spacing <= 0:
                raise exceptions.InvalidArgument(
                    "ULA spacing must be positive, got %s" % spacing)
            self.spacing = float(spacing)
            self.radius = None
        else:
            if radius is None:
                radius = default_uca_radius(self.element_count)
            if radius <= 0:
                raise exceptions.InvalidArgument(
                    "UCA radius must be positive, got %s" % radius)
            self.radius = float(radius)
            self.spacing = None

    @classmethod
    def ula(cls, element_count, spacing=0.5):
        return cls(ULA, element_count, spacing=spacing)

    @classmethod
    def uca(cls, element_count, radius=None):
        return cls(UCA, element_count, radius=radius)

    @property
    def label_dims(self):
        return 1 if self.kind == ULA else 2

    @property
    def sensor_azimuths(self):
        """UCA sensor azimuths 2*pi*m/M, radians."""
        m = np.arange(self.element_count)
        return 2.0 * np.pi * m / self.element_count

    def positions(self):
        """Nominal element coordinates in wavelengths, shape (M, 2)."""
        m = np.arange(self.element_count, dtype=np.float64)
        if self.kind == ULA:
            return np.stack([m * self.spacing, np.zeros_like(m)], axis=1)
        phi = self.sensor_azimuths
        return np.stack([self.radius * np.cos(phi),
                         self.radius * np.sin(phi)], axis=1)

    def min_chord(self):
        """Smallest inter-element distance in wavelengths."""
        if self.kind == ULA:
            return self.spacing
        return 2.0 * self.radius * np.sin(np.pi / self.element_count)

    def to_dict(self):
        data = {"kind": self.kind, "element_count": self.element_count}
        if self.kind == ULA:
            data["spacing"] = self.spacing
        else:
            data["radius"] = self.radius
        return data

    @classmethod
    def from_dict(cls, data):
        return cls(data["kind"], data["element_count"],
                   spacing=data.get("spacing", 0.5),
                   radius=data.get("radius"))

    def __eq__(self, other):
        return (isinstance(other, ArrayGeometry)
                and self.to_dict() == other.to_dict())

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        if self.kind == ULA:
            return "ArrayGeometry(ULA, M=%d, d=%g)" % (self.element_count,
                                                      self.spacing)
        return "ArrayGeometry(UCA, M=%d, R=%g)" % (self.element_count,
                                                  self.radius)


def default_uca_radius(element_count):
    """Radius giving half-wavelength spacing between adjacent elements."""
    return 0.5 / (2.0 * np.sin(np.pi / element_count))


def _require(geometry, kind, operation):
    if geometry.kind != kind:
        raise exceptions.InvalidGeometry(operation=operation, expected=kind,
                                         actual=geometry.kind)


def ula_phase(element_positions, theta_deg):
    """Steering vector for arbitrary positions along the ULA axis."""
    sin_theta = np.sin(np.deg2rad(theta_deg))
    return np.exp(-2j * np.pi * np.asarray(element_positions) * sin_theta)


def uca_phase(coords, theta_deg, phi_deg):
    """Steering vector for arbitrary planar element coordinates.

    With coordinates on the nominal circle this is exactly
    exp(-j*2*pi*R*cos(phi_m - theta)*sin(phi)).
    """
    theta = np.deg2rad(theta_deg)
    phi = np.deg2rad(phi_deg)
    coords = np.asarray(coords)
    projection = coords[:, 0] * np.cos(theta) + coords[:, 1] * np.sin(theta)
    return np.exp(-2j * np.pi * projection * np.sin(phi))


def steering_ula(geometry, theta_deg):
    _require(geometry, ULA, "steering_ula")
    m = np.arange(geometry.element_count, dtype=np.float64)
    return ula_phase(m * geometry.spacing, theta_deg)


def steering_uca(geometry, theta_deg, phi_deg):
    _require(geometry, UCA, "steering_uca")
    phase = np.cos(geometry.sensor_azimuths - np.deg2rad(theta_deg))
    return np.exp(-2j * np.pi * geometry.radius * phase
                  * np.sin(np.deg2rad(phi_deg)))


def steering(geometry, theta_deg, phi_deg=None):
    if geometry.kind == ULA:
        return steering_ula(geometry, theta_deg)
    if phi_deg is None:
        raise exceptions.InvalidArgument("UCA steering needs an elevation")
    return steering_uca(geometry, theta_deg, phi_deg)


def manifold(geometry, thetas, phis=None):
    """Ideal steering matrix, one column per grid/source angle."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
    if geometry.kind == ULA:
        m = np.arange(geometry.element_count, dtype=np.float64)[:, None]
        return np.exp(-2j * np.pi * geometry.spacing * m
                      * np.sin(np.deg2rad(thetas))[None, :])
    phis = np.atleast_1d(np.asarray(phis, dtype=np.float64))
    phase = np.cos(geometry.sensor_azimuths[:, None]
                   - np.deg2rad(thetas)[None, :])
    return np.exp(-2j * np.pi * geometry.radius * phase
                  * np.sin(np.deg2rad(phis))[None, :])
